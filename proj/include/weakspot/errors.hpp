#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace weakspot {

// Error classes map onto distinct CLI exit codes; see tools/weakspot_main.cpp.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid schema, run config, strategy parameters, dimension mismatches.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Schema validation collects every violation instead of stopping at the first.
class SchemaError : public ConfigError {
public:
    explicit SchemaError(std::vector<std::string> violations)
        : ConfigError(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "schema validation failed:";
        for (const auto& s : v) {
            out += "\n  - " + s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

// Evaluation failed: process died, timed out, or replied something unusable.
class EvaluationError : public Error {
public:
    using Error::Error;
};

// The external evaluator answered, but the answer breaks the wire contract
// (mismatched id, accuracy outside [0,1], zero valid samples).
class ProtocolError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

// A reference table is missing a row that the caller needs.
class TableIncompleteError : public Error {
public:
    using Error::Error;
};

// A selection strategy was asked for a subdomain but none remain.
class ExhaustedDomainError : public Error {
public:
    using Error::Error;
};

// Fitting was requested on an empty dataset.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Rank correlation is undefined (fewer than two points or zero rank variance).
class UndefinedCorrelationError : public Error {
public:
    using Error::Error;
};

// File could not be read, written, or parsed at the byte level.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace weakspot
