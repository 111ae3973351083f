#pragma once

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <string>

#include <json.hpp>

#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/evaluation.hpp"

namespace weakspot {

struct ExternalEvaluatorConfig {
    std::string command;           // run through /bin/sh -c
    double timeout_seconds = 3600;  // per subdomain
};

namespace detail {

// Minimal bidirectional pipe to a shell command. Sequential use only.
class Subprocess {
public:
    explicit Subprocess(const std::string& command) {
        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0) {
            throw EvaluationError("pipe() failed: " + std::string(std::strerror(errno)));
        }
        pid_ = fork();
        if (pid_ < 0) {
            throw EvaluationError("fork() failed: " + std::string(std::strerror(errno)));
        }
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        in_fd_ = to_child[1];
        out_fd_ = from_child[0];
    }

    ~Subprocess() {
        if (in_fd_ >= 0) close(in_fd_);
        if (out_fd_ >= 0) close(out_fd_);
        if (pid_ > 0) {
            int status = 0;
            if (waitpid(pid_, &status, WNOHANG) == 0) {
                kill(pid_, SIGTERM);
                waitpid(pid_, &status, 0);
            }
        }
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    void write_line(const std::string& line) {
        std::string buf = line + "\n";
        std::size_t off = 0;
        while (off < buf.size()) {
            ssize_t n = ::write(in_fd_, buf.data() + off, buf.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError("external evaluator stdin closed: " +
                                      std::string(std::strerror(errno)));
            }
            off += static_cast<std::size_t>(n);
        }
    }

    // Reads one line, waiting up to timeout_seconds for data.
    std::string read_line(double timeout_seconds) {
        while (true) {
            auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            struct pollfd pfd{out_fd_, POLLIN, 0};
            int ready = poll(&pfd, 1, static_cast<int>(timeout_seconds * 1000.0));
            if (ready < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError("poll() failed: " + std::string(std::strerror(errno)));
            }
            if (ready == 0) {
                throw EvaluationError("external evaluator timed out after " +
                                      std::to_string(timeout_seconds) + " s");
            }
            char chunk[4096];
            ssize_t n = ::read(out_fd_, chunk, sizeof(chunk));
            if (n < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError("read from external evaluator failed: " +
                                      std::string(std::strerror(errno)));
            }
            if (n == 0) {
                throw EvaluationError("external evaluator closed its output" +
                                      (buffer_.empty() ? std::string()
                                                       : "; unread partial line: '" + buffer_ + "'"));
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buffer_;
};

}  // namespace detail

// Speaks the line-delimited JSON protocol with a spawned worker process.
// One request per line on the worker's stdin, one response per line on its
// stdout, matched by id:
//   -> {"id": 17, "prompt": "...", "assignment": {"weather": "sunny", ...}, "n_samples": 50}
//   <- {"id": 17, "accuracy": 0.82, "valid_samples": 50}
// The worker stays alive across requests; requests are sequential.
class ExternalEvaluator : public Evaluator {
public:
    ExternalEvaluator(ExternalEvaluatorConfig config, const AttributeSchema& schema, int n_samples)
        : config_(std::move(config)), schema_(schema), n_samples_(n_samples) {
        if (config_.command.empty()) throw ConfigError("external evaluator command is empty");
        if (n_samples_ < 1) throw ConfigError("n_samples must be >= 1");
    }

    EvaluationRecord evaluate(const Subdomain& s) override {
        if (!process_) process_ = std::make_unique<detail::Subprocess>(config_.command);

        nlohmann::json request;
        request["id"] = s.id;
        request["prompt"] = render_prompt(schema_, s);
        nlohmann::json assignment = nlohmann::json::object();
        for (std::size_t k = 0; k < schema_.num_attributes(); ++k) {
            assignment[schema_.attributes[k].name] = schema_.attributes[k].values[s.assignment[k]];
        }
        request["assignment"] = std::move(assignment);
        request["n_samples"] = n_samples_;
        process_->write_line(request.dump());

        std::string line = process_->read_line(config_.timeout_seconds);
        nlohmann::json response;
        try {
            response = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw EvaluationError("malformed evaluator response: '" + line + "' (" + e.what() + ")");
        }
        if (!response.is_object() || !response.contains("id") || !response.contains("accuracy") ||
            !response.contains("valid_samples")) {
            throw EvaluationError("evaluator response missing id/accuracy/valid_samples: '" + line + "'");
        }
        if (response["id"].get<std::uint64_t>() != s.id) {
            throw ProtocolError("evaluator response id " + response["id"].dump() +
                                " does not match request id " + std::to_string(s.id));
        }
        double accuracy = response["accuracy"].get<double>();
        if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
            throw ProtocolError("evaluator reported accuracy " + response["accuracy"].dump() +
                                " outside [0, 1] for subdomain " + std::to_string(s.id));
        }
        auto valid_samples = response["valid_samples"].get<std::int64_t>();
        if (valid_samples < 1) {
            throw ProtocolError("evaluator reported " + std::to_string(valid_samples) +
                                " valid samples for subdomain " + std::to_string(s.id));
        }

        EvaluationRecord rec;
        rec.subdomain_id = s.id;
        rec.accuracy = accuracy;
        rec.num_samples = static_cast<int>(valid_samples);
        return rec;
    }

private:
    ExternalEvaluatorConfig config_;
    const AttributeSchema& schema_;
    int n_samples_;
    std::unique_ptr<detail::Subprocess> process_;
};

inline EvaluationRecord external_evaluate(const ExternalEvaluatorConfig& config,
                                          const AttributeSchema& schema, const Subdomain& s,
                                          int n_samples) {
    ExternalEvaluator evaluator(config, schema, n_samples);
    return evaluator.evaluate(s);
}

}  // namespace weakspot
