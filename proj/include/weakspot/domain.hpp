#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "weakspot/errors.hpp"

namespace weakspot {

using SubdomainId = std::uint64_t;

struct Attribute {
    std::string name;
    std::vector<std::string> values;
};

// Conjunctive partial assignment over >= 2 attributes: a full assignment
// matching every binding is invalid.
struct ForbiddenAssignment {
    std::map<std::string, std::string> bindings;
};

struct AttributeSchema {
    std::vector<Attribute> attributes;
    std::vector<ForbiddenAssignment> constraints;
    std::string prompt_template;

    std::size_t num_attributes() const { return attributes.size(); }

    std::size_t onehot_length() const {
        std::size_t n = 0;
        for (const auto& a : attributes) n += a.values.size();
        return n;
    }

    // Product of value counts over the unconstrained space.
    std::uint64_t product_size() const {
        std::uint64_t p = 1;
        for (const auto& a : attributes) p *= a.values.size();
        return p;
    }

    std::size_t attribute_index(const std::string& name) const {
        for (std::size_t i = 0; i < attributes.size(); ++i) {
            if (attributes[i].name == name) return i;
        }
        throw ConfigError("unknown attribute: " + name);
    }

    std::size_t value_index(std::size_t attr, const std::string& value) const {
        const auto& vals = attributes[attr].values;
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (vals[i] == value) return i;
        }
        throw ConfigError("unknown value '" + value + "' for attribute '" +
                          attributes[attr].name + "'");
    }
};

// One full assignment: a value index per attribute, in schema order.
struct Subdomain {
    std::vector<std::size_t> assignment;
    SubdomainId id = 0;

    bool operator==(const Subdomain& other) const { return id == other.id; }
};

// Mixed-radix id: the first attribute is the most significant digit.
inline SubdomainId encode_id(const AttributeSchema& schema,
                             const std::vector<std::size_t>& assignment) {
    SubdomainId id = 0;
    for (std::size_t k = 0; k < schema.attributes.size(); ++k) {
        id = id * schema.attributes[k].values.size() + assignment[k];
    }
    return id;
}

inline std::vector<std::size_t> decode_id(const AttributeSchema& schema, SubdomainId id) {
    std::vector<std::size_t> assignment(schema.attributes.size());
    for (std::size_t k = schema.attributes.size(); k-- > 0;) {
        std::size_t radix = schema.attributes[k].values.size();
        assignment[k] = static_cast<std::size_t>(id % radix);
        id /= radix;
    }
    return assignment;
}

inline Subdomain make_subdomain(const AttributeSchema& schema,
                                std::vector<std::size_t> assignment) {
    Subdomain s;
    s.id = encode_id(schema, assignment);
    s.assignment = std::move(assignment);
    return s;
}

inline Subdomain subdomain_from_values(const AttributeSchema& schema,
                                       const std::vector<std::string>& values) {
    if (values.size() != schema.num_attributes()) {
        throw ConfigError("expected one value per attribute");
    }
    std::vector<std::size_t> assignment(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        assignment[k] = schema.value_index(k, values[k]);
    }
    return make_subdomain(schema, std::move(assignment));
}

inline bool matches_forbidden(const AttributeSchema& schema, const Subdomain& s,
                              const ForbiddenAssignment& f) {
    for (const auto& [name, value] : f.bindings) {
        std::size_t attr = schema.attribute_index(name);
        if (schema.attributes[attr].values[s.assignment[attr]] != value) {
            return false;
        }
    }
    return true;
}

inline bool is_valid(const AttributeSchema& schema, const Subdomain& s) {
    for (const auto& f : schema.constraints) {
        if (matches_forbidden(schema, s, f)) return false;
    }
    return true;
}

namespace detail {

// Splits the template into literal segments and placeholder attribute
// indices. Also the single source of template validation: literal braces
// are rejected, every placeholder must name an attribute, and every
// attribute must appear exactly once.
struct TemplateParts {
    std::vector<std::string> literals;       // literals.size() == placeholders.size() + 1
    std::vector<std::size_t> placeholders;   // attribute index per placeholder
};

inline TemplateParts parse_template(const AttributeSchema& schema,
                                    std::vector<std::string>* violations) {
    TemplateParts parts;
    parts.literals.emplace_back();
    const std::string& tpl = schema.prompt_template;
    std::vector<std::size_t> seen(schema.num_attributes(), 0);
    for (std::size_t i = 0; i < tpl.size();) {
        char c = tpl[i];
        if (c == '}') {
            if (violations) violations->push_back("prompt_template: stray '}' at offset " + std::to_string(i));
            return parts;
        }
        if (c != '{') {
            parts.literals.back().push_back(c);
            ++i;
            continue;
        }
        std::size_t close = tpl.find('}', i + 1);
        if (close == std::string::npos) {
            if (violations) violations->push_back("prompt_template: unclosed '{' at offset " + std::to_string(i));
            return parts;
        }
        std::string name = tpl.substr(i + 1, close - i - 1);
        if (name.find('{') != std::string::npos) {
            if (violations) violations->push_back("prompt_template: nested '{' in placeholder at offset " + std::to_string(i));
            return parts;
        }
        bool found = false;
        for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
            if (schema.attributes[k].name == name) {
                parts.placeholders.push_back(k);
                ++seen[k];
                found = true;
                break;
            }
        }
        if (!found && violations) {
            violations->push_back("prompt_template: placeholder '{" + name + "}' matches no attribute");
        }
        parts.literals.emplace_back();
        i = close + 1;
    }
    if (violations) {
        for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
            if (seen[k] == 0) {
                violations->push_back("prompt_template: attribute '" + schema.attributes[k].name + "' has no placeholder");
            } else if (seen[k] > 1) {
                violations->push_back("prompt_template: attribute '" + schema.attributes[k].name + "' appears " + std::to_string(seen[k]) + " times");
            }
        }
    }
    return parts;
}

}  // namespace detail

// Collects every violation; empty result means the schema is valid.
inline std::vector<std::string> schema_violations(const AttributeSchema& schema) {
    std::vector<std::string> v;
    std::set<std::string> names;
    for (const auto& a : schema.attributes) {
        if (!names.insert(a.name).second) {
            v.push_back("duplicate attribute name '" + a.name + "'");
        }
        if (a.values.empty()) {
            v.push_back("attribute '" + a.name + "' has no values");
        }
        std::set<std::string> vals;
        for (const auto& val : a.values) {
            if (!vals.insert(val).second) {
                v.push_back("attribute '" + a.name + "' has duplicate value '" + val + "'");
            }
        }
    }
    if (schema.attributes.empty()) {
        v.push_back("schema has no attributes");
    }
    for (std::size_t i = 0; i < schema.constraints.size(); ++i) {
        const auto& f = schema.constraints[i];
        if (f.bindings.size() < 2) {
            v.push_back("constraint #" + std::to_string(i) + " binds fewer than two attributes");
        }
        for (const auto& [name, value] : f.bindings) {
            const Attribute* attr = nullptr;
            for (const auto& a : schema.attributes) {
                if (a.name == name) {
                    attr = &a;
                    break;
                }
            }
            if (!attr) {
                v.push_back("constraint #" + std::to_string(i) + ": unknown attribute '" + name + "'");
            } else if (std::find(attr->values.begin(), attr->values.end(), value) == attr->values.end()) {
                v.push_back("constraint #" + std::to_string(i) + ": attribute '" + name +
                            "' has no value '" + value + "'");
            }
        }
    }
    detail::parse_template(schema, &v);
    return v;
}

inline void validate_schema(const AttributeSchema& schema) {
    auto v = schema_violations(schema);
    if (!v.empty()) throw SchemaError(std::move(v));
}

// The evaluation domain: every constraint-valid full assignment, ascending by id.
struct Domain {
    AttributeSchema schema;
    std::vector<Subdomain> subdomains;

    std::size_t size() const { return subdomains.size(); }

    // Position of an id in `subdomains`, or npos if the id is invalid.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t position_of(SubdomainId id) const {
        auto it = std::lower_bound(subdomains.begin(), subdomains.end(), id,
                                   [](const Subdomain& s, SubdomainId v) { return s.id < v; });
        if (it == subdomains.end() || it->id != id) return npos;
        return static_cast<std::size_t>(it - subdomains.begin());
    }

    const Subdomain& at_id(SubdomainId id) const {
        std::size_t pos = position_of(id);
        if (pos == npos) throw ConfigError("subdomain id " + std::to_string(id) + " is not in the domain");
        return subdomains[pos];
    }
};

inline Domain build_domain(AttributeSchema schema) {
    validate_schema(schema);
    Domain d;
    d.schema = std::move(schema);
    std::vector<std::size_t> assignment(d.schema.num_attributes(), 0);
    // Odometer enumeration emits ids in ascending order by construction.
    while (true) {
        Subdomain s = make_subdomain(d.schema, assignment);
        if (is_valid(d.schema, s)) {
            d.subdomains.push_back(std::move(s));
        }
        std::size_t k = assignment.size();
        while (k-- > 0) {
            if (++assignment[k] < d.schema.attributes[k].values.size()) break;
            assignment[k] = 0;
            if (k == 0) return d;
        }
    }
}

inline std::string render_prompt(const AttributeSchema& schema, const Subdomain& s) {
    auto parts = detail::parse_template(schema, nullptr);
    std::string out = parts.literals[0];
    for (std::size_t i = 0; i < parts.placeholders.size(); ++i) {
        std::size_t attr = parts.placeholders[i];
        out += schema.attributes[attr].values[s.assignment[attr]];
        out += parts.literals[i + 1];
    }
    return out;
}

// One block per attribute, one indicator per value, schema order.
inline std::vector<double> encode_onehot(const AttributeSchema& schema, const Subdomain& s) {
    std::vector<double> x(schema.onehot_length(), 0.0);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < schema.num_attributes(); ++k) {
        x[offset + s.assignment[k]] = 1.0;
        offset += schema.attributes[k].values.size();
    }
    return x;
}

// Flat feature index of (attribute, value) in the one-hot layout.
inline std::size_t onehot_offset(const AttributeSchema& schema, std::size_t attr, std::size_t value) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < attr; ++k) offset += schema.attributes[k].values.size();
    return offset + value;
}

// FNV-1a over a canonical rendering of the schema. Embedded in every
// output file so cross-schema mixing is always detectable.
inline std::string schema_fingerprint(const AttributeSchema& schema) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    };
    for (const auto& a : schema.attributes) {
        feed("attr");
        feed(a.name);
        for (const auto& v : a.values) feed(v);
    }
    for (const auto& f : schema.constraints) {
        feed("forbid");
        for (const auto& [name, value] : f.bindings) {
            feed(name);
            feed(value);
        }
    }
    feed("template");
    feed(schema.prompt_template);
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace weakspot
