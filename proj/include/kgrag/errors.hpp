#pragma once

#include <stdexcept>
#include <string>

namespace kgrag {

// Bad user input: malformed records, schema violations, contract breaches.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or syntactically broken input files.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: unknown keys, out-of-range values, missing files.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Provider/transport failures; retried by callers, then recorded per item.
struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kgrag
