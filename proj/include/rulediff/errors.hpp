#pragma once

#include <stdexcept>
#include <string>

namespace rulediff {

// Malformed or unreadable input data (logs, model files).
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters or column mappings supplied by the caller.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Analysis cannot proceed (an input log has no traces at all).
class DegenerateError : public std::runtime_error {
public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rulediff
