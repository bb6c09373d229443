#pragma once

#include <stdexcept>
#include <string>

namespace namesift {

// Malformed on-disk corpus (missing manifest, bad JSON, bad gold row).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Task whose ids or gold labels violate the data model.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown feature or element id.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Invalid model or feature configuration value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid argument to an algorithm (k out of range, zero tasks, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// E' is empty: there is nothing to map documents to.
class TaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace namesift
