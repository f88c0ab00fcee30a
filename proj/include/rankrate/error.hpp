#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace rankrate {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, records).
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad run configuration or violated call contract.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical or modelling failure during estimation.
class ModelError : public Error {
 public:
  using Error::Error;
};

namespace log {

using Sink = std::function<void(const std::string&)>;

// Replaces the warning sink and returns the previous one; an empty function
// silences warnings.
Sink set_warning_sink(Sink sink);
void warn(const std::string& message);

}  // namespace log
}  // namespace rankrate
