#pragma once

#include <stdexcept>
#include <string>

namespace qdnls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A violated precondition: bad parameters, mismatched grids, empty sets.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Rejected run configuration. `path()` is the dotted key that failed,
/// e.g. "params.alpha" or "grid.n".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qdnls
