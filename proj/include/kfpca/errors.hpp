#ifndef KFPCA_ERRORS_HPP
#define KFPCA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kfpca {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied settings (bounds, counts, bandwidths, thresholds).
class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error("configuration error: " + what) {}
};

/// Operands living on different grids or with mismatched lengths.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension error: " + what) {}
};

/// Malformed or insufficient data.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input error: " + what) {}
};

/// A numerical procedure could not produce an estimate.
class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what) : Error("estimation error: " + what) {}
};

/// Targets outside the region a parametric family can reach.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

/// A serialized document that does not follow its schema. `path` names the offending field.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& what)
      : Error("parse error at '" + path + "': " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace kfpca

#endif  // KFPCA_ERRORS_HPP
