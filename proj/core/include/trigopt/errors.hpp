#pragma once

#include <stdexcept>
#include <string>

namespace trigopt {

/// Caller handed us arguments that violate a documented precondition.
/// CLI maps this family to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two tensors or spectra that must share a shape do not.
class ShapeMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Dataset on disk is unusable: missing file, bad label, wrong dimensions.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss; message names the offending epoch.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trigopt
