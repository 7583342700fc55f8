#ifndef BDGM_ERROR_HPP
#define BDGM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bdgm {

// Coarse failure classes; the CLI maps them onto exit codes 1/2/3.
enum class ErrorKind { usage, data, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class NotPositiveDefinite : public NumericalError {
 public:
  explicit NotPositiveDefinite(const std::string& where)
      : NumericalError("matrix is not positive definite: " + where) {}
};

/// Raised by the iterative completion when the sweep limit is hit.
class ConvergenceFailure : public NumericalError {
 public:
  ConvergenceFailure(int sweeps, double residual)
      : NumericalError("completion did not converge after " + std::to_string(sweeps) +
                       " sweeps (last change " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace bdgm

#endif  // BDGM_ERROR_HPP
