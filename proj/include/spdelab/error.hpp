#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spdelab {

enum class ErrorKind {
  InvalidArgument,  // violated precondition / contract
  Quadrature,       // covariance integral did not converge
  SingularSystem,   // zero pivot in a tridiagonal solve
  Embedding,        // negative circulant spectrum above the hard limit
  Divergence,       // trajectory left the overflow guard
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double residual)
      : Error(ErrorKind::Quadrature, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t step, std::size_t node)
      : Error(ErrorKind::Divergence, what), step_(step), node_(node) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t step_;
  std::size_t node_;
};

[[noreturn]] inline void contract_violation(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

inline void expects(bool cond, const char* what) {
  if (!cond) contract_violation(what);
}

}  // namespace spdelab
