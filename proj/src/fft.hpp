#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace spdelab::detail {

/// Unnormalised complex DFT of a fixed length backed by an FFTW plan.
/// Planning happens under a process-wide lock; execute() is reentrant and
/// works on caller-owned buffers.
class ComplexDft {
 public:
  enum class Direction { Forward, Backward };

  ComplexDft(std::size_t n, Direction dir);
  ~ComplexDft();
  ComplexDft(const ComplexDft&) = delete;
  ComplexDft& operator=(const ComplexDft&) = delete;

  std::size_t size() const noexcept { return n_; }
  void execute(std::span<std::complex<double>> in,
               std::span<std::complex<double>> out) const;

 private:
  std::size_t n_;
  void* plan_;
};

/// DST-I of length n: out_k = sum_{m=1}^{n} in_m sin(pi m k / (n+1)),
/// k = 1..n (FFTW's RODFT00 halved).
class SineTransform {
 public:
  explicit SineTransform(std::size_t n);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const noexcept { return n_; }
  void execute(std::span<double> in, std::span<double> out) const;

 private:
  std::size_t n_;
  void* plan_;
};

}  // namespace spdelab::detail
