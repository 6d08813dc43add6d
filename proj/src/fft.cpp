#include "fft.hpp"

#include <mutex>
#include <vector>

#include <fftw3.h>

#include "spdelab/error.hpp"

namespace spdelab::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

ComplexDft::ComplexDft(std::size_t n, Direction dir) : n_(n), plan_(nullptr) {
  expects(n >= 1, "dft: length must be positive");
  std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch_in.data()),
      reinterpret_cast<fftw_complex*>(scratch_out.data()),
      dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_ == nullptr) throw Error(ErrorKind::InvalidArgument, "dft: planning failed");
}

ComplexDft::~ComplexDft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ComplexDft::execute(std::span<std::complex<double>> in,
                         std::span<std::complex<double>> out) const {
  expects(in.size() == n_ && out.size() == n_, "dft: buffer length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(plan_),
                   reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

SineTransform::SineTransform(std::size_t n) : n_(n), plan_(nullptr) {
  expects(n >= 1, "dst: length must be positive");
  std::vector<double> scratch_in(n), scratch_out(n);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_r2r_1d(static_cast<int>(n), scratch_in.data(),
                           scratch_out.data(), FFTW_RODFT00,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_ == nullptr) throw Error(ErrorKind::InvalidArgument, "dst: planning failed");
}

SineTransform::~SineTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void SineTransform::execute(std::span<double> in, std::span<double> out) const {
  expects(in.size() == n_ && out.size() == n_, "dst: buffer length mismatch");
  fftw_execute_r2r(static_cast<fftw_plan>(plan_), in.data(), out.data());
  for (double& v : out) v *= 0.5;
}

}  // namespace spdelab::detail
