#include "spdelab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "spdelab/error.hpp"

namespace spdelab {

void validate(const NoiseSpec& spec) {
  expects(spec.gamma >= 0.0 && std::isfinite(spec.gamma), "noise: gamma must be >= 0");
  expects(spec.eps_q > 0.0, "noise: eps_q must be positive");
  expects(spec.J >= 1, "noise: J must be at least 1");
}

double eigenvalue(const NoiseSpec& spec, std::size_t j) {
  expects(j >= 1, "noise: mode index starts at 1");
  return std::pow(static_cast<double>(j), -(2.0 * spec.gamma + 1.0 + spec.eps_q));
}

std::size_t default_truncation(double h, double gamma, std::size_t cap) {
  expects(h > 0.0 && h <= 1.0, "noise: mesh size must lie in (0, 1]");
  expects(gamma > 0.0, "noise: automatic J needs gamma > 0");
  const double J = std::ceil(std::pow(h, -2.0 / gamma) - 1e-9);
  if (!(J < static_cast<double>(cap))) return cap;
  return std::max<std::size_t>(1, static_cast<std::size_t>(J));
}

BrownianPath::BrownianPath(std::size_t steps, std::size_t modes, double dt_fine)
    : steps_(steps), modes_(modes), dt_fine_(dt_fine), data_(steps * modes, 0.0) {
  expects(steps >= 1 && modes >= 1, "brownian path: empty shape");
  expects(dt_fine > 0.0, "brownian path: dt must be positive");
}

std::span<double> BrownianPath::row(std::size_t n) {
  expects(n < steps_, "brownian path: row out of range");
  return {data_.data() + n * modes_, modes_};
}

std::span<const double> BrownianPath::row(std::size_t n) const {
  expects(n < steps_, "brownian path: row out of range");
  return {data_.data() + n * modes_, modes_};
}

std::vector<double> BrownianPath::aggregate(std::size_t n, std::size_t r) const {
  expects(r >= 1, "brownian path: ratio must be positive");
  expects((n + 1) * r <= steps_, "brownian path: coarse step beyond the path");
  std::vector<double> acc(modes_, 0.0);
  for (std::size_t m = n * r; m < (n + 1) * r; ++m) {
    const auto src = row(m);
    for (std::size_t j = 0; j < modes_; ++j) acc[j] += src[j];
  }
  return acc;
}

void draw_increments(NormalStream& rng, double dt_fine, std::span<double> row) {
  const double sd = std::sqrt(dt_fine);
  for (double& v : row) v = sd * rng.next();
}

BrownianPath generate_path(const NoiseSpec& spec, std::size_t steps,
                           double dt_fine, NormalStream& rng) {
  validate(spec);
  BrownianPath path(steps, spec.J, dt_fine);
  for (std::size_t n = 0; n < steps; ++n) draw_increments(rng, dt_fine, path.row(n));
  return path;
}

std::vector<double> increment_on_grid(const NoiseSpec& spec,
                                      const BrownianPath& path, std::size_t n,
                                      std::size_t r, std::span<const double> nodes) {
  validate(spec);
  expects(path.modes() == spec.J, "increment_on_grid: path/spec mode count mismatch");
  const auto db = path.aggregate(n, r);
  const double scale = spec.orthonormal ? std::numbers::sqrt2 : 1.0;
  std::vector<double> out(nodes.size(), 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= spec.J; ++j)
      s += std::sqrt(eigenvalue(spec, j)) * db[j - 1] *
           std::sin(static_cast<double>(j) * std::numbers::pi * nodes[k]);
    out[k] = scale * s;
  }
  // sin(j pi) is only zero up to rounding; the boundary is exact by definition.
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k] == 0.0 || nodes[k] == 1.0) out[k] = 0.0;
  return out;
}

ModalProjector::ModalProjector(const NoiseSpec& spec, std::size_t K) : K_(K) {
  validate(spec);
  expects(K >= 1, "modal projector: need at least one interior node");
  const std::size_t period = 2 * (K + 1);
  const double scale = spec.orthonormal ? std::numbers::sqrt2 : 1.0;
  target_.resize(spec.J);
  weight_.resize(spec.J);
  for (std::size_t j = 1; j <= spec.J; ++j) {
    // sin(j pi k/(K+1)) depends on j mod 2(K+1) only.
    const std::size_t r = j % period;
    double sign = 1.0;
    std::size_t mode = 0;
    if (r >= 1 && r <= K) {
      mode = r;
    } else if (r >= K + 2) {
      mode = period - r;
      sign = -1.0;
    }
    target_[j - 1] = mode;
    weight_[j - 1] = mode == 0 ? 0.0 : sign * scale * std::sqrt(eigenvalue(spec, j));
  }
  dst_ = std::make_unique<detail::SineTransform>(K);
}

ModalProjector::~ModalProjector() = default;
ModalProjector::ModalProjector(ModalProjector&&) noexcept = default;
ModalProjector& ModalProjector::operator=(ModalProjector&&) noexcept = default;

void ModalProjector::apply(std::span<const double> increments, std::span<double> out,
                           std::span<double> work) const {
  expects(increments.size() == target_.size(), "modal projector: wrong increment count");
  expects(out.size() == K_ && work.size() >= 2 * K_, "modal projector: wrong buffer size");
  auto coeff = work.subspan(0, K_);
  auto values = work.subspan(K_, K_);
  std::fill(coeff.begin(), coeff.end(), 0.0);
  for (std::size_t j = 0; j < target_.size(); ++j)
    if (target_[j] != 0) coeff[target_[j] - 1] += weight_[j] * increments[j];
  dst_->execute(coeff, values);
  std::copy(values.begin(), values.end(), out.begin());
}

}  // namespace spdelab
