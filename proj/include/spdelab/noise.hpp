#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spdelab/rng.hpp"

namespace spdelab {

namespace detail {
class SineTransform;
}

/// Truncated Q-Wiener process W = sum_{j<=J} sqrt(q_j) phi_j beta_j with
/// q_j = j^-(2 gamma + 1 + eps_q) and phi_j = sin(j pi x) (times sqrt(2) when
/// `orthonormal` is set).
struct NoiseSpec {
  double gamma = 1.0;
  double eps_q = 0.1;
  std::size_t J = 1;
  bool orthonormal = false;
};

void validate(const NoiseSpec& spec);

double eigenvalue(const NoiseSpec& spec, std::size_t j);

/// J = ceil(h^(-2/gamma)), capped at `cap`.
std::size_t default_truncation(double h, double gamma, std::size_t cap = 10000);

/// Brownian increments for J modes on the finest time grid, stored row-major
/// (row n = step n, column j-1 = mode j).
class BrownianPath {
 public:
  BrownianPath() = default;
  BrownianPath(std::size_t steps, std::size_t modes, double dt_fine);

  std::size_t steps() const noexcept { return steps_; }
  std::size_t modes() const noexcept { return modes_; }
  double dt_fine() const noexcept { return dt_fine_; }

  std::span<double> row(std::size_t n);
  std::span<const double> row(std::size_t n) const;

  /// Increment over the coarse step [n r dt, (n+1) r dt): the plain sum of
  /// rows n r .. (n+1) r - 1 in order.
  std::vector<double> aggregate(std::size_t n, std::size_t r) const;

 private:
  std::size_t steps_ = 0;
  std::size_t modes_ = 0;
  double dt_fine_ = 0.0;
  std::vector<double> data_;
};

/// Fills a path with N(0, dt_fine) draws, row by row.
BrownianPath generate_path(const NoiseSpec& spec, std::size_t steps,
                           double dt_fine, NormalStream& rng);

/// Draws one row of fine increments; generate_path is this, repeated.
void draw_increments(NormalStream& rng, double dt_fine, std::span<double> row);

/// Direct evaluation of sum_j sqrt(q_j) dbeta_j phi_j(x) at arbitrary nodes
/// for coarse step n at ratio r.
std::vector<double> increment_on_grid(const NoiseSpec& spec,
                                      const BrownianPath& path, std::size_t n,
                                      std::size_t r, std::span<const double> nodes);

/// Same sum evaluated at the K interior nodes x_k = k/(K+1) of a uniform
/// grid. Modes above K fold onto their discrete aliases, so one call costs
/// O(J + K log K) instead of O(J K).
class ModalProjector {
 public:
  ModalProjector(const NoiseSpec& spec, std::size_t K);
  ~ModalProjector();
  ModalProjector(ModalProjector&&) noexcept;
  ModalProjector& operator=(ModalProjector&&) noexcept;

  std::size_t interior_nodes() const noexcept { return K_; }
  std::size_t modes() const noexcept { return target_.size(); }

  /// `increments` holds one Brownian increment per mode; `out` receives the
  /// field value at each interior node. `work` needs 2K entries.
  void apply(std::span<const double> increments, std::span<double> out,
             std::span<double> work) const;

 private:
  std::size_t K_ = 0;
  std::vector<std::size_t> target_;  // discrete mode (1..K) or 0 when silent
  std::vector<double> weight_;       // +-sqrt(q_j) * basis scale
  std::unique_ptr<detail::SineTransform> dst_;
};

}  // namespace spdelab
