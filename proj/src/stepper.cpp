#include "spdelab/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdelab/error.hpp"

namespace spdelab {

double drift_value(const ModelSpec& model, double u) {
  switch (model.drift) {
    case DriftKind::AllenCahn:
      return u - u * u * u;
    case DriftKind::Zero:
      return 0.0;
    case DriftKind::Affine:
      return model.drift_a + model.drift_b * u;
  }
  return 0.0;
}

double coupling_value(const ModelSpec& model, double u) {
  switch (model.coupling) {
    case NoiseCoupling::Zero:
      return 0.0;
    case NoiseCoupling::HalfLinear:
      return 0.5 * u;
    case NoiseCoupling::HalfOneMinusSquare:
      return 0.5 * (1.0 - u * u);
  }
  return 0.0;
}

SolverState init_state(const ModelSpec& model, const Grid1D& grid,
                       std::span<const double> a_nodes,
                       std::span<const double> u0_interior, double dt) {
  expects(dt > 0.0 && std::isfinite(dt), "init_state: dt must be positive");
  expects(u0_interior.size() == grid.K, "init_state: initial data needs K interior values");
  SolverState s;
  s.dt = dt;
  s.model = model;
  s.mass = assemble_mass(grid);
  s.iteration_matrix = add_scaled(s.mass, dt, assemble_stiffness(grid, a_nodes));
  s.factor = TridiagonalFactorization(s.iteration_matrix);
  s.u = l2_project(u0_interior, s.mass);
  return s;
}

void step(SolverState& state, std::span<const double> noise_increment,
          std::span<double> work) {
  const std::size_t K = state.u.coeffs.size();
  expects(work.size() >= 2 * K, "step: workspace too small");
  const bool noisy = state.model.coupling != NoiseCoupling::Zero;
  if (noisy) expects(noise_increment.size() == K, "step: noise increment needs K values");

  auto g = work.subspan(0, K);
  auto rhs = work.subspan(K, K);
  const auto& u = state.u.coeffs;
  for (std::size_t k = 0; k < K; ++k) {
    double gk = u[k] + state.dt * drift_value(state.model, u[k]);
    if (noisy) gk += coupling_value(state.model, u[k]) * noise_increment[k];
    g[k] = gk;
  }

  const auto& M = state.mass;
  for (std::size_t i = 0; i < K; ++i) {
    double s = M.diag[i] * g[i];
    if (i > 0) s += M.sub[i - 1] * g[i - 1];
    if (i + 1 < K) s += M.super[i] * g[i + 1];
    rhs[i] = s;
  }
  state.factor.solve(rhs, state.u.coeffs);
  ++state.n;

  for (std::size_t k = 0; k < K; ++k) {
    const double v = state.u.coeffs[k];
    if (!(std::abs(v) <= kDivergenceBound)) {
      std::ostringstream msg;
      msg << "trajectory diverged at step " << state.n << ", interior node " << k + 1
          << " (|u| = " << std::abs(v) << ")";
      throw DivergenceError(msg.str(), state.n, k + 1);
    }
  }
}

void step(SolverState& state, std::span<const double> noise_increment) {
  std::vector<double> work(2 * state.u.coeffs.size());
  step(state, noise_increment, work);
}

Trajectory evolve(const ModelSpec& model, const Grid1D& grid,
                  std::span<const double> a_nodes, std::span<const double> u0_interior,
                  double dt, std::size_t N, const NoiseSource& noise,
                  std::span<const double> snapshot_times) {
  SolverState state = init_state(model, grid, a_nodes, u0_interior, dt);
  const std::size_t K = grid.K;

  Trajectory traj;
  traj.grid = grid;
  traj.dt = dt;

  std::vector<double> pending(snapshot_times.begin(), snapshot_times.end());
  std::sort(pending.begin(), pending.end());
  std::size_t next = 0;
  auto capture_due = [&](std::size_t n) {
    const double t = static_cast<double>(n) * dt;
    bool due = false;
    while (next < pending.size() && pending[next] <= t + 0.5 * dt) {
      due = true;
      ++next;
    }
    if (due) traj.snapshots.push_back({t, state.u.coeffs});
  };

  capture_due(0);
  std::vector<double> dW(K, 0.0);
  std::vector<double> work(2 * K);
  for (std::size_t n = 0; n < N; ++n) {
    if (model.coupling != NoiseCoupling::Zero && noise) noise(n, dW);
    step(state, dW, work);
    if (n + 1 < N) capture_due(n + 1);
  }
  const double t_end = static_cast<double>(N) * dt;
  if (traj.snapshots.empty() || traj.snapshots.back().t != t_end)
    traj.snapshots.push_back({t_end, state.u.coeffs});
  traj.final_state = state.u;
  return traj;
}

}  // namespace spdelab
