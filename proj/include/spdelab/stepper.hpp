#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spdelab/fem.hpp"

namespace spdelab {

enum class DriftKind {
  AllenCahn,  // f(u) = u - u^3
  Zero,
  Affine,     // f(u) = drift_a + drift_b u
};

enum class NoiseCoupling {
  Zero,               // G(u) = 0
  HalfLinear,         // G(u) = u/2
  HalfOneMinusSquare  // G(u) = (1 - u^2)/2
};

struct ModelSpec {
  DriftKind drift = DriftKind::AllenCahn;
  double drift_a = 0.0;
  double drift_b = 0.0;
  NoiseCoupling coupling = NoiseCoupling::HalfOneMinusSquare;
  double eps_a = 1e-3;
  double T = 0.1;
};

double drift_value(const ModelSpec& model, double u);
double coupling_value(const ModelSpec& model, double u);

/// Any |u_k| above this aborts the trajectory with a DivergenceError.
inline constexpr double kDivergenceBound = 1e8;

/// State of one trajectory of the semi-implicit Euler-Maruyama / P1 scheme
///
///   (M + dt S) u^{n+1} = M (u^n + dt f(u^n) + G(u^n) dW^n),
///
/// with the right-hand side built from nodal values. The coefficient field
/// is time independent, so M + dt S is factored once.
struct SolverState {
  std::size_t n = 0;
  FemFunction u;
  TridiagonalSystem mass;
  TridiagonalSystem iteration_matrix;
  TridiagonalFactorization factor;
  double dt = 0.0;
  ModelSpec model;
};

SolverState init_state(const ModelSpec& model, const Grid1D& grid,
                       std::span<const double> a_nodes,
                       std::span<const double> u0_interior, double dt);

/// Advances one step in place; `noise_increment` is dW at the K interior
/// nodes (ignored for NoiseCoupling::Zero). `work` must hold 2K doubles.
void step(SolverState& state, std::span<const double> noise_increment,
          std::span<double> work);
void step(SolverState& state, std::span<const double> noise_increment);

/// Writes dW^n at interior nodes into `out`.
using NoiseSource = std::function<void(std::size_t n, std::span<double> out)>;

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;  // interior coefficients
};

struct Trajectory {
  Grid1D grid;
  double dt = 0.0;
  FemFunction final_state;
  std::vector<Snapshot> snapshots;
};

/// Runs N steps. Snapshots are taken at step 0 if requested, at the first
/// step whose time reaches each requested time, and always at the end.
Trajectory evolve(const ModelSpec& model, const Grid1D& grid,
                  std::span<const double> a_nodes, std::span<const double> u0_interior,
                  double dt, std::size_t N, const NoiseSource& noise,
                  std::span<const double> snapshot_times);

}  // namespace spdelab
