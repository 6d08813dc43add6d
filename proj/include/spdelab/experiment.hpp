#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdelab/covariance.hpp"
#include "spdelab/fem.hpp"
#include "spdelab/grf.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/stepper.hpp"

namespace spdelab {

enum class StudyKind { ConvergeTime, ConvergeSpace, EvolveDemo };

struct ExperimentConfig {
  StudyKind kind = StudyKind::ConvergeTime;
  std::size_t samples = 100;
  std::uint64_t master_seed = 20240601;
  std::size_t workers = 1;

  ModelSpec model;
  double q = 2.0;
  double quad_tol = 1e-10;
  NoiseSpec noise;
  bool auto_modes = true;  // J from the reference mesh when set

  PaddingMode padding_mode = PaddingMode::Tapered;
  bool auto_padding = true;
  std::size_t padding = 0;
  double padding_target = 1e-10;
  double rho_limit = 1e-6;

  bool random_field = true;
  int u0_frequency = 2;  // u0(x) = sin(u0_frequency * pi * x)

  std::size_t ref_cells = 64;  // reference mesh h = 1/ref_cells
  double dt_ref = 1e-5;
  std::vector<double> time_levels;          // converge_time: coarse dt values
  std::vector<std::size_t> space_levels;    // converge_space: coarse cell counts
};

/// One discretisation level of a study: mesh with `cells` elements and time
/// step ratio * dt_ref.
struct Level {
  std::size_t cells = 0;
  std::size_t ratio = 1;
  double param = 0.0;  // dt (time study) or h (space study)
};

struct ErrorRow {
  double level_param = 0.0;
  double u_error = 0.0;
  std::optional<double> order;
};

struct ErrorTable {
  StudyKind kind = StudyKind::ConvergeTime;
  std::vector<ErrorRow> rows;

  std::size_t samples = 0;
  std::uint64_t master_seed = 0;
  std::size_t modes = 0;
  std::size_t padding = 0;
  double rho_minus_max = 0.0;
  double a_min_observed = 0.0;
  double a_max_observed = 0.0;
  double wall_seconds = 0.0;
};

struct SampleResult {
  FemFunction reference;
  std::vector<FemFunction> endpoints;  // one per level, on the level's own mesh
  std::vector<double> errors;          // L2 distance to the reference
  double a_min = 0.0;
  double a_max = 0.0;
};

/// sqrt(mean(e^2)); throws on an empty list.
double mean_square_error(std::span<const double> per_sample_errors);

/// order_i = ln(e_{i-1}/e_i) / ln(p_{i-1}/p_i); row 0 has no order.
void fill_orders(std::vector<ErrorRow>& rows);

/// Strong-error study with coupled paths: every level of a sample sees the
/// same coefficient field (node-subsampled from the reference mesh) and the
/// same Brownian path (fine increments summed over each coarse step).
class ConvergenceStudy {
 public:
  explicit ConvergenceStudy(ExperimentConfig config);
  ~ConvergenceStudy();
  ConvergenceStudy(ConvergenceStudy&&) noexcept;
  ConvergenceStudy& operator=(ConvergenceStudy&&) noexcept;

  const ExperimentConfig& config() const noexcept { return config_; }
  const std::vector<Level>& levels() const noexcept { return levels_; }
  const Grid1D& reference_grid() const noexcept { return ref_grid_; }
  std::size_t fine_steps() const noexcept { return fine_steps_; }
  std::size_t modes() const noexcept { return config_.noise.J; }
  const EmbeddingPlan* embedding() const noexcept;

  /// Coefficient field of sample `index` at all reference nodes.
  FieldSample field(std::size_t index) const;

  SampleResult run_sample(std::size_t index) const;

  /// Runs all samples on `workers` threads (0 = config value) and reduces in
  /// sample order, so the table does not depend on the worker count.
  ErrorTable run(std::size_t workers = 0) const;

 private:
  struct Impl;
  ExperimentConfig config_;
  std::vector<Level> levels_;
  Grid1D ref_grid_;
  std::size_t fine_steps_ = 0;
  std::unique_ptr<Impl> impl_;
};

/// One variant of an evolution demo. Unset fields inherit from the base
/// config. `deterministic` switches off both the random field and the noise.
struct EvolveVariant {
  std::string label;
  bool deterministic = false;
  std::optional<double> q;
  std::optional<double> gamma;
  std::optional<NoiseCoupling> coupling;
  std::optional<double> eps_a;
};

struct VariantResult {
  std::string label;
  Trajectory trajectory;
  double rho_minus = 0.0;
  std::size_t padding = 0;
  std::size_t modes = 0;
};

/// Single-sample evolutions on the reference mesh with step dt_ref up to T.
/// All variants share the sample's random streams.
std::vector<VariantResult> evolve_demo(const ExperimentConfig& base,
                                       std::span<const EvolveVariant> variants,
                                       std::size_t snapshot_count,
                                       std::size_t sample_index = 0);

/// Coefficient field of sample `index` on the reference mesh, drawn the same
/// way a convergence study with this config draws it.
struct CoefficientDraw {
  FieldSample field;
  PaddingRow padding;
};
CoefficientDraw sample_coefficient(const ExperimentConfig& config, std::size_t index);

/// Steps needed to reach T with step dt; throws unless T/dt is an integer
/// up to rounding.
std::size_t steps_for(double T, double dt);

/// sin(freq pi x) at the interior nodes.
std::vector<double> sine_initial_data(const Grid1D& grid, int freq);

const char* to_string(StudyKind kind);

}  // namespace spdelab
