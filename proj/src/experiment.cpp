#include "spdelab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

struct FieldSource {
  std::optional<EmbeddingPlan> plan;
  PaddingRow padding;
};

FieldSource prepare_field(const ExperimentConfig& cfg, double q, std::size_t P) {
  FieldSource src;
  if (!cfg.random_field) return src;
  const auto cov = make_covariance_spec(q, cfg.quad_tol);
  const std::size_t M = cfg.auto_padding
                            ? select_padding(cov, P, cfg.padding_mode, cfg.padding_target).M
                            : cfg.padding;
  src.plan = build_padded_plan(cov, P, M, cfg.padding_mode);
  src.padding = {src.plan->M, src.plan->rho_minus};
  check_embedding(*src.plan, cfg.rho_limit);
  return src;
}

// Samples 2m and 2m+1 are the real and imaginary parts of one draw, so each
// sample can be rebuilt from (seed, index) alone.
FieldSample draw_field(const FieldSource& src, double eps_a, std::uint64_t master,
                       std::size_t index, std::size_t P) {
  if (!src.plan) return lift_to_coefficient(std::vector<double>(P, 0.0), eps_a);
  NormalStream rng(derive_seed(master, index / 2, StreamTag::Field));
  auto [re, im] = sample_pair(*src.plan, rng);
  return lift_to_coefficient(index % 2 == 0 ? re : im, eps_a);
}

NoiseSpec resolve_modes(const ExperimentConfig& cfg, std::size_t ref_cells,
                        std::optional<double> gamma = std::nullopt) {
  NoiseSpec spec = cfg.noise;
  if (gamma) spec.gamma = *gamma;
  if (cfg.auto_modes)
    spec.J = default_truncation(1.0 / static_cast<double>(ref_cells), spec.gamma);
  validate(spec);
  return spec;
}

void validate_common(const ExperimentConfig& cfg) {
  expects(cfg.samples >= 1, "experiment: need at least one sample");
  expects(cfg.ref_cells >= 2, "experiment: reference mesh needs at least two cells");
  expects(cfg.dt_ref > 0.0, "experiment: dt_ref must be positive");
  expects(cfg.model.T > 0.0, "experiment: T must be positive");
  expects(cfg.model.eps_a > 0.0, "experiment: eps_a must be positive");
  expects(cfg.q > 0.0, "experiment: q must be positive");
  expects(cfg.rho_limit >= 0.0, "experiment: rho_limit must be non-negative");
}

}  // namespace

std::size_t steps_for(double T, double dt) {
  expects(T >= 0.0 && dt > 0.0, "steps_for: need T >= 0 and dt > 0");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "time step " << dt << " does not divide T = " << T;
    contract_violation(msg.str());
  }
  return static_cast<std::size_t>(n);
}

std::vector<double> sine_initial_data(const Grid1D& grid, int freq) {
  std::vector<double> u(grid.K);
  for (std::size_t k = 0; k < grid.K; ++k)
    u[k] = std::sin(freq * std::numbers::pi * grid.node(k + 1));
  return u;
}

const char* to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::ConvergeTime:
      return "converge_time";
    case StudyKind::ConvergeSpace:
      return "converge_space";
    case StudyKind::EvolveDemo:
      return "evolve_demo";
  }
  return "unknown";
}

double mean_square_error(std::span<const double> per_sample_errors) {
  expects(!per_sample_errors.empty(), "mean_square_error: empty error list");
  double s = 0.0;
  for (double e : per_sample_errors) s += e * e;
  return std::sqrt(s / static_cast<double>(per_sample_errors.size()));
}

void fill_orders(std::vector<ErrorRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].order.reset();
    if (i == 0) continue;
    const double e0 = rows[i - 1].u_error, e1 = rows[i].u_error;
    const double p0 = rows[i - 1].level_param, p1 = rows[i].level_param;
    if (e0 > 0.0 && e1 > 0.0 && p0 > 0.0 && p1 > 0.0 && p0 != p1)
      rows[i].order = std::log(e0 / e1) / std::log(p0 / p1);
  }
}

struct ConvergenceStudy::Impl {
  FieldSource field;
  TridiagonalSystem ref_mass;
  std::vector<double> u0_ref_nodes;  // sin(freq pi x) at all reference nodes
  ModalProjector ref_projector;
  std::vector<Grid1D> grids;
  std::vector<std::optional<ModalProjector>> projectors;  // levels with ratio > 1

  Impl(const NoiseSpec& noise, const Grid1D& ref) : ref_projector(noise, ref.K) {}
};

ConvergenceStudy::ConvergenceStudy(ExperimentConfig config) : config_(std::move(config)) {
  validate_common(config_);
  expects(config_.kind != StudyKind::EvolveDemo,
          "convergence study: kind must be converge_time or converge_space");

  ref_grid_ = grid_with_cells(config_.ref_cells);
  fine_steps_ = steps_for(config_.model.T, config_.dt_ref);
  expects(fine_steps_ >= 1, "convergence study: T must cover at least one step");

  if (config_.kind == StudyKind::ConvergeTime) {
    expects(!config_.time_levels.empty(), "convergence study: no time levels");
    for (double dt : config_.time_levels) {
      expects(dt > 0.0, "convergence study: time levels must be positive");
      const std::size_t ratio = steps_for(dt, config_.dt_ref);
      expects(ratio >= 1, "convergence study: time level below dt_ref");
      if (fine_steps_ % ratio != 0) {
        std::ostringstream msg;
        msg << "time level " << dt << " does not divide T";
        contract_violation(msg.str());
      }
      levels_.push_back({config_.ref_cells, ratio, dt});
    }
  } else {
    expects(!config_.space_levels.empty(), "convergence study: no space levels");
    for (std::size_t cells : config_.space_levels) {
      expects(cells >= 2, "convergence study: coarse meshes need at least two cells");
      if (config_.ref_cells % cells != 0) {
        std::ostringstream msg;
        msg << "mesh with " << cells << " cells is not nested in the reference mesh";
        contract_violation(msg.str());
      }
      levels_.push_back({cells, 1, 1.0 / static_cast<double>(cells)});
    }
  }

  config_.noise = resolve_modes(config_, config_.ref_cells);
  impl_ = std::make_unique<Impl>(config_.noise, ref_grid_);
  impl_->field = prepare_field(config_, config_.q, ref_grid_.K + 2);
  impl_->ref_mass = assemble_mass(ref_grid_);
  for (const Level& lv : levels_) {
    impl_->grids.push_back(grid_with_cells(lv.cells));
    if (lv.ratio > 1) impl_->projectors.emplace_back(std::in_place, config_.noise, impl_->grids.back().K);
    else impl_->projectors.emplace_back();
  }
}

ConvergenceStudy::~ConvergenceStudy() = default;
ConvergenceStudy::ConvergenceStudy(ConvergenceStudy&&) noexcept = default;
ConvergenceStudy& ConvergenceStudy::operator=(ConvergenceStudy&&) noexcept = default;

const EmbeddingPlan* ConvergenceStudy::embedding() const noexcept {
  return impl_->field.plan ? &*impl_->field.plan : nullptr;
}

FieldSample ConvergenceStudy::field(std::size_t index) const {
  return draw_field(impl_->field, config_.model.eps_a, config_.master_seed, index,
                    ref_grid_.K + 2);
}

SampleResult ConvergenceStudy::run_sample(std::size_t index) const {
  const FieldSample coeff = field(index);
  const std::size_t J = config_.noise.J;
  const bool noisy = config_.model.coupling != NoiseCoupling::Zero;

  SolverState ref = init_state(config_.model, ref_grid_, coeff.a,
                               sine_initial_data(ref_grid_, config_.u0_frequency),
                               config_.dt_ref);
  std::vector<SolverState> states;
  states.reserve(levels_.size());
  for (std::size_t L = 0; L < levels_.size(); ++L) {
    const Grid1D& g = impl_->grids[L];
    const auto a_level = subsample_nodes(coeff.a, ref_grid_, g);
    states.push_back(init_state(config_.model, g, a_level,
                                sine_initial_data(g, config_.u0_frequency),
                                config_.dt_ref * static_cast<double>(levels_[L].ratio)));
  }

  NormalStream rng(derive_seed(config_.master_seed, index, StreamTag::Noise));
  std::vector<double> row(J, 0.0);
  std::vector<std::vector<double>> acc(levels_.size());
  for (std::size_t L = 0; L < levels_.size(); ++L)
    if (levels_[L].ratio > 1) acc[L].assign(J, 0.0);
  std::vector<double> dW_ref(ref_grid_.K, 0.0), dW(ref_grid_.K, 0.0);
  std::vector<double> work(2 * ref_grid_.K), scratch(2 * ref_grid_.K);

  try {
    for (std::size_t n = 0; n < fine_steps_; ++n) {
      if (noisy) {
        draw_increments(rng, config_.dt_ref, row);
        impl_->ref_projector.apply(row, dW_ref, work);
      }
      step(ref, dW_ref, scratch);
      for (std::size_t L = 0; L < levels_.size(); ++L) {
        const std::size_t K = impl_->grids[L].K;
        std::span<double> dW_level(dW.data(), K);
        if (levels_[L].ratio == 1) {
          // Same increment as the reference step: the level's nodes are
          // reference nodes, so sample the reference values there.
          if (noisy) {
            const std::size_t stride = (ref_grid_.K + 1) / (K + 1);
            for (std::size_t k = 1; k <= K; ++k) dW_level[k - 1] = dW_ref[k * stride - 1];
          }
          step(states[L], dW_level, scratch);
          continue;
        }
        auto& a = acc[L];
        if (noisy)
          for (std::size_t j = 0; j < J; ++j) a[j] += row[j];
        if ((n + 1) % levels_[L].ratio != 0) continue;
        if (noisy) impl_->projectors[L]->apply(a, dW_level, std::span<double>(work).first(2 * K));
        step(states[L], dW_level, scratch);
        std::fill(a.begin(), a.end(), 0.0);
      }
    }
  } catch (const DivergenceError& e) {
    std::ostringstream msg;
    msg << "sample " << index << ": " << e.what();
    throw DivergenceError(msg.str(), e.step(), e.node());
  }

  SampleResult out;
  out.reference = ref.u;
  out.a_min = coeff.a_min_observed;
  out.a_max = coeff.a_max_observed;
  for (std::size_t L = 0; L < levels_.size(); ++L) {
    const FemFunction fine = levels_[L].cells == config_.ref_cells
                                 ? states[L].u
                                 : prolong_to_fine(states[L].u, impl_->grids[L], ref_grid_);
    std::vector<double> diff(ref_grid_.K);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = ref.u.coeffs[k] - fine.coeffs[k];
    out.errors.push_back(l2_norm(diff, impl_->ref_mass));
    out.endpoints.push_back(std::move(states[L].u));
  }
  return out;
}

ErrorTable ConvergenceStudy::run(std::size_t workers) const {
  const auto t0 = std::chrono::steady_clock::now();
  if (workers == 0) workers = std::max<std::size_t>(1, config_.workers);
  workers = std::min(workers, config_.samples);

  std::vector<std::vector<double>> errors(config_.samples);
  std::vector<std::pair<double, double>> a_range(config_.samples);
  std::vector<std::exception_ptr> failures(config_.samples);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config_.samples || failed.load()) return;
      try {
        SampleResult r = run_sample(i);
        errors[i] = std::move(r.errors);
        a_range[i] = {r.a_min, r.a_max};
      } catch (...) {
        failures[i] = std::current_exception();
        failed.store(true);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  ErrorTable table;
  table.kind = config_.kind;
  table.samples = config_.samples;
  table.master_seed = config_.master_seed;
  table.modes = config_.noise.J;
  table.padding = impl_->field.padding.M;
  table.rho_minus_max = impl_->field.padding.rho_minus;
  table.a_min_observed = std::numeric_limits<double>::infinity();
  table.a_max_observed = 0.0;
  for (const auto& [lo, hi] : a_range) {
    table.a_min_observed = std::min(table.a_min_observed, lo);
    table.a_max_observed = std::max(table.a_max_observed, hi);
  }
  std::vector<double> column(config_.samples);
  for (std::size_t L = 0; L < levels_.size(); ++L) {
    for (std::size_t i = 0; i < config_.samples; ++i) column[i] = errors[i][L];
    table.rows.push_back({levels_[L].param, mean_square_error(column), std::nullopt});
  }
  fill_orders(table.rows);
  table.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

CoefficientDraw sample_coefficient(const ExperimentConfig& config, std::size_t index) {
  validate_common(config);
  const std::size_t P = config.ref_cells + 1;
  const FieldSource src = prepare_field(config, config.q, P);
  return {draw_field(src, config.model.eps_a, config.master_seed, index, P), src.padding};
}

std::vector<VariantResult> evolve_demo(const ExperimentConfig& base,
                                       std::span<const EvolveVariant> variants,
                                       std::size_t snapshot_count,
                                       std::size_t sample_index) {
  validate_common(base);
  expects(!variants.empty(), "evolve_demo: no variants requested");
  expects(snapshot_count >= 1, "evolve_demo: need at least one snapshot interval");

  const Grid1D grid = grid_with_cells(base.ref_cells);
  const std::size_t N = steps_for(base.model.T, base.dt_ref);
  std::vector<double> times;
  for (std::size_t s = 0; s <= snapshot_count; ++s)
    times.push_back(base.model.T * static_cast<double>(s) / static_cast<double>(snapshot_count));
  const auto u0 = sine_initial_data(grid, base.u0_frequency);

  std::vector<VariantResult> out;
  for (const EvolveVariant& v : variants) {
    ExperimentConfig cfg = base;
    if (v.q) cfg.q = *v.q;
    if (v.coupling) cfg.model.coupling = *v.coupling;
    if (v.eps_a) cfg.model.eps_a = *v.eps_a;
    if (v.deterministic) {
      cfg.random_field = false;
      cfg.model.coupling = NoiseCoupling::Zero;
    }

    const FieldSource field = prepare_field(cfg, cfg.q, grid.K + 2);
    const FieldSample coeff =
        draw_field(field, cfg.model.eps_a, cfg.master_seed, sample_index, grid.K + 2);

    VariantResult res;
    res.label = v.label;
    res.padding = field.padding.M;
    res.rho_minus = field.padding.rho_minus;

    NoiseSource source;
    std::optional<ModalProjector> projector;
    std::optional<NormalStream> rng;
    std::vector<double> row, work(2 * grid.K);
    if (cfg.model.coupling != NoiseCoupling::Zero) {
      const NoiseSpec noise = resolve_modes(cfg, cfg.ref_cells, v.gamma);
      res.modes = noise.J;
      projector.emplace(noise, grid.K);
      rng.emplace(derive_seed(cfg.master_seed, sample_index, StreamTag::Noise));
      row.resize(noise.J);
      source = [&](std::size_t, std::span<double> dW) {
        draw_increments(*rng, cfg.dt_ref, row);
        projector->apply(row, dW, work);
      };
    }
    try {
      res.trajectory = evolve(cfg.model, grid, coeff.a, u0, cfg.dt_ref, N, source, times);
    } catch (const DivergenceError& e) {
      std::ostringstream msg;
      msg << "variant " << v.label << ": " << e.what();
      throw DivergenceError(msg.str(), e.step(), e.node());
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace spdelab
