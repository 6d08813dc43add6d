#include "spdelab/spdelab.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "spdelab/covariance.hpp"
#include "spdelab/error.hpp"
#include "spdelab/experiment.hpp"
#include "spdelab/grf.hpp"
#include "spdelab/output.hpp"

using namespace spdelab;

struct spdelab_embedding {
  EmbeddingPlan plan;
};

struct spdelab_field {
  CoefficientDraw draw;
};

struct spdelab_study {
  ConvergenceStudy study;
};

struct spdelab_error_table {
  ErrorTable table;
};

struct spdelab_evolution {
  std::vector<VariantResult> variants;
};

namespace {

thread_local std::string g_last_error;

spdelab_status status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return SPDELAB_ERR_INVALID_ARGUMENT;
    case ErrorKind::Quadrature:
      return SPDELAB_ERR_QUADRATURE;
    case ErrorKind::SingularSystem:
      return SPDELAB_ERR_SINGULAR;
    case ErrorKind::Embedding:
      return SPDELAB_ERR_EMBEDDING;
    case ErrorKind::Divergence:
      return SPDELAB_ERR_DIVERGENCE;
    case ErrorKind::Io:
      return SPDELAB_ERR_IO;
  }
  return SPDELAB_ERR_INTERNAL;
}

template <class F>
spdelab_status guarded(F&& body) noexcept {
  try {
    body();
    return SPDELAB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SPDELAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPDELAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SPDELAB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) contract_violation(std::string(name) + " must not be null");
}

PaddingMode padding_mode_from(int mode) {
  switch (mode) {
    case SPDELAB_PADDING_ZERO:
      return PaddingMode::Zero;
    case SPDELAB_PADDING_COVARIANCE:
      return PaddingMode::Covariance;
    case SPDELAB_PADDING_TAPERED:
      return PaddingMode::Tapered;
  }
  contract_violation("unknown padding mode");
}

NoiseCoupling coupling_from(int g) {
  switch (g) {
    case SPDELAB_G_ZERO:
      return NoiseCoupling::Zero;
    case SPDELAB_G_HALF_LINEAR:
      return NoiseCoupling::HalfLinear;
    case SPDELAB_G_HALF_ONE_MINUS_SQ:
      return NoiseCoupling::HalfOneMinusSquare;
  }
  contract_violation("unknown noise coupling");
}

ExperimentConfig to_config(const spdelab_params* p) {
  need(p, "params");
  ExperimentConfig c;
  switch (p->kind) {
    case SPDELAB_STUDY_TIME:
      c.kind = StudyKind::ConvergeTime;
      break;
    case SPDELAB_STUDY_SPACE:
      c.kind = StudyKind::ConvergeSpace;
      break;
    case SPDELAB_STUDY_EVOLVE:
      c.kind = StudyKind::EvolveDemo;
      break;
    default:
      contract_violation("unknown study kind");
  }
  c.samples = p->samples;
  c.master_seed = p->master_seed;
  c.workers = p->workers;
  c.q = p->q;
  c.quad_tol = p->quad_tol;
  c.padding_mode = padding_mode_from(p->padding_mode);
  c.auto_padding = p->auto_padding != 0;
  c.padding = p->padding;
  c.padding_target = p->padding_target;
  c.rho_limit = p->rho_limit;
  c.noise.gamma = p->gamma;
  c.noise.eps_q = p->eps_q;
  c.noise.J = p->modes == 0 ? 1 : p->modes;
  c.noise.orthonormal = p->orthonormal_basis != 0;
  c.auto_modes = p->modes == 0;
  switch (p->drift) {
    case SPDELAB_DRIFT_ALLEN_CAHN:
      c.model.drift = DriftKind::AllenCahn;
      break;
    case SPDELAB_DRIFT_ZERO:
      c.model.drift = DriftKind::Zero;
      break;
    case SPDELAB_DRIFT_AFFINE:
      c.model.drift = DriftKind::Affine;
      break;
    default:
      contract_violation("unknown drift kind");
  }
  c.model.drift_a = p->drift_a;
  c.model.drift_b = p->drift_b;
  c.model.coupling = coupling_from(p->coupling);
  c.model.eps_a = p->eps_a;
  c.model.T = p->T;
  c.random_field = p->random_field != 0;
  c.u0_frequency = p->u0_frequency;
  c.ref_cells = p->ref_cells;
  c.dt_ref = p->dt_ref;
  if (p->n_time_levels > 0) {
    need(p->time_levels, "time_levels");
    c.time_levels.assign(p->time_levels, p->time_levels + p->n_time_levels);
  }
  if (p->n_space_levels > 0) {
    need(p->space_levels, "space_levels");
    c.space_levels.assign(p->space_levels, p->space_levels + p->n_space_levels);
  }
  return c;
}

template <class T>
void put(T* dst, const T& value) {
  if (dst != nullptr) *dst = value;
}

}  // namespace

extern "C" {

SPDELAB_API const char* spdelab_last_error(void) { return g_last_error.c_str(); }

SPDELAB_API const char* spdelab_status_name(spdelab_status status) {
  switch (status) {
    case SPDELAB_OK:
      return "ok";
    case SPDELAB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case SPDELAB_ERR_QUADRATURE:
      return "quadrature failure";
    case SPDELAB_ERR_SINGULAR:
      return "singular system";
    case SPDELAB_ERR_EMBEDDING:
      return "embedding failure";
    case SPDELAB_ERR_DIVERGENCE:
      return "divergence";
    case SPDELAB_ERR_IO:
      return "i/o failure";
    case SPDELAB_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

SPDELAB_API const char* spdelab_version(void) { return "1.0.0"; }

SPDELAB_API spdelab_status spdelab_covariance_eval(double q, double quad_tol, double x,
                                                   double* out) {
  return guarded([&] {
    need(out, "out");
    *out = eval_covariance(make_covariance_spec(q, quad_tol), x);
  });
}

SPDELAB_API spdelab_status spdelab_covariance_column(double q, double quad_tol, size_t P,
                                                     double* values) {
  return guarded([&] {
    need(values, "values");
    const auto col = first_column(make_covariance_spec(q, quad_tol), P);
    std::copy(col.values.begin(), col.values.end(), values);
  });
}

SPDELAB_API spdelab_status spdelab_covariance_closed_form(double q, double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = matern_closed_form(q, x);
  });
}

SPDELAB_API spdelab_status spdelab_padding_diagnostic(double q, double quad_tol, size_t P,
                                                      int padding_mode, const size_t* M_list,
                                                      size_t count, double* rho_minus) {
  return guarded([&] {
    need(M_list, "M_list");
    need(rho_minus, "rho_minus");
    const auto spec = make_covariance_spec(q, quad_tol);
    const std::span<const std::size_t> Ms(M_list, count);
    const auto rows = padding_diagnostic(spec, P, Ms, padding_mode_from(padding_mode));
    for (std::size_t i = 0; i < rows.size(); ++i) rho_minus[i] = rows[i].rho_minus;
  });
}

SPDELAB_API spdelab_status spdelab_padding_select(double q, double quad_tol, size_t P,
                                                  int padding_mode, double target, size_t* M,
                                                  double* rho_minus) {
  return guarded([&] {
    const auto row = select_padding(make_covariance_spec(q, quad_tol), P,
                                    padding_mode_from(padding_mode), target);
    put(M, row.M);
    put(rho_minus, row.rho_minus);
  });
}

SPDELAB_API spdelab_status spdelab_embedding_create(const double* column, size_t P, size_t M,
                                                    spdelab_embedding** out) {
  return guarded([&] {
    need(column, "column");
    need(out, "out");
    ToeplitzColumn col{std::vector<double>(column, column + P),
                       P > 1 ? 1.0 / static_cast<double>(P - 1) : 0.0};
    *out = new spdelab_embedding{build_plan(col, M)};
  });
}

SPDELAB_API spdelab_status spdelab_embedding_create_covariance(double q, double quad_tol,
                                                               size_t P, size_t M,
                                                               int padding_mode,
                                                               spdelab_embedding** out) {
  return guarded([&] {
    need(out, "out");
    *out = new spdelab_embedding{build_padded_plan(make_covariance_spec(q, quad_tol), P, M,
                                                   padding_mode_from(padding_mode))};
  });
}

SPDELAB_API void spdelab_embedding_destroy(spdelab_embedding* plan) { delete plan; }

SPDELAB_API spdelab_status spdelab_embedding_info(const spdelab_embedding* plan, size_t* P,
                                                  size_t* M, size_t* ext_len,
                                                  double* rho_minus) {
  return guarded([&] {
    need(plan, "plan");
    put(P, plan->plan.P);
    put(M, plan->plan.M);
    put(ext_len, plan->plan.ext_len);
    put(rho_minus, plan->plan.rho_minus);
  });
}

SPDELAB_API spdelab_status spdelab_embedding_sample_pair(const spdelab_embedding* plan,
                                                         uint64_t seed, double* first,
                                                         double* second) {
  return guarded([&] {
    need(plan, "plan");
    need(first, "first");
    need(second, "second");
    NormalStream rng(seed);
    auto [re, im] = sample_pair(plan->plan, rng);
    std::copy(re.begin(), re.end(), first);
    std::copy(im.begin(), im.end(), second);
  });
}

SPDELAB_API spdelab_status spdelab_field_sample(const spdelab_params* params,
                                                size_t sample_index, spdelab_field** out) {
  return guarded([&] {
    need(out, "out");
    *out = new spdelab_field{sample_coefficient(to_config(params), sample_index)};
  });
}

SPDELAB_API void spdelab_field_destroy(spdelab_field* field) { delete field; }

SPDELAB_API size_t spdelab_field_size(const spdelab_field* field) {
  return field == nullptr ? 0 : field->draw.field.z.size();
}

SPDELAB_API spdelab_status spdelab_field_values(const spdelab_field* field, double* z,
                                                double* a) {
  return guarded([&] {
    need(field, "field");
    const auto& f = field->draw.field;
    if (z != nullptr) std::copy(f.z.begin(), f.z.end(), z);
    if (a != nullptr) std::copy(f.a.begin(), f.a.end(), a);
  });
}

SPDELAB_API spdelab_status spdelab_field_info(const spdelab_field* field, double* a_min,
                                              double* a_max, size_t* padding,
                                              double* rho_minus) {
  return guarded([&] {
    need(field, "field");
    put(a_min, field->draw.field.a_min_observed);
    put(a_max, field->draw.field.a_max_observed);
    put(padding, field->draw.padding.M);
    put(rho_minus, field->draw.padding.rho_minus);
  });
}

SPDELAB_API spdelab_status spdelab_field_write_csv(const spdelab_field* field,
                                                   const char* path) {
  return guarded([&] {
    need(field, "field");
    need(path, "path");
    write_field_csv(path, field->draw.field);
  });
}

SPDELAB_API void spdelab_params_init(spdelab_params* p) {
  if (p == nullptr) return;
  *p = spdelab_params{};
  p->kind = SPDELAB_STUDY_TIME;
  p->samples = 100;
  p->master_seed = 20240601;
  p->workers = 1;
  p->q = 2.0;
  p->quad_tol = 1e-10;
  p->padding_mode = SPDELAB_PADDING_TAPERED;
  p->auto_padding = 1;
  p->padding = 0;
  p->padding_target = 1e-10;
  p->rho_limit = 1e-6;
  p->gamma = 1.0;
  p->eps_q = 0.1;
  p->modes = 0;
  p->orthonormal_basis = 0;
  p->drift = SPDELAB_DRIFT_ALLEN_CAHN;
  p->coupling = SPDELAB_G_HALF_ONE_MINUS_SQ;
  p->eps_a = 1e-3;
  p->T = 0.1;
  p->random_field = 1;
  p->u0_frequency = 2;
  p->ref_cells = 64;
  p->dt_ref = 1e-5;
}

SPDELAB_API spdelab_status spdelab_mean_square_error(const double* errors, size_t count,
                                                     double* out) {
  return guarded([&] {
    need(out, "out");
    if (count > 0) need(errors, "errors");
    *out = mean_square_error(std::span<const double>(errors, count));
  });
}

SPDELAB_API spdelab_status spdelab_study_create(const spdelab_params* params,
                                                spdelab_study** out) {
  return guarded([&] {
    need(out, "out");
    *out = new spdelab_study{ConvergenceStudy(to_config(params))};
  });
}

SPDELAB_API void spdelab_study_destroy(spdelab_study* study) { delete study; }

SPDELAB_API size_t spdelab_study_levels(const spdelab_study* study) {
  return study == nullptr ? 0 : study->study.levels().size();
}

SPDELAB_API size_t spdelab_study_modes(const spdelab_study* study) {
  return study == nullptr ? 0 : study->study.modes();
}

SPDELAB_API spdelab_status spdelab_study_sample_errors(const spdelab_study* study,
                                                       size_t sample_index, double* errors) {
  return guarded([&] {
    need(study, "study");
    need(errors, "errors");
    const auto r = study->study.run_sample(sample_index);
    std::copy(r.errors.begin(), r.errors.end(), errors);
  });
}

SPDELAB_API spdelab_status spdelab_study_run(const spdelab_study* study, size_t workers,
                                             spdelab_error_table** out) {
  return guarded([&] {
    need(study, "study");
    need(out, "out");
    *out = new spdelab_error_table{study->study.run(workers)};
  });
}

SPDELAB_API void spdelab_error_table_destroy(spdelab_error_table* table) { delete table; }

SPDELAB_API size_t spdelab_error_table_rows(const spdelab_error_table* table) {
  return table == nullptr ? 0 : table->table.rows.size();
}

SPDELAB_API spdelab_status spdelab_error_table_row(const spdelab_error_table* table,
                                                   size_t row, double* level_param,
                                                   double* u_error, double* order,
                                                   int* has_order) {
  return guarded([&] {
    need(table, "table");
    expects(row < table->table.rows.size(), "error table: row out of range");
    const ErrorRow& r = table->table.rows[row];
    put(level_param, r.level_param);
    put(u_error, r.u_error);
    put(order, r.order.value_or(0.0));
    put(has_order, r.order ? 1 : 0);
  });
}

SPDELAB_API spdelab_status spdelab_error_table_meta(const spdelab_error_table* table,
                                                    spdelab_table_meta* meta) {
  return guarded([&] {
    need(table, "table");
    need(meta, "meta");
    const ErrorTable& t = table->table;
    *meta = spdelab_table_meta{t.samples,        t.master_seed,    t.modes,
                               t.padding,        t.rho_minus_max,  t.a_min_observed,
                               t.a_max_observed, t.wall_seconds};
  });
}

SPDELAB_API spdelab_status spdelab_error_table_write_csv(const spdelab_error_table* table,
                                                         const char* path) {
  return guarded([&] {
    need(table, "table");
    need(path, "path");
    write_error_table_csv(path, table->table);
  });
}

SPDELAB_API spdelab_status spdelab_evolve_run(const spdelab_params* params,
                                              const spdelab_variant* variants,
                                              size_t count, size_t snapshot_count,
                                              size_t sample_index,
                                              spdelab_evolution** out) {
  return guarded([&] {
    need(out, "out");
    need(variants, "variants");
    const ExperimentConfig base = to_config(params);
    std::vector<EvolveVariant> list;
    for (std::size_t i = 0; i < count; ++i) {
      const spdelab_variant& v = variants[i];
      EvolveVariant ev;
      ev.label = v.label != nullptr ? v.label : "variant" + std::to_string(i);
      ev.deterministic = v.deterministic != 0;
      if (v.has_q) ev.q = v.q;
      if (v.has_gamma) ev.gamma = v.gamma;
      if (v.has_coupling) ev.coupling = coupling_from(v.coupling);
      if (v.has_eps_a) ev.eps_a = v.eps_a;
      list.push_back(std::move(ev));
    }
    *out = new spdelab_evolution{evolve_demo(base, list, snapshot_count, sample_index)};
  });
}

SPDELAB_API void spdelab_evolution_destroy(spdelab_evolution* evo) { delete evo; }

SPDELAB_API size_t spdelab_evolution_count(const spdelab_evolution* evo) {
  return evo == nullptr ? 0 : evo->variants.size();
}

SPDELAB_API const char* spdelab_evolution_label(const spdelab_evolution* evo,
                                                size_t variant) {
  if (evo == nullptr || variant >= evo->variants.size()) return nullptr;
  return evo->variants[variant].label.c_str();
}

SPDELAB_API spdelab_status spdelab_evolution_info(const spdelab_evolution* evo,
                                                  size_t variant, size_t* snapshots,
                                                  size_t* nodes, size_t* modes,
                                                  size_t* padding, double* rho_minus) {
  return guarded([&] {
    need(evo, "evolution");
    expects(variant < evo->variants.size(), "evolution: variant out of range");
    const VariantResult& v = evo->variants[variant];
    put(snapshots, v.trajectory.snapshots.size());
    put(nodes, v.trajectory.grid.K + 2);
    put(modes, v.modes);
    put(padding, v.padding);
    put(rho_minus, v.rho_minus);
  });
}

SPDELAB_API spdelab_status spdelab_evolution_snapshot(const spdelab_evolution* evo,
                                                      size_t variant, size_t snapshot,
                                                      double* t, double* u) {
  return guarded([&] {
    need(evo, "evolution");
    expects(variant < evo->variants.size(), "evolution: variant out of range");
    const Trajectory& tr = evo->variants[variant].trajectory;
    expects(snapshot < tr.snapshots.size(), "evolution: snapshot out of range");
    const Snapshot& s = tr.snapshots[snapshot];
    put(t, s.t);
    if (u != nullptr) {
      u[0] = 0.0;
      std::copy(s.u.begin(), s.u.end(), u + 1);
      u[tr.grid.K + 1] = 0.0;
    }
  });
}

SPDELAB_API spdelab_status spdelab_evolution_write_csv(const spdelab_evolution* evo,
                                                       size_t variant, const char* path) {
  return guarded([&] {
    need(evo, "evolution");
    need(path, "path");
    expects(variant < evo->variants.size(), "evolution: variant out of range");
    write_trajectory_csv(path, evo->variants[variant].trajectory);
  });
}

}  // extern "C"
