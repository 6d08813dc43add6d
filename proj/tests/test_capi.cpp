#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spdelab/spdelab.h"

namespace {

spdelab_params tiny_time_params(const std::vector<double>& levels) {
  spdelab_params p;
  spdelab_params_init(&p);
  p.samples = 3;
  p.ref_cells = 16;
  p.dt_ref = 1e-4;
  p.T = 0.01;
  p.time_levels = levels.data();
  p.n_time_levels = levels.size();
  return p;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(spdelab_status_name(SPDELAB_OK)) == "ok");
  CHECK(std::strlen(spdelab_version()) > 0);
}

TEST_CASE("covariance calls") {
  double v = 0.0, ref = 0.0;
  REQUIRE(spdelab_covariance_eval(2.0, 1e-10, 1.0, &v) == SPDELAB_OK);
  REQUIRE(spdelab_covariance_closed_form(2.0, 1.0, &ref) == SPDELAB_OK);
  CHECK(std::abs(v - oracle::matern(2.0, 1.0)) < 1e-10);
  CHECK(std::abs(ref - oracle::matern(2.0, 1.0)) < 1e-14);

  std::vector<double> col(5);
  REQUIRE(spdelab_covariance_column(2.5, 1e-10, 5, col.data()) == SPDELAB_OK);
  CHECK(std::abs(col[0] - 1.0) < 1e-10);
  CHECK(std::abs(col[4] - oracle::matern(2.5, 1.0)) < 1e-10);

  CHECK(spdelab_covariance_eval(-1.0, 1e-10, 1.0, &v) == SPDELAB_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(spdelab_last_error()) > 0);
  CHECK(spdelab_covariance_eval(2.0, 1e-18, 0.5, &v) == SPDELAB_ERR_QUADRATURE);
  CHECK(spdelab_covariance_eval(2.0, 1e-10, 0.5, nullptr) == SPDELAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("embedding handles") {
  std::size_t M = 0;
  double rho = 1.0;
  REQUIRE(spdelab_padding_select(2.0, 1e-10, 33, SPDELAB_PADDING_TAPERED, 1e-10, &M, &rho) ==
          SPDELAB_OK);
  CHECK(rho <= 1e-10);

  spdelab_embedding* plan = nullptr;
  REQUIRE(spdelab_embedding_create_covariance(2.0, 1e-10, 33, M, SPDELAB_PADDING_TAPERED, &plan) ==
          SPDELAB_OK);
  std::size_t P = 0, Mi = 0, n = 0;
  double r = 0.0;
  REQUIRE(spdelab_embedding_info(plan, &P, &Mi, &n, &r) == SPDELAB_OK);
  CHECK(P == 33);
  CHECK(Mi == M);
  CHECK(n == 2 * (P + M - 1));
  CHECK(r == doctest::Approx(rho));

  std::vector<double> a(33), b(33), c(33), d(33);
  REQUIRE(spdelab_embedding_sample_pair(plan, 7, a.data(), b.data()) == SPDELAB_OK);
  REQUIRE(spdelab_embedding_sample_pair(plan, 7, c.data(), d.data()) == SPDELAB_OK);
  CHECK(a == c);
  CHECK(b == d);
  spdelab_embedding_destroy(plan);

  const std::size_t Ms[] = {0, 8, 64};
  double rows[3];
  REQUIRE(spdelab_padding_diagnostic(2.0, 1e-10, 33, SPDELAB_PADDING_ZERO, Ms, 3, rows) ==
          SPDELAB_OK);
  CHECK(rows[0] > 0.0);
  CHECK(spdelab_padding_diagnostic(2.0, 1e-10, 33, 9, Ms, 3, rows) == SPDELAB_ERR_INVALID_ARGUMENT);

  const double identity[] = {1.0, 0.0};
  REQUIRE(spdelab_embedding_create(identity, 2, 0, &plan) == SPDELAB_OK);
  spdelab_embedding_destroy(plan);
  spdelab_embedding_destroy(nullptr);
}

TEST_CASE("field samples") {
  spdelab_params p;
  spdelab_params_init(&p);
  p.ref_cells = 16;
  spdelab_field* f = nullptr;
  REQUIRE(spdelab_field_sample(&p, 0, &f) == SPDELAB_OK);
  REQUIRE(spdelab_field_size(f) == 17);
  std::vector<double> z(17), a(17);
  REQUIRE(spdelab_field_values(f, z.data(), a.data()) == SPDELAB_OK);
  for (std::size_t k = 0; k < 17; ++k) CHECK(a[k] == doctest::Approx(p.eps_a * std::exp(z[k])));
  double lo = 0, hi = 0, rho = 0;
  std::size_t M = 0;
  REQUIRE(spdelab_field_info(f, &lo, &hi, &M, &rho) == SPDELAB_OK);
  CHECK(lo > 0.0);
  CHECK(rho <= p.padding_target);
  CHECK(spdelab_field_write_csv(f, "/nonexistent/dir/field.csv") == SPDELAB_ERR_IO);
  spdelab_field_destroy(f);
}

TEST_CASE("studies through handles") {
  const std::vector<double> levels{2e-3, 1e-3};
  const auto p = tiny_time_params(levels);
  spdelab_study* study = nullptr;
  REQUIRE(spdelab_study_create(&p, &study) == SPDELAB_OK);
  CHECK(spdelab_study_levels(study) == 2);
  CHECK(spdelab_study_modes(study) == 256);

  double errs[2];
  std::vector<double> column;
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(spdelab_study_sample_errors(study, i, errs) == SPDELAB_OK);
    column.push_back(errs[1]);
  }
  double expected = 0.0;
  REQUIRE(spdelab_mean_square_error(column.data(), column.size(), &expected) == SPDELAB_OK);

  spdelab_error_table* t = nullptr;
  REQUIRE(spdelab_study_run(study, 2, &t) == SPDELAB_OK);
  REQUIRE(spdelab_error_table_rows(t) == 2);
  double param = 0, err = 0, order = 0;
  int has = 1;
  REQUIRE(spdelab_error_table_row(t, 0, &param, &err, &order, &has) == SPDELAB_OK);
  CHECK(has == 0);
  CHECK(param == 2e-3);
  REQUIRE(spdelab_error_table_row(t, 1, &param, &err, &order, &has) == SPDELAB_OK);
  CHECK(has == 1);
  CHECK(err == expected);
  CHECK(spdelab_error_table_row(t, 2, &param, &err, &order, &has) == SPDELAB_ERR_INVALID_ARGUMENT);
  spdelab_table_meta meta;
  REQUIRE(spdelab_error_table_meta(t, &meta) == SPDELAB_OK);
  CHECK(meta.samples == 3);
  CHECK(meta.master_seed == p.master_seed);
  spdelab_error_table_destroy(t);
  spdelab_study_destroy(study);

  CHECK(spdelab_mean_square_error(nullptr, 0, &expected) == SPDELAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("invalid study parameters report a message") {
  const std::vector<double> levels{3e-3};
  const auto p = tiny_time_params(levels);
  spdelab_study* study = nullptr;
  CHECK(spdelab_study_create(&p, &study) == SPDELAB_ERR_INVALID_ARGUMENT);
  CHECK(study == nullptr);
  CHECK(std::string(spdelab_last_error()).find("does not divide") != std::string::npos);
  CHECK(spdelab_study_create(nullptr, &study) == SPDELAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("evolution handles") {
  spdelab_params p;
  spdelab_params_init(&p);
  p.kind = SPDELAB_STUDY_EVOLVE;
  p.ref_cells = 16;
  p.dt_ref = 1e-4;
  p.T = 0.005;
  p.u0_frequency = 4;
  spdelab_variant v[2] = {};
  v[0].label = "deterministic";
  v[0].deterministic = 1;
  v[1].label = "q2";
  v[1].has_q = 1;
  v[1].q = 2.0;
  spdelab_evolution* evo = nullptr;
  REQUIRE(spdelab_evolve_run(&p, v, 2, 5, 0, &evo) == SPDELAB_OK);
  REQUIRE(spdelab_evolution_count(evo) == 2);
  CHECK(std::string(spdelab_evolution_label(evo, 1)) == "q2");
  std::size_t snaps = 0, nodes = 0, modes = 0, M = 0;
  double rho = 0;
  REQUIRE(spdelab_evolution_info(evo, 0, &snaps, &nodes, &modes, &M, &rho) == SPDELAB_OK);
  CHECK(snaps == 6);
  CHECK(nodes == 17);
  std::vector<double> u(nodes);
  double t = -1.0;
  REQUIRE(spdelab_evolution_snapshot(evo, 1, 0, &t, u.data()) == SPDELAB_OK);
  CHECK(t == 0.0);
  CHECK(u.front() == 0.0);
  CHECK(u.back() == 0.0);
  for (std::size_t k = 0; k < nodes; ++k)
    CHECK(std::abs(u[k] - std::sin(4.0 * std::numbers::pi * static_cast<double>(k) / 16.0)) < 1e-12);
  CHECK(spdelab_evolution_snapshot(evo, 2, 0, &t, u.data()) == SPDELAB_ERR_INVALID_ARGUMENT);

  const auto path = std::filesystem::temp_directory_path() / "spdelab_capi_evolve.csv";
  REQUIRE(spdelab_evolution_write_csv(evo, 0, path.c_str()) == SPDELAB_OK);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x,u");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == snaps * nodes);
  std::filesystem::remove(path);
  spdelab_evolution_destroy(evo);
}
