#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spdelab/error.hpp"
#include "spdelab/experiment.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/stepper.hpp"

using namespace spdelab;

namespace {

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  boost::random::mt19937_64 eng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  return v;
}

ModelSpec linear_model() {
  ModelSpec m;
  m.drift = DriftKind::Zero;
  m.coupling = NoiseCoupling::Zero;
  return m;
}

NoiseSource gaussian_source(std::uint64_t seed, double dt) {
  auto rng = std::make_shared<NormalStream>(seed);
  return [rng, dt](std::size_t, std::span<double> out) {
    rng->fill(out);
    for (double& v : out) v *= std::sqrt(dt);
  };
}

}  // namespace

TEST_CASE("model functions") {
  ModelSpec m;
  CHECK(drift_value(m, 2.0) == -6.0);
  CHECK(coupling_value(m, 3.0) == -4.0);
  m.coupling = NoiseCoupling::HalfLinear;
  CHECK(coupling_value(m, 3.0) == 1.5);
  m.coupling = NoiseCoupling::Zero;
  CHECK(coupling_value(m, 3.0) == 0.0);
  m.drift = DriftKind::Affine;
  m.drift_a = 1.0;
  m.drift_b = -2.0;
  CHECK(drift_value(m, 3.0) == -5.0);
  m.drift = DriftKind::Zero;
  CHECK(drift_value(m, 3.0) == 0.0);
}

TEST_CASE("init_state") {
  const auto g = make_grid(15);
  const std::vector<double> a(17, 1.0);
  SUBCASE("zero data") {
    const auto s = init_state(ModelSpec{}, g, a, std::vector<double>(15, 0.0), 1e-3);
    for (double v : s.u.coeffs) CHECK(v == 0.0);
    CHECK(s.n == 0);
  }
  SUBCASE("interpolant is kept") {
    const auto u0 = sine_initial_data(g, 2);
    const auto s = init_state(ModelSpec{}, g, a, u0, 1e-3);
    for (std::size_t k = 0; k < 15; ++k) CHECK(std::abs(s.u.coeffs[k] - u0[k]) < 1e-12);
  }
  CHECK_THROWS_AS(init_state(ModelSpec{}, g, a, std::vector<double>(15, 0.0), 0.0), Error);
  CHECK_THROWS_AS(init_state(ModelSpec{}, g, a, std::vector<double>(15, 0.0), -1e-3), Error);
  CHECK_THROWS_AS(init_state(ModelSpec{}, g, a, std::vector<double>(14, 0.0), 1e-3), Error);
}

TEST_CASE("one step against the dense oracle, K = 8") {
  const std::size_t K = 8;
  const auto g = make_grid(K);
  const auto a = uniform(K + 2, 0.2, 2.0, 31);
  const auto u0 = uniform(K, -1.0, 1.0, 32);
  const auto dW = uniform(K, -0.05, 0.05, 33);
  const double dt = 1e-2;
  for (auto coupling : {NoiseCoupling::HalfOneMinusSquare, NoiseCoupling::HalfLinear}) {
    ModelSpec model;
    model.coupling = coupling;
    auto s = init_state(model, g, a, u0, dt);
    step(s, dW);
    CHECK(s.n == 1);
    const auto start = l2_project(u0, assemble_mass(g)).coeffs;
    const auto ref = oracle::semi_implicit_step(
        K, a, start, dt,
        [&](double u) { return drift_value(model, u); },
        [&](double u) { return coupling_value(model, u); }, dW);
    for (std::size_t k = 0; k < K; ++k) CHECK(std::abs(s.u.coeffs[k] - ref[k]) < 1e-12);
  }
}

TEST_CASE("linear step solves the defining system") {
  const std::size_t K = 20;
  const auto g = make_grid(K);
  const auto a = uniform(K + 2, 1e-3, 3.0, 4);
  auto s = init_state(linear_model(), g, a, uniform(K, -1.0, 1.0, 5), 1e-3);
  const auto before = s.u.coeffs;
  step(s, uniform(K, -9.0, 9.0, 6));
  const auto lhs = s.iteration_matrix.apply(s.u.coeffs);
  const auto rhs = s.mass.apply(before);
  double res = 0.0, bnorm = 0.0, xnorm = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    res = std::max(res, std::abs(lhs[k] - rhs[k]));
    bnorm = std::max(bnorm, std::abs(rhs[k]));
    xnorm = std::max(xnorm, std::abs(s.u.coeffs[k]));
  }
  CHECK(res <= 1e-10 * (s.iteration_matrix.inf_norm() * xnorm + bnorm));
}

TEST_CASE("linear contraction over 1000 steps") {
  const std::size_t K = 31;
  const auto g = make_grid(K);
  const auto a = uniform(K + 2, 1e-3, 2.0, 7);
  auto s = init_state(linear_model(), g, a, uniform(K, -1.0, 1.0, 8), 1e-3);
  const std::vector<double> none(K, 0.0);
  double prev = l2_norm(s.u, s.mass);
  std::size_t violations = 0;
  for (int n = 0; n < 1000; ++n) {
    step(s, none);
    const double now = l2_norm(s.u, s.mass);
    if (now > prev) ++violations;
    prev = now;
  }
  CHECK(violations == 0);
  CHECK(prev > 0.0);
}

TEST_CASE("noise kick from rest, K = 1") {
  const auto g = make_grid(1);
  const std::vector<double> a{1.0, 1.0, 1.0};
  const double dt = 0.1, delta = 0.3;
  auto s = init_state(ModelSpec{}, g, a, std::vector<double>{0.0}, dt);
  step(s, std::vector<double>{delta});
  // (1/3 + 4 dt) u = (1/3)(delta/2)
  const double expected = (delta / 2.0 / 3.0) / (1.0 / 3.0 + 4.0 * dt);
  CHECK(s.u.coeffs[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("zero stays zero under half-linear coupling") {
  ModelSpec m;
  m.coupling = NoiseCoupling::HalfLinear;
  const std::size_t K = 15;
  const auto a = uniform(K + 2, 1e-3, 1.0, 9);
  const auto traj = evolve(m, make_grid(K), a, std::vector<double>(K, 0.0), 1e-3, 200,
                           gaussian_source(10, 1e-3), std::vector<double>{0.05, 0.1});
  for (const auto& snap : traj.snapshots)
    for (double v : snap.u) CHECK(v == 0.0);
}

TEST_CASE("evolve") {
  const std::size_t K = 15;
  const auto g = make_grid(K);
  const auto a = uniform(K + 2, 0.5, 1.5, 11);
  const auto u0 = sine_initial_data(g, 2);

  SUBCASE("no steps returns the projected data") {
    const auto traj = evolve(ModelSpec{}, g, a, u0, 1e-3, 0, nullptr, std::vector<double>{0.0});
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].t == 0.0);
    for (std::size_t k = 0; k < K; ++k) CHECK(std::abs(traj.final_state.coeffs[k] - u0[k]) < 1e-12);
  }
  SUBCASE("linear decay in the mass norm") {
    const auto M = assemble_mass(g);
    const auto traj = evolve(linear_model(), g, a, u0, 1e-3, 100, nullptr, {});
    CHECK(l2_norm(traj.final_state, M) <= l2_norm(u0, M));
  }
  SUBCASE("snapshot times") {
    const std::vector<double> times{0.0, 0.0026, 0.005};
    const auto traj = evolve(ModelSpec{}, g, a, u0, 1e-3, 10, gaussian_source(1, 1e-3), times);
    REQUIRE(traj.snapshots.size() == 4);
    CHECK(traj.snapshots[0].t == 0.0);
    for (std::size_t k = 0; k < K; ++k) CHECK(std::abs(traj.snapshots[0].u[k] - u0[k]) < 1e-12);
    CHECK(traj.snapshots[1].t == doctest::Approx(0.003));
    CHECK(traj.snapshots[2].t == doctest::Approx(0.005));
    CHECK(traj.snapshots[3].t == doctest::Approx(0.01));
    CHECK(traj.snapshots[3].u == traj.final_state.coeffs);
  }
  SUBCASE("same noise, same trajectory") {
    const auto x = evolve(ModelSpec{}, g, a, u0, 1e-3, 50, gaussian_source(5, 1e-3), {});
    const auto y = evolve(ModelSpec{}, g, a, u0, 1e-3, 50, gaussian_source(5, 1e-3), {});
    const auto z = evolve(ModelSpec{}, g, a, u0, 1e-3, 50, gaussian_source(6, 1e-3), {});
    CHECK(x.final_state.coeffs == y.final_state.coeffs);
    CHECK(x.final_state.coeffs != z.final_state.coeffs);
  }
}

TEST_CASE("divergence guard") {
  ModelSpec m;
  m.drift = DriftKind::Affine;
  m.drift_b = 1e4;
  m.coupling = NoiseCoupling::Zero;
  const std::size_t K = 7;
  const auto g = make_grid(K);
  try {
    evolve(m, g, std::vector<double>(K + 2, 1e-6), sine_initial_data(g, 1), 1e-1, 100, nullptr,
           {});
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
    CHECK(e.step() >= 1);
    CHECK(e.node() >= 1);
    CHECK(e.node() <= K);
  }
}

TEST_CASE("step argument checks") {
  const auto g = make_grid(4);
  auto s = init_state(ModelSpec{}, g, std::vector<double>(6, 1.0), std::vector<double>(4, 0.1), 1e-3);
  CHECK_THROWS_AS(step(s, std::vector<double>(3, 0.0)), Error);
  std::vector<double> small(3);
  CHECK_THROWS_AS(step(s, std::vector<double>(4, 0.0), small), Error);
}
