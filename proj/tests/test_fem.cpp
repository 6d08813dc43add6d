#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "spdelab/error.hpp"
#include "spdelab/fem.hpp"
#include "spdelab/rng.hpp"

using namespace spdelab;

namespace {

void check_against_dense(const TridiagonalSystem& A, const oracle::Dense& D, double tol) {
  const std::size_t K = A.size();
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      double v = 0.0;
      if (i == j) v = A.diag[i];
      else if (j == i + 1) v = A.super[i];
      else if (i == j + 1) v = A.sub[j];
      CHECK(std::abs(v - D[i][j]) < tol);
    }
}

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  boost::random::mt19937_64 eng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  return v;
}

}  // namespace

TEST_CASE("grid") {
  const auto g = make_grid(3);
  CHECK(g.K == 3);
  CHECK(g.h == 0.25);
  CHECK(g.nodes() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(g.interior_nodes() == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(grid_with_cells(64).K == 63);
  CHECK_THROWS_AS(make_grid(0), Error);
}

TEST_CASE("mass matrix") {
  SUBCASE("one hat") {
    const auto M = assemble_mass(make_grid(1));
    REQUIRE(M.size() == 1);
    CHECK(M.diag[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("three hats") {
    const auto M = assemble_mass(make_grid(3));
    for (double d : M.diag) CHECK(d == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    for (double o : M.sub) CHECK(o == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
    CHECK(M.sub == M.super);
  }
  SUBCASE("interior row sums equal h and match element assembly") {
    const auto g = make_grid(9);
    const auto M = assemble_mass(g);
    for (std::size_t i = 1; i + 1 < 9; ++i)
      CHECK(M.sub[i - 1] + M.diag[i] + M.super[i] == doctest::Approx(g.h).epsilon(1e-14));
    check_against_dense(M, oracle::mass_matrix(9), 1e-15);
  }
}

TEST_CASE("stiffness matrix") {
  SUBCASE("unit coefficient, one hat") {
    const auto S = assemble_stiffness(make_grid(1), std::vector<double>(3, 1.0));
    CHECK(S.diag[0] == doctest::Approx(4.0).epsilon(1e-15));
  }
  SUBCASE("unit coefficient, three hats") {
    const auto S = assemble_stiffness(make_grid(3), std::vector<double>(5, 1.0));
    for (double d : S.diag) CHECK(d == doctest::Approx(8.0).epsilon(1e-15));
    for (double o : S.sub) CHECK(o == doctest::Approx(-4.0).epsilon(1e-15));
  }
  SUBCASE("linear in the coefficient") {
    const auto g = make_grid(6);
    const auto a = uniform(8, 0.5, 2.0, 1);
    std::vector<double> a3(a);
    for (double& v : a3) v *= 3.0;
    const auto S = assemble_stiffness(g, a);
    const auto S3 = assemble_stiffness(g, a3);
    for (std::size_t i = 0; i < 6; ++i) CHECK(S3.diag[i] == doctest::Approx(3.0 * S.diag[i]));
    for (std::size_t i = 0; i < 5; ++i) CHECK(S3.sub[i] == doctest::Approx(3.0 * S.sub[i]));
  }
  SUBCASE("variable coefficient matches element assembly") {
    const auto a = uniform(10, 1e-3, 5e-3, 2);
    check_against_dense(assemble_stiffness(make_grid(8), a), oracle::stiffness_matrix(8, a), 1e-12);
  }
  CHECK_THROWS_AS(assemble_stiffness(make_grid(3), std::vector<double>(4, 1.0)), Error);
  CHECK_THROWS_AS(assemble_stiffness(make_grid(3), std::vector<double>{1, 1, -1, 1, 1}), Error);
}

TEST_CASE("tridiagonal solves") {
  SUBCASE("identity") {
    TridiagonalSystem I{{0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0}};
    const std::vector<double> b{3, -1, 2.5, 7};
    CHECK(solve_tridiagonal(I, b) == b);
  }
  SUBCASE("random SPD system against Gaussian elimination") {
    const std::size_t K = 8;
    const auto g = make_grid(K);
    const auto a = uniform(K + 2, 0.1, 3.0, 5);
    const auto A = add_scaled(assemble_mass(g), 0.01, assemble_stiffness(g, a));
    const auto b = uniform(K, -1.0, 1.0, 6);
    auto D = oracle::mass_matrix(K);
    const auto S = oracle::stiffness_matrix(K, a);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) D[i][j] += 0.01 * S[i][j];
    const auto ref = oracle::dense_solve(D, b);
    const auto x = solve_tridiagonal(A, b);
    for (std::size_t i = 0; i < K; ++i) CHECK(std::abs(x[i] - ref[i]) < 1e-12);
  }
  SUBCASE("mass round trip") {
    const auto M = assemble_mass(make_grid(3));
    const std::vector<double> x{0.3, -1.2, 2.0};
    const auto back = TridiagonalFactorization(M).solve(M.apply(x));
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
  }
  SUBCASE("zero pivot") {
    TridiagonalSystem Z{{1}, {0, 1}, {1}};
    try {
      TridiagonalFactorization f(Z);
      FAIL("expected a singular system error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularSystem);
    }
  }
  SUBCASE("size mismatch") {
    const TridiagonalFactorization f(assemble_mass(make_grid(3)));
    std::vector<double> b(2), x(3);
    CHECK_THROWS_AS(f.solve(b, x), Error);
  }
}

TEST_CASE("tridiagonal utilities") {
  TridiagonalSystem A{{1, 2}, {4, 5, 6}, {-1, -2}};
  CHECK(A.apply(std::vector<double>{1, 1, 1}) == std::vector<double>{3, 4, 8});
  CHECK(A.inf_norm() == 8.0);
  const auto B = add_scaled(A, 2.0, A);
  CHECK(B.diag == std::vector<double>{12, 15, 18});
}

TEST_CASE("L2 norm") {
  const auto g = make_grid(255);
  const auto M = assemble_mass(g);
  CHECK(l2_norm(std::vector<double>(255, 0.0), M) == 0.0);
  std::vector<double> s(255);
  for (std::size_t k = 0; k < 255; ++k) s[k] = std::sin(std::numbers::pi * g.node(k + 1));
  CHECK(std::abs(l2_norm(s, M) - 1.0 / std::numbers::sqrt2) < 1e-4);
  std::vector<double> s3(s);
  for (double& v : s3) v *= -3.0;
  CHECK(l2_norm(s3, M) == doctest::Approx(3.0 * l2_norm(s, M)).epsilon(1e-12));
  CHECK(l2_norm(FemFunction{s}, M) == l2_norm(s, M));
}

TEST_CASE("L2 projection is the identity on V_h") {
  SUBCASE("arbitrary coefficients") {
    const auto M = assemble_mass(make_grid(10));
    const auto w = uniform(10, -2.0, 2.0, 9);
    const auto p = l2_project(w, M);
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(p.coeffs[i] - w[i]) < 1e-12);
  }
  SUBCASE("zero") {
    const auto p = l2_project(std::vector<double>(5, 0.0), assemble_mass(make_grid(5)));
    for (double v : p.coeffs) CHECK(v == 0.0);
  }
  SUBCASE("interpolant of x(1-x)") {
    const auto g = make_grid(63);
    std::vector<double> w(63);
    for (std::size_t k = 0; k < 63; ++k) w[k] = g.node(k + 1) * (1.0 - g.node(k + 1));
    const auto p = l2_project(w, assemble_mass(g));
    for (std::size_t i = 0; i < 63; ++i) CHECK(std::abs(p.coeffs[i] - w[i]) < 1e-12);
  }
}

TEST_CASE("grid transfer on nested meshes") {
  const auto coarse = grid_with_cells(8);
  const auto fine = grid_with_cells(32);
  const FemFunction u{uniform(coarse.K, -1.0, 1.0, 12)};
  const auto up = prolong_to_fine(u, coarse, fine);
  REQUIRE(up.coeffs.size() == fine.K);
  const auto down = restrict_to_coarse(up, fine, coarse);
  for (std::size_t i = 0; i < coarse.K; ++i) CHECK(std::abs(down.coeffs[i] - u.coeffs[i]) < 1e-15);
  CHECK(l2_norm(up, assemble_mass(fine)) ==
        doctest::Approx(l2_norm(u, assemble_mass(coarse))).epsilon(1e-12));
  const auto zero = prolong_to_fine(FemFunction{std::vector<double>(coarse.K, 0.0)}, coarse, fine);
  for (double v : zero.coeffs) CHECK(v == 0.0);
  // linear interpolation at the midpoint between two coarse nodes
  CHECK(up.coeffs[1] == doctest::Approx(0.5 * u.coeffs[0]).epsilon(1e-15));
  CHECK_THROWS_AS(prolong_to_fine(u, coarse, grid_with_cells(12)), Error);
  CHECK_THROWS_AS(restrict_to_coarse(up, fine, grid_with_cells(12)), Error);
}

TEST_CASE("node subsampling") {
  const auto fine = grid_with_cells(8);
  const auto coarse = grid_with_cells(2);
  const std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(subsample_nodes(v, fine, coarse) == std::vector<double>{0, 4, 8});
  CHECK(subsample_nodes(v, fine, fine) == v);
  CHECK_THROWS_AS(subsample_nodes(std::vector<double>(5), fine, coarse), Error);
}
