#include "spdelab/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

std::size_t refinement_ratio(const Grid1D& coarse, const Grid1D& fine) {
  const std::size_t nc = coarse.K + 1;
  const std::size_t nf = fine.K + 1;
  if (nf < nc || nf % nc != 0) {
    std::ostringstream msg;
    msg << "grids are not nested: " << nc << " coarse cells vs " << nf << " fine cells";
    contract_violation(msg.str());
  }
  return nf / nc;
}

}  // namespace

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(K + 2);
  for (std::size_t k = 0; k < K + 2; ++k) x[k] = node(k);
  return x;
}

std::vector<double> Grid1D::interior_nodes() const {
  std::vector<double> x(K);
  for (std::size_t k = 0; k < K; ++k) x[k] = node(k + 1);
  return x;
}

Grid1D make_grid(std::size_t K) {
  expects(K >= 1, "grid: need at least one interior node");
  return Grid1D{K, 1.0 / static_cast<double>(K + 1)};
}

std::vector<double> TridiagonalSystem::apply(std::span<const double> x) const {
  const std::size_t n = size();
  expects(x.size() == n, "tridiagonal apply: dimension mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += sub[i - 1] * x[i - 1];
    if (i + 1 < n) s += super[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

double TridiagonalSystem::inf_norm() const {
  const std::size_t n = size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::abs(diag[i]);
    if (i > 0) s += std::abs(sub[i - 1]);
    if (i + 1 < n) s += std::abs(super[i]);
    best = std::max(best, s);
  }
  return best;
}

TridiagonalSystem add_scaled(const TridiagonalSystem& A, double s,
                             const TridiagonalSystem& B) {
  expects(A.size() == B.size(), "add_scaled: dimension mismatch");
  TridiagonalSystem C = A;
  for (std::size_t i = 0; i < C.diag.size(); ++i) C.diag[i] += s * B.diag[i];
  for (std::size_t i = 0; i < C.sub.size(); ++i) {
    C.sub[i] += s * B.sub[i];
    C.super[i] += s * B.super[i];
  }
  return C;
}

TridiagonalSystem assemble_mass(const Grid1D& grid) {
  expects(grid.K >= 1, "assemble_mass: need at least one interior node");
  const std::size_t K = grid.K;
  TridiagonalSystem M;
  M.diag.assign(K, 2.0 * grid.h / 3.0);
  M.sub.assign(K - 1, grid.h / 6.0);
  M.super = M.sub;
  return M;
}

TridiagonalSystem assemble_stiffness(const Grid1D& grid, std::span<const double> a_nodes) {
  const std::size_t K = grid.K;
  expects(K >= 1, "assemble_stiffness: need at least one interior node");
  expects(a_nodes.size() == K + 2, "assemble_stiffness: coefficient needs K+2 nodal values");
  for (double a : a_nodes)
    expects(a > 0.0 && std::isfinite(a), "assemble_stiffness: coefficient must be positive");

  // Element I_k = [x_{k-1}, x_k], k = 1..K+1.
  std::vector<double> abar(K + 2, 0.0);
  for (std::size_t k = 1; k <= K + 1; ++k) abar[k] = 0.5 * (a_nodes[k - 1] + a_nodes[k]);

  TridiagonalSystem S;
  S.diag.resize(K);
  S.sub.resize(K - 1);
  for (std::size_t i = 1; i <= K; ++i) S.diag[i - 1] = (abar[i] + abar[i + 1]) / grid.h;
  for (std::size_t i = 1; i < K; ++i) S.sub[i - 1] = -abar[i + 1] / grid.h;
  S.super = S.sub;
  return S;
}

TridiagonalFactorization::TridiagonalFactorization(const TridiagonalSystem& A) {
  const std::size_t n = A.size();
  expects(n >= 1, "tridiagonal: empty system");
  expects(A.sub.size() + 1 == n && A.super.size() + 1 == n,
          "tridiagonal: band lengths do not match the diagonal");
  sub_ = A.sub;
  upper_.resize(n > 0 ? n - 1 : 0);
  pivot_inv_.resize(n);
  double pivot = A.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = A.diag[i] - A.sub[i - 1] * upper_[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      std::ostringstream msg;
      msg << "tridiagonal: zero pivot at row " << i;
      throw Error(ErrorKind::SingularSystem, msg.str());
    }
    pivot_inv_[i] = 1.0 / pivot;
    if (i + 1 < n) upper_[i] = A.super[i] * pivot_inv_[i];
  }
}

void TridiagonalFactorization::solve(std::span<const double> b, std::span<double> x) const {
  const std::size_t n = size();
  expects(b.size() == n && x.size() == n, "tridiagonal solve: dimension mismatch");
  x[0] = b[0] * pivot_inv_[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = (b[i] - sub_[i - 1] * x[i - 1]) * pivot_inv_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
}

std::vector<double> TridiagonalFactorization::solve(std::span<const double> b) const {
  std::vector<double> x(size());
  solve(b, x);
  return x;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& A, std::span<const double> b) {
  return TridiagonalFactorization(A).solve(b);
}

double l2_norm(std::span<const double> u, const TridiagonalSystem& mass) {
  expects(u.size() == mass.size(), "l2_norm: dimension mismatch");
  const auto Mu = mass.apply(u);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * Mu[i];
  return std::sqrt(std::max(0.0, s));
}

FemFunction l2_project(std::span<const double> values_at_nodes, const TridiagonalSystem& mass) {
  expects(values_at_nodes.size() == mass.size(), "l2_project: dimension mismatch");
  const auto rhs = mass.apply(values_at_nodes);
  return FemFunction{solve_tridiagonal(mass, rhs)};
}

FemFunction restrict_to_coarse(const FemFunction& fine, const Grid1D& fine_grid,
                               const Grid1D& coarse_grid) {
  expects(fine.coeffs.size() == fine_grid.K, "restrict: size does not match fine grid");
  const std::size_t r = refinement_ratio(coarse_grid, fine_grid);
  FemFunction out{std::vector<double>(coarse_grid.K)};
  for (std::size_t i = 1; i <= coarse_grid.K; ++i) out.coeffs[i - 1] = fine.coeffs[i * r - 1];
  return out;
}

FemFunction prolong_to_fine(const FemFunction& coarse, const Grid1D& coarse_grid,
                            const Grid1D& fine_grid) {
  expects(coarse.coeffs.size() == coarse_grid.K, "prolong: size does not match coarse grid");
  const std::size_t r = refinement_ratio(coarse_grid, fine_grid);
  auto value = [&](std::size_t i) {  // coarse node i in 0..K+1
    return (i == 0 || i == coarse_grid.K + 1) ? 0.0 : coarse.coeffs[i - 1];
  };
  FemFunction out{std::vector<double>(fine_grid.K)};
  for (std::size_t k = 1; k <= fine_grid.K; ++k) {
    const std::size_t i = k / r;
    const std::size_t off = k % r;
    if (off == 0) {
      out.coeffs[k - 1] = value(i);
    } else {
      const double t = static_cast<double>(off) / static_cast<double>(r);
      out.coeffs[k - 1] = (1.0 - t) * value(i) + t * value(i + 1);
    }
  }
  return out;
}

std::vector<double> subsample_nodes(std::span<const double> fine_nodes,
                                    const Grid1D& fine_grid, const Grid1D& coarse_grid) {
  expects(fine_nodes.size() == fine_grid.K + 2, "subsample: needs K+2 fine nodal values");
  const std::size_t r = refinement_ratio(coarse_grid, fine_grid);
  std::vector<double> out(coarse_grid.K + 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fine_nodes[i * r];
  return out;
}

}  // namespace spdelab
