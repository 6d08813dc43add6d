#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spdelab {

/// Uniform grid on [0, 1] with K interior nodes, h = 1/(K+1), x_k = k h.
struct Grid1D {
  std::size_t K = 0;
  double h = 0.0;

  double node(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(K + 1); }
  /// All K+2 nodes including both boundary points.
  std::vector<double> nodes() const;
  std::vector<double> interior_nodes() const;
};

Grid1D make_grid(std::size_t K);

/// Grid with `cells` elements (h = 1/cells).
inline Grid1D grid_with_cells(std::size_t cells) { return make_grid(cells - 1); }

struct TridiagonalSystem {
  std::vector<double> sub;    // K-1
  std::vector<double> diag;   // K
  std::vector<double> super;  // K-1

  std::size_t size() const noexcept { return diag.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  double inf_norm() const;
};

/// A + s B, entrywise.
TridiagonalSystem add_scaled(const TridiagonalSystem& A, double s,
                             const TridiagonalSystem& B);

/// Interior nodal coefficients of a P1 function with zero boundary values.
struct FemFunction {
  std::vector<double> coeffs;
};

TridiagonalSystem assemble_mass(const Grid1D& grid);

/// Stiffness with the element coefficient taken as the mean of its two
/// nodal values. `a_nodes` covers all K+2 nodes.
TridiagonalSystem assemble_stiffness(const Grid1D& grid, std::span<const double> a_nodes);

/// Thomas elimination without pivoting; the systems here are symmetric
/// positive definite and diagonally dominant. Factor once, solve many.
class TridiagonalFactorization {
 public:
  TridiagonalFactorization() = default;
  explicit TridiagonalFactorization(const TridiagonalSystem& A);

  std::size_t size() const noexcept { return pivot_inv_.size(); }
  void solve(std::span<const double> b, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;

 private:
  std::vector<double> sub_;
  std::vector<double> upper_;      // super_i / pivot_i
  std::vector<double> pivot_inv_;  // 1 / pivot_i
};

std::vector<double> solve_tridiagonal(const TridiagonalSystem& A, std::span<const double> b);

/// sqrt(u^T M u): the exact L2 norm of the piecewise linear function.
double l2_norm(std::span<const double> u, const TridiagonalSystem& mass);
inline double l2_norm(const FemFunction& u, const TridiagonalSystem& mass) {
  return l2_norm(u.coeffs, mass);
}

/// L2 projection onto V_h of the function given by its interior nodal values.
/// The load vector uses the nodal interpolant, so this is the identity on V_h.
FemFunction l2_project(std::span<const double> values_at_nodes,
                       const TridiagonalSystem& mass);

/// Nested grids only: the fine cell count must be a multiple of the coarse one.
FemFunction restrict_to_coarse(const FemFunction& fine, const Grid1D& fine_grid,
                               const Grid1D& coarse_grid);
FemFunction prolong_to_fine(const FemFunction& coarse, const Grid1D& coarse_grid,
                            const Grid1D& fine_grid);

/// Samples a nodal field given on all nodes of `fine_grid` at the nodes of
/// `coarse_grid` (both endpoints included).
std::vector<double> subsample_nodes(std::span<const double> fine_nodes,
                                    const Grid1D& fine_grid, const Grid1D& coarse_grid);

}  // namespace spdelab
