#pragma once

#include <cstddef>
#include <vector>

namespace spdelab {

/// Whittle-Matern covariance with smoothness q, normalised to unit variance:
///
///   c_q(x) = sqrt(2) G(q+1/2)/G(q) * int_0^inf sqrt(2/pi) cos(lx) (1+l^2)^-(q+1/2) dl
///
/// The improper integral is truncated at `lambda_max`, chosen so the
/// algebraic tail stays below quad_tol/10 after the prefactor is applied.
struct CovarianceSpec {
  double q = 2.0;
  double quad_tol = 1e-10;
  double lambda_max = 0.0;
};

/// Builds a spec with the tail-bound cutoff filled in. Requires q > 0 and
/// quad_tol > 0; experiment configs additionally require q >= 2.
CovarianceSpec make_covariance_spec(double q, double quad_tol = 1e-10);

void validate(const CovarianceSpec& spec);

/// Truncation point above which the finite-interval rule is abandoned for
/// semi-infinite rules (only rough fields, q well below 2, get there).
inline constexpr double kMaxFiniteCutoff = 1e4;

/// sqrt(2) G(q+1/2)/G(q) * sqrt(2/pi)
double covariance_prefactor(double q);

/// c_q(x) for a lag x >= 0. Lags beyond 1 are only used by padded embeddings.
/// Throws QuadratureError if the rule misses quad_tol.
double eval_covariance(const CovarianceSpec& spec, double x);

/// First column of the symmetric Toeplitz covariance matrix of P uniformly
/// spaced points on [0, 1].
struct ToeplitzColumn {
  std::vector<double> values;
  double dx = 0.0;
};

ToeplitzColumn first_column(const CovarianceSpec& spec, std::size_t P);

/// Covariance at lags k*dx, k = 0..count-1, for an arbitrary spacing. Used to
/// extend a column past x = 1 for padding.
std::vector<double> covariance_lags(const CovarianceSpec& spec, double dx,
                                    std::size_t count);

}  // namespace spdelab
