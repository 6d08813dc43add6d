#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "spdelab/covariance.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

namespace detail {
class ComplexDft;
}

/// How the Toeplitz column is lengthened before the minimal circulant
/// extension.
///
///  - Zero: append M zeros (literal zero padding).
///  - Covariance: append the covariance at lags P..P+M-1, i.e. embed the
///    covariance of a grid extended by M points and keep the first P.
///  - Tapered: covariance padding multiplied by a smooth window that falls
///    from 1 at the last target lag to 0 at the last padding lag.
///
/// The first P entries are the exact covariance in every mode, so the
/// sampled law is exact whenever the extension is nonnegative definite.
/// Zero padding leaves rho_minus of order one for the smooth unit-length
/// Matern fields used here; the other two drive it to zero, Tapered with
/// the least padding for q up to about 3.5.
enum class PaddingMode { Zero, Covariance, Tapered };

/// Circulant embedding of a P x P symmetric Toeplitz covariance.
///
/// `d` is the unnormalised forward DFT of `circ_first_col`; the circulant
/// matrix factors as W diag(d) W^* with W the unitary inverse DFT.
struct EmbeddingPlan {
  std::size_t P = 0;
  std::size_t M = 0;
  std::size_t ext_len = 0;
  std::vector<double> circ_first_col;
  std::vector<double> d;
  std::vector<double> lambda_plus;
  double rho_minus = 0.0;

  std::vector<double> sqrt_lambda_scaled;  // sqrt(lambda_plus / ext_len)
  std::shared_ptr<const detail::ComplexDft> inverse;
};

/// Minimal circulant extension of `padded` (length P+M). The first P entries
/// are the target column; the remaining M are the padding.
EmbeddingPlan build_plan_from_padded(std::span<const double> padded,
                                     std::size_t P);

/// Zero padding of length M.
EmbeddingPlan build_plan(const ToeplitzColumn& col, std::size_t M);

/// Column of length P+M for the P-point grid on [0, 1] (spacing 1/(P-1)).
std::vector<double> padded_covariance(const CovarianceSpec& spec, std::size_t P,
                                      std::size_t M, PaddingMode mode);

EmbeddingPlan build_padded_plan(const CovarianceSpec& spec, std::size_t P,
                                std::size_t M, PaddingMode mode);

/// Two independent samples of the P-point field (real and imaginary parts of
/// Z = W Lambda_+^{1/2} xi). Draw order: Re xi_j then Im xi_j for j = 0..n-1.
std::pair<std::vector<double>, std::vector<double>> sample_pair(
    const EmbeddingPlan& plan, NormalStream& rng);

struct FieldSample {
  std::vector<double> z;
  std::vector<double> a;
  double eps_a = 0.0;
  double a_min_observed = 0.0;
  double a_max_observed = 0.0;
};

FieldSample lift_to_coefficient(std::span<const double> z, double eps_a);

struct PaddingRow {
  std::size_t M = 0;
  double rho_minus = 0.0;
};

std::vector<PaddingRow> padding_diagnostic(const ToeplitzColumn& col,
                                           std::span<const std::size_t> M_list);

std::vector<PaddingRow> padding_diagnostic(const CovarianceSpec& spec,
                                           std::size_t P,
                                           std::span<const std::size_t> M_list,
                                           PaddingMode mode);

/// Smallest M on the ladder 0, P/4, P/2, ... up to max_multiple*P whose
/// embedding has rho_minus <= target. If none reaches the target, returns
/// the rung with the smallest rho_minus.
PaddingRow select_padding(const CovarianceSpec& spec, std::size_t P, PaddingMode mode,
                          double target = 1e-10, std::size_t max_multiple = 32);

/// Throws an Embedding error if plan.rho_minus exceeds hard_limit.
void check_embedding(const EmbeddingPlan& plan, double hard_limit);

}  // namespace spdelab
