#include "spdelab/grf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "fft.hpp"
#include "spdelab/error.hpp"

namespace spdelab {

namespace {

using detail::ComplexDft;

std::vector<double> circulant_column(std::span<const double> padded) {
  // Minimal circulant extension of the (P+M)-point Toeplitz column:
  // (c_0, ..., c_{n}, c_{n-1}, ..., c_1) with n = P+M-1.
  const std::size_t n = padded.size() - 1;
  std::vector<double> ext(2 * n);
  for (std::size_t k = 0; k <= n; ++k) ext[k] = padded[k];
  for (std::size_t k = 1; k < n; ++k) ext[2 * n - k] = padded[k];
  return ext;
}

std::vector<double> circulant_spectrum(std::span<const double> ext) {
  const ComplexDft forward(ext.size(), ComplexDft::Direction::Forward);
  std::vector<std::complex<double>> in(ext.begin(), ext.end()), out(ext.size());
  forward.execute(in, out);
  std::vector<double> d(ext.size());
  std::transform(out.begin(), out.end(), d.begin(),
                 [](const std::complex<double>& v) { return v.real(); });
  return d;
}

double negative_radius(std::span<const double> d) {
  return std::max(0.0, -*std::min_element(d.begin(), d.end()));
}

std::vector<double> padded_column(const ToeplitzColumn& col, std::size_t M) {
  std::vector<double> padded(col.values);
  padded.resize(col.values.size() + M, 0.0);
  return padded;
}

double smooth_step_down(double t) {
  auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return f(1.0 - t) / (f(1.0 - t) + f(t));
}

}  // namespace

EmbeddingPlan build_plan_from_padded(std::span<const double> padded,
                                     std::size_t P) {
  expects(P >= 2, "embedding: need at least two grid points");
  expects(padded.size() >= P, "embedding: padded column shorter than P");

  EmbeddingPlan plan;
  plan.P = P;
  plan.M = padded.size() - P;
  plan.circ_first_col = circulant_column(padded);
  plan.ext_len = plan.circ_first_col.size();
  plan.d = circulant_spectrum(plan.circ_first_col);
  plan.lambda_plus.resize(plan.ext_len);
  plan.sqrt_lambda_scaled.resize(plan.ext_len);
  const double n = static_cast<double>(plan.ext_len);
  for (std::size_t j = 0; j < plan.ext_len; ++j) {
    plan.lambda_plus[j] = std::max(0.0, plan.d[j]);
    plan.sqrt_lambda_scaled[j] = std::sqrt(plan.lambda_plus[j] / n);
  }
  plan.rho_minus = negative_radius(plan.d);
  plan.inverse =
      std::make_shared<const ComplexDft>(plan.ext_len, ComplexDft::Direction::Backward);
  return plan;
}

EmbeddingPlan build_plan(const ToeplitzColumn& col, std::size_t M) {
  expects(col.values.size() >= 2, "embedding: need at least two grid points");
  const auto padded = padded_column(col, M);
  return build_plan_from_padded(padded, col.values.size());
}

std::vector<double> padded_covariance(const CovarianceSpec& spec, std::size_t P,
                                      std::size_t M, PaddingMode mode) {
  expects(P >= 2, "embedding: need at least two grid points");
  const double dx = 1.0 / static_cast<double>(P - 1);
  if (mode == PaddingMode::Zero) {
    auto padded = covariance_lags(spec, dx, P);
    padded.resize(P + M, 0.0);
    return padded;
  }
  auto padded = covariance_lags(spec, dx, P + M);
  if (mode == PaddingMode::Tapered && M > 0) {
    // Window over the padding lags only: 1 at x = 1, 0 at the last lag.
    const double span = static_cast<double>(M);
    for (std::size_t k = P; k < P + M; ++k)
      padded[k] *= smooth_step_down(static_cast<double>(k - (P - 1)) / span);
  }
  return padded;
}

EmbeddingPlan build_padded_plan(const CovarianceSpec& spec, std::size_t P,
                                std::size_t M, PaddingMode mode) {
  return build_plan_from_padded(padded_covariance(spec, P, M, mode), P);
}

std::pair<std::vector<double>, std::vector<double>> sample_pair(
    const EmbeddingPlan& plan, NormalStream& rng) {
  expects(plan.inverse != nullptr && plan.ext_len == plan.sqrt_lambda_scaled.size(),
          "sample_pair: plan is not initialised");
  std::vector<std::complex<double>> y(plan.ext_len), Z(plan.ext_len);
  for (std::size_t j = 0; j < plan.ext_len; ++j) {
    const double re = rng.next();
    const double im = rng.next();
    y[j] = plan.sqrt_lambda_scaled[j] * std::complex<double>(re, im);
  }
  plan.inverse->execute(y, Z);

  std::pair<std::vector<double>, std::vector<double>> out;
  out.first.resize(plan.P);
  out.second.resize(plan.P);
  for (std::size_t k = 0; k < plan.P; ++k) {
    out.first[k] = Z[k].real();
    out.second[k] = Z[k].imag();
  }
  return out;
}

FieldSample lift_to_coefficient(std::span<const double> z, double eps_a) {
  expects(eps_a > 0.0, "lift_to_coefficient: eps_a must be positive");
  expects(!z.empty(), "lift_to_coefficient: empty field");
  FieldSample s;
  s.z.assign(z.begin(), z.end());
  s.eps_a = eps_a;
  s.a.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) s.a[k] = eps_a * std::exp(z[k]);
  const auto [lo, hi] = std::minmax_element(s.a.begin(), s.a.end());
  s.a_min_observed = *lo;
  s.a_max_observed = *hi;
  return s;
}

std::vector<PaddingRow> padding_diagnostic(const ToeplitzColumn& col,
                                           std::span<const std::size_t> M_list) {
  expects(!M_list.empty(), "padding_diagnostic: empty padding list");
  expects(col.values.size() >= 2, "padding_diagnostic: need at least two grid points");
  std::vector<PaddingRow> rows;
  rows.reserve(M_list.size());
  for (std::size_t M : M_list) {
    const auto padded = padded_column(col, M);
    const auto d = circulant_spectrum(circulant_column(padded));
    rows.push_back({M, negative_radius(d)});
  }
  return rows;
}

std::vector<PaddingRow> padding_diagnostic(const CovarianceSpec& spec,
                                           std::size_t P,
                                           std::span<const std::size_t> M_list,
                                           PaddingMode mode) {
  expects(!M_list.empty(), "padding_diagnostic: empty padding list");
  expects(P >= 2, "padding_diagnostic: need at least two grid points");
  std::vector<PaddingRow> rows;
  rows.reserve(M_list.size());
  for (std::size_t M : M_list) {
    const auto padded = padded_covariance(spec, P, M, mode);
    rows.push_back({M, negative_radius(circulant_spectrum(circulant_column(padded)))});
  }
  return rows;
}

PaddingRow select_padding(const CovarianceSpec& spec, std::size_t P, PaddingMode mode,
                          double target, std::size_t max_multiple) {
  expects(P >= 2, "select_padding: need at least two grid points");
  const std::size_t step = std::max<std::size_t>(1, P / 4);
  const std::size_t M_max = max_multiple * P;

  PaddingRow best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t M = 0; M <= M_max; M += step) {
    const auto padded = padded_covariance(spec, P, M, mode);
    const double rho = negative_radius(circulant_spectrum(circulant_column(padded)));
    if (rho < best.rho_minus) best = {M, rho};
    if (rho <= target) return {M, rho};
  }
  return best;
}

void check_embedding(const EmbeddingPlan& plan, double hard_limit) {
  if (plan.rho_minus > hard_limit) {
    std::ostringstream msg;
    msg << "circulant embedding has rho_minus = " << plan.rho_minus
        << " above the hard limit " << hard_limit << " (P=" << plan.P
        << ", M=" << plan.M << "); increase the padding";
    throw Error(ErrorKind::Embedding, msg.str());
  }
}

}  // namespace spdelab
