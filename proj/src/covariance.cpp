#include "spdelab/covariance.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

// Tail of int_L^inf l^-(2q+1) dl is L^-2q / (2q).
double tail_cutoff(double q, double quad_tol) {
  const double budget = quad_tol / (10.0 * covariance_prefactor(q));
  return std::pow(1.0 / (2.0 * q * budget), 1.0 / (2.0 * q));
}

// Padding lags beyond 1 with more than this many periods of cos(lx) on
// [0, lambda_max] go to the cosine-weighted double exponential rule.
constexpr double kMaxPeriods = 50.0;

double semi_infinite_integral(double q, double x, double* err) {
  using namespace boost::math::quadrature;
  auto decay = [q](double l) { return std::pow(1.0 + l * l, -(q + 0.5)); };
  if (x == 0.0) {
    exp_sinh<double> rule;
    double l1 = 0.0;
    return rule.integrate(decay, 0.0, std::numeric_limits<double>::infinity(),
                          1e-14, err, &l1);
  }
  // The rules cache nodes between calls, hence one per thread. Lags within
  // the unit interval carry O(1) values and need the tight relative target;
  // far padding lags are tiny and only need the absolute one.
  thread_local ooura_fourier_cos<double> near_rule(1e-13, 12);
  thread_local ooura_fourier_cos<double> far_rule;
  auto [value, rel] = (x <= 1.0 ? near_rule : far_rule).integrate(decay, x);
  *err = std::abs(value) * rel;
  return value;
}

double truncated_integral(double q, double x, double lambda_max, double* err) {
  auto integrand = [q, x](double l) {
    return std::cos(l * x) * std::pow(1.0 + l * l, -(q + 0.5));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, lambda_max, 20, 1e-14, err);
}

}  // namespace

double covariance_prefactor(double q) {
  return std::numbers::sqrt2 * std::exp(std::lgamma(q + 0.5) - std::lgamma(q)) *
         std::sqrt(2.0 / std::numbers::pi);
}

CovarianceSpec make_covariance_spec(double q, double quad_tol) {
  CovarianceSpec spec{q, quad_tol, 0.0};
  expects(q > 0.0 && std::isfinite(q), "covariance: q must be positive");
  expects(quad_tol > 0.0, "covariance: quad_tol must be positive");
  spec.lambda_max = tail_cutoff(q, quad_tol);
  return spec;
}

void validate(const CovarianceSpec& spec) {
  expects(spec.q > 0.0 && std::isfinite(spec.q), "covariance: q must be positive");
  expects(spec.quad_tol > 0.0, "covariance: quad_tol must be positive");
  expects(spec.lambda_max > 0.0, "covariance: lambda_max must be positive");
}

double eval_covariance(const CovarianceSpec& spec, double x) {
  validate(spec);
  expects(x >= 0.0 && std::isfinite(x), "covariance: lag must be non-negative");

  const double prefactor = covariance_prefactor(spec.q);
  double err = 0.0;
  double integral = 0.0;
  const double periods = spec.lambda_max * x / (2.0 * std::numbers::pi);
  if (spec.lambda_max <= kMaxFiniteCutoff && (x <= 1.0 || periods <= kMaxPeriods)) {
    integral = truncated_integral(spec.q, x, spec.lambda_max, &err);
  } else {
    integral = semi_infinite_integral(spec.q, x, &err);
    if (!(prefactor * err <= 0.9 * spec.quad_tol) && spec.lambda_max <= kMaxFiniteCutoff)
      integral = truncated_integral(spec.q, x, spec.lambda_max, &err);
  }

  const double residual = prefactor * err;
  if (!std::isfinite(integral) || residual > 0.9 * spec.quad_tol) {
    std::ostringstream msg;
    msg << "covariance quadrature did not converge for q=" << spec.q
        << " x=" << x << " (residual " << residual << ", tolerance "
        << spec.quad_tol << ")";
    throw QuadratureError(msg.str(), residual);
  }
  return prefactor * integral;
}

std::vector<double> covariance_lags(const CovarianceSpec& spec, double dx,
                                    std::size_t count) {
  validate(spec);
  expects(dx > 0.0, "covariance: lag spacing must be positive");

  // Padding searches revisit the same lag ladders; large lags are the
  // expensive ones, so tables are kept per (spec, dx) for the process.
  using Key = std::tuple<double, double, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::vector<double>> tables;

  std::lock_guard lock(mutex);
  auto& table = tables[Key{spec.q, spec.quad_tol, spec.lambda_max, dx}];
  while (table.size() < count)
    table.push_back(eval_covariance(spec, static_cast<double>(table.size()) * dx));
  return {table.begin(), table.begin() + static_cast<std::ptrdiff_t>(count)};
}

ToeplitzColumn first_column(const CovarianceSpec& spec, std::size_t P) {
  expects(P >= 2, "first_column: need at least two grid points");
  ToeplitzColumn col;
  col.dx = 1.0 / static_cast<double>(P - 1);
  col.values.resize(P);
  for (std::size_t k = 0; k < P; ++k)
    col.values[k] = eval_covariance(
        spec, static_cast<double>(k) / static_cast<double>(P - 1));
  return col;
}

}  // namespace spdelab
