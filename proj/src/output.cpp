#include "spdelab/output.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace

void write_error_table_csv(const std::string& path, const ErrorTable& table) {
  auto out = open_csv(path);
  out << "level_param,u_error,order\n";
  for (const ErrorRow& r : table.rows) {
    out << r.level_param << ',' << r.u_error << ',';
    if (r.order) out << *r.order;
    out << '\n';
  }
  finish(out, path);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_csv(path);
  out << "t,x,u\n";
  const std::size_t K = traj.grid.K;
  for (const Snapshot& s : traj.snapshots) {
    for (std::size_t k = 0; k < K + 2; ++k) {
      const double u = (k == 0 || k == K + 1) ? 0.0 : s.u[k - 1];
      out << s.t << ',' << traj.grid.node(k) << ',' << u << '\n';
    }
  }
  finish(out, path);
}

void write_field_csv(const std::string& path, const FieldSample& field) {
  auto out = open_csv(path);
  out << "node_index,x,z,a\n";
  const std::size_t P = field.z.size();
  for (std::size_t k = 0; k < P; ++k) {
    const double x = P > 1 ? static_cast<double>(k) / static_cast<double>(P - 1) : 0.0;
    out << k << ',' << x << ',' << field.z[k] << ',' << field.a[k] << '\n';
  }
  finish(out, path);
}

void write_padding_csv(const std::string& path, const std::vector<PaddingRow>& rows) {
  auto out = open_csv(path);
  out << "M,rho_minus\n";
  for (const PaddingRow& r : rows) out << r.M << ',' << r.rho_minus << '\n';
  finish(out, path);
}

void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = open_csv(path);
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  finish(out, path);
}

double matern_closed_form(double q, double x) {
  expects(q > 0.0, "matern_closed_form: q must be positive");
  expects(x >= 0.0, "matern_closed_form: lag must be non-negative");
  if (x == 0.0) return 1.0;
  return std::exp((1.0 - q) * std::log(2.0) + q * std::log(x) - std::lgamma(q)) *
         std::cyl_bessel_k(q, x);
}

}  // namespace spdelab
