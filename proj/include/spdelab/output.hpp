#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spdelab/experiment.hpp"
#include "spdelab/grf.hpp"

namespace spdelab {

// All CSV files: one header line, '.' decimal separator, 17 significant
// digits. Failures raise Error(ErrorKind::Io).

/// level_param,u_error,order (order empty on the first row)
void write_error_table_csv(const std::string& path, const ErrorTable& table);

/// t,x,u for every snapshot and every node, boundary nodes included.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// node_index,x,z,a
void write_field_csv(const std::string& path, const FieldSample& field);

/// M,rho_minus
void write_padding_csv(const std::string& path, const std::vector<PaddingRow>& rows);

/// key = value lines, in the order given.
void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& entries);

/// Closed-form Matern covariance 2^(1-q) x^q K_q(x) / G(q), used by the
/// covariance-check diagnostic to cross-check the quadrature.
double matern_closed_form(double q, double x);

}  // namespace spdelab
