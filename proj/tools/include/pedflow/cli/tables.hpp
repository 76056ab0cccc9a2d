#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "pedflow/analysis.hpp"
#include "pedflow/pressure.hpp"

namespace pedflow::cli {

/// Header lines `# key = value` with the band summary, then rows
/// `xi,re_s_plus,im_s_plus,re_s_minus,im_s_minus`.
void emit_dispersion_table(std::ostream& os, const ModelSpec& model, double rho_plus,
                           double rho_minus, double delta_diff, const std::vector<double>& xi);

/// Evenly spaced wave numbers in [xi_min, xi_max].
std::vector<double> xi_grid(double xi_min, double xi_max, std::size_t count);

/// Rows `rho,P,Q,p,dp,crossover_width` of the one-way law.
void emit_pressure_table(std::ostream& os, const PressureParams& params, double rho_min,
                         double rho_max, std::size_t count);

/// Rows `rho_plus,rho_minus,admissible,hyperbolic,delta`.
void emit_hyperbolicity_map(std::ostream& os, const HyperbolicityMap& map);
void emit_boundary(std::ostream& os, const std::vector<BoundaryPoint>& points);

}  // namespace pedflow::cli
