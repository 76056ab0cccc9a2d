#include "pedflow/cli/tables.hpp"

#include "pedflow/cli/format.hpp"
#include "pedflow/errors.hpp"

namespace pedflow::cli {

std::vector<double> xi_grid(double xi_min, double xi_max, std::size_t count) {
  if (count == 0) throw PreconditionError("xi grid needs at least one point");
  if (count == 1) return {xi_min};
  std::vector<double> xi(count);
  for (std::size_t k = 0; k < count; ++k) {
    xi[k] = xi_min + (xi_max - xi_min) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return xi;
}

void emit_dispersion_table(std::ostream& os, const ModelSpec& model, double rho_plus,
                           double rho_minus, double delta_diff, const std::vector<double>& xi) {
  const TildeSpeeds speeds = diffusive_speeds(model, rho_plus, rho_minus);
  const double delta = speeds.discriminant();
  os << "# rho_plus = " << num(rho_plus) << '\n';
  os << "# rho_minus = " << num(rho_minus) << '\n';
  os << "# delta_diff = " << num(delta_diff) << '\n';
  os << "# discriminant = " << num(delta) << '\n';
  if (delta < 0.0 && delta_diff > 0.0) {
    const StabilityReport r = instability_summary(speeds, delta_diff);
    os << "# unstable_xi_max = " << num(*r.unstable_xi_max) << '\n';
    os << "# dominant_xi = " << num(*r.dominant_xi) << '\n';
    os << "# max_growth_rate = " << num(*r.max_growth_rate) << '\n';
  } else {
    os << "# unstable_xi_max = 0\n";
    os << "# dominant_xi = nan\n";
    os << "# max_growth_rate = 0\n";
  }
  os << "xi,re_s_plus,im_s_plus,re_s_minus,im_s_minus\n";
  for (double x : xi) {
    const auto [sp, sm] = mode_frequencies(speeds, delta_diff, x);
    os << num(x) << ',' << num(sp.real()) << ',' << num(sp.imag()) << ',' << num(sm.real())
       << ',' << num(sm.imag()) << '\n';
  }
}

void emit_pressure_table(std::ostream& os, const PressureParams& params, double rho_min,
                         double rho_max, std::size_t count) {
  if (count < 2) throw PreconditionError("pressure table needs at least two rows");
  os << "rho,P,Q,p,dp,crossover_width\n";
  for (std::size_t k = 0; k < count; ++k) {
    const double rho =
        rho_min + (rho_max - rho_min) * static_cast<double>(k) / static_cast<double>(count - 1);
    const double width = rho > 0.0 ? crossover_width(params, rho) : 0.0;
    os << num(rho) << ',' << num(background_pressure(params, rho)) << ','
       << num(singular_correction_1w(params, rho)) << ',' << num(one_way_pressure(params, rho))
       << ',' << num(one_way_pressure_derivative(params, rho)) << ',' << num(width) << '\n';
  }
}

void emit_hyperbolicity_map(std::ostream& os, const HyperbolicityMap& map) {
  os << "rho_plus,rho_minus,admissible,hyperbolic,delta\n";
  for (std::size_t i = 0; i < map.resolution; ++i) {
    for (std::size_t j = 0; j < map.resolution; ++j) {
      const std::size_t k = map.at(i, j);
      os << num(map.density(i)) << ',' << num(map.density(j)) << ','
         << static_cast<int>(map.admissible[k]) << ',' << static_cast<int>(map.hyperbolic[k])
         << ',' << num(map.delta[k]) << '\n';
    }
  }
}

void emit_boundary(std::ostream& os, const std::vector<BoundaryPoint>& points) {
  os << "rho_plus,rho_minus\n";
  for (const auto& p : points) os << num(p.rho_plus) << ',' << num(p.rho_minus) << '\n';
}

}  // namespace pedflow::cli
