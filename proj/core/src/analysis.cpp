#include "pedflow/analysis.hpp"

#include <cmath>
#include <sstream>

#include "pedflow/errors.hpp"

namespace pedflow {

SpeedSet speed_set(const ModelSpec& model, double rho_plus, double rho_minus, double w_plus,
                   double w_minus) {
  if (model.kind() != ModelKind::TwoWayAR && model.kind() != ModelKind::TwoWayCAR) {
    throw PreconditionError("speed_set needs a two-way pressure model");
  }
  const auto& pp = model.pressure_params();
  const auto dp = pressure_partials(pp, model.q_plus(), rho_plus, rho_minus);
  const auto dm = pressure_partials(pp, model.q_minus(), rho_minus, rho_plus);
  const double u_plus = w_plus - model.pressure_plus(rho_plus, rho_minus);
  const double u_minus = -w_minus + model.pressure_minus(rho_plus, rho_minus);

  SpeedSet s;
  s.c_pp = dp.d_own;
  s.c_pm = dp.d_other;
  s.c_mp = dm.d_other;
  s.c_mm = dm.d_own;
  s.c_u_plus = u_plus - rho_plus * s.c_pp;
  s.c_u_minus = u_minus + rho_minus * s.c_mm;
  return s;
}

SpeedSet speed_set(const ModelSpec& model, double rho_plus, double rho_minus) {
  const double V = model.V();
  return speed_set(model, rho_plus, rho_minus, V, V);
}

double ar_discriminant(const SpeedSet& speeds, double rho_plus, double rho_minus) {
  const double d = speeds.c_u_plus - speeds.c_u_minus;
  return d * d - 4.0 * rho_plus * rho_minus * speeds.c_pm * speeds.c_mp;
}

EigenPair ar_eigenvalues(const SpeedSet& speeds, double delta) {
  if (delta < 0.0) {
    std::ostringstream os;
    os << "state is not hyperbolic (Delta = " << delta << ")";
    throw NonHyperbolicError(os.str(), delta);
  }
  const double mean = speeds.c_u_plus + speeds.c_u_minus;
  const double root = std::sqrt(delta);
  return {0.5 * (mean - root), 0.5 * (mean + root)};
}

TildeSpeeds diffusive_speeds(const ModelSpec& model, double rho_plus, double rho_minus) {
  TildeSpeeds t;
  switch (model.kind()) {
    case ModelKind::SimFlux: {
      const auto& fp = model.flux_shape();
      const auto plus = sim_flux_partials(fp, rho_plus, rho_minus);
      const auto minus = sim_flux_partials(fp, rho_minus, rho_plus);
      t.c_pp = plus.d_first;
      t.c_pm = plus.d_second;
      t.c_mm = minus.d_first;
      t.c_mp = minus.d_second;
      // g' jumps only at total density 1; a is a kink of g'' alone.
      t.one_sided = (rho_plus + rho_minus == 1.0);
      return t;
    }
    case ModelKind::TwoWayCAR: {
      const SpeedSet s = speed_set(model, rho_plus, rho_minus);
      t.c_pp = s.c_u_plus;
      t.c_pm = -rho_plus * s.c_pm;
      t.c_mm = -s.c_u_minus;
      t.c_mp = -rho_minus * s.c_mp;
      return t;
    }
    default:
      throw PreconditionError("diffusive speeds need TwoWayCAR or SimFlux");
  }
}

PhasePair dispersion(const TildeSpeeds& speeds, double delta_diff, double xi) {
  using cd = std::complex<double>;
  const double delta = speeds.discriminant();
  const cd root = delta >= 0.0 ? cd(std::sqrt(delta), 0.0) : cd(0.0, std::sqrt(-delta));
  const cd center(speeds.c_pp - speeds.c_mm, -2.0 * delta_diff * xi);
  return {0.5 * (center + root), 0.5 * (center - root)};
}

PhasePair mode_frequencies(const TildeSpeeds& speeds, double delta_diff, double xi) {
  const auto [lp, lm] = dispersion(speeds, delta_diff, xi);
  return {xi * lp, xi * lm};
}

double growth_rate(double delta, double delta_diff, double xi) {
  return 0.5 * std::sqrt(std::abs(delta)) * std::abs(xi) - delta_diff * xi * xi;
}

StabilityReport instability_summary(const TildeSpeeds& speeds, double delta_diff) {
  StabilityReport r;
  r.delta = speeds.discriminant();
  r.hyperbolic = r.delta >= 0.0;
  if (r.hyperbolic) {
    const double root = std::sqrt(r.delta);
    const double center = speeds.c_pp - speeds.c_mm;
    r.eigenvalues = EigenPair{0.5 * (center - root), 0.5 * (center + root)};
    return r;
  }
  if (!(delta_diff > 0.0)) {
    throw PreconditionError("unstable state needs a positive diffusivity for a finite band");
  }
  const double root = std::sqrt(-r.delta);
  r.unstable_xi_max = root / (2.0 * delta_diff);
  r.dominant_xi = root / (4.0 * delta_diff);
  r.max_growth_rate = -r.delta / (16.0 * delta_diff);
  r.dominant_length = 1.0 / *r.dominant_xi;
  return r;
}

double density_discriminant(const ModelSpec& model, double rho_plus, double rho_minus) {
  return diffusive_speeds(model, rho_plus, rho_minus).discriminant();
}

HyperbolicityMap hyperbolicity_map(const ModelSpec& model, std::size_t grid_resolution) {
  if (grid_resolution < 2) throw PreconditionError("grid resolution must be >= 2");
  if (model.kind() != ModelKind::SimFlux && model.kind() != ModelKind::TwoWayCAR) {
    throw PreconditionError("hyperbolicity map needs TwoWayCAR or SimFlux");
  }
  HyperbolicityMap map;
  map.resolution = grid_resolution;
  map.rho_max = model.rho_max();
  const std::size_t n = grid_resolution * grid_resolution;
  map.hyperbolic.assign(n, 0);
  map.admissible.assign(n, 0);
  map.delta.assign(n, 0.0);

  const bool pressure_kind = model.kind() != ModelKind::SimFlux;
  for (std::size_t i = 0; i < grid_resolution; ++i) {
    const double rp = map.density(i);
    for (std::size_t j = 0; j < grid_resolution; ++j) {
      const double rm = map.density(j);
      const std::size_t k = map.at(i, j);
      const bool inside = pressure_kind
                              ? rp + rm < map.rho_max * (1.0 - 1e-9)
                              : rp + rm <= map.rho_max;
      if (!inside) continue;
      map.admissible[k] = 1;
      map.delta[k] = density_discriminant(model, rp, rm);
      map.hyperbolic[k] = map.delta[k] >= 0.0 ? 1 : 0;
    }
  }
  return map;
}

namespace {

BoundaryPoint bisect_edge(const ModelSpec& model, BoundaryPoint a, BoundaryPoint b,
                          bool a_hyperbolic, double tolerance) {
  while (std::hypot(b.rho_plus - a.rho_plus, b.rho_minus - a.rho_minus) > tolerance) {
    const BoundaryPoint mid{0.5 * (a.rho_plus + b.rho_plus), 0.5 * (a.rho_minus + b.rho_minus)};
    const bool mid_hyperbolic = density_discriminant(model, mid.rho_plus, mid.rho_minus) >= 0.0;
    if (mid_hyperbolic == a_hyperbolic) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return {0.5 * (a.rho_plus + b.rho_plus), 0.5 * (a.rho_minus + b.rho_minus)};
}

}  // namespace

std::vector<BoundaryPoint> hyperbolicity_boundary(const ModelSpec& model,
                                                  const HyperbolicityMap& map,
                                                  double tolerance) {
  std::vector<BoundaryPoint> points;
  const std::size_t n = map.resolution;
  auto try_edge = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    const std::size_t k0 = map.at(i0, j0);
    const std::size_t k1 = map.at(i1, j1);
    if (!map.admissible[k0] || !map.admissible[k1]) return;
    if (map.hyperbolic[k0] == map.hyperbolic[k1]) return;
    points.push_back(bisect_edge(model, {map.density(i0), map.density(j0)},
                                 {map.density(i1), map.density(j1)}, map.hyperbolic[k0] != 0,
                                 tolerance));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i + 1 < n) try_edge(i, j, i + 1, j);
      if (j + 1 < n) try_edge(i, j, i, j + 1);
    }
  }
  return points;
}

}  // namespace pedflow
