#pragma once

// Hyperbolicity and linear stability of the two-way models.
//
// For the diffusive two-way system
//   d_t rho+ + d_x f(rho+, rho-) = delta d_xx rho+
//   d_t rho- - d_x f(rho-, rho+) = delta d_xx rho-
// the tilde speeds are the flux partials
//   c++ = d1 f(rho+, rho-), c+- = d2 f(rho+, rho-),
//   c-+ = d2 f(rho-, rho+), c-- = d1 f(rho-, rho+),
// and the discriminant is Delta = (c++ + c--)^2 - 4 c+- c-+.
// Fourier modes r ~ exp(i (xi x - s t)) have phase velocities
//   lambda(xi) = [c++ - c-- - 2 i delta xi +- sqrt(Delta)] / 2.

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pedflow/models.hpp"

namespace pedflow {

/// Pressure partials and uncoupled characteristic speeds of a two-way AR state.
struct SpeedSet {
  double c_pp = 0.0;  ///< d1 p(rho+, rho-)
  double c_pm = 0.0;  ///< d2 p(rho+, rho-)
  double c_mp = 0.0;  ///< d2 p(rho-, rho+)
  double c_mm = 0.0;  ///< d1 p(rho-, rho+)
  double c_u_plus = 0.0;   ///< u+ - rho+ c++
  double c_u_minus = 0.0;  ///< u- + rho- c--
};

/// Speeds for a TwoWayAR state (u recovered from w) or a TwoWayCAR state (w = V).
SpeedSet speed_set(const ModelSpec& model, double rho_plus, double rho_minus, double w_plus,
                   double w_minus);
SpeedSet speed_set(const ModelSpec& model, double rho_plus, double rho_minus);

/// (c_u+ - c_u-)^2 - 4 rho+ rho- c+- c-+ ; non-negative iff the AR system is hyperbolic.
double ar_discriminant(const SpeedSet& speeds, double rho_plus, double rho_minus);

struct EigenPair {
  double lower;
  double upper;
};

/// The two coupled characteristic velocities. Throws NonHyperbolicError for delta < 0.
EigenPair ar_eigenvalues(const SpeedSet& speeds, double delta);

struct TildeSpeeds {
  double c_pp = 0.0;
  double c_pm = 0.0;
  double c_mp = 0.0;
  double c_mm = 0.0;
  /// The state sits on a kink of the flux; the partials are left-sided.
  bool one_sided = false;

  double discriminant() const noexcept {
    const double s = c_pp + c_mm;
    return s * s - 4.0 * c_pm * c_mp;
  }
  /// Jacobian of (f(rho+, rho-), -f(rho-, rho+)).
  Matrix2 jacobian() const noexcept { return {c_pp, c_pm, -c_mp, -c_mm}; }
};

/// Flux partials of a TwoWayCAR or SimFlux state.
TildeSpeeds diffusive_speeds(const ModelSpec& model, double rho_plus, double rho_minus);

/// Centered finite-difference partials of an arbitrary flux f(first, second).
template <typename Flux>
TildeSpeeds finite_difference_speeds(Flux&& f, double rho_plus, double rho_minus,
                                     double step = 1e-7) {
  const double h2 = 2.0 * step;
  TildeSpeeds t;
  t.c_pp = (f(rho_plus + step, rho_minus) - f(rho_plus - step, rho_minus)) / h2;
  t.c_pm = (f(rho_plus, rho_minus + step) - f(rho_plus, rho_minus - step)) / h2;
  t.c_mm = (f(rho_minus + step, rho_plus) - f(rho_minus - step, rho_plus)) / h2;
  t.c_mp = (f(rho_minus, rho_plus + step) - f(rho_minus, rho_plus - step)) / h2;
  return t;
}

using PhasePair = std::pair<std::complex<double>, std::complex<double>>;

/// Phase velocities (lambda+, lambda-) at wave number xi.
PhasePair dispersion(const TildeSpeeds& speeds, double delta_diff, double xi);

/// Mode frequencies s = xi lambda; Im(s) > 0 means growth.
PhasePair mode_frequencies(const TildeSpeeds& speeds, double delta_diff, double xi);

/// sqrt|Delta| |xi| / 2 - delta xi^2, the growth rate of the unstable mode.
double growth_rate(double delta, double delta_diff, double xi);

struct StabilityReport {
  double delta = 0.0;
  bool hyperbolic = true;
  std::optional<EigenPair> eigenvalues;        ///< diffusion-free speeds, Delta >= 0
  std::optional<double> unstable_xi_max;       ///< sqrt|Delta| / (2 delta)
  std::optional<double> dominant_xi;           ///< sqrt|Delta| / (4 delta)
  std::optional<double> max_growth_rate;       ///< |Delta| / (16 delta)
  std::optional<double> dominant_length;       ///< 1 / dominant_xi
};

/// Requires delta_diff > 0 when Delta < 0.
StabilityReport instability_summary(const TildeSpeeds& speeds, double delta_diff);

// ---- density-space maps ----------------------------------------------------------

struct HyperbolicityMap {
  std::size_t resolution = 0;
  double rho_max = 1.0;
  /// Row-major (rho+ index, rho- index); 1 hyperbolic, 0 otherwise.
  std::vector<unsigned char> hyperbolic;
  /// 1 where rho+ + rho- lies in the admissible triangle.
  std::vector<unsigned char> admissible;
  std::vector<double> delta;

  double density(std::size_t index) const noexcept {
    return rho_max * static_cast<double>(index) / static_cast<double>(resolution - 1);
  }
  std::size_t at(std::size_t i_plus, std::size_t i_minus) const noexcept {
    return i_plus * resolution + i_minus;
  }
};

/// Sign of Delta on a uniform grid of [0, rho_max]^2. Points with
/// rho+ + rho- >= rho_max are inadmissible for pressure kinds and are marked 0.
HyperbolicityMap hyperbolicity_map(const ModelSpec& model, std::size_t grid_resolution);

struct BoundaryPoint {
  double rho_plus;
  double rho_minus;
};

/// Zero level set of Delta located by bisection along every grid edge with a sign change.
std::vector<BoundaryPoint> hyperbolicity_boundary(const ModelSpec& model,
                                                  const HyperbolicityMap& map,
                                                  double tolerance = 1e-6);

/// Delta at a density pair; pressure kinds use the CAR identification (w = V).
double density_discriminant(const ModelSpec& model, double rho_plus, double rho_minus);

}  // namespace pedflow
