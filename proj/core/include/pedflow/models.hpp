#pragma once

// The Aw-Rascle model family expressed in conserved variables.
//
//   kind        conserved vector              flux
//   OneWayAR    (rho, y = rho w)              (rho u, y u),             u = w - p(rho)
//   OneWayCAR   (rho)                         rho (V - p(rho))
//   TwoWayAR    (rho+, rho-, y+, y-)          (rho+ u+, rho- u-, y+ u+, y- u-)
//                                             u+ = w+ - p(rho+, rho-), u- = -w- + p(rho-, rho+)
//   TwoWayCAR   (rho+, rho-)                  (rho+ (V - p(rho+, rho-)), -rho- (V - p(rho-, rho+)))
//   SimFlux     (rho+, rho-)                  (f(rho+, rho-), -f(rho-, rho+)),
//                                             f(a, b) = a g(a + b) / (a + b)
//
// Densities always occupy the leading rows of the conserved vector.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "pedflow/pressure.hpp"

namespace pedflow {

enum class ModelKind { OneWayAR, OneWayCAR, TwoWayAR, TwoWayCAR, SimFlux };

std::string_view to_string(ModelKind kind);

/// Shape of the total-density flux g used by the simulation flux: quadratic,
/// increasing on [0, a], decreasing on [a, 1], zero elsewhere.
struct SimFluxParams {
  double a = 0.7;
};

/// Below this density an AR cell is treated as vacuum (u = w = 0).
inline constexpr double kVacuumFloor = 1e-12;

/// Largest number of conserved components of any kind.
inline constexpr std::size_t kMaxComponents = 4;

class ModelSpec {
 public:
  static ModelSpec one_way_ar(const PressureParams& pressure);
  static ModelSpec one_way_car(const PressureParams& pressure, double V);
  static ModelSpec two_way_ar(const PressureParams& pressure, CrowdingWeight q = {});
  static ModelSpec two_way_ar(const PressureParams& pressure, CrowdingWeight q_plus,
                              CrowdingWeight q_minus);
  static ModelSpec two_way_car(const PressureParams& pressure, double V, CrowdingWeight q = {});
  static ModelSpec two_way_car(const PressureParams& pressure, double V, CrowdingWeight q_plus,
                               CrowdingWeight q_minus);
  static ModelSpec sim_flux(SimFluxParams params);

  ModelKind kind() const noexcept { return kind_; }
  std::size_t n_conserved() const noexcept;
  std::size_t n_densities() const noexcept;
  bool is_two_way() const noexcept;
  bool is_ar() const noexcept {
    return kind_ == ModelKind::OneWayAR || kind_ == ModelKind::TwoWayAR;
  }

  /// Present for every kind except SimFlux.
  const std::optional<PressureParams>& pressure() const noexcept { return pressure_; }
  const PressureParams& pressure_params() const;
  const CrowdingWeight& q_plus() const noexcept { return q_plus_; }
  const CrowdingWeight& q_minus() const noexcept { return q_minus_; }
  double V() const;
  const SimFluxParams& flux_shape() const;

  /// Congestion density for pressure kinds, 1 for SimFlux.
  double rho_max() const noexcept;

  /// Offset felt by the plus (resp. minus) species of a two-way kind.
  double pressure_plus(double rho_plus, double rho_minus) const;
  double pressure_minus(double rho_plus, double rho_minus) const;

 private:
  ModelSpec() = default;

  ModelKind kind_ = ModelKind::SimFlux;
  std::optional<PressureParams> pressure_;
  CrowdingWeight q_plus_{};
  CrowdingWeight q_minus_{};
  double V_ = 0.0;
  SimFluxParams flux_shape_{};
};

// ---- one-way ---------------------------------------------------------------

/// rho (V - p(rho)) for OneWayCAR.
double car_flux_1w(const ModelSpec& model, double rho);

/// u - rho p'(rho), the speed carrying velocity information in the one-way AR model.
double characteristic_speed_1w(const ModelSpec& model, double rho, double u);

struct MovingSteady {
  double g_density;
  double s_density;
};

/// Split of a CAR density into moving (speed V) and steady pedestrians for a
/// given offset 0 <= p <= V.
MovingSteady moving_steady_split(const ModelSpec& model, double rho, double p_value);

// ---- two-way ---------------------------------------------------------------

struct FluxPair {
  double plus;
  double minus;
};

FluxPair two_way_car_flux(const ModelSpec& model, double rho_plus, double rho_minus);

double g_profile(const SimFluxParams& params, double x);

enum class Side { Left, Right };

/// One-sided derivative of g; the two sides differ only at x = 1 (and x = 0).
double g_profile_derivative(const SimFluxParams& params, double x, Side side = Side::Left);

/// f(rho+, rho-) = rho+ g(rho) / rho with rho = rho+ + rho-; 0 for rho >= 1.
double sim_flux(const SimFluxParams& params, double rho_plus, double rho_minus);

/// Partials (d/d first, d/d second) of sim_flux, one-sided at kinks.
struct FluxPartials {
  double d_first;
  double d_second;
};
FluxPartials sim_flux_partials(const SimFluxParams& params, double rho_plus, double rho_minus,
                               Side side = Side::Left);

/// Rates at which steady pedestrians start walking, two-way CAR:
/// d/dt s+ and d/dt s- for the given moving-density gradients.
FluxPair steady_transfer_rates(const ModelSpec& model, double rho_plus, double rho_minus,
                               double dgdx_plus, double dgdx_minus);

/// Row-major 2x2 matrix.
struct Matrix2 {
  double a11, a12, a21, a22;

  double trace() const noexcept { return a11 + a22; }
  double det() const noexcept { return a11 * a22 - a12 * a21; }
  /// trace^2 - 4 det; negative for a complex-conjugate eigenpair.
  double discriminant() const noexcept;
  /// Largest eigenvalue modulus (complex modulus when the pair is complex).
  double spectral_radius() const noexcept;
};

/// Convection matrix of the density pair: d_t (rho+, rho-) + A d_x (rho+, rho-) = 0.
/// For TwoWayCAR and SimFlux this is the flux Jacobian. For TwoWayAR it is the
/// density block evaluated with the supplied velocities (u+, u-).
Matrix2 density_convection_matrix(const ModelSpec& model, double rho_plus, double rho_minus,
                                  Side side = Side::Left);
Matrix2 ar_convection_matrix(const ModelSpec& model, double rho_plus, double rho_minus,
                             double u_plus, double u_minus);

// ---- conserved-variable interface used by the solver -----------------------

using StateVec = std::array<double, kMaxComponents>;

/// Physical flux of the conserved vector `U` (length model.n_conserved()).
void physical_flux(const ModelSpec& model, std::span<const double> U, std::span<double> F);

/// Flux of an AR conserved vector. Alias of physical_flux restricted to AR kinds.
void ar_conserved_flux(const ModelSpec& model, std::span<const double> U, std::span<double> F);

/// Largest modulus over the characteristic speeds at U. In non-hyperbolic
/// states the complex pair contributes its modulus.
double spectral_radius(const ModelSpec& model, std::span<const double> U);

/// Velocities (u+, u-) or (u, 0) recovered from a conserved AR vector.
FluxPair ar_velocities(const ModelSpec& model, std::span<const double> U);

/// AR kinds are reconstructed in (rho, w); other kinds in conserved variables.
void to_reconstruction_variables(const ModelSpec& model, std::span<double> U);
void from_reconstruction_variables(const ModelSpec& model, std::span<double> U);

}  // namespace pedflow
