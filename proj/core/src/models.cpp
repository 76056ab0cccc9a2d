#include "pedflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pedflow/errors.hpp"

namespace pedflow {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::OneWayAR:
      return "one_way_ar";
    case ModelKind::OneWayCAR:
      return "one_way_car";
    case ModelKind::TwoWayAR:
      return "two_way_ar";
    case ModelKind::TwoWayCAR:
      return "two_way_car";
    case ModelKind::SimFlux:
      return "sim_flux";
  }
  return "unknown";
}

// ---- ModelSpec ---------------------------------------------------------------

ModelSpec ModelSpec::one_way_ar(const PressureParams& pressure) {
  ModelSpec s;
  s.kind_ = ModelKind::OneWayAR;
  s.pressure_ = pressure;
  return s;
}

ModelSpec ModelSpec::one_way_car(const PressureParams& pressure, double V) {
  if (!(V > 0.0)) throw PreconditionError("desired speed V must be > 0");
  ModelSpec s;
  s.kind_ = ModelKind::OneWayCAR;
  s.pressure_ = pressure;
  s.V_ = V;
  return s;
}

ModelSpec ModelSpec::two_way_ar(const PressureParams& pressure, CrowdingWeight q) {
  return two_way_ar(pressure, q, q);
}

ModelSpec ModelSpec::two_way_ar(const PressureParams& pressure, CrowdingWeight q_plus,
                                CrowdingWeight q_minus) {
  if (q_plus.beta < 0.0 || q_minus.beta < 0.0) {
    throw PreconditionError("crowding weight beta must be >= 0");
  }
  ModelSpec s;
  s.kind_ = ModelKind::TwoWayAR;
  s.pressure_ = pressure;
  s.q_plus_ = q_plus;
  s.q_minus_ = q_minus;
  return s;
}

ModelSpec ModelSpec::two_way_car(const PressureParams& pressure, double V, CrowdingWeight q) {
  return two_way_car(pressure, V, q, q);
}

ModelSpec ModelSpec::two_way_car(const PressureParams& pressure, double V,
                                 CrowdingWeight q_plus, CrowdingWeight q_minus) {
  if (!(V > 0.0)) throw PreconditionError("desired speed V must be > 0");
  ModelSpec s = two_way_ar(pressure, q_plus, q_minus);
  s.kind_ = ModelKind::TwoWayCAR;
  s.V_ = V;
  return s;
}

ModelSpec ModelSpec::sim_flux(SimFluxParams params) {
  if (!(params.a > 0.0 && params.a < 1.0)) {
    throw PreconditionError("flux maximum location a must lie in (0, 1)");
  }
  ModelSpec s;
  s.kind_ = ModelKind::SimFlux;
  s.flux_shape_ = params;
  return s;
}

std::size_t ModelSpec::n_conserved() const noexcept {
  switch (kind_) {
    case ModelKind::OneWayAR:
      return 2;
    case ModelKind::OneWayCAR:
      return 1;
    case ModelKind::TwoWayAR:
      return 4;
    case ModelKind::TwoWayCAR:
    case ModelKind::SimFlux:
      return 2;
  }
  return 0;
}

std::size_t ModelSpec::n_densities() const noexcept { return is_two_way() ? 2 : 1; }

bool ModelSpec::is_two_way() const noexcept {
  return kind_ == ModelKind::TwoWayAR || kind_ == ModelKind::TwoWayCAR ||
         kind_ == ModelKind::SimFlux;
}

const PressureParams& ModelSpec::pressure_params() const {
  if (!pressure_) throw PreconditionError("model kind has no pressure law");
  return *pressure_;
}

double ModelSpec::V() const {
  if (kind_ != ModelKind::OneWayCAR && kind_ != ModelKind::TwoWayCAR) {
    throw PreconditionError("desired speed V is only defined for CAR kinds");
  }
  return V_;
}

const SimFluxParams& ModelSpec::flux_shape() const {
  if (kind_ != ModelKind::SimFlux) throw PreconditionError("model kind is not SimFlux");
  return flux_shape_;
}

double ModelSpec::rho_max() const noexcept {
  return pressure_ ? pressure_->rho_star() : 1.0;
}

double ModelSpec::pressure_plus(double rho_plus, double rho_minus) const {
  return two_way_pressure(pressure_params(), q_plus_, rho_plus, rho_minus);
}

double ModelSpec::pressure_minus(double rho_plus, double rho_minus) const {
  return two_way_pressure(pressure_params(), q_minus_, rho_minus, rho_plus);
}

// ---- one-way -----------------------------------------------------------------

double car_flux_1w(const ModelSpec& model, double rho) {
  if (model.kind() != ModelKind::OneWayCAR) throw PreconditionError("car_flux_1w needs OneWayCAR");
  return rho * (model.V() - one_way_pressure(model.pressure_params(), rho));
}

double characteristic_speed_1w(const ModelSpec& model, double rho, double u) {
  return u - rho * one_way_pressure_derivative(model.pressure_params(), rho);
}

MovingSteady moving_steady_split(const ModelSpec& model, double rho, double p_value) {
  const double V = model.V();
  if (p_value < 0.0 || p_value > V) {
    std::ostringstream os;
    os << "offset " << p_value << " outside [0, V=" << V << "]";
    throw DomainError(os.str());
  }
  const double s = rho * p_value / V;
  return {rho - s, s};
}

// ---- two-way -----------------------------------------------------------------

FluxPair two_way_car_flux(const ModelSpec& model, double rho_plus, double rho_minus) {
  if (model.kind() != ModelKind::TwoWayCAR) {
    throw PreconditionError("two_way_car_flux needs TwoWayCAR");
  }
  const double V = model.V();
  const double p_plus = model.pressure_plus(rho_plus, rho_minus);
  const double p_minus = model.pressure_minus(rho_plus, rho_minus);
  return {rho_plus * (V - p_plus), -rho_minus * (V - p_minus)};
}

double g_profile(const SimFluxParams& params, double x) {
  const double a = params.a;
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x <= a) return x - x * x / (2.0 * a);
  const double d = a - x;
  return 0.5 * a - a * d * d / (2.0 * (1.0 - a) * (1.0 - a));
}

double g_profile_derivative(const SimFluxParams& params, double x, Side side) {
  const double a = params.a;
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0 && side == Side::Left) return 0.0;
  if (x == 1.0 && side == Side::Right) return 0.0;
  if (x <= a) return 1.0 - x / a;
  return a * (a - x) / ((1.0 - a) * (1.0 - a));
}

namespace {

// h(rho) = g(rho) / rho and its derivative. For rho <= a, h = 1 - rho / (2a)
// exactly, which also removes the 0/0 at vacuum.
struct Ratio {
  double h;
  double dh;
};

Ratio flux_ratio(const SimFluxParams& params, double rho, Side side) {
  const double a = params.a;
  if (rho > 1.0 || (rho == 1.0 && side == Side::Right)) return {0.0, 0.0};
  if (rho <= a) return {1.0 - rho / (2.0 * a), -1.0 / (2.0 * a)};
  const double g = g_profile(params, rho);
  const double dg = g_profile_derivative(params, rho, Side::Left);
  return {g / rho, (dg * rho - g) / (rho * rho)};
}

void check_non_negative(double rho_plus, double rho_minus) {
  if (!(rho_plus >= 0.0) || !(rho_minus >= 0.0)) {
    std::ostringstream os;
    os << "negative density (" << rho_plus << ", " << rho_minus << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

double sim_flux(const SimFluxParams& params, double rho_plus, double rho_minus) {
  check_non_negative(rho_plus, rho_minus);
  const double rho = rho_plus + rho_minus;
  if (rho >= 1.0) return 0.0;
  return rho_plus * flux_ratio(params, rho, Side::Left).h;
}

FluxPartials sim_flux_partials(const SimFluxParams& params, double rho_plus, double rho_minus,
                               Side side) {
  check_non_negative(rho_plus, rho_minus);
  const Ratio r = flux_ratio(params, rho_plus + rho_minus, side);
  return {r.h + rho_plus * r.dh, rho_plus * r.dh};
}

FluxPair steady_transfer_rates(const ModelSpec& model, double rho_plus, double rho_minus,
                               double dgdx_plus, double dgdx_minus) {
  if (model.kind() != ModelKind::TwoWayCAR) {
    throw PreconditionError("steady transfer rates are defined for TwoWayCAR");
  }
  const auto& pp = model.pressure_params();
  const double p_plus = model.pressure_plus(rho_plus, rho_minus);
  const double p_minus = model.pressure_minus(rho_plus, rho_minus);
  const auto dp = pressure_partials(pp, model.q_plus(), rho_plus, rho_minus);
  const auto dm = pressure_partials(pp, model.q_minus(), rho_minus, rho_plus);
  const double ds_plus = -(p_plus + rho_plus * dp.d_own) * dgdx_plus +
                         rho_plus * dp.d_other * dgdx_minus;
  const double ds_minus = (p_minus + rho_minus * dm.d_own) * dgdx_minus -
                          rho_minus * dm.d_other * dgdx_plus;
  return {ds_plus, ds_minus};
}

// ---- 2x2 linear algebra --------------------------------------------------------

double Matrix2::discriminant() const noexcept {
  // (a11 - a22)^2 + 4 a12 a21 avoids cancellation in trace^2 - 4 det.
  const double d = a11 - a22;
  return d * d + 4.0 * a12 * a21;
}

double Matrix2::spectral_radius() const noexcept {
  const double half_tr = 0.5 * trace();
  const double disc = discriminant();
  if (disc >= 0.0) return std::abs(half_tr) + 0.5 * std::sqrt(disc);
  return std::sqrt(half_tr * half_tr - 0.25 * disc);
}

Matrix2 density_convection_matrix(const ModelSpec& model, double rho_plus, double rho_minus,
                                  Side side) {
  switch (model.kind()) {
    case ModelKind::SimFlux: {
      const auto& fp = model.flux_shape();
      const auto plus = sim_flux_partials(fp, rho_plus, rho_minus, side);
      const auto minus = sim_flux_partials(fp, rho_minus, rho_plus, side);
      return {plus.d_first, plus.d_second, -minus.d_second, -minus.d_first};
    }
    case ModelKind::TwoWayCAR: {
      const double V = model.V();
      const double u_plus = V - model.pressure_plus(rho_plus, rho_minus);
      const double u_minus = -V + model.pressure_minus(rho_plus, rho_minus);
      return ar_convection_matrix(model, rho_plus, rho_minus, u_plus, u_minus);
    }
    default:
      throw PreconditionError("density convection matrix needs TwoWayCAR or SimFlux");
  }
}

Matrix2 ar_convection_matrix(const ModelSpec& model, double rho_plus, double rho_minus,
                             double u_plus, double u_minus) {
  const auto& pp = model.pressure_params();
  const auto dp = pressure_partials(pp, model.q_plus(), rho_plus, rho_minus);
  const auto dm = pressure_partials(pp, model.q_minus(), rho_minus, rho_plus);
  return {u_plus - rho_plus * dp.d_own, -rho_plus * dp.d_other, rho_minus * dm.d_other,
          u_minus + rho_minus * dm.d_own};
}

// ---- conserved-variable interface ------------------------------------------------

namespace {

void check_span(const ModelSpec& model, std::span<const double> U) {
  if (U.size() < model.n_conserved()) throw PreconditionError("state vector too short");
}

// w recovered from (rho, y) with the vacuum floor.
double desired_velocity(double rho, double y) {
  if (rho < kVacuumFloor) {
    if (std::abs(y) > kVacuumFloor) {
      std::ostringstream os;
      os << "vacuum cell (rho=" << rho << ") carries momentum " << y;
      throw VacuumError(os.str());
    }
    return 0.0;
  }
  return y / rho;
}

}  // namespace

FluxPair ar_velocities(const ModelSpec& model, std::span<const double> U) {
  check_span(model, U);
  if (model.kind() == ModelKind::OneWayAR) {
    const double rho = U[0];
    if (rho < kVacuumFloor) {
      desired_velocity(rho, U[1]);
      return {0.0, 0.0};
    }
    const double w = desired_velocity(rho, U[1]);
    return {w - one_way_pressure(model.pressure_params(), rho), 0.0};
  }
  if (model.kind() != ModelKind::TwoWayAR) throw PreconditionError("AR velocities need an AR kind");
  const double rp = U[0];
  const double rm = U[1];
  const double wp = desired_velocity(rp, U[2]);
  const double wm = desired_velocity(rm, U[3]);
  const double up = rp < kVacuumFloor ? 0.0 : wp - model.pressure_plus(rp, rm);
  const double um = rm < kVacuumFloor ? 0.0 : -wm + model.pressure_minus(rp, rm);
  return {up, um};
}

void physical_flux(const ModelSpec& model, std::span<const double> U, std::span<double> F) {
  check_span(model, U);
  switch (model.kind()) {
    case ModelKind::OneWayCAR:
      F[0] = car_flux_1w(model, U[0]);
      return;
    case ModelKind::TwoWayCAR: {
      const auto f = two_way_car_flux(model, U[0], U[1]);
      F[0] = f.plus;
      F[1] = f.minus;
      return;
    }
    case ModelKind::SimFlux: {
      const auto& fp = model.flux_shape();
      F[0] = sim_flux(fp, U[0], U[1]);
      F[1] = -sim_flux(fp, U[1], U[0]);
      return;
    }
    case ModelKind::OneWayAR: {
      const double u = ar_velocities(model, U).plus;
      F[0] = U[0] * u;
      F[1] = U[1] * u;
      return;
    }
    case ModelKind::TwoWayAR: {
      const auto u = ar_velocities(model, U);
      F[0] = U[0] * u.plus;
      F[1] = U[1] * u.minus;
      F[2] = U[2] * u.plus;
      F[3] = U[3] * u.minus;
      return;
    }
  }
}

void ar_conserved_flux(const ModelSpec& model, std::span<const double> U, std::span<double> F) {
  if (!model.is_ar()) throw PreconditionError("ar_conserved_flux needs OneWayAR or TwoWayAR");
  physical_flux(model, U, F);
}

double spectral_radius(const ModelSpec& model, std::span<const double> U) {
  check_span(model, U);
  switch (model.kind()) {
    case ModelKind::OneWayCAR: {
      const auto& pp = model.pressure_params();
      const double rho = U[0];
      const double p = one_way_pressure(pp, rho);
      return std::abs(model.V() - p - rho * one_way_pressure_derivative(pp, rho));
    }
    case ModelKind::OneWayAR: {
      const double u = ar_velocities(model, U).plus;
      return std::max(std::abs(u), std::abs(characteristic_speed_1w(model, U[0], u)));
    }
    case ModelKind::TwoWayCAR:
      return density_convection_matrix(model, U[0], U[1]).spectral_radius();
    case ModelKind::SimFlux: {
      const double left = density_convection_matrix(model, U[0], U[1], Side::Left).spectral_radius();
      const double rho = U[0] + U[1];
      const auto& fp = model.flux_shape();
      if (rho == fp.a || rho == 1.0 || rho == 0.0) {
        return std::max(left,
                        density_convection_matrix(model, U[0], U[1], Side::Right).spectral_radius());
      }
      return left;
    }
    case ModelKind::TwoWayAR: {
      const auto u = ar_velocities(model, U);
      const double coupled =
          ar_convection_matrix(model, U[0], U[1], u.plus, u.minus).spectral_radius();
      return std::max({std::abs(u.plus), std::abs(u.minus), coupled});
    }
  }
  return 0.0;
}

void to_reconstruction_variables(const ModelSpec& model, std::span<double> U) {
  if (model.kind() == ModelKind::OneWayAR) {
    U[1] = desired_velocity(U[0], U[1]);
  } else if (model.kind() == ModelKind::TwoWayAR) {
    U[2] = desired_velocity(U[0], U[2]);
    U[3] = desired_velocity(U[1], U[3]);
  }
}

void from_reconstruction_variables(const ModelSpec& model, std::span<double> U) {
  if (model.kind() == ModelKind::OneWayAR) {
    U[1] *= U[0];
  } else if (model.kind() == ModelKind::TwoWayAR) {
    U[2] *= U[0];
    U[3] *= U[1];
  }
}

}  // namespace pedflow
