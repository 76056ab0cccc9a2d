#include "pedflow/pressure.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pedflow/errors.hpp"

namespace pedflow {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw PreconditionError(message);
}

void check_density(double rho) {
  if (!(rho >= 0.0)) {
    std::ostringstream os;
    os << "negative or NaN density " << rho;
    throw DomainError(os.str());
  }
}

void check_below_congestion(const PressureParams& params, double rho) {
  const double rs = params.rho_star();
  if (rho >= rs - kCongestionGuard * rs) {
    std::ostringstream os;
    os << "density " << rho << " reached the congestion density " << rs;
    throw CongestionOverflow(os.str(), rho);
  }
}

// (1/rho - 1/rho*) computed as (rho* - rho) / (rho rho*) to keep precision near rho*.
double inverse_gap(double rho, double rho_star) {
  return (rho_star - rho) / (rho * rho_star);
}

// eps / gap^gamma, the singular factor shared by the one- and two-way laws.
double singular_factor(const PressureParams& params, double rho) {
  if (rho == 0.0 || params.eps() == 0.0) return 0.0;
  return params.eps() / std::pow(inverse_gap(rho, params.rho_star()), params.gamma());
}

double singular_factor_derivative(const PressureParams& params, double rho) {
  if (params.eps() == 0.0) return 0.0;
  if (rho == 0.0) return 0.0;  // vanishes like rho^(gamma-1) with gamma > 1
  const double gap = inverse_gap(rho, params.rho_star());
  return params.eps() * params.gamma() * std::pow(gap, -params.gamma() - 1.0) / (rho * rho);
}

}  // namespace

PressureParams::PressureParams(double M, double m, double eps, double gamma, double rho_star,
                               PressureContext context)
    : M_(M), m_(m), eps_(eps), gamma_(gamma), rho_star_(rho_star), context_(context) {
  require(M >= 0.0, "pressure amplitude M must be >= 0");
  if (context == PressureContext::OneWay) {
    require(m > 1.0, "one-way background exponent m must be > 1");
  } else {
    require(m >= 1.0, "two-way background exponent m must be >= 1");
  }
  require(eps >= 0.0, "singular scale eps must be >= 0");
  require(gamma > 1.0, "singularity exponent gamma must be > 1");
  require(rho_star > 0.0, "congestion density rho* must be > 0");
}

double CrowdingWeight::value(double rho, double rho_star) const {
  const double x = rho / rho_star;
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::Affine:
      return 1.0 + beta * x;
    case Kind::Power:
      return std::pow(1.0 + x, beta);
  }
  return 1.0;
}

double CrowdingWeight::derivative(double rho, double rho_star) const {
  const double x = rho / rho_star;
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::Affine:
      return beta / rho_star;
    case Kind::Power:
      return beta * std::pow(1.0 + x, beta - 1.0) / rho_star;
  }
  return 0.0;
}

double background_pressure(const PressureParams& params, double rho) {
  check_density(rho);
  if (params.M() == 0.0) return 0.0;
  return params.M() * std::pow(rho, params.m());
}

double background_pressure_derivative(const PressureParams& params, double rho) {
  check_density(rho);
  if (params.M() == 0.0) return 0.0;
  if (params.m() == 1.0) return params.M();
  return params.M() * params.m() * std::pow(rho, params.m() - 1.0);
}

double singular_correction_1w(const PressureParams& params, double rho) {
  check_density(rho);
  check_below_congestion(params, rho);
  return singular_factor(params, rho);
}

double singular_correction_1w_derivative(const PressureParams& params, double rho) {
  check_density(rho);
  check_below_congestion(params, rho);
  return singular_factor_derivative(params, rho);
}

double one_way_pressure(const PressureParams& params, double rho) {
  return background_pressure(params, rho) + singular_correction_1w(params, rho);
}

double one_way_pressure_derivative(const PressureParams& params, double rho) {
  return background_pressure_derivative(params, rho) +
         singular_correction_1w_derivative(params, rho);
}

double invert_one_way_pressure(const PressureParams& params, double p_value) {
  if (!(p_value >= 0.0)) throw DomainError("pressure inverse needs a non-negative offset");
  if (p_value == 0.0) return 0.0;
  const double rs = params.rho_star();
  double lo = 0.0;
  double hi = rs * (1.0 - 2.0 * kCongestionGuard);
  if (params.eps() == 0.0) {
    if (params.M() == 0.0) throw DomainError("pressure law is identically zero");
    const double p_hi = background_pressure(params, hi);
    if (p_value >= p_hi) return std::pow(p_value / params.M(), 1.0 / params.m());
  } else if (one_way_pressure(params, hi) <= p_value) {
    return hi;
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * rs; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (one_way_pressure(params, mid) < p_value) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TransferPotential transfer_potential(const PressureParams& params, double rho) {
  const double p = one_way_pressure(params, rho);
  const double dp = one_way_pressure_derivative(params, rho);
  return {rho * p, rho * dp + p};
}

double crossover_width(const PressureParams& params, double rho) {
  if (!(rho > 0.0) || rho > params.rho_star()) {
    throw DomainError("crossover width needs 0 < rho <= rho*");
  }
  if (params.eps() == 0.0) return 0.0;
  return rho * params.rho_star() * std::pow(params.eps(), 1.0 / params.gamma());
}

double two_way_pressure(const PressureParams& params, const CrowdingWeight& q, double rho_own,
                        double rho_other) {
  check_density(rho_own);
  check_density(rho_other);
  const double rho = rho_own + rho_other;
  check_below_congestion(params, rho);
  const double background = background_pressure(params, rho);
  if (rho == 0.0 || params.eps() == 0.0) return background;
  return background + singular_factor(params, rho) / q.value(rho_own, params.rho_star());
}

PressurePartials pressure_partials(const PressureParams& params, const CrowdingWeight& q,
                                   double rho_own, double rho_other) {
  check_density(rho_own);
  check_density(rho_other);
  const double rho = rho_own + rho_other;
  check_below_congestion(params, rho);
  const double dP = background_pressure_derivative(params, rho);
  if (params.eps() == 0.0 || rho == 0.0) return {dP, dP};

  const double rs = params.rho_star();
  const double qv = q.value(rho_own, rs);
  const double S = singular_factor(params, rho);
  const double dS = singular_factor_derivative(params, rho);
  const double d_other = dP + dS / qv;
  const double d_own = d_other - S * q.derivative(rho_own, rs) / (qv * qv);
  return {d_own, d_other};
}

double congested_pressure_share(const CrowdingWeight& q_plus, const CrowdingWeight& q_minus,
                                double rho_star, double rho_plus, double rho_minus,
                                double p_bar_plus, double P_star) {
  if (!(rho_plus >= 0.0) || !(rho_minus >= 0.0)) {
    throw PreconditionError("congested densities must be non-negative");
  }
  if (std::abs(rho_plus + rho_minus - rho_star) > 1e-9 * rho_star) {
    throw PreconditionError("congested pressure sharing needs rho+ + rho- = rho*");
  }
  if (p_bar_plus < P_star) {
    throw PreconditionError("congestion pressure must not fall below P(rho*)");
  }
  const double ratio = q_plus.value(rho_plus, rho_star) / q_minus.value(rho_minus, rho_star);
  return P_star + ratio * (p_bar_plus - P_star);
}

}  // namespace pedflow
