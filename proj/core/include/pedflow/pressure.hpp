#pragma once

// Congestion pressure laws. The "pressure" p is the velocity offset between the
// desired and the actual walking speed; it has the units of a velocity.
//
//   background   P(rho)          = M rho^m
//   one-way      p(rho)          = P(rho) + eps / (1/rho - 1/rho*)^gamma
//   two-way      p(rho_o, rho_x) = P(rho) + eps / (q(rho_o) (1/rho - 1/rho*)^gamma),
//                                  rho = rho_o + rho_x
//
// All functions are pure.

#include <utility>

namespace pedflow {

enum class PressureContext { OneWay, TwoWay };

class PressureParams {
 public:
  /// Throws PreconditionError when a parameter is out of range for the context
  /// (m > 1 for the one-way law, m >= 1 for the two-way law).
  PressureParams(double M, double m, double eps, double gamma, double rho_star,
                 PressureContext context = PressureContext::TwoWay);

  double M() const noexcept { return M_; }
  double m() const noexcept { return m_; }
  double eps() const noexcept { return eps_; }
  double gamma() const noexcept { return gamma_; }
  double rho_star() const noexcept { return rho_star_; }
  PressureContext context() const noexcept { return context_; }

 private:
  double M_;
  double m_;
  double eps_;
  double gamma_;
  double rho_star_;
  PressureContext context_;
};

/// Crowding weight q, the prefactor that lets the majority species feel a
/// smaller congestion offset. Realizations, with x = rho / rho*:
///   constant  q = 1
///   affine    q = 1 + beta x
///   power     q = (1 + x)^beta
/// All are positive and non-decreasing for beta >= 0. The two-way pressure stays
/// increasing in the own density as long as beta <= 4 gamma.
struct CrowdingWeight {
  enum class Kind { Constant, Affine, Power };

  Kind kind = Kind::Affine;
  double beta = 1.0;

  static CrowdingWeight constant() { return {Kind::Constant, 0.0}; }
  static CrowdingWeight affine(double beta) { return {Kind::Affine, beta}; }
  static CrowdingWeight power(double beta) { return {Kind::Power, beta}; }

  double value(double rho, double rho_star) const;
  double derivative(double rho, double rho_star) const;
};

/// Densities closer than this fraction of rho* to rho* count as overflow.
inline constexpr double kCongestionGuard = 1e-12;

double background_pressure(const PressureParams& params, double rho);
double background_pressure_derivative(const PressureParams& params, double rho);

double singular_correction_1w(const PressureParams& params, double rho);
double singular_correction_1w_derivative(const PressureParams& params, double rho);

/// P + Q^eps for one-way traffic.
double one_way_pressure(const PressureParams& params, double rho);
double one_way_pressure_derivative(const PressureParams& params, double rho);

/// Inverse of the one-way pressure on [0, rho*): the density whose offset is
/// `p_value`. Requires M > 0 or eps > 0.
double invert_one_way_pressure(const PressureParams& params, double p_value);

/// pi(rho) = rho p(rho) and pi'(rho) = rho p'(rho) + p(rho) for the one-way law.
struct TransferPotential {
  double pi;
  double pi_prime;
};
TransferPotential transfer_potential(const PressureParams& params, double rho);

/// Width rho rho* eps^(1/gamma) of the band below rho* where Q^eps is O(1).
double crossover_width(const PressureParams& params, double rho);

double two_way_pressure(const PressureParams& params, const CrowdingWeight& q,
                        double rho_own, double rho_other);

struct PressurePartials {
  double d_own;    ///< derivative with respect to the first argument
  double d_other;  ///< derivative with respect to the second argument
};
PressurePartials pressure_partials(const PressureParams& params, const CrowdingWeight& q,
                                   double rho_own, double rho_other);

/// Congested space sharing: given the plus-species congestion pressure, returns
/// the minus-species one from q+(rho+)(p+ - P*) = q-(rho-)(p- - P*).
/// Requires rho_plus + rho_minus = rho_star (relative 1e-9) and p_bar_plus >= P_star.
double congested_pressure_share(const CrowdingWeight& q_plus, const CrowdingWeight& q_minus,
                                double rho_star, double rho_plus, double rho_minus,
                                double p_bar_plus, double P_star);

inline double congested_pressure_share(const CrowdingWeight& q, double rho_star,
                                       double rho_plus, double rho_minus,
                                       double p_bar_plus, double P_star) {
  return congested_pressure_share(q, q, rho_star, rho_plus, rho_minus, p_bar_plus, P_star);
}

}  // namespace pedflow
