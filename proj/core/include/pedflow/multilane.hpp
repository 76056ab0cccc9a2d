#pragma once

// K parallel two-way lanes exchanging pedestrians. For direction alpha in {+, -}:
//
//   d_t rho_{k,a} + d_x(rho_{k,a} u_{k,a}) = S_{k,a}
//   d_t y_{k,a}   + d_x(y_{k,a} u_{k,a})   = R_{k,a}        (AR lanes, y = rho w)
//
//   S_{k,a} = l_{k+1->k} rho_{k+1,a} + l_{k-1->k} rho_{k-1,a} - (l_{k->k+1} + l_{k->k-1}) rho_{k,a}
//
// and R_{k,a} the same combination of rho w. Rates out of the first and last
// lanes toward lanes that do not exist are zero.

#include <array>
#include <cstddef>
#include <vector>

#include "pedflow/models.hpp"
#include "pedflow/solver.hpp"

namespace pedflow {

struct LaneChangeRates {
  enum class Ramp { PositivePart, Sigmoid };
  enum class Cutoff { Linear, Squared };

  double lambda0 = 0.05;
  Ramp ramp = Ramp::PositivePart;
  Cutoff cutoff = Cutoff::Linear;
  /// Width of the sigmoid ramp, in units of the pressure derivative.
  double sigmoid_scale = 1.0;
};

/// lambda0 * ramp(dpdt) * cutoff(rho_target / rho_star); never negative.
double lane_change_rate(const LaneChangeRates& rates, double dpdt, double rho_target,
                        double rho_star);

/// Direction index: 0 for the + species, 1 for the - species.
inline constexpr std::size_t kPlus = 0;
inline constexpr std::size_t kMinus = 1;

/// Per-cell quantity for every lane and direction, indexed [lane][direction][cell].
using LaneCellField = std::vector<std::array<std::vector<double>, 2>>;

LaneCellField make_lane_cell_field(std::size_t n_lanes, std::size_t n_cells, double fill = 0.0);

/// Rates toward lane k+1 (`to_upper`) and lane k-1 (`to_lower`).
struct LaneRateField {
  LaneCellField to_upper;
  LaneCellField to_lower;
};

class LaneStack {
 public:
  /// All lanes share one model; it must be TwoWayCAR or TwoWayAR.
  LaneStack(const ModelSpec& model, std::vector<StateField> lanes);
  /// Per-lane pressure laws; every model must have the same kind and rho_star.
  LaneStack(std::vector<ModelSpec> models, std::vector<StateField> lanes);

  std::size_t n_lanes() const noexcept { return lanes_.size(); }
  std::size_t n_cells() const noexcept { return lanes_.front().n_cells(); }
  double rho_star() const noexcept { return rho_star_; }
  double time() const noexcept { return lanes_.front().time; }

  const ModelSpec& model(std::size_t k) const { return models_.at(k); }
  const StateField& lane(std::size_t k) const { return lanes_.at(k); }
  StateField& lane(std::size_t k) { return lanes_.at(k); }
  const std::vector<StateField>& lanes() const noexcept { return lanes_; }

  double density(std::size_t k, std::size_t direction, std::size_t i) const {
    return lanes_[k](direction, i);
  }
  /// rho w for the given lane, direction and cell (V rho for CAR lanes).
  double momentum(std::size_t k, std::size_t direction, std::size_t i) const;
  double total_density(std::size_t k, std::size_t i) const {
    return lanes_[k](0, i) + lanes_[k](1, i);
  }

  /// Pressures p_{k,a} from the previous rate evaluation, if any.
  const LaneCellField& previous_pressure() const noexcept { return previous_pressure_; }
  bool has_previous_pressure() const noexcept { return !previous_pressure_.empty(); }
  void set_previous_pressure(LaneCellField p) { previous_pressure_ = std::move(p); }

 private:
  std::vector<ModelSpec> models_;
  std::vector<StateField> lanes_;
  double rho_star_ = 1.0;
  LaneCellField previous_pressure_;
};

/// Offsets p_{k,+}(rho_{k,+}, rho_{k,-}) and p_{k,-}(rho_{k,-}, rho_{k,+}).
LaneCellField lane_pressures(const LaneStack& stack);

/// Velocities u_{k,a}.
LaneCellField lane_velocities(const LaneStack& stack);

/// (p - p_prev) / dt + u D_x p with D_x upwinded along u; without a previous
/// pressure only the transport term is used.
LaneCellField pressure_material_derivative(const LaneStack& stack, const LaneCellField& pressure,
                                           const Grid1D& grid, double dt);

LaneRateField evaluate_rates(const LaneStack& stack, const LaneChangeRates& rates,
                             const LaneCellField& dpdt);

LaneCellField density_sources(const LaneStack& stack, const LaneRateField& rates);
LaneCellField momentum_sources(const LaneStack& stack, const LaneRateField& rates);

/// Total density per direction, dx * sum_k sum_i rho_{k,a}.
std::array<double, 2> direction_mass(const LaneStack& stack, const Grid1D& grid);

struct CoupledStepInfo {
  double max_cfl = 0.0;
  double max_exit_rate = 0.0;  ///< largest (l_up + l_down) seen at any cell
  double clipped_mass = 0.0;
};

/// Transport every lane one solver step, then apply dt S (and dt R for AR
/// lanes) evaluated on the transported state. Throws StabilityError when some
/// cell would lose more than its content in one step (exit rate * dt > 1).
LaneStack coupled_step(const LaneStack& stack, const Grid1D& grid, const SchemeParams& params,
                       const LaneChangeRates& rates, CoupledStepInfo* info = nullptr);

}  // namespace pedflow
