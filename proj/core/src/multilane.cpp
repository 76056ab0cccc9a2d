#include "pedflow/multilane.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "pedflow/errors.hpp"

namespace pedflow {

double lane_change_rate(const LaneChangeRates& rates, double dpdt, double rho_target,
                        double rho_star) {
  if (!(rates.lambda0 >= 0.0)) throw PreconditionError("lambda0 must be non-negative");
  double ramp = 0.0;
  switch (rates.ramp) {
    case LaneChangeRates::Ramp::PositivePart:
      ramp = std::max(dpdt, 0.0);
      break;
    case LaneChangeRates::Ramp::Sigmoid:
      ramp = 1.0 / (1.0 + std::exp(-dpdt / rates.sigmoid_scale));
      break;
  }
  double free = std::max(1.0 - rho_target / rho_star, 0.0);
  if (rates.cutoff == LaneChangeRates::Cutoff::Squared) free *= free;
  return rates.lambda0 * ramp * free;
}

LaneCellField make_lane_cell_field(std::size_t n_lanes, std::size_t n_cells, double fill) {
  LaneCellField field(n_lanes);
  for (auto& lane : field) {
    lane[kPlus].assign(n_cells, fill);
    lane[kMinus].assign(n_cells, fill);
  }
  return field;
}

namespace {

std::vector<ModelSpec> repeat_model(const ModelSpec& model, std::size_t n) {
  return std::vector<ModelSpec>(n, model);
}

}  // namespace

LaneStack::LaneStack(const ModelSpec& model, std::vector<StateField> lanes)
    : LaneStack(repeat_model(model, lanes.size()), lanes) {}

LaneStack::LaneStack(std::vector<ModelSpec> models, std::vector<StateField> lanes)
    : models_(std::move(models)), lanes_(std::move(lanes)) {
  if (lanes_.empty()) throw PreconditionError("a lane stack needs at least one lane");
  if (models_.size() != lanes_.size()) {
    throw PreconditionError("one model per lane is required");
  }
  const ModelKind kind = models_.front().kind();
  if (kind != ModelKind::TwoWayCAR && kind != ModelKind::TwoWayAR) {
    throw PreconditionError("lanes must use a two-way pressure model");
  }
  rho_star_ = models_.front().rho_max();
  for (std::size_t k = 0; k < lanes_.size(); ++k) {
    if (models_[k].kind() != kind) throw PreconditionError("all lanes must share one model kind");
    if (models_[k].rho_max() != rho_star_) {
      throw PreconditionError("all lanes must share one congestion density");
    }
    if (lanes_[k].n_components() != models_[k].n_conserved()) {
      throw PreconditionError("lane field does not match its model");
    }
    if (lanes_[k].n_cells() != lanes_.front().n_cells()) {
      throw PreconditionError("all lanes must have the same number of cells");
    }
  }
}

double LaneStack::momentum(std::size_t k, std::size_t direction, std::size_t i) const {
  const ModelSpec& m = models_[k];
  if (m.kind() == ModelKind::TwoWayAR) return lanes_[k](2 + direction, i);
  return m.V() * lanes_[k](direction, i);
}

LaneCellField lane_pressures(const LaneStack& stack) {
  LaneCellField p = make_lane_cell_field(stack.n_lanes(), stack.n_cells());
  for (std::size_t k = 0; k < stack.n_lanes(); ++k) {
    const ModelSpec& m = stack.model(k);
    for (std::size_t i = 0; i < stack.n_cells(); ++i) {
      const double rp = stack.density(k, kPlus, i);
      const double rm = stack.density(k, kMinus, i);
      p[k][kPlus][i] = m.pressure_plus(rp, rm);
      p[k][kMinus][i] = m.pressure_minus(rp, rm);
    }
  }
  return p;
}

LaneCellField lane_velocities(const LaneStack& stack) {
  LaneCellField u = make_lane_cell_field(stack.n_lanes(), stack.n_cells());
  for (std::size_t k = 0; k < stack.n_lanes(); ++k) {
    const ModelSpec& m = stack.model(k);
    const StateField& lane = stack.lane(k);
    const std::size_t nc = lane.n_components();
    for (std::size_t i = 0; i < stack.n_cells(); ++i) {
      if (m.kind() == ModelKind::TwoWayAR) {
        const StateVec U = lane.cell(i);
        const FluxPair v = ar_velocities(m, std::span<const double>(U.data(), nc));
        u[k][kPlus][i] = v.plus;
        u[k][kMinus][i] = v.minus;
      } else {
        const double rp = lane(kPlus, i);
        const double rm = lane(kMinus, i);
        u[k][kPlus][i] = m.V() - m.pressure_plus(rp, rm);
        u[k][kMinus][i] = -m.V() + m.pressure_minus(rp, rm);
      }
    }
  }
  return u;
}

LaneCellField pressure_material_derivative(const LaneStack& stack, const LaneCellField& pressure,
                                           const Grid1D& grid, double dt) {
  const std::size_t n = stack.n_cells();
  const LaneCellField u = lane_velocities(stack);
  const bool have_prev = stack.has_previous_pressure();
  const LaneCellField& prev = stack.previous_pressure();
  LaneCellField d = make_lane_cell_field(stack.n_lanes(), n);
  for (std::size_t k = 0; k < stack.n_lanes(); ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      const auto& p = pressure[k][a];
      for (std::size_t i = 0; i < n; ++i) {
        const double ui = u[k][a][i];
        const double grad = ui >= 0.0 ? (p[i] - p[(i + n - 1) % n]) / grid.dx()
                                      : (p[(i + 1) % n] - p[i]) / grid.dx();
        double value = ui * grad;
        if (have_prev) value += (p[i] - prev[k][a][i]) / dt;
        d[k][a][i] = value;
      }
    }
  }
  return d;
}

LaneRateField evaluate_rates(const LaneStack& stack, const LaneChangeRates& rates,
                             const LaneCellField& dpdt) {
  const std::size_t K = stack.n_lanes();
  const std::size_t n = stack.n_cells();
  LaneRateField out{make_lane_cell_field(K, n), make_lane_cell_field(K, n)};
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < n; ++i) {
        if (k + 1 < K) {
          out.to_upper[k][a][i] =
              lane_change_rate(rates, dpdt[k][a][i], stack.total_density(k + 1, i),
                               stack.rho_star());
        }
        if (k > 0) {
          out.to_lower[k][a][i] =
              lane_change_rate(rates, dpdt[k][a][i], stack.total_density(k - 1, i),
                               stack.rho_star());
        }
      }
    }
  }
  return out;
}

namespace {

// Net transfer across the edge between lanes k and k+1, then S_k = E_{k-1} - E_k.
template <typename Amount>
LaneCellField exchange(const LaneStack& stack, const LaneRateField& rates, Amount amount) {
  const std::size_t K = stack.n_lanes();
  const std::size_t n = stack.n_cells();
  LaneCellField s = make_lane_cell_field(K, n);
  for (std::size_t k = 0; k + 1 < K; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < n; ++i) {
        const double edge = rates.to_upper[k][a][i] * amount(k, a, i) -
                            rates.to_lower[k + 1][a][i] * amount(k + 1, a, i);
        s[k][a][i] -= edge;
        s[k + 1][a][i] += edge;
      }
    }
  }
  return s;
}

}  // namespace

LaneCellField density_sources(const LaneStack& stack, const LaneRateField& rates) {
  return exchange(stack, rates, [&](std::size_t k, std::size_t a, std::size_t i) {
    return stack.density(k, a, i);
  });
}

LaneCellField momentum_sources(const LaneStack& stack, const LaneRateField& rates) {
  return exchange(stack, rates, [&](std::size_t k, std::size_t a, std::size_t i) {
    return stack.momentum(k, a, i);
  });
}

std::array<double, 2> direction_mass(const LaneStack& stack, const Grid1D& grid) {
  std::array<double, 2> mass{0.0, 0.0};
  std::vector<double> parts;
  for (std::size_t a = 0; a < 2; ++a) {
    parts.clear();
    for (const auto& lane : stack.lanes()) {
      parts.push_back(accurate_sum(lane.row(a)));
    }
    mass[a] = grid.dx() * accurate_sum(parts);
  }
  return mass;
}

LaneStack coupled_step(const LaneStack& stack, const Grid1D& grid, const SchemeParams& params,
                       const LaneChangeRates& rates, CoupledStepInfo* info) {
  CoupledStepInfo local;
  std::vector<StateField> moved;
  moved.reserve(stack.n_lanes());
  for (std::size_t k = 0; k < stack.n_lanes(); ++k) {
    StepOutcome out = advance(stack.model(k), stack.lane(k), grid, params);
    local.max_cfl = std::max(local.max_cfl, out.cfl);
    local.clipped_mass += out.clipped_mass;
    moved.push_back(std::move(out.field));
  }
  std::vector<ModelSpec> models;
  for (std::size_t k = 0; k < stack.n_lanes(); ++k) models.push_back(stack.model(k));
  LaneStack next(std::move(models), std::move(moved));
  if (stack.has_previous_pressure()) next.set_previous_pressure(stack.previous_pressure());

  const LaneCellField p = lane_pressures(next);
  const LaneCellField dpdt = pressure_material_derivative(next, p, grid, params.dt);
  const LaneRateField lr = evaluate_rates(next, rates, dpdt);

  for (std::size_t k = 0; k < next.n_lanes(); ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < next.n_cells(); ++i) {
        local.max_exit_rate =
            std::max(local.max_exit_rate, lr.to_upper[k][a][i] + lr.to_lower[k][a][i]);
      }
    }
  }
  if (local.max_exit_rate * params.dt > 1.0) {
    std::ostringstream os;
    os << "lane-change exit rate " << local.max_exit_rate << " times dt " << params.dt
       << " exceeds 1";
    throw StabilityError(os.str(), local.max_exit_rate * params.dt);
  }

  const LaneCellField S = density_sources(next, lr);
  const bool ar = next.model(0).kind() == ModelKind::TwoWayAR;
  LaneCellField R;
  if (ar) R = momentum_sources(next, lr);

  for (std::size_t k = 0; k < next.n_lanes(); ++k) {
    StateField& lane = next.lane(k);
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < next.n_cells(); ++i) {
        lane(a, i) += params.dt * S[k][a][i];
        if (ar) lane(2 + a, i) += params.dt * R[k][a][i];
      }
    }
  }
  next.set_previous_pressure(p);
  if (info) *info = local;
  return next;
}

}  // namespace pedflow
