#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "pedflow/errors.hpp"
#include "pedflow/multilane.hpp"

using namespace pedflow;

namespace {

PressureParams law() { return PressureParams(0.5, 2.0, 1e-2, 2.0, 1.0); }

ModelSpec car() { return ModelSpec::two_way_car(law(), 1.0); }
ModelSpec ar() { return ModelSpec::two_way_ar(law()); }

StateField random_lane(const ModelSpec& m, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StateField f(m.n_conserved(), n);
  for (std::size_t i = 0; i < n; ++i) {
    f(0, i) = 0.05 + 0.3 * u(rng);
    f(1, i) = 0.05 + 0.3 * u(rng);
    if (m.is_ar()) {
      f(2, i) = f(0, i) * (0.8 + 0.4 * u(rng));
      f(3, i) = f(1, i) * (0.8 + 0.4 * u(rng));
    }
  }
  return f;
}

LaneRateField random_rates(std::size_t K, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LaneRateField r{make_lane_cell_field(K, n), make_lane_cell_field(K, n)};
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < n; ++i) {
        if (k + 1 < K) r.to_upper[k][a][i] = u(rng);
        if (k > 0) r.to_lower[k][a][i] = u(rng);
      }
    }
  }
  return r;
}

/// Largest edge term, the scale of the round-off in a lane sum.
double edge_scale(const LaneStack& s, const LaneRateField& r, bool momentum) {
  double scale = 0.0;
  for (std::size_t k = 0; k < s.n_lanes(); ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < s.n_cells(); ++i) {
        const double amount = momentum ? s.momentum(k, a, i) : s.density(k, a, i);
        scale = std::max(scale, (r.to_upper[k][a][i] + r.to_lower[k][a][i]) * amount);
      }
    }
  }
  return scale;
}

}  // namespace

TEST(LaneChangeRate, Examples) {
  LaneChangeRates r;
  r.lambda0 = 1.0;
  EXPECT_EQ(lane_change_rate(r, -0.5, 0.2, 1.0), 0.0);
  EXPECT_EQ(lane_change_rate(r, 0.0, 0.2, 1.0), 0.0);
  EXPECT_EQ(lane_change_rate(r, 3.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lane_change_rate(r, 2.0, 0.5, 1.0), 1.0);
  r.ramp = LaneChangeRates::Ramp::Sigmoid;
  EXPECT_EQ(lane_change_rate(r, 3.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lane_change_rate(r, 0.0, 0.0, 1.0), 0.5);
  r.cutoff = LaneChangeRates::Cutoff::Squared;
  EXPECT_DOUBLE_EQ(lane_change_rate(r, 0.0, 0.5, 1.0), 0.125);
}

TEST(LaneChangeRate, Monotone) {
  for (auto ramp : {LaneChangeRates::Ramp::PositivePart, LaneChangeRates::Ramp::Sigmoid}) {
    for (auto cut : {LaneChangeRates::Cutoff::Linear, LaneChangeRates::Cutoff::Squared}) {
      LaneChangeRates r{0.3, ramp, cut, 0.5};
      for (int a = 0; a <= 20; ++a) {
        const double target = a / 20.0;
        double prev = -1.0;
        for (int b = -20; b <= 20; ++b) {
          const double v = lane_change_rate(r, b / 5.0, target, 1.0);
          EXPECT_GE(v, 0.0);
          EXPECT_GE(v, prev);
          prev = v;
        }
      }
      for (int b = -20; b <= 20; ++b) {
        double prev = std::numeric_limits<double>::infinity();
        for (int a = 0; a <= 20; ++a) {
          const double v = lane_change_rate(r, b / 5.0, a / 20.0, 1.0);
          EXPECT_LE(v, prev);
          prev = v;
        }
      }
    }
  }
}

TEST(LaneStack, Preconditions) {
  EXPECT_THROW(LaneStack(ModelSpec::sim_flux({}), {StateField(2, 8)}), PreconditionError);
  EXPECT_THROW(LaneStack(car(), {}), PreconditionError);
  EXPECT_THROW(LaneStack(car(), {StateField(2, 8), StateField(2, 9)}), PreconditionError);
  EXPECT_THROW(LaneStack(car(), {StateField(4, 8)}), PreconditionError);
  const auto other = ModelSpec::two_way_car(PressureParams(0.5, 2.0, 1e-2, 2.0, 0.9), 1.0);
  EXPECT_THROW(LaneStack(std::vector<ModelSpec>{car(), other}, {StateField(2, 8), StateField(2, 8)}),
               PreconditionError);
}

TEST(Sources, TwoLaneHandExample) {
  StateField lane1(4, 4, 0.0), lane2(4, 4, 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    lane1(0, i) = 0.3;
    lane1(2, i) = 0.3 * 1.2;
    lane2(0, i) = 0.1;
    lane2(2, i) = 0.1;
  }
  const LaneStack s(ar(), {lane1, lane2});
  LaneRateField r{make_lane_cell_field(2, 4), make_lane_cell_field(2, 4)};
  for (std::size_t i = 0; i < 4; ++i) r.to_upper[0][kPlus][i] = 1.0;
  const auto S = density_sources(s, r);
  const auto R = momentum_sources(s, r);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(S[0][kPlus][i], -0.3);
    EXPECT_DOUBLE_EQ(S[1][kPlus][i], 0.3);
    EXPECT_DOUBLE_EQ(R[0][kPlus][i], -0.36);
    EXPECT_DOUBLE_EQ(R[1][kPlus][i], 0.36);
    EXPECT_EQ(S[0][kMinus][i], 0.0);
    EXPECT_EQ(S[1][kMinus][i], 0.0);
  }
}

TEST(Sources, SingleLaneIsInert) {
  std::mt19937_64 rng(1);
  const LaneStack s(ar(), {random_lane(ar(), 16, rng)});
  const auto r = random_rates(1, 16, rng);
  const auto S = density_sources(s, r);
  const auto R = momentum_sources(s, r);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < 16; ++i) {
      EXPECT_EQ(S[0][a][i], 0.0);
      EXPECT_EQ(R[0][a][i], 0.0);
    }
  }
}

TEST(Sources, IdenticalLanesSymmetricRates) {
  std::mt19937_64 rng(2);
  const StateField lane = random_lane(ar(), 16, rng);
  const LaneStack s(ar(), {lane, lane});
  LaneRateField r{make_lane_cell_field(2, 16, 0.0), make_lane_cell_field(2, 16, 0.0)};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < 16; ++i) {
      r.to_upper[0][a][i] = 0.4;
      r.to_lower[1][a][i] = 0.4;
    }
  }
  const auto S = density_sources(s, r);
  const auto R = momentum_sources(s, r);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_EQ(S[k][a][i], 0.0);
        EXPECT_EQ(R[k][a][i], 0.0);
      }
    }
  }
}

TEST(Sources, LaneSumsVanishOnRandomStacks) {
  std::mt19937_64 rng(3);
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t K = 1; K <= 8; ++K) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<StateField> lanes;
      for (std::size_t k = 0; k < K; ++k) lanes.push_back(random_lane(ar(), 12, rng));
      const LaneStack s(ar(), lanes);
      const auto r = random_rates(K, 12, rng);
      const auto S = density_sources(s, r);
      const auto R = momentum_sources(s, r);
      const double tol_s = 8.0 * K * eps * edge_scale(s, r, false);
      const double tol_r = 8.0 * K * eps * edge_scale(s, r, true);
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < 12; ++i) {
          double sum_s = 0.0;
          double sum_r = 0.0;
          for (std::size_t k = 0; k < K; ++k) {
            sum_s += S[k][a][i];
            sum_r += R[k][a][i];
          }
          EXPECT_LE(std::abs(sum_s), tol_s) << "K=" << K;
          EXPECT_LE(std::abs(sum_r), tol_r) << "K=" << K;
        }
      }
    }
  }
}

TEST(Sources, CarMomentumIsVTimesDensity) {
  const auto m = ModelSpec::two_way_car(law(), 1.3);
  std::mt19937_64 rng(4);
  std::vector<StateField> lanes;
  for (int k = 0; k < 5; ++k) lanes.push_back(random_lane(m, 10, rng));
  const LaneStack s(m, lanes);
  const auto r = random_rates(5, 10, rng);
  const auto S = density_sources(s, r);
  const auto R = momentum_sources(s, r);
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() * 1.3 * edge_scale(s, r, false);
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(R[k][a][i], 1.3 * S[k][a][i], tol);
    }
  }
}

TEST(Sources, DesiredVelocityRelaxesTowardNeighbours) {
  std::mt19937_64 rng(5);
  const std::size_t K = 4;
  std::vector<StateField> lanes;
  for (std::size_t k = 0; k < K; ++k) lanes.push_back(random_lane(ar(), 8, rng));
  const LaneStack s(ar(), lanes);
  const auto r = random_rates(K, 8, rng);
  const auto S = density_sources(s, r);
  const auto R = momentum_sources(s, r);
  auto w = [&](std::size_t k, std::size_t a, std::size_t i) {
    return s.momentum(k, a, i) / s.density(k, a, i);
  };
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < 8; ++i) {
        const double rho = s.density(k, a, i);
        const double implied = (R[k][a][i] - w(k, a, i) * S[k][a][i]) / rho;
        double expected = 0.0;
        if (k + 1 < K) {
          expected += r.to_lower[k + 1][a][i] * s.density(k + 1, a, i) / rho *
                      (w(k + 1, a, i) - w(k, a, i));
        }
        if (k > 0) {
          expected += r.to_upper[k - 1][a][i] * s.density(k - 1, a, i) / rho *
                      (w(k - 1, a, i) - w(k, a, i));
        }
        EXPECT_NEAR(implied, expected, 1e-13);
      }
    }
  }
}

TEST(Rates, BoundaryLanesHaveNoOutwardRate) {
  std::mt19937_64 rng(6);
  const LaneStack s(car(), {random_lane(car(), 8, rng), random_lane(car(), 8, rng),
                            random_lane(car(), 8, rng)});
  const auto dpdt = make_lane_cell_field(3, 8, 1.0);
  const auto r = evaluate_rates(s, LaneChangeRates{}, dpdt);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_EQ(r.to_lower[0][a][i], 0.0);
      EXPECT_EQ(r.to_upper[2][a][i], 0.0);
      EXPECT_GT(r.to_upper[0][a][i], 0.0);
      EXPECT_DOUBLE_EQ(r.to_upper[0][a][i], 0.05 * (1.0 - s.total_density(1, i)));
    }
  }
}

TEST(MaterialDerivative, UpwindAndTimeTerm) {
  StateField lane(2, 4, 0.0);
  const double rp[4] = {0.1, 0.2, 0.3, 0.2};
  for (std::size_t i = 0; i < 4; ++i) lane(0, i) = rp[i];
  LaneStack s(car(), {lane});
  const Grid1D g(4, 0.5);
  const auto p = lane_pressures(s);
  const auto u = lane_velocities(s);
  auto d = pressure_material_derivative(s, p, g, 0.1);
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_GT(u[0][kPlus][i], 0.0);
    const double grad = (p[0][kPlus][i] - p[0][kPlus][(i + 3) % 4]) / 0.5;
    EXPECT_DOUBLE_EQ(d[0][kPlus][i], u[0][kPlus][i] * grad);
  }
  auto prev = p;
  for (auto& v : prev[0][kPlus]) v -= 0.01;
  s.set_previous_pressure(prev);
  d = pressure_material_derivative(s, p, g, 0.1);
  const double grad0 = (p[0][kPlus][0] - p[0][kPlus][3]) / 0.5;
  EXPECT_NEAR(d[0][kPlus][0], u[0][kPlus][0] * grad0 + 0.1, 1e-12);
}

TEST(CoupledStep, ZeroRatesMatchIndependentSteps) {
  std::mt19937_64 rng(7);
  const Grid1D g(32, 1.0);
  SchemeParams p;
  p.dt = 0.1;
  p.delta_diff = 0.2;
  LaneChangeRates r;
  r.lambda0 = 0.0;
  for (const auto& m : {car(), ar()}) {
    std::vector<StateField> lanes{random_lane(m, 32, rng), random_lane(m, 32, rng)};
    LaneStack s(m, lanes);
    for (int k = 0; k < 20; ++k) {
      s = coupled_step(s, g, p, r);
      for (auto& l : lanes) l = step(m, l, g, p);
    }
    EXPECT_EQ(s.lane(0), lanes[0]);
    EXPECT_EQ(s.lane(1), lanes[1]);
  }
}

TEST(CoupledStep, ConservesDirectionMass) {
  std::mt19937_64 rng(8);
  const Grid1D g(64, 1.0);
  SchemeParams p;
  p.dt = 0.1;
  p.delta_diff = 0.2;
  LaneChangeRates r;
  r.lambda0 = 0.5;
  r.ramp = LaneChangeRates::Ramp::Sigmoid;
  for (const auto& m : {car(), ar()}) {
    std::vector<StateField> lanes;
    for (int k = 0; k < 4; ++k) lanes.push_back(random_lane(m, 64, rng));
    LaneStack s(m, lanes);
    const auto before = direction_mass(s, g);
    CoupledStepInfo info;
    for (int k = 0; k < 200; ++k) s = coupled_step(s, g, p, r, &info);
    const auto after = direction_mass(s, g);
    for (std::size_t a = 0; a < 2; ++a) {
      EXPECT_LT(std::abs(after[a] - before[a]) / before[a], 1e-12);
    }
    EXPECT_GT(info.max_exit_rate, 0.0);
    EXPECT_TRUE(s.has_previous_pressure());
  }
}

TEST(CoupledStep, IdenticalLanesStayIdentical) {
  std::mt19937_64 rng(9);
  const Grid1D g(32, 1.0);
  SchemeParams p;
  p.dt = 0.1;
  p.delta_diff = 0.2;
  LaneChangeRates r;
  r.lambda0 = 0.5;
  r.ramp = LaneChangeRates::Ramp::Sigmoid;
  const StateField lane = random_lane(ar(), 32, rng);
  LaneStack s(ar(), {lane, lane});
  for (int k = 0; k < 100; ++k) s = coupled_step(s, g, p, r);
  EXPECT_EQ(s.lane(0), s.lane(1));
}

TEST(CoupledStep, StiffSourcesAreRejected) {
  std::mt19937_64 rng(10);
  const Grid1D g(16, 1.0);
  SchemeParams p;
  p.dt = 0.1;
  p.delta_diff = 0.2;
  LaneChangeRates r;
  r.lambda0 = 50.0;
  r.ramp = LaneChangeRates::Ramp::Sigmoid;
  LaneStack s(car(), {random_lane(car(), 16, rng), random_lane(car(), 16, rng)});
  EXPECT_THROW(coupled_step(s, g, p, r), StabilityError);
}
