#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pedflow/errors.hpp"
#include "pedflow/solver.hpp"

using namespace pedflow;

namespace {

ModelSpec sim() { return ModelSpec::sim_flux({0.7}); }

/// f = V rho: M = 0 and eps = 0 switch the pressure off.
ModelSpec linear_advection(double V) {
  return ModelSpec::one_way_car(PressureParams(0.0, 2.0, 0.0, 2.0, 1.0, PressureContext::OneWay),
                                V);
}

StateField noisy(std::size_t n, double rp, double rm, double sigma, unsigned seed) {
  StateField f(2, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  for (std::size_t i = 0; i < n; ++i) {
    f(0, i) = rp + g(rng);
    f(1, i) = rm + g(rng);
  }
  return f;
}

double relative_change(double before, double after) {
  return std::abs(after - before) / std::abs(before);
}

}  // namespace

TEST(Grid1D, Preconditions) {
  EXPECT_THROW(Grid1D(3, 1.0), PreconditionError);
  EXPECT_THROW(Grid1D(8, 0.0), PreconditionError);
  const Grid1D g = Grid1D::from_length(10.0, 20);
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_DOUBLE_EQ(g.length(), 10.0);
  EXPECT_DOUBLE_EQ(g.center(0), 0.25);
}

TEST(Minmod, Values) {
  EXPECT_EQ(minmod(1.0, 2.0), 1.0);
  EXPECT_EQ(minmod(-3.0, -2.0), -2.0);
  EXPECT_EQ(minmod(1.0, -2.0), 0.0);
  EXPECT_EQ(minmod(0.0, 5.0), 0.0);
}

TEST(Muscl, ConstantField) {
  const StateField f(2, 8, 0.4);
  const auto faces = muscl_reconstruct(f, Grid1D(8, 1.0), Limiter::Minmod);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(faces.left(0, i), 0.4);
    EXPECT_EQ(faces.right(1, i), 0.4);
  }
}

TEST(Muscl, LinearFieldInterior) {
  const std::size_t n = 10;
  StateField f(1, n);
  for (std::size_t i = 0; i < n; ++i) f(0, i) = 2.0 + 0.5 * static_cast<double>(i);
  const auto faces = muscl_reconstruct(f, Grid1D(n, 1.0), Limiter::Minmod);
  // Cells 1..n-2 see monotone neighbours; interfaces 1..n-3 are interior on both sides.
  for (std::size_t i = 1; i + 2 < n; ++i) {
    const double exact = 2.0 + 0.5 * (static_cast<double>(i) + 0.5);
    EXPECT_DOUBLE_EQ(faces.left(0, i), exact);
    EXPECT_DOUBLE_EQ(faces.right(0, i), exact);
  }
}

TEST(Muscl, SpikeIsLimited) {
  StateField f(1, 5);
  const double v[5] = {0.1, 0.2, 1.0, 0.3, 0.3};
  for (std::size_t i = 0; i < 5; ++i) f(0, i) = v[i];
  const auto faces = muscl_reconstruct(f, Grid1D(5, 1.0), Limiter::Minmod);
  // slopes by hand: minmod(0.1-0.3, 0.1) = 0, minmod(0.1, 0.8) = 0.1, minmod(0.8, -0.7) = 0,
  // minmod(-0.7, 0) = 0, minmod(0, -0.2) = 0
  const double slope[5] = {0.0, 0.1, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < 5; ++i) {
    const std::size_t ip = (i + 1) % 5;
    EXPECT_DOUBLE_EQ(faces.left(0, i), v[i] + 0.5 * slope[i]);
    EXPECT_DOUBLE_EQ(faces.right(0, i), v[ip] - 0.5 * slope[ip]);
    const double lo = std::min(v[i], v[ip]);
    const double hi = std::max(v[i], v[ip]);
    EXPECT_GE(faces.left(0, i), lo - 1e-15);
    EXPECT_LE(faces.left(0, i), hi + 1e-15);
  }
}

TEST(Muscl, NoLimiterIsFirstOrder) {
  const StateField f = noisy(16, 0.3, 0.2, 0.05, 3);
  const auto faces = muscl_reconstruct(f, Grid1D(16, 1.0), Limiter::None);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(faces.left(0, i), f(0, i));
    EXPECT_EQ(faces.right(0, i), f(0, (i + 1) % 16));
  }
}

TEST(CentralFlux, Consistency) {
  const auto m = sim();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int k = 0; k < 100; ++k) {
    const std::array<double, 2> U{u(rng), u(rng)};
    std::array<double, 2> F{}, G{};
    central_flux(m, U, U, 3.0 * u(rng), F);
    physical_flux(m, U, G);
    EXPECT_EQ(F[0], G[0]);
    EXPECT_EQ(F[1], G[1]);
  }
}

TEST(CentralFlux, ZeroSpeedIsMean) {
  const auto m = sim();
  const std::array<double, 2> L{0.3, 0.2}, R{0.45, 0.1};
  std::array<double, 2> F{}, FL{}, FR{};
  central_flux(m, L, R, 0.0, F);
  physical_flux(m, L, FL);
  physical_flux(m, R, FR);
  EXPECT_DOUBLE_EQ(F[0], 0.5 * (FL[0] + FR[0]));
  EXPECT_DOUBLE_EQ(F[1], 0.5 * (FL[1] + FR[1]));
}

TEST(CentralFlux, LinearIsUpwind) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double V : {0.7, 1.9}) {
    const auto m = linear_advection(V);
    for (int k = 0; k < 50; ++k) {
      const std::array<double, 1> L{0.9 * u(rng)}, R{0.9 * u(rng)};
      std::array<double, 1> F{};
      central_flux(m, L, R, V, F);
      EXPECT_NEAR(F[0], V * L[0], 1e-15);
    }
  }
}

TEST(LocalSpeed, Cases) {
  const auto m = sim();
  const std::array<double, 2> vac{0.0, 0.0};
  EXPECT_DOUBLE_EQ(local_speed(m, vac, vac), 1.0);
  const std::array<double, 2> stable{0.35, 0.3};
  const double r = density_convection_matrix(m, 0.35, 0.3).spectral_radius();
  EXPECT_DOUBLE_EQ(local_speed(m, stable, stable), r);
  EXPECT_NEAR(r, 0.2143, 1e-4);
  const std::array<double, 2> unstable{0.5, 0.3};
  const double s = local_speed(m, stable, unstable);
  EXPECT_TRUE(std::isfinite(s));
  EXPECT_GT(s, 0.0);
  EXPECT_NEAR(local_speed(m, unstable, unstable), 0.54997, 1e-5);
}

TEST(Step, UniformStateIsFixedPoint) {
  const auto m = sim();
  const Grid1D g(32, 1.0);
  StateField f(2, 32);
  for (std::size_t i = 0; i < 32; ++i) {
    f(0, i) = 0.35;
    f(1, i) = 0.3;
  }
  const StateField next = step(m, f, g, SchemeParams{});
  for (std::size_t i = 0; i < 32; ++i) {
    EXPECT_EQ(next(0, i), 0.35);
    EXPECT_EQ(next(1, i), 0.3);
  }
  EXPECT_DOUBLE_EQ(next.time, 0.2);
}

TEST(Step, ConservesEachComponent) {
  const auto m = sim();
  const Grid1D g(128, 1.0);
  SchemeParams p;
  p.cfl_guard = 0.7;
  for (unsigned seed : {1u, 2u, 3u}) {
    StateField f = noisy(128, 0.5, 0.3, 0.05, seed);
    const double m0 = accurate_sum(f.row(0));
    const double m1 = accurate_sum(f.row(1));
    for (int k = 0; k < 200; ++k) f = step(m, f, g, p);
    EXPECT_LT(relative_change(m0, accurate_sum(f.row(0))), 1e-13);
    EXPECT_LT(relative_change(m1, accurate_sum(f.row(1))), 1e-13);
  }
}

TEST(Step, ArConservesAllFourComponents) {
  const auto m = ModelSpec::two_way_ar(PressureParams(0.5, 2.0, 1e-2, 2.0, 1.0));
  const Grid1D g(64, 1.0);
  StateField f(4, 64);
  for (std::size_t i = 0; i < 64; ++i) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(i) / 64.0;
    f(0, i) = 0.3 + 0.1 * std::sin(x);
    f(1, i) = 0.2 + 0.05 * std::cos(x);
    f(2, i) = f(0, i) * (1.0 + 0.1 * std::cos(2 * x));
    f(3, i) = f(1, i) * (1.0 - 0.1 * std::sin(x));
  }
  SchemeParams p;
  p.dt = 0.1;
  p.delta_diff = 0.0;
  std::array<double, 4> before{};
  for (std::size_t c = 0; c < 4; ++c) before[c] = accurate_sum(f.row(c));
  for (int k = 0; k < 300; ++k) f = step(m, f, g, p);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_LT(relative_change(before[c], accurate_sum(f.row(c))), 1e-13) << c;
  }
}

TEST(Step, CflGuardIsHardError) {
  const auto m = sim();
  const Grid1D g(16, 1.0);
  const StateField f(2, 16, 0.3);
  SchemeParams p;
  p.delta_diff = 2.0;
  try {
    step(m, f, g, p);
    FAIL() << "expected a stability error";
  } catch (const StabilityError& e) {
    EXPECT_GT(e.measured(), 0.45);
  }
}

TEST(Step, ReferenceCflAtStableState) {
  const auto m = sim();
  const Grid1D g(64, 1.0);
  StateField f(2, 64);
  for (std::size_t i = 0; i < 64; ++i) {
    f(0, i) = 0.35;
    f(1, i) = 0.3;
  }
  const double r = density_convection_matrix(m, 0.35, 0.3).spectral_radius();
  EXPECT_NEAR(cfl_number(m, f, g, SchemeParams{}), r * 0.2 + 2 * 0.4 * 0.2, 1e-15);
}

TEST(Step, NonFiniteIsBlowUp) {
  const auto m = linear_advection(1.0);
  const Grid1D g(8, 1.0);
  StateField f(1, 8, 0.2);
  f(0, 3) = std::numeric_limits<double>::quiet_NaN();
  SchemeParams p;
  p.cfl_guard = std::numeric_limits<double>::infinity();
  EXPECT_THROW(step(m, f, g, p), BlowUpError);
}

TEST(Step, ClippingIsLogged) {
  const auto m = linear_advection(1.0);
  const Grid1D g(16, 1.0);
  StateField f(1, 16, 0.0);
  for (std::size_t i = 4; i < 8; ++i) f(0, i) = 0.5;
  SchemeParams p;
  p.dt = 3.0;
  p.delta_diff = 0.0;
  p.limiter = Limiter::None;
  p.cfl_guard = 10.0;
  const StepOutcome out = advance(m, f, g, p);
  EXPECT_GT(out.clipped_mass, 0.0);
  for (double v : out.field.row(0)) EXPECT_GE(v, 0.0);
  EXPECT_THROW(run(m, f, g, p, 3.0, 0.0), MassClipError);
}

TEST(Run, EmptyRun) {
  const auto m = sim();
  const Grid1D g(16, 1.0);
  const StateField f = noisy(16, 0.35, 0.3, 0.01, 4);
  const RunResult r = run(m, f, g, SchemeParams{}, 0.0, 1.0);
  ASSERT_EQ(r.snapshots.size(), 1u);
  EXPECT_EQ(r.snapshots.front(), f);
  EXPECT_EQ(r.audit.size(), 1u);
}

TEST(Run, SnapshotCadenceAndAudit) {
  const auto m = sim();
  const Grid1D g(16, 1.0);
  const StateField f = noisy(16, 0.35, 0.3, 0.01, 4);
  const RunResult r = run(m, f, g, SchemeParams{}, 10.0, 2.0);
  ASSERT_EQ(r.snapshots.size(), 6u);
  EXPECT_NEAR(r.snapshots.back().time, 10.0, 1e-12);
  EXPECT_NEAR(r.snapshots[1].time, 2.0, 1e-12);
  ASSERT_EQ(r.audit.size(), 51u);
  for (const auto& row : r.audit) {
    EXPECT_LT(relative_change(r.audit.front().mass[0], row.mass[0]), 1e-14);
    EXPECT_GE(row.min_rho, 0.0);
  }
  EXPECT_GT(r.max_cfl, 0.0);
}

TEST(Run, ObserverStopsEarly) {
  const auto m = sim();
  const Grid1D g(16, 1.0);
  const StateField f = noisy(16, 0.35, 0.3, 0.01, 4);
  const RunResult r = run(m, f, g, SchemeParams{}, 10.0, 0.0,
                          [](const StateField&, const AuditRow& row) { return row.step < 5; });
  EXPECT_EQ(r.audit.size(), 6u);
  EXPECT_NEAR(r.snapshots.back().time, 1.0, 1e-12);
}

TEST(Run, StableStateRelaxes) {
  const auto m = sim();
  const Grid1D g(128, 1.0);
  const StateField f = noisy(128, 0.35, 0.3, 0.01, 11);
  const RunResult r = run(m, f, g, SchemeParams{}, 500.0, 500.0);
  double dev = 0.0;
  const auto& last = r.snapshots.back();
  for (std::size_t i = 0; i < 128; ++i) {
    dev = std::max({dev, std::abs(last(0, i) - 0.35), std::abs(last(1, i) - 0.3)});
  }
  EXPECT_LT(dev, 0.01);
}

TEST(Convergence, LimitedSchemeOrder) {
  const auto m = linear_advection(1.0);
  auto error = [&](std::size_t n) {
    const Grid1D g = Grid1D::from_length(1.0, n);
    StateField f(1, n);
    auto profile = [](double x) { return 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * x); };
    for (std::size_t i = 0; i < n; ++i) f(0, i) = profile(g.center(i));
    SchemeParams p;
    p.dt = 0.4 * g.dx();
    p.delta_diff = 0.0;
    const double t_end = 0.5;
    const RunResult r = run(m, f, g, p, t_end, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err += std::abs(r.snapshots.back()(0, i) - profile(g.center(i) - t_end)) * g.dx();
    }
    return err;
  };
  const double coarse = error(64);
  const double fine = error(128);
  EXPECT_GT(coarse / fine, 1.5);
  EXPECT_GT(std::log2(coarse / fine), 0.6);
}
