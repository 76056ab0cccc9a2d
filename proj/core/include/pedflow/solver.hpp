#pragma once

// Conservative finite-volume integrator on a periodic 1D grid:
//
//   U_i^{n+1} = U_i^n - dt/dx (F_{i+1/2} - F_{i-1/2})
//                     + delta dt/dx^2 (U_{i-1}^n - 2 U_i^n + U_{i+1}^n)
//
//   F_{i+1/2} = (F(U^L) + F(U^R)) / 2 - a_{i+1/2} (U^R - U^L) / 2
//   a_{i+1/2} = max(rho(U_i), rho(U_{i+1}))     (spectral radius of the flux)
//
// with U^L, U^R from a limited MUSCL reconstruction and forward Euler in time.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pedflow/models.hpp"

namespace pedflow {

class Grid1D {
 public:
  /// n_cells >= 4 and dx > 0; boundaries are periodic.
  Grid1D(std::size_t n_cells, double dx);
  static Grid1D from_length(double length, std::size_t n_cells);

  std::size_t n_cells() const noexcept { return n_cells_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return static_cast<double>(n_cells_) * dx_; }
  /// Cell center x_i = (i + 1/2) dx.
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx_; }

 private:
  std::size_t n_cells_;
  double dx_;
};

/// Cell averages, one row per conserved component.
class StateField {
 public:
  StateField() = default;
  StateField(std::size_t n_components, std::size_t n_cells, double fill = 0.0);

  std::size_t n_components() const noexcept { return n_components_; }
  std::size_t n_cells() const noexcept { return n_cells_; }

  double& operator()(std::size_t component, std::size_t cell) noexcept {
    return values_[component * n_cells_ + cell];
  }
  double operator()(std::size_t component, std::size_t cell) const noexcept {
    return values_[component * n_cells_ + cell];
  }

  std::span<double> row(std::size_t component) noexcept {
    return {values_.data() + component * n_cells_, n_cells_};
  }
  std::span<const double> row(std::size_t component) const noexcept {
    return {values_.data() + component * n_cells_, n_cells_};
  }

  StateVec cell(std::size_t i) const noexcept;
  void set_cell(std::size_t i, const StateVec& U) noexcept;

  std::span<const double> values() const noexcept { return values_; }

  double time = 0.0;

  friend bool operator==(const StateField&, const StateField&) = default;

 private:
  std::size_t n_components_ = 0;
  std::size_t n_cells_ = 0;
  std::vector<double> values_;
};

enum class Limiter { Minmod, None };

struct SchemeParams {
  double dt = 0.2;
  double delta_diff = 0.4;
  Limiter limiter = Limiter::Minmod;
  double cfl_guard = 0.45;
};

/// Interface values: left(c, i) and right(c, i) hold U^L and U^R at x_{i+1/2}.
struct InterfaceStates {
  StateField left;
  StateField right;
};

double minmod(double a, double b) noexcept;

InterfaceStates muscl_reconstruct(const StateField& field, const Grid1D& grid, Limiter limiter);

/// Central (local Lax-Friedrichs) numerical flux for the full state vector.
void central_flux(const ModelSpec& model, std::span<const double> U_L,
                  std::span<const double> U_R, double a_local, std::span<double> F);

double local_speed(const ModelSpec& model, std::span<const double> U_i,
                   std::span<const double> U_ip1);

/// max_i a_{i+1/2} dt/dx + 2 delta dt/dx^2 for the given field.
double cfl_number(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                  const SchemeParams& params);

struct StepOutcome {
  StateField field;
  double cfl = 0.0;
  double clipped_mass = 0.0;  ///< density added back by clipping negatives to 0
};

/// One forward-Euler step. Throws StabilityError when the CFL number exceeds the
/// guard and BlowUpError when a non-finite value appears.
StepOutcome advance(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                    const SchemeParams& params);

StateField step(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                const SchemeParams& params);

struct AuditRow {
  std::size_t step = 0;
  double t = 0.0;
  double cfl = 0.0;
  std::vector<double> mass;  ///< dx * sum_i U_i per component
  double min_rho = 0.0;
  double max_rho = 0.0;
  double clipped_mass = 0.0;
  double max_abs = 0.0;
};

/// Audit of a field without a step (cfl and clipped_mass are 0).
AuditRow audit_field(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                     std::size_t step_index);

struct RunResult {
  std::vector<StateField> snapshots;
  std::vector<AuditRow> audit;
  double cumulative_clipped = 0.0;
  double max_cfl = 0.0;
};

/// Called after every accepted step; returning false stops the run early.
using StepObserver = std::function<bool(const StateField&, const AuditRow&)>;

/// Fraction of the initial density mass that clipping may add before the run fails.
inline constexpr double kClipBudget = 1e-8;

/// Integrates to t_end with the fixed dt, keeping a snapshot every
/// `snapshot_every` time units (and the initial and final states).
RunResult run(const ModelSpec& model, const StateField& initial, const Grid1D& grid,
              const SchemeParams& params, double t_end, double snapshot_every,
              const StepObserver& observer = {});

/// Neumaier-compensated sum.
double accurate_sum(std::span<const double> values) noexcept;

}  // namespace pedflow
