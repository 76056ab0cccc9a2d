#include "pedflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pedflow/errors.hpp"

namespace pedflow {

Grid1D::Grid1D(std::size_t n_cells, double dx) : n_cells_(n_cells), dx_(dx) {
  if (n_cells < 4) throw PreconditionError("grid needs at least 4 cells");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw PreconditionError("grid spacing must be positive");
}

Grid1D Grid1D::from_length(double length, std::size_t n_cells) {
  if (n_cells == 0) throw PreconditionError("grid needs at least 4 cells");
  return Grid1D(n_cells, length / static_cast<double>(n_cells));
}

StateField::StateField(std::size_t n_components, std::size_t n_cells, double fill)
    : n_components_(n_components), n_cells_(n_cells), values_(n_components * n_cells, fill) {
  if (n_components == 0 || n_components > kMaxComponents) {
    throw PreconditionError("state field needs 1 to 4 components");
  }
}

StateVec StateField::cell(std::size_t i) const noexcept {
  StateVec U{};
  for (std::size_t c = 0; c < n_components_; ++c) U[c] = (*this)(c, i);
  return U;
}

void StateField::set_cell(std::size_t i, const StateVec& U) noexcept {
  for (std::size_t c = 0; c < n_components_; ++c) (*this)(c, i) = U[c];
}

double minmod(double a, double b) noexcept {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

double accurate_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

namespace {

void check_shape(const ModelSpec& model, const StateField& field, const Grid1D& grid) {
  if (field.n_components() != model.n_conserved()) {
    throw PreconditionError("field has the wrong number of components for the model");
  }
  if (field.n_cells() != grid.n_cells()) {
    throw PreconditionError("field and grid disagree on the number of cells");
  }
}

StateField reconstruction_field(const ModelSpec& model, const StateField& field) {
  StateField out = field;
  if (!model.is_ar()) return out;
  const std::size_t nc = field.n_components();
  for (std::size_t i = 0; i < field.n_cells(); ++i) {
    StateVec U = field.cell(i);
    to_reconstruction_variables(model, std::span<double>(U.data(), nc));
    out.set_cell(i, U);
  }
  return out;
}

void restore_conserved(const ModelSpec& model, StateField& field) {
  if (!model.is_ar()) return;
  const std::size_t nc = field.n_components();
  for (std::size_t i = 0; i < field.n_cells(); ++i) {
    StateVec U = field.cell(i);
    from_reconstruction_variables(model, std::span<double>(U.data(), nc));
    field.set_cell(i, U);
  }
}

std::vector<double> cell_radii(const ModelSpec& model, const StateField& field) {
  const std::size_t n = field.n_cells();
  const std::size_t nc = field.n_components();
  std::vector<double> radius(n);
  for (std::size_t i = 0; i < n; ++i) {
    const StateVec U = field.cell(i);
    radius[i] = spectral_radius(model, std::span<const double>(U.data(), nc));
  }
  return radius;
}

double cfl_from_radii(const std::vector<double>& radius, const Grid1D& grid,
                      const SchemeParams& params) {
  const std::size_t n = radius.size();
  double a_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a_max = std::max(a_max, std::max(radius[i], radius[(i + 1) % n]));
  }
  const double dx = grid.dx();
  return a_max * params.dt / dx + 2.0 * params.delta_diff * params.dt / (dx * dx);
}

}  // namespace

InterfaceStates muscl_reconstruct(const StateField& field, const Grid1D& grid, Limiter limiter) {
  if (field.n_cells() != grid.n_cells()) {
    throw PreconditionError("field and grid disagree on the number of cells");
  }
  const std::size_t n = field.n_cells();
  InterfaceStates out{field, field};
  for (std::size_t c = 0; c < field.n_components(); ++c) {
    std::vector<double> slope(n, 0.0);
    if (limiter == Limiter::Minmod) {
      for (std::size_t i = 0; i < n; ++i) {
        const double um = field(c, (i + n - 1) % n);
        const double u0 = field(c, i);
        const double up = field(c, (i + 1) % n);
        slope[i] = minmod(u0 - um, up - u0);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = (i + 1) % n;
      out.left(c, i) = field(c, i) + 0.5 * slope[i];
      out.right(c, i) = field(c, ip) - 0.5 * slope[ip];
    }
  }
  return out;
}

void central_flux(const ModelSpec& model, std::span<const double> U_L,
                  std::span<const double> U_R, double a_local, std::span<double> F) {
  const std::size_t nc = model.n_conserved();
  StateVec FL{};
  StateVec FR{};
  physical_flux(model, U_L, std::span<double>(FL.data(), nc));
  physical_flux(model, U_R, std::span<double>(FR.data(), nc));
  for (std::size_t c = 0; c < nc; ++c) {
    F[c] = 0.5 * (FL[c] + FR[c]) - 0.5 * a_local * (U_R[c] - U_L[c]);
  }
}

double local_speed(const ModelSpec& model, std::span<const double> U_i,
                   std::span<const double> U_ip1) {
  return std::max(spectral_radius(model, U_i), spectral_radius(model, U_ip1));
}

double cfl_number(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                  const SchemeParams& params) {
  check_shape(model, field, grid);
  return cfl_from_radii(cell_radii(model, field), grid, params);
}

StepOutcome advance(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                    const SchemeParams& params) {
  check_shape(model, field, grid);
  if (!(params.dt > 0.0)) throw PreconditionError("time step must be positive");
  if (params.delta_diff < 0.0) throw PreconditionError("diffusivity must be non-negative");

  const std::size_t n = field.n_cells();
  const std::size_t nc = field.n_components();
  const double dx = grid.dx();

  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(field(c, i))) {
        std::ostringstream os;
        os << "non-finite value in component " << c << " at cell " << i << " (t = "
           << field.time << ")";
        throw BlowUpError(os.str(), i);
      }
    }
  }

  const std::vector<double> radius = cell_radii(model, field);
  const double cfl = cfl_from_radii(radius, grid, params);
  if (cfl > params.cfl_guard) {
    std::ostringstream os;
    os << "CFL number " << cfl << " exceeds the guard " << params.cfl_guard;
    throw StabilityError(os.str(), cfl);
  }

  InterfaceStates faces = muscl_reconstruct(reconstruction_field(model, field), grid,
                                            params.limiter);
  restore_conserved(model, faces.left);
  restore_conserved(model, faces.right);

  // flux(c, i) is the numerical flux through x_{i+1/2}
  StateField flux(nc, n);
  for (std::size_t i = 0; i < n; ++i) {
    const StateVec UL = faces.left.cell(i);
    const StateVec UR = faces.right.cell(i);
    const double a_local = std::max(radius[i], radius[(i + 1) % n]);
    StateVec F{};
    central_flux(model, std::span<const double>(UL.data(), nc),
                 std::span<const double>(UR.data(), nc), a_local,
                 std::span<double>(F.data(), nc));
    flux.set_cell(i, F);
  }

  StepOutcome out{StateField(nc, n), cfl, 0.0};
  out.field.time = field.time + params.dt;
  const double r = params.dt / dx;
  const double d = params.delta_diff * params.dt / (dx * dx);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n;
      const std::size_t ip = (i + 1) % n;
      const double u = field(c, i);
      const double value = u - r * (flux(c, i) - flux(c, im)) +
                           d * (field(c, im) - 2.0 * u + field(c, ip));
      if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "non-finite value in component " << c << " at cell " << i << " (t = "
           << out.field.time << ")";
        throw BlowUpError(os.str(), i);
      }
      out.field(c, i) = value;
    }
  }

  const std::size_t nd = model.n_densities();
  for (std::size_t c = 0; c < nd; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double& rho = out.field(c, i);
      if (rho < 0.0) {
        out.clipped_mass += -rho * dx;
        rho = 0.0;
      }
      if (model.is_ar() && rho <= kVacuumFloor) out.field(c + nd, i) = 0.0;
    }
  }
  return out;
}

StateField step(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                const SchemeParams& params) {
  return advance(model, field, grid, params).field;
}

AuditRow audit_field(const ModelSpec& model, const StateField& field, const Grid1D& grid,
                     std::size_t step_index) {
  check_shape(model, field, grid);
  AuditRow row;
  row.step = step_index;
  row.t = field.time;
  row.mass.resize(field.n_components());
  for (std::size_t c = 0; c < field.n_components(); ++c) {
    row.mass[c] = grid.dx() * accurate_sum(field.row(c));
  }
  row.min_rho = std::numeric_limits<double>::infinity();
  row.max_rho = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.n_densities(); ++c) {
    for (double v : field.row(c)) {
      row.min_rho = std::min(row.min_rho, v);
      row.max_rho = std::max(row.max_rho, v);
    }
  }
  for (double v : field.values()) row.max_abs = std::max(row.max_abs, std::abs(v));
  return row;
}

RunResult run(const ModelSpec& model, const StateField& initial, const Grid1D& grid,
              const SchemeParams& params, double t_end, double snapshot_every,
              const StepObserver& observer) {
  check_shape(model, initial, grid);
  if (!(params.dt > 0.0)) throw PreconditionError("time step must be positive");
  if (t_end < initial.time) throw PreconditionError("t_end precedes the initial time");

  const auto n_steps =
      static_cast<std::size_t>(std::llround((t_end - initial.time) / params.dt));
  std::size_t snapshot_stride = 0;
  if (snapshot_every > 0.0) {
    snapshot_stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(snapshot_every / params.dt)));
  }

  RunResult result;
  result.snapshots.push_back(initial);
  result.audit.push_back(audit_field(model, initial, grid, 0));

  double initial_density_mass = 0.0;
  for (std::size_t c = 0; c < model.n_densities(); ++c) {
    initial_density_mass += result.audit.front().mass[c];
  }
  const double clip_limit = kClipBudget * std::max(initial_density_mass, 1e-300);

  StateField current = initial;
  const double t0 = initial.time;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    StepOutcome out = advance(model, current, grid, params);
    out.field.time = t0 + static_cast<double>(k) * params.dt;
    current = std::move(out.field);

    result.cumulative_clipped += out.clipped_mass;
    result.max_cfl = std::max(result.max_cfl, out.cfl);
    AuditRow row = audit_field(model, current, grid, k);
    row.cfl = out.cfl;
    row.clipped_mass = out.clipped_mass;
    result.audit.push_back(row);

    if (result.cumulative_clipped > clip_limit) {
      std::ostringstream os;
      os << "negative-density clipping added " << result.cumulative_clipped
         << " mass by t = " << current.time << ", above " << kClipBudget
         << " of the total";
      throw MassClipError(os.str());
    }

    const bool keep = (snapshot_stride > 0 && k % snapshot_stride == 0) || k == n_steps;
    if (keep) result.snapshots.push_back(current);
    if (observer && !observer(current, result.audit.back())) {
      if (!keep) result.snapshots.push_back(current);
      break;
    }
  }
  return result;
}

}  // namespace pedflow
