#pragma once

// Scenario description, initial data, cluster diagnostics and artifact output
// for the `pedflow` front end.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pedflow/analysis.hpp"
#include "pedflow/cli/config.hpp"
#include "pedflow/models.hpp"
#include "pedflow/multilane.hpp"
#include "pedflow/solver.hpp"

namespace pedflow::cli {

struct NoiseSpec {
  enum class Kind { Gaussian, Uniform };
  Kind kind = Kind::Gaussian;
  double sigma = 1e-2;
  std::uint64_t seed = 0;
};

/// Optional pass/fail expectations evaluated by `simulate --check`.
struct CheckSpec {
  std::optional<double> max_final_deviation;
  std::optional<std::size_t> min_final_clusters;
  std::optional<std::size_t> max_final_clusters;
  /// Clusters with peak total density >= min_peak_density must exist by this time.
  std::optional<double> clusters_by_time;
  std::optional<double> min_peak_density;
  bool leftward_drift = false;
  /// Cluster count non-increasing over the second half of the run.
  bool coarsening = false;

  bool empty() const noexcept;
};

struct ScenarioConfig {
  std::string name = "custom";
  ModelSpec model = ModelSpec::sim_flux({});
  std::size_t cells = 512;
  double length = 512.0;
  SchemeParams scheme{};
  double rho_plus = 0.35;
  double rho_minus = 0.3;
  /// Initial desired velocities of AR kinds.
  double w_plus = 1.0;
  double w_minus = 1.0;
  std::size_t lanes = 1;
  std::vector<double> lane_rho_plus;
  std::vector<double> lane_rho_minus;
  LaneChangeRates rates{};
  NoiseSpec noise{};
  double t_end = 500.0;
  double snapshot_every = 10.0;
  std::optional<double> cluster_threshold;
  CheckSpec checks{};
  std::filesystem::path out_dir;

  Grid1D grid() const { return Grid1D::from_length(length, cells); }
  double threshold() const { return cluster_threshold.value_or(0.9 * model.rho_max()); }
  double lane_rho(std::size_t lane, std::size_t direction) const;
};

/// Preset names accepted by `preset_config`.
std::vector<std::string> preset_names();

/// Config entries of a named preset; throws ConfigError for unknown names.
Config preset_config(const std::string& name);

/// Overlay: keys of `top` replace those of `base`.
Config merge(const Config& base, const Config& top);

/// Model section (`model.*`, `pressure.*`, `crowding.*`) of a config.
ModelSpec model_from_config(const Config& config);

/// Validates every key and converts module precondition failures into ConfigError.
ScenarioConfig scenario_from_config(const Config& config);

/// The schema of known keys with a one-line description each.
std::vector<std::pair<std::string, std::string>> config_schema();

/// Uniform state plus seeded per-cell noise for one lane. Densities pushed
/// below 0 by the noise are clipped; the clipped amount is returned in `clipped`.
StateField build_initial(const ScenarioConfig& config, std::size_t lane = 0,
                         double* clipped = nullptr);

/// Seed of the independent noise stream for (lane, species).
std::uint64_t substream_seed(std::uint64_t master, std::size_t lane, std::size_t species);

struct Cluster {
  std::size_t first = 0;  ///< first cell of the run (may wrap past the end)
  std::size_t width = 0;
  double centroid = 0.0;  ///< mass-weighted, in [0, L)
  double peak = 0.0;      ///< largest total density inside
  double mass = 0.0;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  std::size_t count() const noexcept { return clusters.size(); }
  double peak() const noexcept;
};

/// Maximal periodic runs of cells with total density >= threshold.
ClusterSet find_clusters(const StateField& field, const Grid1D& grid, std::size_t n_densities,
                         double threshold);

/// Mean displacement per unit time of the clusters in `next` relative to the
/// nearest cluster of `prev` (periodic distance). NaN when either set is empty.
double cluster_drift(const ClusterSet& prev, const ClusterSet& next, const Grid1D& grid,
                     double dt);

struct ClusterRecord {
  double t = 0.0;
  std::size_t lane = 0;
  ClusterSet set;
  double drift = 0.0;  ///< NaN for the first snapshot or when undefined
  double deviation = 0.0;  ///< sup-norm distance of the densities to the uniform state
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::vector<double> times;
  /// snapshots[s][lane]
  std::vector<std::vector<StateField>> snapshots;
  /// Single lane: one row per step. Several lanes: mass holds the per-direction totals.
  std::vector<AuditRow> audit;
  std::vector<ClusterRecord> clusters;
  std::optional<StabilityReport> stability;
  double initial_clipped = 0.0;
  double cumulative_clipped = 0.0;
  double max_cfl = 0.0;
  double final_deviation = 0.0;
  double worst_relative_drift = 0.0;  ///< max over components of |mass - mass0| / mass0
  std::size_t steps = 0;
};

ScenarioResult run_scenario(const ScenarioConfig& config);

/// Time-weighted mean drift over records with t >= t_from and a defined drift.
double mean_drift(const ScenarioResult& result, double t_from);

std::vector<CheckResult> evaluate_checks(const ScenarioConfig& config,
                                         const ScenarioResult& result);

/// snapshots.csv, audit.csv, clusters.csv, stability.csv and summary.txt.
void write_artifacts(const ScenarioConfig& config, const ScenarioResult& result,
                     const std::filesystem::path& dir);

void write_snapshots_csv(std::ostream& os, const ScenarioResult& result, const Grid1D& grid);
void write_audit_csv(std::ostream& os, const ScenarioResult& result);
void write_clusters_csv(std::ostream& os, const ScenarioResult& result);

}  // namespace pedflow::cli
