#include "pedflow/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "pedflow/cli/format.hpp"
#include "pedflow/errors.hpp"

namespace pedflow::cli {

bool CheckSpec::empty() const noexcept {
  return !max_final_deviation && !min_final_clusters && !max_final_clusters &&
         !clusters_by_time && !min_peak_density && !leftward_drift && !coarsening;
}

double ScenarioConfig::lane_rho(std::size_t lane, std::size_t direction) const {
  const auto& list = direction == kPlus ? lane_rho_plus : lane_rho_minus;
  if (!list.empty()) return list.at(lane);
  return direction == kPlus ? rho_plus : rho_minus;
}

// ---- schema and presets --------------------------------------------------------

std::vector<std::pair<std::string, std::string>> config_schema() {
  return {
      {"scenario.name", "label copied into the summary"},
      {"model.kind", "sim_flux | two_way_car | two_way_ar | one_way_car | one_way_ar"},
      {"model.a", "peak location of the simulation flux profile (sim_flux)"},
      {"model.V", "desired velocity (CAR kinds; initial w of AR kinds)"},
      {"pressure.M", "background pressure prefactor"},
      {"pressure.m", "background pressure exponent"},
      {"pressure.eps", "singular correction strength"},
      {"pressure.gamma", "singular correction exponent"},
      {"pressure.rho_star", "congestion density"},
      {"crowding.kind", "constant | affine | power"},
      {"crowding.beta", "crowding weight exponent or slope"},
      {"crowding.minus_kind", "crowding weight of the minus species (defaults to crowding.kind)"},
      {"crowding.minus_beta", "beta of the minus species (defaults to crowding.beta)"},
      {"grid.cells", "number of cells"},
      {"grid.length", "domain length (default: cells, i.e. dx = 1)"},
      {"scheme.dt", "time step"},
      {"scheme.delta", "diffusion coefficient"},
      {"scheme.limiter", "minmod | none"},
      {"scheme.cfl_guard", "largest accepted CFL number"},
      {"initial.rho_plus", "uniform density of the + species"},
      {"initial.rho_minus", "uniform density of the - species"},
      {"initial.w_plus", "initial desired velocity of the + species (AR kinds)"},
      {"initial.w_minus", "initial desired velocity of the - species (AR kinds)"},
      {"lanes.count", "number of lanes"},
      {"lanes.rho_plus", "comma-separated + densities, one per lane"},
      {"lanes.rho_minus", "comma-separated - densities, one per lane"},
      {"lanes.lambda0", "base lane-change rate"},
      {"lanes.ramp", "positive_part | sigmoid"},
      {"lanes.cutoff", "linear | squared"},
      {"lanes.sigmoid_scale", "width of the sigmoid ramp"},
      {"noise.kind", "gaussian | uniform"},
      {"noise.sigma", "standard deviation of the per-cell perturbation"},
      {"noise.seed", "master seed (required)"},
      {"run.t_end", "final time"},
      {"run.snapshot_every", "time between snapshots"},
      {"clusters.threshold", "total density marking a cluster (default 0.9 rho_max)"},
      {"check.max_final_deviation", "final sup-norm distance to the uniform state must be below"},
      {"check.min_final_clusters", "final cluster count must be at least"},
      {"check.max_final_clusters", "final cluster count must be at most"},
      {"check.clusters_by_time", "a cluster must exist at or before this time"},
      {"check.min_peak_density", "peak total density required of that cluster"},
      {"check.leftward_drift", "mean cluster drift over the second half must be negative"},
      {"check.coarsening", "cluster count non-increasing over the second half"},
      {"output.dir", "artifact directory (overridden by --out)"},
      {"analysis.xi_min", "smallest wave number of the dispersion table"},
      {"analysis.xi_max", "largest wave number (default: twice the unstable band)"},
      {"analysis.xi_count", "number of wave numbers"},
      {"map.resolution", "grid points per axis of the hyperbolicity map"},
      {"table.rho_min", "first density of the pressure table"},
      {"table.rho_max", "last density of the pressure table (default just below rho_star)"},
      {"table.count", "rows of the pressure table"},
  };
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig5-unstable"}; }

Config preset_config(const std::string& name) {
  const std::string common =
      "model.kind = sim_flux\n"
      "model.a = 0.7\n"
      "grid.cells = 200\n"
      "grid.length = 200\n"
      "scheme.dt = 0.2\n"
      "scheme.delta = 0.4\n"
      "scheme.limiter = minmod\n"
      "noise.kind = gaussian\n"
      "noise.sigma = 0.01\n"
      "noise.seed = 20140101\n";
  std::string extra;
  if (name == "fig3") {
    extra =
        "initial.rho_plus = 0.35\n"
        "initial.rho_minus = 0.3\n"
        "run.t_end = 500\n"
        "run.snapshot_every = 10\n"
        "check.max_final_deviation = 0.01\n"
        "check.max_final_clusters = 0\n";
  } else if (name == "fig4") {
    extra =
        "initial.rho_plus = 0.5\n"
        "initial.rho_minus = 0.3\n"
        "run.t_end = 10000\n"
        "run.snapshot_every = 20\n"
        "scheme.cfl_guard = 0.7\n"
        "check.clusters_by_time = 2000\n"
        "check.min_peak_density = 1.0\n"
        "check.min_final_clusters = 1\n"
        "check.max_final_clusters = 2\n"
        "check.leftward_drift = true\n"
        "check.coarsening = true\n";
  } else if (name == "fig5") {
    extra =
        "initial.rho_plus = 0.4\n"
        "initial.rho_minus = 0.3\n"
        "scheme.delta = 2\n"
        "scheme.dt = 0.05\n"
        "run.t_end = 5000\n"
        "run.snapshot_every = 20\n"
        "check.max_final_deviation = 0.02\n"
        "check.max_final_clusters = 0\n";
  } else if (name == "fig5-unstable") {
    extra =
        "initial.rho_plus = 0.4\n"
        "initial.rho_minus = 0.3\n"
        "run.t_end = 5000\n"
        "run.snapshot_every = 20\n"
        "scheme.cfl_guard = 0.7\n"
        "check.clusters_by_time = 5000\n";
  } else {
    throw ConfigError("unknown preset `" + name + "`");
  }
  return merge(Config::parse(common, "preset " + name),
               Config::parse("scenario.name = " + name + "\n" + extra, "preset " + name));
}

Config merge(const Config& base, const Config& top) {
  Config out = base;
  for (const auto& [key, value] : top.entries()) out.set(key, value);
  return out;
}

// ---- config conversion ---------------------------------------------------------

namespace {

CrowdingWeight parse_crowding(const std::string& kind, double beta, const std::string& key) {
  if (kind == "constant") return CrowdingWeight::constant();
  if (kind == "affine") return CrowdingWeight::affine(beta);
  if (kind == "power") return CrowdingWeight::power(beta);
  throw ConfigError("`" + key + "` must be constant, affine or power");
}

}  // namespace

ModelSpec model_from_config(const Config& c) {
  const std::string kind = c.get_string("model.kind", "sim_flux");
  if (kind == "sim_flux") {
    const double a = c.get_double("model.a", 0.7);
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("`model.a` must lie in (0, 1)");
    return ModelSpec::sim_flux({a});
  }
  const bool one_way = kind == "one_way_car" || kind == "one_way_ar";
  if (!one_way && kind != "two_way_car" && kind != "two_way_ar") {
    throw ConfigError("`model.kind` must be one of sim_flux, two_way_car, two_way_ar, "
                      "one_way_car, one_way_ar");
  }
  const PressureParams pressure(c.get_double("pressure.M", 0.5), c.get_double("pressure.m", 2.0),
                                c.get_double("pressure.eps", 1e-2),
                                c.get_double("pressure.gamma", 2.0),
                                c.get_double("pressure.rho_star", 1.0),
                                one_way ? PressureContext::OneWay : PressureContext::TwoWay);
  const double V = c.get_double("model.V", 1.0);
  const std::string q_kind = c.get_string("crowding.kind", "affine");
  const double beta = c.get_double("crowding.beta", 1.0);
  const CrowdingWeight q_plus = parse_crowding(q_kind, beta, "crowding.kind");
  const CrowdingWeight q_minus =
      parse_crowding(c.get_string("crowding.minus_kind", q_kind),
                     c.get_double("crowding.minus_beta", beta), "crowding.minus_kind");
  if (kind == "one_way_car") return ModelSpec::one_way_car(pressure, V);
  if (kind == "one_way_ar") return ModelSpec::one_way_ar(pressure);
  if (kind == "two_way_car") return ModelSpec::two_way_car(pressure, V, q_plus, q_minus);
  return ModelSpec::two_way_ar(pressure, q_plus, q_minus);
}

namespace {

std::size_t positive_size(const Config& c, const std::string& key, std::int64_t fallback) {
  const std::int64_t v = c.get_int(key, fallback);
  if (v <= 0) throw ConfigError("`" + key + "` must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

ScenarioConfig scenario_from_config(const Config& c) {
  std::set<std::string> known;
  for (const auto& [key, doc] : config_schema()) known.insert(key);
  c.require_known(known);

  ScenarioConfig s;
  try {
    s.name = c.get_string("scenario.name", "custom");
    s.model = model_from_config(c);

    s.cells = positive_size(c, "grid.cells", 512);
    s.length = c.get_double("grid.length", static_cast<double>(s.cells));
    (void)s.grid();

    s.scheme.dt = c.get_double("scheme.dt", 0.2);
    s.scheme.delta_diff = c.get_double("scheme.delta", 0.4);
    s.scheme.cfl_guard = c.get_double("scheme.cfl_guard", 0.45);
    const std::string limiter = c.get_string("scheme.limiter", "minmod");
    if (limiter == "minmod") {
      s.scheme.limiter = Limiter::Minmod;
    } else if (limiter == "none") {
      s.scheme.limiter = Limiter::None;
    } else {
      throw ConfigError("`scheme.limiter` must be minmod or none");
    }
    if (!(s.scheme.dt > 0.0)) throw ConfigError("`scheme.dt` must be positive");
    if (s.scheme.delta_diff < 0.0) throw ConfigError("`scheme.delta` must be non-negative");
    if (!(s.scheme.cfl_guard > 0.0)) throw ConfigError("`scheme.cfl_guard` must be positive");

    s.rho_plus = c.get_double("initial.rho_plus", 0.35);
    s.rho_minus = c.get_double("initial.rho_minus", s.model.is_two_way() ? 0.3 : 0.0);
    const double V = c.get_double("model.V", 1.0);
    s.w_plus = c.get_double("initial.w_plus", V);
    s.w_minus = c.get_double("initial.w_minus", V);

    s.lanes = positive_size(c, "lanes.count", 1);
    if (c.has("lanes.rho_plus")) s.lane_rho_plus = c.get_doubles("lanes.rho_plus");
    if (c.has("lanes.rho_minus")) s.lane_rho_minus = c.get_doubles("lanes.rho_minus");
    for (const auto* list : {&s.lane_rho_plus, &s.lane_rho_minus}) {
      if (!list->empty() && list->size() != s.lanes) {
        throw ConfigError("per-lane density lists must have lanes.count entries");
      }
    }
    if (s.lanes > 1 && s.model.kind() != ModelKind::TwoWayCAR &&
        s.model.kind() != ModelKind::TwoWayAR) {
      throw ConfigError("several lanes need model.kind two_way_car or two_way_ar");
    }
    s.rates.lambda0 = c.get_double("lanes.lambda0", s.rates.lambda0);
    if (s.rates.lambda0 < 0.0) throw ConfigError("`lanes.lambda0` must be non-negative");
    const std::string ramp = c.get_string("lanes.ramp", "positive_part");
    if (ramp == "positive_part") {
      s.rates.ramp = LaneChangeRates::Ramp::PositivePart;
    } else if (ramp == "sigmoid") {
      s.rates.ramp = LaneChangeRates::Ramp::Sigmoid;
    } else {
      throw ConfigError("`lanes.ramp` must be positive_part or sigmoid");
    }
    const std::string cutoff = c.get_string("lanes.cutoff", "linear");
    if (cutoff == "linear") {
      s.rates.cutoff = LaneChangeRates::Cutoff::Linear;
    } else if (cutoff == "squared") {
      s.rates.cutoff = LaneChangeRates::Cutoff::Squared;
    } else {
      throw ConfigError("`lanes.cutoff` must be linear or squared");
    }
    s.rates.sigmoid_scale = c.get_double("lanes.sigmoid_scale", 1.0);
    if (!(s.rates.sigmoid_scale > 0.0)) throw ConfigError("`lanes.sigmoid_scale` must be positive");

    for (std::size_t k = 0; k < s.lanes; ++k) {
      for (std::size_t a = 0; a < (s.model.is_two_way() ? 2u : 1u); ++a) {
        const double rho = s.lane_rho(k, a);
        if (rho < 0.0) throw ConfigError("initial densities must be non-negative");
      }
      const double total = s.lane_rho(k, kPlus) + (s.model.is_two_way() ? s.lane_rho(k, kMinus) : 0.0);
      const bool inside = s.model.kind() == ModelKind::SimFlux ? total <= 1.0
                                                               : total < s.model.rho_max();
      if (!inside) throw ConfigError("initial total density lies outside the admissible range");
    }

    const std::string noise = c.get_string("noise.kind", "gaussian");
    if (noise == "gaussian") {
      s.noise.kind = NoiseSpec::Kind::Gaussian;
    } else if (noise == "uniform") {
      s.noise.kind = NoiseSpec::Kind::Uniform;
    } else {
      throw ConfigError("`noise.kind` must be gaussian or uniform");
    }
    s.noise.sigma = c.get_double("noise.sigma", 1e-2);
    if (s.noise.sigma < 0.0) throw ConfigError("`noise.sigma` must be non-negative");
    s.noise.seed = c.get_uint("noise.seed");

    s.t_end = c.get_double("run.t_end", 500.0);
    if (s.t_end < 0.0) throw ConfigError("`run.t_end` must be non-negative");
    s.snapshot_every = c.get_double("run.snapshot_every", 10.0);
    if (c.has("clusters.threshold")) s.cluster_threshold = c.get_double("clusters.threshold");

    if (c.has("check.max_final_deviation")) {
      s.checks.max_final_deviation = c.get_double("check.max_final_deviation");
    }
    if (c.has("check.min_final_clusters")) {
      s.checks.min_final_clusters = static_cast<std::size_t>(c.get_uint("check.min_final_clusters"));
    }
    if (c.has("check.max_final_clusters")) {
      s.checks.max_final_clusters = static_cast<std::size_t>(c.get_uint("check.max_final_clusters"));
    }
    if (c.has("check.clusters_by_time")) {
      s.checks.clusters_by_time = c.get_double("check.clusters_by_time");
    }
    if (c.has("check.min_peak_density")) {
      s.checks.min_peak_density = c.get_double("check.min_peak_density");
    }
    s.checks.leftward_drift = c.get_bool("check.leftward_drift", false);
    s.checks.coarsening = c.get_bool("check.coarsening", false);
    if (c.has("output.dir")) s.out_dir = c.get_string("output.dir");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(c.origin() + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(c.origin() + ": " + e.what());
  }
  return s;
}

// ---- initial data --------------------------------------------------------------

std::uint64_t substream_seed(std::uint64_t master, std::size_t lane, std::size_t species) {
  const std::uint64_t index = 2 * static_cast<std::uint64_t>(lane) + species + 1;
  return master + 0x9E3779B97F4A7C15ULL * index;
}

StateField build_initial(const ScenarioConfig& config, std::size_t lane, double* clipped) {
  const ModelSpec& model = config.model;
  const std::size_t n = config.cells;
  const std::size_t nd = model.n_densities();
  StateField field(model.n_conserved(), n);
  double clip = 0.0;
  const double dx = config.grid().dx();
  const double sigma = config.noise.sigma;
  for (std::size_t a = 0; a < nd; ++a) {
    const std::uint64_t seed = substream_seed(config.noise.seed, lane, a);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> flat(-std::sqrt(3.0), std::sqrt(3.0));
    const double base = config.lane_rho(lane, a);
    for (std::size_t i = 0; i < n; ++i) {
      double value = base;
      if (sigma > 0.0) {
        const double e =
            config.noise.kind == NoiseSpec::Kind::Gaussian ? gauss(engine) : flat(engine);
        value += sigma * e;
      }
      if (value < 0.0) {
        clip += -value * dx;
        value = 0.0;
      }
      field(a, i) = value;
    }
  }
  if (model.is_ar()) {
    const double w[2] = {config.w_plus, config.w_minus};
    for (std::size_t a = 0; a < nd; ++a) {
      for (std::size_t i = 0; i < n; ++i) field(nd + a, i) = field(a, i) * w[a];
    }
  }
  if (clipped) *clipped = clip;
  return field;
}

// ---- clusters ------------------------------------------------------------------

double ClusterSet::peak() const noexcept {
  double p = 0.0;
  for (const auto& c : clusters) p = std::max(p, c.peak);
  return p;
}

ClusterSet find_clusters(const StateField& field, const Grid1D& grid, std::size_t n_densities,
                         double threshold) {
  const std::size_t n = field.n_cells();
  std::vector<double> total(n, 0.0);
  for (std::size_t a = 0; a < n_densities; ++a) {
    for (std::size_t i = 0; i < n; ++i) total[i] += field(a, i);
  }
  const double dx = grid.dx();
  const double L = grid.length();

  ClusterSet out;
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (total[i] < threshold) {
      start = i;
      break;
    }
  }
  auto close = [&](std::size_t first, std::size_t width) {
    Cluster c;
    c.first = first;
    c.width = width;
    double weighted = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      const double m = total[(first + j) % n] * dx;
      const double x = (static_cast<double>(first + j) + 0.5) * dx;
      weighted += m * x;
      c.mass += m;
      c.peak = std::max(c.peak, total[(first + j) % n]);
    }
    c.centroid = std::fmod(weighted / c.mass, L);
    out.clusters.push_back(c);
  };
  if (start == n) {
    close(0, n);
    return out;
  }
  std::size_t run_first = 0;
  std::size_t run_width = 0;
  for (std::size_t s = 1; s <= n; ++s) {
    const std::size_t i = (start + s) % n;
    if (s < n && total[i] >= threshold) {
      if (run_width == 0) run_first = start + s;
      ++run_width;
    } else if (run_width > 0) {
      close(run_first % n, run_width);
      run_width = 0;
    }
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.centroid < b.centroid; });
  return out;
}

double cluster_drift(const ClusterSet& prev, const ClusterSet& next, const Grid1D& grid,
                     double dt) {
  if (prev.count() == 0 || next.count() == 0 || !(dt > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double L = grid.length();
  double sum = 0.0;
  for (const auto& c : next.clusters) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : prev.clusters) {
      double d = std::fmod(c.centroid - p.centroid, L);
      if (d >= 0.5 * L) d -= L;
      if (d < -0.5 * L) d += L;
      if (std::abs(d) < std::abs(best)) best = d;
    }
    sum += best;
  }
  return sum / static_cast<double>(next.count()) / dt;
}

// ---- running -------------------------------------------------------------------

namespace {

double sup_deviation(const ScenarioConfig& config, const StateField& field, std::size_t lane) {
  double dev = 0.0;
  for (std::size_t a = 0; a < config.model.n_densities(); ++a) {
    const double base = config.lane_rho(lane, a);
    for (double v : field.row(a)) dev = std::max(dev, std::abs(v - base));
  }
  return dev;
}

void record_snapshot(const ScenarioConfig& config, ScenarioResult& result,
                     std::vector<StateField> lanes, double t) {
  const Grid1D grid = config.grid();
  for (std::size_t k = 0; k < lanes.size(); ++k) {
    ClusterRecord rec;
    rec.t = t;
    rec.lane = k;
    rec.set = find_clusters(lanes[k], grid, config.model.n_densities(), config.threshold());
    rec.deviation = sup_deviation(config, lanes[k], k);
    rec.drift = std::numeric_limits<double>::quiet_NaN();
    for (auto it = result.clusters.rbegin(); it != result.clusters.rend(); ++it) {
      if (it->lane == k) {
        rec.drift = cluster_drift(it->set, rec.set, grid, t - it->t);
        break;
      }
    }
    result.clusters.push_back(std::move(rec));
  }
  result.times.push_back(t);
  result.snapshots.push_back(std::move(lanes));
}

void finish(const ScenarioConfig& config, ScenarioResult& result) {
  const auto& first = result.audit.front().mass;
  const auto& last = result.audit.back().mass;
  for (std::size_t c = 0; c < first.size(); ++c) {
    const double scale = std::max(std::abs(first[c]), std::numeric_limits<double>::min());
    result.worst_relative_drift =
        std::max(result.worst_relative_drift, std::abs(last[c] - first[c]) / scale);
  }
  result.final_deviation = 0.0;
  for (std::size_t k = 0; k < result.snapshots.back().size(); ++k) {
    result.final_deviation =
        std::max(result.final_deviation, sup_deviation(config, result.snapshots.back()[k], k));
  }
}

std::optional<StabilityReport> initial_stability(const ScenarioConfig& config) {
  const ModelKind kind = config.model.kind();
  if (kind != ModelKind::SimFlux && kind != ModelKind::TwoWayCAR) return std::nullopt;
  try {
    return instability_summary(
        diffusive_speeds(config.model, config.lane_rho(0, kPlus), config.lane_rho(0, kMinus)),
        config.scheme.delta_diff);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

AuditRow lane_audit(const LaneStack& stack, const Grid1D& grid, std::size_t step) {
  AuditRow row;
  row.step = step;
  row.t = stack.time();
  const auto mass = direction_mass(stack, grid);
  row.mass.assign(mass.begin(), mass.end());
  row.min_rho = std::numeric_limits<double>::infinity();
  row.max_rho = -std::numeric_limits<double>::infinity();
  for (const auto& lane : stack.lanes()) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (double v : lane.row(a)) {
        row.min_rho = std::min(row.min_rho, v);
        row.max_rho = std::max(row.max_rho, v);
      }
    }
    for (double v : lane.values()) row.max_abs = std::max(row.max_abs, std::abs(v));
  }
  return row;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) {
  ScenarioResult result;
  result.stability = initial_stability(config);
  const Grid1D grid = config.grid();

  std::vector<StateField> initial;
  for (std::size_t k = 0; k < config.lanes; ++k) {
    double clip = 0.0;
    initial.push_back(build_initial(config, k, &clip));
    result.initial_clipped += clip;
  }

  if (config.lanes == 1) {
    const RunResult run = pedflow::run(
        config.model, initial.front(), grid, config.scheme, config.t_end, config.snapshot_every);
    for (const auto& snap : run.snapshots) record_snapshot(config, result, {snap}, snap.time);
    result.audit = run.audit;
    result.cumulative_clipped = run.cumulative_clipped;
    result.max_cfl = run.max_cfl;
    result.steps = run.audit.back().step;
  } else {
    LaneStack stack(config.model, initial);
    record_snapshot(config, result, stack.lanes(), stack.time());
    result.audit.push_back(lane_audit(stack, grid, 0));
    const auto n_steps = static_cast<std::size_t>(std::llround(config.t_end / config.scheme.dt));
    std::size_t stride = 0;
    if (config.snapshot_every > 0.0) {
      stride = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(config.snapshot_every / config.scheme.dt)));
    }
    for (std::size_t k = 1; k <= n_steps; ++k) {
      CoupledStepInfo info;
      stack = coupled_step(stack, grid, config.scheme, config.rates, &info);
      for (std::size_t lane = 0; lane < stack.n_lanes(); ++lane) {
        stack.lane(lane).time = static_cast<double>(k) * config.scheme.dt;
      }
      AuditRow row = lane_audit(stack, grid, k);
      row.cfl = info.max_cfl;
      row.clipped_mass = info.clipped_mass;
      result.audit.push_back(row);
      result.cumulative_clipped += info.clipped_mass;
      result.max_cfl = std::max(result.max_cfl, info.max_cfl);
      const double total0 = result.audit.front().mass[0] + result.audit.front().mass[1];
      if (result.cumulative_clipped > kClipBudget * total0) {
        throw MassClipError("negative-density clipping exceeded the mass budget");
      }
      if ((stride > 0 && k % stride == 0) || k == n_steps) {
        record_snapshot(config, result, stack.lanes(), stack.time());
      }
    }
    result.steps = n_steps;
  }
  finish(config, result);
  return result;
}

double mean_drift(const ScenarioResult& result, double t_from) {
  std::vector<double> last_t;
  double distance = 0.0;
  double elapsed = 0.0;
  for (const auto& rec : result.clusters) {
    if (rec.lane >= last_t.size()) last_t.resize(rec.lane + 1, rec.t);
    const double span = rec.t - last_t[rec.lane];
    last_t[rec.lane] = rec.t;
    if (rec.t < t_from || !std::isfinite(rec.drift)) continue;
    distance += rec.drift * span;
    elapsed += span;
  }
  if (!(elapsed > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return distance / elapsed;
}

// ---- checks --------------------------------------------------------------------

std::vector<CheckResult> evaluate_checks(const ScenarioConfig& config,
                                         const ScenarioResult& result) {
  std::vector<CheckResult> out;
  const auto& checks = config.checks;
  std::size_t final_count = 0;
  for (const auto& rec : result.clusters) {
    if (rec.t == result.times.back()) final_count = std::max(final_count, rec.set.count());
  }

  if (checks.max_final_deviation) {
    std::ostringstream os;
    os << "final deviation " << result.final_deviation << " < " << *checks.max_final_deviation;
    out.push_back({"max_final_deviation", result.final_deviation < *checks.max_final_deviation,
                   os.str()});
  }
  if (checks.min_final_clusters) {
    std::ostringstream os;
    os << "final cluster count " << final_count << " >= " << *checks.min_final_clusters;
    out.push_back({"min_final_clusters", final_count >= *checks.min_final_clusters, os.str()});
  }
  if (checks.max_final_clusters) {
    std::ostringstream os;
    os << "final cluster count " << final_count << " <= " << *checks.max_final_clusters;
    out.push_back({"max_final_clusters", final_count <= *checks.max_final_clusters, os.str()});
  }
  if (checks.clusters_by_time || checks.min_peak_density) {
    const double t_limit = checks.clusters_by_time.value_or(std::numeric_limits<double>::infinity());
    const double need = checks.min_peak_density.value_or(0.0);
    std::optional<double> first_time;
    double best_peak = 0.0;
    for (const auto& rec : result.clusters) {
      if (rec.t > t_limit || rec.set.count() == 0) continue;
      best_peak = std::max(best_peak, rec.set.peak());
      if (rec.set.peak() >= need && !first_time) first_time = rec.t;
    }
    std::ostringstream os;
    if (first_time) {
      os << "cluster with peak >= " << need << " at t = " << *first_time;
    } else {
      os << "no cluster with peak >= " << need << " by t = " << t_limit << " (best peak "
         << best_peak << ")";
    }
    out.push_back({"clusters_by_time", first_time.has_value(), os.str()});
  }
  if (checks.leftward_drift) {
    const double drift = mean_drift(result, 0.5 * config.t_end);
    std::ostringstream os;
    os << "mean drift over the second half " << drift << " < 0";
    out.push_back({"leftward_drift", drift < 0.0, os.str()});
  }
  if (checks.coarsening) {
    bool monotone = true;
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    std::ostringstream os;
    for (const auto& rec : result.clusters) {
      if (rec.t < 0.5 * config.t_end || rec.lane != 0) continue;
      if (rec.set.count() > previous) {
        if (monotone) os << "count rose from " << previous << " to " << rec.set.count()
                         << " at t = " << rec.t;
        monotone = false;
      }
      previous = rec.set.count();
    }
    if (monotone) os << "cluster count non-increasing over the second half";
    out.push_back({"coarsening", monotone, os.str()});
  }
  return out;
}

// ---- artifacts -----------------------------------------------------------------

void write_snapshots_csv(std::ostream& os, const ScenarioResult& result, const Grid1D& grid) {
  if (result.snapshots.empty()) return;
  const bool multi = result.snapshots.front().size() > 1;
  const std::size_t nc = result.snapshots.front().front().n_components();
  os << (multi ? "t,lane,x" : "t,x");
  for (std::size_t c = 0; c < nc; ++c) os << ",component_" << c;
  os << '\n';
  for (std::size_t s = 0; s < result.snapshots.size(); ++s) {
    const std::string t = num(result.times[s]);
    for (std::size_t k = 0; k < result.snapshots[s].size(); ++k) {
      const StateField& f = result.snapshots[s][k];
      for (std::size_t i = 0; i < f.n_cells(); ++i) {
        os << t << ',';
        if (multi) os << k << ',';
        os << num(grid.center(i));
        for (std::size_t c = 0; c < nc; ++c) os << ',' << num(f(c, i));
        os << '\n';
      }
    }
  }
}

void write_audit_csv(std::ostream& os, const ScenarioResult& result) {
  if (result.audit.empty()) return;
  os << "step,t,cfl";
  for (std::size_t c = 0; c < result.audit.front().mass.size(); ++c) os << ",mass_" << c;
  os << ",min_rho,max_rho,clipped_mass\n";
  for (const auto& row : result.audit) {
    os << row.step << ',' << num(row.t) << ',' << num(row.cfl);
    for (double m : row.mass) os << ',' << num(m);
    os << ',' << num(row.min_rho) << ',' << num(row.max_rho) << ',' << num(row.clipped_mass)
       << '\n';
  }
}

void write_clusters_csv(std::ostream& os, const ScenarioResult& result) {
  os << "t,lane,count,peak,drift,deviation,centroids\n";
  for (const auto& rec : result.clusters) {
    os << num(rec.t) << ',' << rec.lane << ',' << rec.set.count() << ',' << num(rec.set.peak())
       << ',' << num(rec.drift) << ',' << num(rec.deviation) << ',';
    for (std::size_t j = 0; j < rec.set.clusters.size(); ++j) {
      if (j) os << ';';
      os << num(rec.set.clusters[j].centroid);
    }
    os << '\n';
  }
}

namespace {

void write_stability_csv(std::ostream& os, const ScenarioResult& result) {
  os << "key,value\n";
  if (!result.stability) return;
  const auto& r = *result.stability;
  os << "delta," << num(r.delta) << '\n';
  os << "hyperbolic," << (r.hyperbolic ? 1 : 0) << '\n';
  if (r.eigenvalues) {
    os << "eigenvalue_lower," << num(r.eigenvalues->lower) << '\n';
    os << "eigenvalue_upper," << num(r.eigenvalues->upper) << '\n';
  }
  if (r.unstable_xi_max) os << "unstable_xi_max," << num(*r.unstable_xi_max) << '\n';
  if (r.dominant_xi) os << "dominant_xi," << num(*r.dominant_xi) << '\n';
  if (r.max_growth_rate) os << "max_growth_rate," << num(*r.max_growth_rate) << '\n';
  if (r.dominant_length) os << "dominant_length," << num(*r.dominant_length) << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

void write_artifacts(const ScenarioConfig& config, const ScenarioResult& result,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Grid1D grid = config.grid();
  {
    auto os = open_out(dir / "snapshots.csv");
    write_snapshots_csv(os, result, grid);
  }
  {
    auto os = open_out(dir / "audit.csv");
    write_audit_csv(os, result);
  }
  {
    auto os = open_out(dir / "clusters.csv");
    write_clusters_csv(os, result);
  }
  {
    auto os = open_out(dir / "stability.csv");
    write_stability_csv(os, result);
  }
  auto os = open_out(dir / "summary.txt");
  os << "scenario " << config.name << '\n';
  os << "model " << to_string(config.model.kind()) << '\n';
  os << "cells " << config.cells << " dx " << num(grid.dx()) << " dt " << num(config.scheme.dt)
     << " delta " << num(config.scheme.delta_diff) << '\n';
  os << "steps " << result.steps << " t_end " << num(result.times.back()) << '\n';
  os << "max_cfl " << num(result.max_cfl) << '\n';
  os << "initial_clipped " << num(result.initial_clipped) << '\n';
  os << "cumulative_clipped " << num(result.cumulative_clipped) << '\n';
  os << "worst_relative_mass_drift " << num(result.worst_relative_drift) << '\n';
  os << "final_deviation " << num(result.final_deviation) << '\n';
  os << "final_clusters " << result.clusters.back().set.count() << '\n';
  os << "mean_drift_second_half " << num(mean_drift(result, 0.5 * config.t_end)) << '\n';
}

}  // namespace pedflow::cli
