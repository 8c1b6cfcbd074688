#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmv/common.hpp"
#include "cmv/dos.hpp"
#include "cmv/ergodic.hpp"
#include "cmv/kotani.hpp"
#include "cmv/report.hpp"
#include "cmv/schur.hpp"
#include "cmv/version.hpp"

namespace cmv {

// Config-driven batch runner.  A run specification is one JSON document:
// family, sampling plan, task, numeric parameters, output directory.  Every
// run writes a manifest echoing the fully resolved configuration (defaults
// filled in) so that re-running from the manifest reproduces the artifacts
// byte for byte.  Complex numbers are [re, im] pairs; angles are radians.

struct RunConfig {
  ErgodicFamily family;
  SamplingPlan plan;
  std::string task;  // dos | lyapunov | schur | zeroset | theorem1 | identities | corollary
  CheckParams checks;

  // task-specific knobs
  std::vector<double> lyap_radii{0.5, 0.9, 2.0};  // rings for the lyapunov task
  int lyap_points = 16;                           // points per ring
  int defect_m_lo = 6;                            // reflectionless defect rung range
  int defect_m_hi = 12;
  double identities_radius = 0.9;  // z ring for identities
  int identities_points = 16;

  std::string out_dir = "out";

  // CLI overrides, echoed into the manifest
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<int> threads_override;
};

namespace config_detail {

inline Complex parse_complex(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(what + ": complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json complex_json(Complex z) { return {z.real(), z.imag()}; }

template <class T>
T field_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

inline ErgodicFamily parse_family(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("config: family.kind is required");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    if (!j.contains("alpha")) throw ConfigError("constant family: alpha is required");
    return ErgodicFamily::constant(parse_complex(j.at("alpha"), "family.alpha"));
  }
  if (kind == "periodic") {
    if (!j.contains("alphas") || !j.at("alphas").is_array() || j.at("alphas").empty())
      throw ConfigError("periodic family: alphas must be a non-empty array");
    std::vector<Complex> alphas;
    for (const auto& a : j.at("alphas")) alphas.push_back(parse_complex(a, "family.alphas[]"));
    return ErgodicFamily::periodic(std::move(alphas));
  }
  if (kind == "quasiperiodic") {
    if (!j.contains("coupling") || !j.contains("frequency"))
      throw ConfigError("quasiperiodic family: coupling and frequency are required");
    return ErgodicFamily::quasiperiodic(j.at("coupling").get<double>(),
                                        j.at("frequency").get<double>(),
                                        field_or<double>(j, "phase", 0.0));
  }
  if (kind == "random_iid") {
    if (!j.contains("radius")) throw ConfigError("random_iid family: radius is required");
    return ErgodicFamily::random_iid(j.at("radius").get<double>(),
                                     field_or<std::uint64_t>(j, "seed", 0));
  }
  throw ConfigError("config: unknown family kind '" + kind + "'");
}

inline nlohmann::json family_json(const ErgodicFamily& f) {
  nlohmann::json j;
  switch (f.kind) {
    case FamilyKind::Constant:
      j["kind"] = "constant";
      j["alpha"] = complex_json(f.alphas[0]);
      break;
    case FamilyKind::Periodic: {
      j["kind"] = "periodic";
      nlohmann::json arr = nlohmann::json::array();
      for (const Complex& a : f.alphas) arr.push_back(complex_json(a));
      j["alphas"] = arr;
      break;
    }
    case FamilyKind::Quasiperiodic:
      j["kind"] = "quasiperiodic";
      j["coupling"] = f.coupling;
      j["frequency"] = f.frequency;
      j["phase"] = f.base_phase;
      break;
    case FamilyKind::RandomIid:
      j["kind"] = "random_iid";
      j["radius"] = f.radius;
      j["seed"] = f.seed;
      break;
  }
  j["cap"] = f.cap();
  return j;
}

inline SamplingPlan parse_plan(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("mode")) throw ConfigError("config: plan.mode is required");
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "exact_periodic") return SamplingPlan::exact_periodic();
  if (mode == "monte_carlo")
    return SamplingPlan::monte_carlo(field_or<int>(j, "samples", 16),
                                     field_or<std::uint64_t>(j, "seed", 0));
  throw ConfigError("config: unknown plan mode '" + mode + "'");
}

inline nlohmann::json plan_json(const SamplingPlan& p) {
  nlohmann::json j;
  j["mode"] = p.mode == PlanMode::ExactPeriodic ? "exact_periodic" : "monte_carlo";
  if (p.mode == PlanMode::MonteCarlo) {
    j["samples"] = p.samples;
    j["seed"] = p.seed;
  }
  return j;
}

}  // namespace config_detail

inline RunConfig parse_config(const nlohmann::json& j, const std::string& task) {
  using config_detail::field_or;
  static const std::vector<std::string> kTasks = {
      "dos", "lyapunov", "schur", "zeroset", "theorem1", "identities", "corollary"};
  if (std::find(kTasks.begin(), kTasks.end(), task) == kTasks.end())
    throw ConfigError("unknown task '" + task + "'");
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  if (!j.contains("family")) throw ConfigError("config: family is required");
  RunConfig cfg;
  cfg.task = task;
  cfg.family = config_detail::parse_family(j.at("family"));
  cfg.plan = j.contains("plan") ? config_detail::parse_plan(j.at("plan"))
                                : SamplingPlan::exact_periodic();
  if (cfg.plan.mode == PlanMode::ExactPeriodic && cfg.family.period() == 0)
    throw ConfigError("exact_periodic plan requires a constant or periodic family");

  const nlohmann::json params = j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (!params.is_object()) throw ConfigError("config: params must be an object");
  CheckParams& c = cfg.checks;
  c.volume = field_or<int>(params, "n", c.volume);
  c.cocycle_steps = field_or<int>(params, "cocycle_steps", c.cocycle_steps);
  c.theta_grid = field_or<int>(params, "theta_grid", c.theta_grid);
  c.zero_grid = field_or<int>(params, "zero_grid", c.zero_grid);
  c.eps_gamma = field_or<double>(params, "eps_gamma", c.eps_gamma);
  c.margin_cells = field_or<int>(params, "margin_cells", c.margin_cells);
  c.boundary_pool = field_or<int>(params, "boundary_pool", c.boundary_pool);
  if (params.contains("beta"))
    c.beta = config_detail::parse_complex(params.at("beta"), "params.beta");
  c.schur_ladder.m_lo = field_or<int>(params, "ladder_lo", c.schur_ladder.m_lo);
  c.schur_ladder.m_hi = field_or<int>(params, "ladder_hi", c.schur_ladder.m_hi);
  c.schur_ladder.tol = field_or<double>(params, "ladder_tol", c.schur_ladder.tol);
  c.dos_ladder.m_lo = c.schur_ladder.m_lo;
  c.dos_ladder.m_hi = c.schur_ladder.m_hi;
  c.dos_ladder.tol = field_or<double>(params, "dos_ladder_tol", c.dos_ladder.tol);
  c.cap_multiplier = field_or<double>(params, "cap_multiplier", c.cap_multiplier);
  c.plateau_tol = field_or<double>(params, "plateau_tol", c.plateau_tol);
  c.rho_steps = field_or<int>(params, "rho_steps", c.rho_steps);
  c.corollary_zero_grid = field_or<int>(params, "corollary_zero_grid", c.corollary_zero_grid);
  c.corollary_nu_rung = field_or<int>(params, "corollary_nu_rung", c.corollary_nu_rung);
  c.probe_grid = field_or<int>(params, "probe_grid", c.probe_grid);
  c.probe_offset = field_or<double>(params, "probe_offset", c.probe_offset);
  if (params.contains("margin_sweep")) {
    c.margin_sweep.clear();
    for (const auto& m : params.at("margin_sweep")) c.margin_sweep.push_back(m.get<int>());
    if (c.margin_sweep.empty()) throw ConfigError("params.margin_sweep must be non-empty");
  }
  c.threads = field_or<int>(params, "threads", c.threads);

  if (params.contains("lyap_radii")) {
    cfg.lyap_radii.clear();
    for (const auto& rr : params.at("lyap_radii")) cfg.lyap_radii.push_back(rr.get<double>());
  }
  cfg.lyap_points = field_or<int>(params, "lyap_points", cfg.lyap_points);
  cfg.defect_m_lo = field_or<int>(params, "defect_m_lo", cfg.defect_m_lo);
  cfg.defect_m_hi = field_or<int>(params, "defect_m_hi", cfg.defect_m_hi);
  cfg.identities_radius = field_or<double>(params, "identities_radius", cfg.identities_radius);
  cfg.identities_points = field_or<int>(params, "identities_points", cfg.identities_points);

  cfg.out_dir = field_or<std::string>(j, "out_dir", cfg.out_dir);

  if (c.volume < 1 || c.cocycle_steps < 1 || c.theta_grid < 1 || c.zero_grid < 16 ||
      c.eps_gamma <= 0 || c.margin_cells < 0 || c.boundary_pool < 1 ||
      c.schur_ladder.m_lo < 1 || c.schur_ladder.m_hi < c.schur_ladder.m_lo ||
      c.schur_ladder.tol <= 0 || c.dos_ladder.tol <= 0 || c.cap_multiplier <= 0 ||
      c.rho_steps < 1 || c.corollary_zero_grid < 16 || c.probe_grid < 1 ||
      cfg.lyap_points < 1 || cfg.identities_points < 1 || cfg.lyap_radii.empty())
    throw ConfigError("config: a numeric parameter is out of range");
  if (c.threads < 1) c.threads = 1;
  return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
  using config_detail::complex_json;
  nlohmann::json j;
  j["family"] = config_detail::family_json(cfg.family);
  j["plan"] = config_detail::plan_json(cfg.plan);
  const CheckParams& c = cfg.checks;
  nlohmann::json p;
  p["n"] = c.volume;
  p["cocycle_steps"] = c.cocycle_steps;
  p["theta_grid"] = c.theta_grid;
  p["zero_grid"] = c.zero_grid;
  p["eps_gamma"] = c.eps_gamma;
  p["margin_cells"] = c.margin_cells;
  p["boundary_pool"] = c.boundary_pool;
  p["beta"] = complex_json(c.beta);
  p["ladder_lo"] = c.schur_ladder.m_lo;
  p["ladder_hi"] = c.schur_ladder.m_hi;
  p["ladder_tol"] = c.schur_ladder.tol;
  p["dos_ladder_tol"] = c.dos_ladder.tol;
  p["cap_multiplier"] = c.cap_multiplier;
  p["plateau_tol"] = c.plateau_tol;
  p["rho_steps"] = c.rho_steps;
  p["corollary_zero_grid"] = c.corollary_zero_grid;
  p["corollary_nu_rung"] = c.corollary_nu_rung;
  p["probe_grid"] = c.probe_grid;
  p["probe_offset"] = c.probe_offset;
  p["margin_sweep"] = c.margin_sweep;
  p["threads"] = c.threads;
  p["lyap_radii"] = cfg.lyap_radii;
  p["lyap_points"] = cfg.lyap_points;
  p["defect_m_lo"] = cfg.defect_m_lo;
  p["defect_m_hi"] = cfg.defect_m_hi;
  p["identities_radius"] = cfg.identities_radius;
  p["identities_points"] = cfg.identities_points;
  j["params"] = p;
  j["out_dir"] = cfg.out_dir;
  return j;
}

namespace run_detail {

struct ArtifactSet {
  std::vector<std::pair<std::string, std::string>> files;  // (name, contents)

  void add(const std::string& name, std::string contents) {
    files.emplace_back(name, std::move(contents));
  }
  void add_json(const std::string& name, const nlohmann::json& j) { add(name, j.dump(2) + "\n"); }
  void add_report(const std::string& stem, const CheckReport& r) {
    add_json(stem + "_report.json", r.to_json());
    std::ostringstream csv;
    r.write_csv(csv);
    add(stem + "_points.csv", csv.str());
  }
};

inline std::string csv_line(std::initializer_list<double> vals) {
  std::string line;
  bool first = true;
  for (double v : vals) {
    if (!first) line += ",";
    line += format_double(v);
    first = false;
  }
  return line + "\n";
}

inline std::vector<Complex> ring_grid(double radius, int points) {
  std::vector<Complex> zs;
  zs.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) zs.push_back(radius * unit_circle(kTwoPi * k / points));
  return zs;
}

inline void run_task(const RunConfig& cfg, ArtifactSet& out) {
  const ErgodicFamily& fam = cfg.family;
  const SamplingPlan& plan = cfg.plan;
  const CheckParams& c = cfg.checks;

  if (cfg.task == "dos") {
    const DosApproximation dos =
        density_of_states(fam, plan, c.volume, c.beta, c.boundary_pool, true, c.threads);
    const ThoulessPotential pot{dos, rho_infinity(fam, plan, c.rho_steps)};
    std::string atoms = "theta,weight\n";
    for (const CircleAtom& a : dos.measure.atoms())
      atoms += csv_line({a.theta, a.weight});
    out.add("dos_atoms.csv", std::move(atoms));
    std::string kac = "theta,k_ac,converged\n";
    const CaratheodoryEvaluator kev = dos_evaluator(pot);
    std::vector<BoundaryValue> vals(static_cast<std::size_t>(c.theta_grid));
    parallel_for(c.theta_grid, c.threads, [&](int i) {
      vals[static_cast<std::size_t>(i)] =
          ac_density(kev, kTwoPi * i / c.theta_grid, c.dos_ladder, c.cap_multiplier);
    });
    for (int i = 0; i < c.theta_grid; ++i)
      kac += csv_line({kTwoPi * i / c.theta_grid, vals[static_cast<std::size_t>(i)].value,
                       vals[static_cast<std::size_t>(i)].converged ? 1.0 : 0.0});
    out.add("k_ac.csv", std::move(kac));
    nlohmann::json info;
    info["rho_inf"] = pot.rho_inf;
    info["kolmogorov_self"] = dos.kolmogorov_self;
    info["atoms"] = dos.measure.size();
    info["max_weight"] = dos.measure.max_weight();
    out.add_json("dos_summary.json", info);
    return;
  }

  if (cfg.task == "lyapunov") {
    std::string csv = "z_re,z_im,gamma,std_error,length,samples\n";
    std::vector<Complex> zs;
    for (double radius : cfg.lyap_radii)
      for (const Complex& z : ring_grid(radius, cfg.lyap_points)) zs.push_back(z);
    std::vector<LyapunovEstimate> est(zs.size());
    parallel_for(static_cast<int>(zs.size()), c.threads, [&](int i) {
      est[static_cast<std::size_t>(i)] =
          lyapunov(fam, plan, zs[static_cast<std::size_t>(i)], c.cocycle_steps);
    });
    for (const LyapunovEstimate& e : est)
      csv += csv_line({e.z.real(), e.z.imag(), e.value, e.std_error,
                       static_cast<double>(e.length), static_cast<double>(e.samples)});
    out.add("lyapunov.csv", std::move(csv));
    return;
  }

  if (cfg.task == "schur") {
    const std::vector<OmegaState> states = plan_states(fam, plan);
    std::string nu = "theta,nu_ac,converged\n";
    std::vector<detail::AveragedDensity> vals(static_cast<std::size_t>(c.theta_grid));
    parallel_for(c.theta_grid, c.threads, [&](int i) {
      vals[static_cast<std::size_t>(i)] =
          detail::averaged_nu_ac(fam, states, kTwoPi * i / c.theta_grid, c.schur_ladder);
    });
    for (int i = 0; i < c.theta_grid; ++i)
      nu += csv_line({kTwoPi * i / c.theta_grid, vals[static_cast<std::size_t>(i)].value,
                      vals[static_cast<std::size_t>(i)].converged ? 1.0 : 0.0});
    out.add("nu_ac.csv", std::move(nu));
    std::string defect = "theta,r,defect\n";
    for (int i = 0; i < c.theta_grid; ++i) {
      const double theta = kTwoPi * i / c.theta_grid;
      for (int m = cfg.defect_m_lo; m <= cfg.defect_m_hi; ++m) {
        const double r = 1.0 - std::pow(2.0, -m);
        double mean = 0.0;
        for (const OmegaState& s : states) mean += reflectionless_defect(fam, s, theta, r);
        defect += csv_line({theta, r, mean / static_cast<double>(states.size())});
      }
    }
    out.add("defect.csv", std::move(defect));
    return;
  }

  if (cfg.task == "zeroset") {
    const ZeroSetArcs zs =
        zero_set(fam, plan, c.zero_grid, c.cocycle_steps, c.eps_gamma, c.margin_cells);
    std::string arcs = "lo,hi\n";
    for (const Arc& a : zs.arcs) arcs += csv_line({a.lo, a.hi});
    out.add("zero_arcs.csv", std::move(arcs));
    std::string gg = "theta,gamma\n";
    for (std::size_t i = 0; i < zs.grid_gamma.size(); ++i)
      gg += csv_line({kTwoPi * static_cast<double>(i) / zs.grid_size, zs.grid_gamma[i]});
    out.add("gamma_grid.csv", std::move(gg));
    return;
  }

  if (cfg.task == "theorem1") {
    out.add_report("theorem1", theorem1_check(fam, plan, c));
    return;
  }

  if (cfg.task == "identities") {
    const std::vector<Complex> ring = ring_grid(cfg.identities_radius, cfg.identities_points);
    out.add_report("gamma_schur", gamma_schur_check(fam, plan, ring, c));
    out.add_report("thouless", thouless_check(fam, plan, ring, c));
    out.add_report("bigcalc", bigcalc_check(fam, plan, c));
    return;
  }

  if (cfg.task == "corollary") {
    out.add_report("corollary", corollary_check(fam, plan, c));
    return;
  }

  throw ConfigError("unknown task '" + cfg.task + "'");
}

}  // namespace run_detail

/// Execute a run and write its artifacts.  All outputs are assembled in
/// memory and written at the end, so failures leave no partial files.
/// Returns the list of files written (manifest first).
inline std::vector<std::string> run(const RunConfig& cfg) {
  RunConfig resolved = cfg;
  if (cfg.seed_override) {
    resolved.plan.seed = *cfg.seed_override;
    if (resolved.family.kind == FamilyKind::RandomIid)
      resolved.family.seed = *cfg.seed_override;
  }
  if (cfg.out_override) resolved.out_dir = *cfg.out_override;
  if (cfg.threads_override) resolved.checks.threads = std::max(1, *cfg.threads_override);

  run_detail::ArtifactSet artifacts;
  run_detail::run_task(resolved, artifacts);

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["task"] = resolved.task;
  manifest["config"] = config_to_json(resolved);
  nlohmann::json overrides = nlohmann::json::object();
  if (cfg.seed_override) overrides["seed"] = *cfg.seed_override;
  if (cfg.out_override) overrides["out"] = *cfg.out_override;
  if (cfg.threads_override) overrides["threads"] = *cfg.threads_override;
  manifest["overrides"] = overrides;
  nlohmann::json names = nlohmann::json::array();
  for (const auto& [name, _] : artifacts.files) names.push_back(name);
  manifest["artifacts"] = names;

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(resolved.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + resolved.out_dir + "'");
  auto write_file = [&](const std::string& name, const std::string& contents) {
    const fs::path path = fs::path(resolved.out_dir) / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    os << contents;
  };
  std::vector<std::string> written;
  write_file("manifest.json", manifest.dump(2) + "\n");
  written.push_back("manifest.json");
  for (const auto& [name, contents] : artifacts.files) {
    write_file(name, contents);
    written.push_back(name);
  }
  return written;
}

}  // namespace cmv
