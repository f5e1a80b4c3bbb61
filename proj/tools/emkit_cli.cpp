// Command-line front end: polarization, lifetime, criteria, density and
// oracle-check subcommands writing versioned JSON reports plus CSV curves.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "emkit/berry.hpp"
#include "emkit/chains.hpp"
#include "emkit/config.hpp"
#include "emkit/densitygrid.hpp"
#include "emkit/modelio.hpp"
#include "emkit/optics.hpp"
#include "emkit/oracle.hpp"
#include "emkit/sternheimer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emkit;

namespace {

constexpr const char* kToolVersion = "0.1.0";

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json polarization_record(const PolarizationResult& p) {
  json q = json::array();
  for (int i = 0; i < 3; ++i) q.push_back(vec_json(p.quanta.row(i)));
  return json{{"p_el_eA", vec_json(p.p_el)},
              {"p_ion_eA", vec_json(p.p_ion)},
              {"p_tot_eA", vec_json(p.p_tot)},
              {"quantum_eA", q},
              {"branch", {p.branch[0], p.branch[1], p.branch[2]}},
              {"grid", {p.grid_used[0], p.grid_used[1], p.grid_used[2]}},
              {"label", p.label}};
}

json config_echo(const RunConfig& c) {
  return json{{"model_path", c.model_path},
              {"kgrid", {c.kgrid[0], c.kgrid[1], c.kgrid[2]}},
              {"gamma_eV", c.gamma_ev},
              {"refractive_index", c.refractive_index},
              {"cell_volume_nm3", c.cell_volume_nm3},
              {"hw_eV", c.hw_ev},
              {"intensity_eV", c.intensity_ev},
              {"threshold_dp_eA", c.thresholds.stability_eA},
              {"brightness_threshold_debye2", c.thresholds.brightness_debye2},
              {"output_dir", c.output_dir}};
}

void write_report(const fs::path& dir, const std::string& subcommand,
                  const RunConfig& cfg, json results) {
  fs::create_directories(dir);
  json report{{"tool", {{"name", "emkit"}, {"version", kToolVersion}}},
              {"subcommand", subcommand},
              {"inputs", config_echo(cfg)},
              {"results", std::move(results)}};
  // timestamps live in a separate field so report comparison can skip them
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  report["metadata"] = json{
      {"timestamp_unix_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
  std::ofstream out(dir / "report.json");
  out << report.dump(2) << "\n";
}

OccupationConfig occ_from_list(const std::vector<double>& f,
                               const std::string& label) {
  if (f.empty())
    throw ValidationError("missing [occupations] " + label + " list in config");
  return OccupationConfig::uniform(f, label);
}

// tolerance-aware numeric comparison, metadata excluded
bool reports_match(const json& a, const json& b, double rel_tol,
                   std::string path, std::string& diff) {
  if (path == "/metadata") return true;
  if (a.is_object() && b.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        diff = path + "/" + it.key() + ": missing on right";
        return false;
      }
      if (!reports_match(it.value(), b.at(it.key()), rel_tol,
                         path + "/" + it.key(), diff))
        return false;
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) {
        diff = path + "/" + it.key() + ": missing on left";
        return false;
      }
    return true;
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) {
      diff = path + ": array size differs";
      return false;
    }
    for (size_t i = 0; i < a.size(); ++i)
      if (!reports_match(a[i], b[i], rel_tol, path + "/" + std::to_string(i),
                         diff))
        return false;
    return true;
  }
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    if (std::abs(x - y) / scale > rel_tol && std::abs(x - y) > 1e-12) {
      diff = path + ": " + std::to_string(x) + " vs " + std::to_string(y);
      return false;
    }
    return true;
  }
  if (a != b) {
    diff = path + ": values differ";
    return false;
  }
  return true;
}

int run_polarization(const RunConfig& cfg) {
  const ParsedModel pm = read_model_file(cfg.model_path);
  const KPointGrid grid = cfg.kgrid_from_config
                              ? KPointGrid(cfg.kgrid[0], cfg.kgrid[1], cfg.kgrid[2])
                              : pm.kgrid;
  const auto ground = occ_from_list(cfg.ground_occ, "ground");
  const PolarizationResult pg = berry_phase_polarization(pm.model, grid, ground);
  json results{{"ground", polarization_record(pg)}};
  if (!cfg.excited_occ.empty()) {
    const auto excited = occ_from_list(cfg.excited_occ, "excited");
    const PolarizationResult pe =
        berry_phase_polarization(pm.model, grid, excited);
    const DipoleDifference dd = dipole_difference(pg, pe);
    results["excited"] = polarization_record(pe);
    results["difference"] = json{{"dp_ion_eA", vec_json(dd.dp_ion)},
                                 {"dp_el_eA", vec_json(dd.dp_el)},
                                 {"dp_tot_eA", vec_json(dd.dp_tot)},
                                 {"magnitude_eA", dd.magnitude_eA},
                                 {"magnitude_debye", dd.magnitude_debye}};
  }
  write_report(cfg.output_dir, "polarization", cfg, std::move(results));
  return 0;
}

int run_lifetime(const RunConfig& cfg) {
  if (cfg.hw_ev <= 0 || cfg.intensity_ev <= 0 || cfg.cell_volume_nm3 <= 0 ||
      cfg.refractive_index <= 0)
    throw ValidationError(
        "lifetime needs positive hw_ev, intensity_ev, cell_volume_nm3 and "
        "refractive_index in [optics]");
  const RadiativeLifetime rl = radiative_lifetime(
      cfg.refractive_index, cfg.hw_ev, cfg.cell_volume_nm3, cfg.intensity_ev);
  write_report(cfg.output_dir, "lifetime", cfg,
               json{{"tau_ns", rl.tau_ns},
                    {"einstein_a_per_s", rl.einstein_a_per_s},
                    {"mu_sq_debye2", rl.mu_sq_debye2}});
  return 0;
}

int run_criteria(const RunConfig& cfg) {
  if (cfg.fixtures.empty())
    throw ValidationError("criteria needs at least one [criteria] fixture row");
  json rows = json::array();
  for (const auto& fx : cfg.fixtures) {
    const EmitterCriteriaReport r =
        emitter_criteria(fx.dp_tot_eA, fx.mu_sq_debye2, fx.axis_fraction,
                         fx.tau_ns, cfg.thresholds);
    rows.push_back(json{{"label", fx.label},
                        {"dp_tot_eA", r.dp_tot_eA},
                        {"dp_tot_debye", r.dp_tot_debye},
                        {"stability_pass", r.stability_pass},
                        {"mu_sq_debye2", r.mu_sq_debye2},
                        {"brightness_pass", r.brightness_pass},
                        {"polarization_axis_fraction",
                         r.polarization_axis_fraction},
                        {"tau_ns", r.tau_ns},
                        {"verdict", r.verdict}});
  }
  json results{{"fixtures", rows}};
  if (cfg.fixtures.size() >= 2) {
    double lo = cfg.fixtures[0].dp_tot_eA, hi = cfg.fixtures[0].dp_tot_eA;
    for (const auto& fx : cfg.fixtures) {
      lo = std::min(lo, fx.dp_tot_eA);
      hi = std::max(hi, fx.dp_tot_eA);
    }
    if (lo > 0) results["dp_ratio"] = hi / lo;
  }
  write_report(cfg.output_dir, "criteria", cfg, std::move(results));
  return 0;
}

int run_density(const RunConfig& cfg) {
  const auto& d = cfg.density;
  json results;
  fs::create_directories(cfg.output_dir);
  if (d.mode == "dipole") {
    const VolumetricGrid g = read_cube(d.cube, GridKind::density);
    GridDipoleOptions opt{d.electrons, d.allow_unnormalized};
    const Vec3 p = grid_dipole(g, d.reference, opt);
    results = json{{"dipole_eA", vec_json(p)},
                   {"integral_electrons", g.integral()},
                   {"unit_warning", g.unit_warning}};
  } else if (d.mode == "difference") {
    const VolumetricGrid a = read_cube(d.cube_a, GridKind::density);
    const VolumetricGrid b = read_cube(d.cube_b, GridKind::density);
    const VolumetricGrid diff = grid_difference(a, b);
    const fs::path out = fs::path(cfg.output_dir) / "difference.cube";
    write_cube(out.string(), diff);
    GridDipoleOptions opt;
    opt.allow_unnormalized = true;
    results = json{{"dipole_of_difference_eA",
                    vec_json(grid_dipole(diff, d.reference, opt))},
                   {"difference_cube", out.string()},
                   {"integral_difference", diff.integral()}};
  } else if (d.mode == "transition") {
    const VolumetricGrid pg = read_cube(d.psi_g, GridKind::wavefunction);
    const VolumetricGrid pe = read_cube(d.psi_e, GridKind::wavefunction);
    const GridTransitionDipole t = grid_transition_dipole(pg, pe, d.axis);
    const fs::path prof = fs::path(cfg.output_dir) / "axial_profile.csv";
    write_axial_profile_csv(prof.string(), t.profile);
    results = json{{"mu_eA", {t.dipole.mu[0].real(), t.dipole.mu[1].real(),
                              t.dipole.mu[2].real()}},
                   {"mu_abs_eA", t.dipole.mu_norm_eA()},
                   {"mu_sq_debye2", t.dipole.mu_sq_debye2()},
                   {"parallel_eA", t.dipole.parallel.real()},
                   {"perpendicular_eA", t.dipole.perpendicular},
                   {"axial_profile_csv", prof.string()}};
  } else {
    throw ValidationError("[density] mode must be dipole, difference or transition");
  }
  write_report(cfg.output_dir, "density", cfg, std::move(results));
  return 0;
}

int run_oracle_check(const RunConfig& cfg) {
  // route-equivalence battery on the canonical Rice-Mele fixture
  const double t1 = 1.0, t2 = 0.5, delta = 0.5;
  const KPointGrid grid(cfg.kgrid_from_config ? cfg.kgrid[0] : 64, 1, 1);
  const auto occ = OccupationConfig::uniform({1.0, 0.0}, "ground");
  const TightBindingModel rm = rice_mele_chain(t1, t2, delta);

  const PolarizationResult berry = berry_phase_polarization(rm, grid, occ);
  const ClusterModel cl = cluster_from_model(rm, {400, 1, 1});
  const Vec3 cluster_p_el = cluster_dipole(cl) - cl.ion_dipole_per_cell;
  const double berry_vs_cluster =
      branch_match(berry.p_el - cluster_p_el, berry.quanta).norm();

  ModelPath path = [&](double lam) {
    return rice_mele_chain(t1, t2, delta * lam);
  };
  const Vec3 sos = polarization_response(path, 0.5, grid, occ);
  const Vec3 stern = sternheimer_response(path, 0.5, grid, occ);
  const double sos_vs_sternheimer = (sos - stern).norm();

  const bool pass = berry_vs_cluster < 1e-3 && sos_vs_sternheimer < 1e-8;
  json results{{"berry_vs_cluster_eA", berry_vs_cluster},
               {"sum_over_states_vs_sternheimer_eA", sos_vs_sternheimer},
               {"berry_p_el_eA", vec_json(berry.p_el)},
               {"cluster_p_el_eA", vec_json(cluster_p_el)},
               {"pass", pass}};
  write_report(cfg.output_dir, "oracle-check", cfg, std::move(results));
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emkit: polarization, radiative lifetime and emitter criteria "
               "for periodic model Hamiltonians"};
  app.require_subcommand(1);

  std::string config_path, output_dir, kgrid_str, compare_path;
  double threshold_dp = -1.0, gamma = -1.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--output-dir", output_dir, "artifact directory override");
    sub->add_option("--kgrid", kgrid_str, "k-grid override, N1xN2xN3");
    sub->add_option("--threshold-dp", threshold_dp,
                    "stability threshold override, e*Angstrom");
    sub->add_option("--gamma", gamma, "Lorentzian HWHM override, eV");
    sub->add_option("--compare", compare_path,
                    "compare the produced report.json against this reference");
  };
  for (const char* name : {"polarization", "lifetime", "criteria", "density",
                           "oracle-check"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    ConfigErrors errs;
    RunConfig cfg = validate_config(config_path, errs);
    if (!errs.ok()) {
      std::cerr << "emkit " << sub << ": invalid config:\n" << errs.joined();
      return 2;
    }
    for (const auto& w : cfg.warnings)
      std::cerr << "emkit " << sub << ": warning: " << w << "\n";
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (threshold_dp > 0) cfg.thresholds.stability_eA = threshold_dp;
    if (gamma > 0) cfg.gamma_ev = gamma;
    if (!kgrid_str.empty()) {
      std::array<int, 3> kg{1, 1, 1};
      if (std::sscanf(kgrid_str.c_str(), "%dx%dx%d", &kg[0], &kg[1], &kg[2]) != 3)
        throw ValidationError("--kgrid expects N1xN2xN3");
      cfg.kgrid = kg;
      cfg.kgrid_from_config = true;
    }

    int rc = 0;
    if (sub == "polarization") rc = run_polarization(cfg);
    else if (sub == "lifetime") rc = run_lifetime(cfg);
    else if (sub == "criteria") rc = run_criteria(cfg);
    else if (sub == "density") rc = run_density(cfg);
    else rc = run_oracle_check(cfg);

    if (rc == 0 && !compare_path.empty()) {
      std::ifstream mine(fs::path(cfg.output_dir) / "report.json");
      std::ifstream ref(compare_path);
      if (!ref) throw ValidationError("--compare: cannot open " + compare_path);
      json a = json::parse(mine), b = json::parse(ref);
      std::string diff;
      if (!reports_match(a, b, 1e-8, "", diff)) {
        std::cerr << "emkit " << sub << ": report differs: " << diff << "\n";
        return 2;
      }
    }
    return rc;
  } catch (const ValidationError& e) {
    std::cerr << "emkit " << sub << ": validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "emkit " << sub << ": numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "emkit " << sub << ": error: " << e.what() << "\n";
    return 3;
  }
}
