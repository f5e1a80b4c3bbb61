#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emkit/modelio.hpp"
#include "emkit/optics.hpp"

namespace emkit {

struct CriteriaFixture {
  std::string label;
  double dp_tot_eA = 0.0;
  double mu_sq_debye2 = 0.0;
  double axis_fraction = 0.0;
  double tau_ns = 0.0;
};

struct DensityOptions {
  std::string mode;  // dipole | difference | transition
  std::string cube, cube_a, cube_b, psi_g, psi_e;
  Vec3 reference = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  std::optional<double> electrons;
  bool allow_unnormalized = false;
};

struct RunConfig {
  std::string model_path;
  std::array<int, 3> kgrid{64, 1, 1};
  bool kgrid_from_config = false;
  std::vector<double> ground_occ;   // per-band f
  std::vector<double> excited_occ;  // empty when not requested
  double gamma_ev = 0.02;
  double refractive_index = 1.0;
  double cell_volume_nm3 = 0.0;  // 0 -> take from model cell
  double hw_ev = 0.0;
  double intensity_ev = 0.0;
  CriteriaThresholds thresholds;
  std::vector<CriteriaFixture> fixtures;
  DensityOptions density;
  std::string output_dir = ".";
  std::vector<std::string> warnings;
};

struct ConfigErrors {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
  std::string joined() const {
    std::string s;
    for (const auto& e : errors) s += e + "\n";
    return s;
  }
};

namespace detail {

inline std::vector<double> parse_occ_list(const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  double f;
  while (ss >> f) out.push_back(f);
  return out;
}

inline bool parse_vec3(const std::string& v, Vec3& out) {
  std::istringstream ss(v);
  return static_cast<bool>(ss >> out[0] >> out[1] >> out[2]);
}

}  // namespace detail

// Parses and normalizes a run config, collecting every violation instead of
// failing fast. Unknown keys are warnings for forward compatibility.
inline RunConfig validate_config(const std::string& path, ConfigErrors& errs) {
  RunConfig c;
  if (!std::filesystem::exists(path)) {
    errs.errors.push_back("config file does not exist: " + path);
    return c;
  }
  ini::File f;
  try {
    f = ini::File::parse(path);
  } catch (const ParseError& e) {
    errs.errors.push_back(e.what());
    return c;
  }

  static const std::map<std::string, std::vector<std::string>> known = {
      {"model", {"path"}},
      {"kgrid", {"divisions"}},
      {"occupations", {"ground", "excited"}},
      {"optics",
       {"gamma_ev", "refractive_index", "cell_volume_nm3", "hw_ev",
        "intensity_ev"}},
      {"criteria", {"threshold_dp_ea", "brightness_debye2", "fixture"}},
      {"density",
       {"mode", "cube", "cube_a", "cube_b", "psi_g", "psi_e", "reference",
        "axis", "electrons", "allow_unnormalized"}},
      {"output", {"dir"}},
  };
  for (const auto& sec : f.section_order) {
    auto it = known.find(sec);
    if (it == known.end()) {
      c.warnings.push_back("unknown section [" + sec + "] ignored");
      continue;
    }
    for (const auto& l : f.lines(sec)) {
      const auto eq = l.text.find('=');
      if (eq == std::string::npos) {
        errs.errors.push_back(path + ":" + std::to_string(l.number) +
                              ": expected 'key = value' in [" + sec + "]");
        continue;
      }
      std::string k = l.text.substr(0, eq);
      k.erase(k.find_last_not_of(" \t") + 1);
      bool ok = false;
      for (const auto& kk : it->second) ok = ok || kk == k;
      if (!ok)
        c.warnings.push_back("unknown key '" + k + "' in [" + sec + "] ignored");
    }
  }

  auto number = [&](const std::string& sec, const std::string& key, double lo,
                    double& out) {
    const std::string v = f.value(sec, key);
    if (v.empty()) return;
    std::istringstream ss(v);
    double x;
    if (!(ss >> x)) {
      errs.errors.push_back("[" + sec + "] " + key + ": not a number: " + v);
      return;
    }
    if (x <= lo) {
      errs.errors.push_back("[" + sec + "] " + key + ": must be > " +
                            std::to_string(lo) + ", got " + v);
      return;
    }
    out = x;
  };

  c.model_path = f.value("model", "path");
  if (!c.model_path.empty() && !std::filesystem::exists(c.model_path))
    errs.errors.push_back("[model] path: file does not exist: " + c.model_path);

  const std::string kg = f.value("kgrid", "divisions");
  if (!kg.empty()) {
    std::istringstream ss(kg);
    if (!(ss >> c.kgrid[0] >> c.kgrid[1] >> c.kgrid[2]) || c.kgrid[0] < 1 ||
        c.kgrid[1] < 1 || c.kgrid[2] < 1)
      errs.errors.push_back("[kgrid] divisions: need three positive integers");
    else
      c.kgrid_from_config = true;
  }

  c.ground_occ = detail::parse_occ_list(f.value("occupations", "ground"));
  c.excited_occ = detail::parse_occ_list(f.value("occupations", "excited"));

  number("optics", "gamma_ev", 0.0, c.gamma_ev);
  number("optics", "refractive_index", 0.0, c.refractive_index);
  number("optics", "cell_volume_nm3", 0.0, c.cell_volume_nm3);
  number("optics", "hw_ev", 0.0, c.hw_ev);
  number("optics", "intensity_ev", 0.0, c.intensity_ev);
  number("criteria", "threshold_dp_ea", 0.0, c.thresholds.stability_eA);
  number("criteria", "brightness_debye2", 0.0, c.thresholds.brightness_debye2);

  for (const auto& l : f.lines("criteria")) {
    if (l.text.rfind("fixture", 0) != 0) continue;
    const auto eq = l.text.find('=');
    if (eq == std::string::npos) continue;
    CriteriaFixture fx;
    std::istringstream ss(l.text.substr(eq + 1));
    if (!(ss >> fx.label >> fx.dp_tot_eA)) {
      errs.errors.push_back("[criteria] fixture: need 'label dp_tot_eA "
                            "[mu_sq_debye2 axis_fraction tau_ns]'");
      continue;
    }
    ss >> fx.mu_sq_debye2 >> fx.axis_fraction >> fx.tau_ns;
    c.fixtures.push_back(fx);
  }

  c.density.mode = f.value("density", "mode");
  c.density.cube = f.value("density", "cube");
  c.density.cube_a = f.value("density", "cube_a");
  c.density.cube_b = f.value("density", "cube_b");
  c.density.psi_g = f.value("density", "psi_g");
  c.density.psi_e = f.value("density", "psi_e");
  const std::string ref = f.value("density", "reference");
  if (!ref.empty() && !detail::parse_vec3(ref, c.density.reference))
    errs.errors.push_back("[density] reference: need three numbers");
  const std::string ax = f.value("density", "axis");
  if (!ax.empty() && !detail::parse_vec3(ax, c.density.axis))
    errs.errors.push_back("[density] axis: need three numbers");
  const std::string el = f.value("density", "electrons");
  if (!el.empty()) {
    double x;
    std::istringstream ss(el);
    if (ss >> x)
      c.density.electrons = x;
    else
      errs.errors.push_back("[density] electrons: not a number");
  }
  c.density.allow_unnormalized =
      f.value("density", "allow_unnormalized") == "true";

  const std::string dir = f.value("output", "dir");
  if (!dir.empty()) c.output_dir = dir;
  return c;
}

}  // namespace emkit
