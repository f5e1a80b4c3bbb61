#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "emkit/berry.hpp"
#include "emkit/chains.hpp"
#include "emkit/config.hpp"
#include "emkit/modelio.hpp"

using namespace emkit;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents = "") {
  const fs::path dir = fs::temp_directory_path() / "emkit_io_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  if (!contents.empty()) {
    std::ofstream out(p);
    out << contents;
  }
  return p;
}

}  // namespace

TEST_CASE("model files round-trip through write and read") {
  const auto model = rice_mele_chain(1.0, 0.5, 0.5);
  const KPointGrid grid(64, 1, 1);
  const auto path = temp_file("rice_mele.model");
  write_model_file(path.string(), model, grid);
  const ParsedModel pm = read_model_file(path.string());

  CHECK(pm.model.n_orbitals() == 2);
  CHECK(pm.model.electron_count() == 1);
  CHECK(pm.kgrid.divisions() == std::array<int, 3>{64, 1, 1});
  CHECK((pm.model.geometry().lattice() - model.geometry().lattice()).norm() <
        1e-12);
  CHECK(pm.model.geometry().dimensionality() == 1);

  // the physics survives the round trip bit-for-bit at this tolerance
  const auto occ = OccupationConfig::uniform({1.0, 0.0}, "ground");
  const auto p0 = berry_phase_polarization(model, grid, occ);
  const auto p1 = berry_phase_polarization(pm.model, grid, occ);
  CHECK((p0.p_el - p1.p_el).norm() < 1e-14);
}

TEST_CASE("model parser reports missing sections by name") {
  const auto path = temp_file("no_sites.model",
                              "[lattice]\n1 0 0\n0 1 0\n0 0 1\n[orbitals]\n"
                              "[electrons]\n1\n");
  CHECK_THROWS_WITH(read_model_file(path.string()),
                    ContainsSubstring("[sites]"));
}

TEST_CASE("model parser reports malformed rows with file and line") {
  const auto path = temp_file(
      "bad_row.model",
      "[lattice]\n1 0 0\n0 1 0\n0 0 1\n[sites]\nA 0.0 0 0 0\n"
      "[orbitals]\n0 s nonsense 0 0 0\n[electrons]\n1\n");
  CHECK_THROWS_WITH(read_model_file(path.string()), ContainsSubstring(":8:"));
}

TEST_CASE("model parser tolerates comments and blank lines") {
  const auto path = temp_file("commented.model",
                              "# a model\n[lattice]\n"
                              "1 0 0  # the chain axis\n0 100 0\n0 0 100\n"
                              "dimensionality = 1\n\n[sites]\nA 0 0.25 0 0\n"
                              "[orbitals]\n0 s 0.0 0.25 0 0\n"
                              "[electrons]\n1\n");
  const ParsedModel pm = read_model_file(path.string());
  CHECK(pm.model.geometry().sites()[0].frac_pos[0] == Approx(0.25));
  CHECK(pm.kgrid.divisions() == std::array<int, 3>{1, 1, 1});
}

TEST_CASE("ini layer rejects structural errors with line numbers") {
  const auto headerless = temp_file("headerless.ini", "key = value\n");
  CHECK_THROWS_WITH(ini::File::parse(headerless.string()),
                    ContainsSubstring(":1:"));
  const auto unterminated = temp_file("unterminated.ini", "[model\nx = 1\n");
  CHECK_THROWS_WITH(ini::File::parse(unterminated.string()),
                    ContainsSubstring("unterminated"));
}

TEST_CASE("run config parses a full well-formed file") {
  const auto model_path = temp_file("cfg_model.model");
  write_model_file(model_path.string(), rice_mele_chain(1.0, 0.5, 0.5),
                   KPointGrid(32, 1, 1));
  const auto path = temp_file(
      "good.ini",
      "[model]\npath = " + model_path.string() +
          "\n[kgrid]\ndivisions = 48 1 1\n"
          "[occupations]\nground = 1 0\nexcited = 0 1\n"
          "[optics]\ngamma_ev = 0.05\nrefractive_index = 2.6473\n"
          "cell_volume_nm3 = 4.5346\nhw_ev = 1.387\nintensity_ev = 0.389\n"
          "[criteria]\nthreshold_dp_ea = 0.2\n"
          "fixture = v1 0.044 15.0 0.98 6.0\nfixture = nv 0.903\n"
          "[output]\ndir = /tmp/emkit_cfg_out\n");
  ConfigErrors errs;
  const RunConfig c = validate_config(path.string(), errs);
  REQUIRE(errs.ok());
  CHECK(c.kgrid == std::array<int, 3>{48, 1, 1});
  CHECK(c.kgrid_from_config);
  CHECK(c.ground_occ == std::vector<double>{1.0, 0.0});
  CHECK(c.excited_occ == std::vector<double>{0.0, 1.0});
  CHECK(c.gamma_ev == Approx(0.05));
  CHECK(c.refractive_index == Approx(2.6473));
  CHECK(c.hw_ev == Approx(1.387));
  CHECK(c.thresholds.stability_eA == Approx(0.2));
  CHECK(c.thresholds.brightness_debye2 == Approx(10.0));  // default kept
  REQUIRE(c.fixtures.size() == 2);
  CHECK(c.fixtures[0].label == "v1");
  CHECK(c.fixtures[0].mu_sq_debye2 == Approx(15.0));
  CHECK(c.fixtures[1].dp_tot_eA == Approx(0.903));
  CHECK(c.output_dir == "/tmp/emkit_cfg_out");
}

TEST_CASE("run config aggregates every violation") {
  const auto path = temp_file("bad.ini",
                              "[model]\npath = /nonexistent/file.model\n"
                              "[kgrid]\ndivisions = 0 1 1\n"
                              "[optics]\ngamma_ev = -0.1\nhw_ev = soup\n");
  ConfigErrors errs;
  validate_config(path.string(), errs);
  CHECK(errs.errors.size() >= 4);
  CHECK_THAT(errs.joined(), ContainsSubstring("does not exist"));
  CHECK_THAT(errs.joined(), ContainsSubstring("divisions"));
  CHECK_THAT(errs.joined(), ContainsSubstring("gamma_ev"));
  CHECK_THAT(errs.joined(), ContainsSubstring("not a number"));
}

TEST_CASE("unknown config keys warn but do not fail") {
  const auto path = temp_file("unknown.ini",
                              "[optics]\ngamma_ev = 0.02\nfuture_knob = 3\n"
                              "[mystery]\nx = 1\n");
  ConfigErrors errs;
  const RunConfig c = validate_config(path.string(), errs);
  CHECK(errs.ok());
  REQUIRE(c.warnings.size() == 2);
  CHECK_THAT(c.warnings[0], ContainsSubstring("future_knob"));
  CHECK_THAT(c.warnings[1], ContainsSubstring("[mystery]"));
}

TEST_CASE("missing config file is a validation error, not a crash") {
  ConfigErrors errs;
  validate_config("/definitely/not/here.ini", errs);
  REQUIRE_FALSE(errs.ok());
  CHECK_THAT(errs.joined(), ContainsSubstring("does not exist"));
}

TEST_CASE("defaults survive an empty-but-valid config") {
  const auto path = temp_file("minimal.ini", "[output]\ndir = .\n");
  ConfigErrors errs;
  const RunConfig c = validate_config(path.string(), errs);
  CHECK(errs.ok());
  CHECK(c.kgrid == std::array<int, 3>{64, 1, 1});
  CHECK_FALSE(c.kgrid_from_config);
  CHECK(c.gamma_ev == Approx(0.02));
  CHECK(c.thresholds.stability_eA == Approx(0.1));
}
