#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "emkit/densitygrid.hpp"

using namespace emkit;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "emkit_grid_tests";
  fs::create_directories(dir);
  return dir / name;
}

VolumetricGrid cubic_grid(int n, double box, GridKind kind) {
  VolumetricGrid g;
  g.kind = kind;
  g.counts = {n, n, n};
  g.axes = Mat3::Identity() * (box / n);
  g.values.assign(size_t(n) * n * n, 0.0);
  return g;
}

// normalized 3D Gaussian density centered at r0
VolumetricGrid gaussian_density(int n, double box, const Vec3& r0, double sigma) {
  VolumetricGrid g = cubic_grid(n, box, GridKind::density);
  const double norm = std::pow(2.0 * M_PI * sigma * sigma, -1.5);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double r2 = (g.position(i, j, k) - r0).squaredNorm();
        g.at(i, j, k) = norm * std::exp(-0.5 * r2 / (sigma * sigma));
      }
  return g;
}

// harmonic-oscillator-like 1D factors, numerically normalized on the grid
VolumetricGrid ho_wavefunction(int n, double box, const Vec3& r0, double sigma,
                               int level_z) {
  VolumetricGrid g = cubic_grid(n, box, GridKind::wavefunction);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 d = g.position(i, j, k) - r0;
        const double envelope = std::exp(-0.25 * d.squaredNorm() / (sigma * sigma));
        double poly = 1.0;
        const double z = d[2] / sigma;
        if (level_z == 1) poly = z;
        if (level_z == 2) poly = z * z - 1.0;  // orthogonal to the level-0 state
        g.at(i, j, k) = poly * envelope;
      }
  double norm2 = 0.0;
  for (double v : g.values) norm2 += v * v;
  norm2 *= g.voxel_volume();
  for (double& v : g.values) v /= std::sqrt(norm2);
  return g;
}

}  // namespace

TEST_CASE("displaced Gaussian dipole matches the analytic value") {
  const double box = 12.0;
  const Vec3 center(6.4, 5.9, 6.1);
  const auto g = gaussian_density(48, box, center, 1.0);
  GridDipoleOptions opt;
  opt.expected_electrons = 1.0;
  const Vec3 reference(box / 2.0, box / 2.0, box / 2.0);
  const Vec3 p = grid_dipole(g, reference, opt);
  CHECK((p + (center - reference)).norm() < 1e-4);
}

TEST_CASE("parity: a symmetric density has no dipole") {
  const int n = 48;
  const double box = 12.0;
  const double h = box / n;
  const Vec3 center((n - 1) / 2.0 * h, (n - 1) / 2.0 * h, (n - 1) / 2.0 * h);
  const auto g = gaussian_density(n, box, center, 1.2);
  GridDipoleOptions opt;
  opt.allow_unnormalized = true;
  CHECK(grid_dipole(g, center, opt).norm() < 1e-8);
}

TEST_CASE("normalization mismatch raises unless explicitly allowed") {
  auto g = gaussian_density(24, 10.0, Vec3(5.0, 5.0, 5.0), 1.0);
  GridDipoleOptions opt;
  opt.expected_electrons = 2.0;  // grid integrates to ~1
  CHECK_THROWS_AS(grid_dipole(g, Vec3::Zero(), opt), NormalizationError);
  opt.allow_unnormalized = true;
  CHECK_NOTHROW(grid_dipole(g, Vec3::Zero(), opt));
}

TEST_CASE("grid difference is linear and validates geometry") {
  const Vec3 ra(5.5, 5.0, 5.0), rb(4.5, 5.0, 5.0);
  const auto a = gaussian_density(32, 10.0, ra, 0.9);
  const auto b = gaussian_density(32, 10.0, rb, 0.9);
  const auto d = grid_difference(a, b);
  CHECK(d.kind == GridKind::signed_difference);
  CHECK(d.integral() == Approx(a.integral() - b.integral()).margin(1e-10));
  GridDipoleOptions opt;
  opt.allow_unnormalized = true;
  const Vec3 pd = grid_dipole(d, Vec3::Zero(), opt);
  const Vec3 pa = grid_dipole(a, Vec3::Zero(), opt);
  const Vec3 pb = grid_dipole(b, Vec3::Zero(), opt);
  CHECK((pd - (pa - pb)).norm() < 1e-10);

  auto shifted = b;
  shifted.origin += Vec3(0.1, 0.0, 0.0);
  CHECK_THROWS_AS(grid_difference(a, shifted), GeometryMismatchError);
}

TEST_CASE("grid transition dipole reproduces the oscillator matrix element") {
  const int n = 48;
  const double box = 12.0, sigma = 0.8;
  const Vec3 r0(6.0, 6.0, 6.0);
  const auto psi_g = ho_wavefunction(n, box, r0, sigma, 0);
  const auto psi_e = ho_wavefunction(n, box, r0, sigma, 1);
  const auto t = grid_transition_dipole(psi_g, psi_e, Vec3::UnitZ());
  // <0| z |1> = sigma for this envelope convention (exp(-z^2 / 4 sigma^2))
  CHECK(std::abs(t.dipole.mu[2]) == Approx(sigma).margin(1e-4));
  CHECK(std::abs(t.dipole.mu[0]) < 1e-8);
  CHECK(std::abs(t.dipole.mu[1]) < 1e-8);
  // the axial profile resolves exactly the parallel component
  CHECK(t.profile.total() == Approx(t.dipole.parallel.real()).margin(1e-10));
}

TEST_CASE("parity-even pair has a vanishing transition dipole") {
  const auto psi_g = ho_wavefunction(40, 12.0, Vec3(6.0, 6.0, 6.0), 0.8, 0);
  const auto psi_e = ho_wavefunction(40, 12.0, Vec3(6.0, 6.0, 6.0), 0.8, 2);
  const auto t = grid_transition_dipole(psi_g, psi_e, Vec3::UnitZ());
  CHECK(t.dipole.mu_norm_eA() < 1e-8);
}

TEST_CASE("transition dipole validates normalization and geometry") {
  const auto psi_g = ho_wavefunction(24, 10.0, Vec3(5.0, 5.0, 5.0), 0.8, 0);
  auto bad = psi_g;
  for (double& v : bad.values) v *= 1.1;
  CHECK_THROWS_AS(grid_transition_dipole(psi_g, bad, Vec3::UnitZ()),
                  NormalizationError);
  auto moved = psi_g;
  moved.origin += Vec3(0.0, 0.2, 0.0);
  CHECK_THROWS_AS(grid_transition_dipole(psi_g, moved, Vec3::UnitZ()),
                  GeometryMismatchError);
}

TEST_CASE("cube files round-trip losslessly") {
  VolumetricGrid g = cubic_grid(6, 3.0, GridKind::signed_difference);
  g.counts = {6, 5, 4};
  g.values.assign(6 * 5 * 4, 0.0);
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : g.values) v = u(rng);
  g.origin = Vec3(-1.5, 0.25, 0.75);
  g.atoms = {{14, 4.0, Vec3(0.5, 1.0, 1.5)}, {6, 4.0, Vec3(2.0, 0.0, 1.0)}};
  g.comment = "round trip fixture";

  const auto path = temp_file("roundtrip.cube");
  write_cube(path.string(), g);
  const auto r = read_cube(path.string(), GridKind::signed_difference);
  CHECK_FALSE(r.unit_warning);
  CHECK(r.counts == g.counts);
  CHECK(r.comment == g.comment);
  CHECK((r.origin - g.origin).norm() < 1e-10);
  CHECK((r.axes - g.axes).norm() < 1e-10);
  REQUIRE(r.atoms.size() == g.atoms.size());
  CHECK(r.atoms[0].atomic_number == 14);
  CHECK((r.atoms[1].position - g.atoms[1].position).norm() < 1e-9);
  REQUIRE(r.values.size() == g.values.size());
  for (size_t i = 0; i < r.values.size(); ++i)
    REQUIRE(r.values[i] == Approx(g.values[i]).margin(1e-7));
}

TEST_CASE("negative axis counts mean Angstrom and set the unit warning") {
  const auto path = temp_file("angstrom.cube");
  std::ofstream out(path);
  out << "angstrom convention\nsecond line\n";
  out << "0  0.0 0.0 0.0\n";
  out << "-2  1.0 0.0 0.0\n-2  0.0 1.0 0.0\n-2  0.0 0.0 1.0\n";
  out << "0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n";
  out.close();
  const auto g = read_cube(path.string());
  CHECK(g.unit_warning);
  CHECK(g.axes(0, 0) == Approx(1.0));  // honored, not rescaled
  CHECK(g.counts == std::array<int, 3>{2, 2, 2});
}

TEST_CASE("positive axis counts are converted from Bohr") {
  const auto path = temp_file("bohr.cube");
  std::ofstream out(path);
  out << "bohr convention\nsecond line\n";
  out << "0  1.0 0.0 0.0\n";
  out << "2  1.0 0.0 0.0\n2  0.0 1.0 0.0\n2  0.0 0.0 1.0\n";
  out << "0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n";
  out.close();
  const auto g = read_cube(path.string());
  CHECK_FALSE(g.unit_warning);
  CHECK(g.axes(0, 0) == Approx(kAngstromPerBohr).margin(1e-12));
  CHECK(g.origin[0] == Approx(kAngstromPerBohr).margin(1e-12));
}

TEST_CASE("cube parse errors name the offending line") {
  const auto truncated = temp_file("truncated.cube");
  {
    std::ofstream out(truncated);
    out << "only a comment\n";
  }
  CHECK_THROWS_WITH(read_cube(truncated.string()),
                    Catch::Matchers::ContainsSubstring("second comment line"));

  const auto bad_axis = temp_file("bad_axis.cube");
  {
    std::ofstream out(bad_axis);
    out << "c1\nc2\n0 0 0 0\nnot-a-number 1 0 0\n";
  }
  CHECK_THROWS_WITH(read_cube(bad_axis.string()),
                    Catch::Matchers::ContainsSubstring("line 4"));

  const auto short_values = temp_file("short_values.cube");
  {
    std::ofstream out(short_values);
    out << "c1\nc2\n0 0 0 0\n2 1 0 0\n2 0 1 0\n2 0 0 1\n0.1 0.2 0.3\n";
  }
  CHECK_THROWS_WITH(read_cube(short_values.string()),
                    Catch::Matchers::ContainsSubstring("expected 8"));
}

TEST_CASE("grid validation rejects malformed grids") {
  auto g = cubic_grid(4, 2.0, GridKind::density);
  g.values[3] = -1.0;
  CHECK_THROWS_AS(g.validate(), ValidationError);

  auto tiny = cubic_grid(4, 2.0, GridKind::density);
  tiny.counts = {1, 4, 4};
  CHECK_THROWS_AS(tiny.validate(), ValidationError);

  auto short_values = cubic_grid(4, 2.0, GridKind::density);
  short_values.values.pop_back();
  CHECK_THROWS_AS(short_values.validate(), ValidationError);
}

TEST_CASE("CSV writers emit the documented headers") {
  AxialProfile prof;
  prof.z = {0.0, 0.5};
  prof.contribution = {0.1, -0.1};
  const auto ppath = temp_file("profile.csv");
  write_axial_profile_csv(ppath.string(), prof);
  std::ifstream pin(ppath);
  std::string header;
  std::getline(pin, header);
  CHECK(header == "z_angstrom,contribution_eA");

  DielectricSpectrum sp;
  sp.energies = {1.0, 1.1};
  sp.im_eps = {0.0, 0.5};
  const auto spath = temp_file("spectrum.csv");
  write_spectrum_csv(spath.string(), sp);
  std::ifstream sin(spath);
  std::getline(sin, header);
  CHECK(header == "energy_eV,im_eps");
}
