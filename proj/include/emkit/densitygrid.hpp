#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emkit/constants.hpp"
#include "emkit/errors.hpp"
#include "emkit/model.hpp"
#include "emkit/optics.hpp"

namespace emkit {

enum class GridKind { density, wavefunction, signed_difference };

struct GridAtom {
  int atomic_number = 0;
  double charge = 0.0;
  Vec3 position = Vec3::Zero();  // Angstrom
};

// Real-space scalar field sampled on a voxel grid (cube-file semantics:
// values are voxel-centered, last index fastest).
struct VolumetricGrid {
  Vec3 origin = Vec3::Zero();  // Angstrom
  Mat3 axes = Mat3::Zero();    // row i = step vector of axis i, Angstrom
  std::array<int, 3> counts{0, 0, 0};
  std::vector<double> values;  // flat, index (i*n2 + j)*n3 + k
  GridKind kind = GridKind::density;
  std::vector<GridAtom> atoms;
  std::string comment = "emkit volumetric grid";
  bool unit_warning = false;  // set when the file used the Angstrom convention

  double voxel_volume() const { return std::abs(axes.determinant()); }
  size_t n_values() const {
    return size_t(counts[0]) * counts[1] * counts[2];
  }
  Vec3 position(int i, int j, int k) const {
    return origin + i * Vec3(axes.row(0)) + j * Vec3(axes.row(1)) +
           k * Vec3(axes.row(2));
  }
  double& at(int i, int j, int k) {
    return values[(size_t(i) * counts[1] + j) * counts[2] + k];
  }
  double at(int i, int j, int k) const {
    return values[(size_t(i) * counts[1] + j) * counts[2] + k];
  }

  void validate() const {
    for (int d = 0; d < 3; ++d)
      if (counts[d] < 2)
        throw ValidationError("VolumetricGrid: counts must be >= 2 per axis");
    if (voxel_volume() <= 0)
      throw ValidationError("VolumetricGrid: voxel volume must be positive");
    if (values.size() != n_values())
      throw ValidationError("VolumetricGrid: value count mismatch");
    if (kind == GridKind::density)
      for (double v : values)
        if (v < -1e-8)
          throw ValidationError("VolumetricGrid: density with negative values");
  }

  // midpoint-rule integral of the field
  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * voxel_volume();
  }
};

// Gaussian-cube reader. Positive axis counts mean Bohr (converted to
// Angstrom); negative counts mean the file is already in Angstrom, which is
// honored and flagged.
inline VolumetricGrid read_cube(const std::string& path,
                                GridKind kind = GridKind::density) {
  std::ifstream in(path);
  if (!in) throw ParseError("read_cube: cannot open " + path);
  VolumetricGrid g;
  g.kind = kind;
  std::string line;
  int lineno = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw ParseError("read_cube: " + path + ": truncated file, missing " +
                       std::string(what) + " (line " + std::to_string(lineno + 1) + ")");
    ++lineno;
  };
  next_line("first comment line");
  g.comment = line;
  next_line("second comment line");

  next_line("atom count / origin line");
  int natoms = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> natoms >> g.origin[0] >> g.origin[1] >> g.origin[2]))
      throw ParseError("read_cube: " + path + ": bad atom/origin line " +
                       std::to_string(lineno));
  }
  bool bohr = true;
  for (int d = 0; d < 3; ++d) {
    next_line("axis line");
    std::istringstream ss(line);
    int count = 0;
    Vec3 ax;
    if (!(ss >> count >> ax[0] >> ax[1] >> ax[2]))
      throw ParseError("read_cube: " + path + ": bad axis line " +
                       std::to_string(lineno));
    if (count == 0)
      throw ParseError("read_cube: " + path + ": zero axis count, line " +
                       std::to_string(lineno));
    if (count < 0) {
      bohr = false;
      count = -count;
    }
    g.counts[d] = count;
    g.axes.row(d) = ax;
  }
  const double unit = bohr ? kAngstromPerBohr : 1.0;
  g.unit_warning = !bohr;
  g.axes *= unit;
  g.origin *= unit;

  g.atoms.resize(std::abs(natoms));
  for (auto& a : g.atoms) {
    next_line("atom line");
    std::istringstream ss(line);
    if (!(ss >> a.atomic_number >> a.charge >> a.position[0] >> a.position[1] >>
          a.position[2]))
      throw ParseError("read_cube: " + path + ": bad atom line " +
                       std::to_string(lineno));
    a.position *= unit;
  }

  g.values.reserve(g.n_values());
  double v;
  while (in >> v) g.values.push_back(v);
  if (g.values.size() != g.n_values())
    throw ParseError("read_cube: " + path + ": value section has " +
                     std::to_string(g.values.size()) + " entries, expected " +
                     std::to_string(g.n_values()));
  g.validate();
  return g;
}

inline void write_cube(const std::string& path, const VolumetricGrid& g) {
  std::ofstream out(path);
  if (!out) throw ValidationError("write_cube: cannot open " + path);
  out << g.comment << "\n";
  out << "generated by emkit (Bohr units)\n";
  char buf[256];
  const double inv = 1.0 / kAngstromPerBohr;
  std::snprintf(buf, sizeof buf, "%5d %19.12e %19.12e %19.12e\n",
                int(g.atoms.size()), g.origin[0] * inv, g.origin[1] * inv,
                g.origin[2] * inv);
  out << buf;
  for (int d = 0; d < 3; ++d) {
    std::snprintf(buf, sizeof buf, "%5d %19.12e %19.12e %19.12e\n", g.counts[d],
                  g.axes(d, 0) * inv, g.axes(d, 1) * inv, g.axes(d, 2) * inv);
    out << buf;
  }
  for (const auto& a : g.atoms) {
    std::snprintf(buf, sizeof buf, "%5d %11.6f %19.12e %19.12e %19.12e\n",
                  a.atomic_number, a.charge, a.position[0] * inv,
                  a.position[1] * inv, a.position[2] * inv);
    out << buf;
  }
  size_t col = 0;
  for (size_t i = 0; i < g.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %15.8e", g.values[i]);
    out << buf;
    if (++col == 6 || i + 1 == g.values.size()) {
      out << "\n";
      col = 0;
    }
  }
}

struct GridDipoleOptions {
  std::optional<double> expected_electrons;  // checked to 1e-3 when present
  bool allow_unnormalized = false;
};

// p = -e Int rho(r) (r - reference) dV, midpoint rule.
inline Vec3 grid_dipole(const VolumetricGrid& g, const Vec3& reference,
                        const GridDipoleOptions& opt = {}) {
  if (opt.expected_electrons && !opt.allow_unnormalized) {
    if (std::abs(g.integral() - *opt.expected_electrons) > 1e-3)
      throw NormalizationError(
          "grid_dipole: density integral deviates from declared electron count");
  }
  const double dv = g.voxel_volume();
  Vec3 p = Vec3::Zero();
  for (int i = 0; i < g.counts[0]; ++i)
    for (int j = 0; j < g.counts[1]; ++j)
      for (int k = 0; k < g.counts[2]; ++k)
        p += g.at(i, j, k) * (g.position(i, j, k) - reference);
  return -p * dv;
}

inline VolumetricGrid grid_difference(const VolumetricGrid& a,
                                      const VolumetricGrid& b) {
  if (a.counts != b.counts || (a.origin - b.origin).norm() > 1e-8 ||
      (a.axes - b.axes).norm() > 1e-8)
    throw GeometryMismatchError("grid_difference: grid geometries differ");
  VolumetricGrid d = a;
  d.kind = GridKind::signed_difference;
  for (size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  return d;
}

struct AxialProfile {
  std::vector<double> z;            // Angstrom along the axis
  std::vector<double> contribution; // e Angstrom per slice
  double total() const {
    double s = 0;
    for (double c : contribution) s += c;
    return s;
  }
};

struct GridTransitionDipole {
  TransitionDipole dipole;
  AxialProfile profile;
};

// mu = e Int psi_e(r) r psi_g(r) dV for real wavefunctions, plus a 1D profile
// along the grid axis closest to the declared symmetry axis that resolves the
// sign of the axial contributions.
inline GridTransitionDipole grid_transition_dipole(const VolumetricGrid& psi_g,
                                                   const VolumetricGrid& psi_e,
                                                   const Vec3& axis) {
  if (psi_g.counts != psi_e.counts ||
      (psi_g.origin - psi_e.origin).norm() > 1e-8 ||
      (psi_g.axes - psi_e.axes).norm() > 1e-8)
    throw GeometryMismatchError("grid_transition_dipole: grid geometries differ");
  const double dv = psi_g.voxel_volume();
  for (const auto* g : {&psi_g, &psi_e}) {
    double norm = 0;
    for (double v : g->values) norm += v * v;
    if (std::abs(norm * dv - 1.0) > 1e-3)
      throw NormalizationError("grid_transition_dipole: wavefunction not unit-normalized");
  }
  const Vec3 a = axis.normalized();
  // slice along the grid axis most parallel to the symmetry axis
  int slice_axis = 0;
  double best = -1;
  for (int d = 0; d < 3; ++d) {
    const double c = std::abs(Vec3(psi_g.axes.row(d)).normalized().dot(a));
    if (c > best) {
      best = c;
      slice_axis = d;
    }
  }

  GridTransitionDipole out;
  out.profile.z.assign(psi_g.counts[slice_axis], 0.0);
  out.profile.contribution.assign(psi_g.counts[slice_axis], 0.0);
  Vec3 mu = Vec3::Zero();
  for (int i = 0; i < psi_g.counts[0]; ++i)
    for (int j = 0; j < psi_g.counts[1]; ++j)
      for (int k = 0; k < psi_g.counts[2]; ++k) {
        const double w = psi_g.at(i, j, k) * psi_e.at(i, j, k) * dv;
        const Vec3 r = psi_g.position(i, j, k);
        mu += w * r;
        const int s = slice_axis == 0 ? i : (slice_axis == 1 ? j : k);
        out.profile.contribution[s] += w * r.dot(a);
      }
  for (int s = 0; s < psi_g.counts[slice_axis]; ++s) {
    Vec3 idx = Vec3::Zero();
    idx[slice_axis] = s;
    out.profile.z[s] =
        (psi_g.origin + s * Vec3(psi_g.axes.row(slice_axis))).dot(a);
  }

  TransitionDipole& t = out.dipole;
  t.mu = mu.cast<cplx>();
  t.parallel = mu.dot(a);
  t.perpendicular = std::sqrt(std::max(0.0, mu.squaredNorm() - std::norm(t.parallel)));
  return out;
}

inline void write_axial_profile_csv(const std::string& path,
                                    const AxialProfile& p) {
  std::ofstream out(path);
  if (!out) throw ValidationError("write_axial_profile_csv: cannot open " + path);
  out << "z_angstrom,contribution_eA\n";
  char buf[128];
  for (size_t i = 0; i < p.z.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.z[i], p.contribution[i]);
    out << buf;
  }
}

inline void write_spectrum_csv(const std::string& path,
                               const DielectricSpectrum& sp) {
  std::ofstream out(path);
  if (!out) throw ValidationError("write_spectrum_csv: cannot open " + path);
  out << "energy_eV,im_eps\n";
  char buf[128];
  for (size_t i = 0; i < sp.energies.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", sp.energies[i], sp.im_eps[i]);
    out << buf;
  }
}

}  // namespace emkit
