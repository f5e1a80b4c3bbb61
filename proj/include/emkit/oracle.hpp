#pragma once

#include <Eigen/Eigenvalues>
#include <array>
#include <functional>
#include <vector>

#include "emkit/berry.hpp"
#include "emkit/model.hpp"

namespace emkit {

// Deliberately simple and slow brute-force references. Nothing here shares a
// code path with the Berry-phase or Sternheimer implementations.

struct ClusterModel {
  std::vector<Vec3> positions;       // orbital positions, Angstrom, absolute
  std::vector<Vec3> frac_positions;  // in cell units along each lattice axis
  MatC hamiltonian;                  // eV, dense, Hermitian
  int electron_count = 0;
  std::array<int, 3> repeats{1, 1, 1};
  Mat3 lattice = Mat3::Identity();
  Vec3 ion_dipole_per_cell = Vec3::Zero();  // e Angstrom
};

inline ClusterModel cluster_from_model(const TightBindingModel& model,
                                       const std::array<int, 3>& repeats,
                                       int orbital_cap = 10000) {
  for (int d = 0; d < 3; ++d)
    if (repeats[d] < 1) throw ValidationError("cluster_from_model: repeats must be >= 1");
  const int n_orb = model.n_orbitals();
  const long n_cells = long(repeats[0]) * repeats[1] * repeats[2];
  const long dim = n_cells * n_orb;
  if (dim > orbital_cap)
    throw SizeError("cluster_from_model: " + std::to_string(dim) +
                    " orbitals exceeds cap of " + std::to_string(orbital_cap));

  ClusterModel cl;
  cl.repeats = repeats;
  cl.lattice = model.geometry().lattice();
  cl.electron_count = model.electron_count() * static_cast<int>(n_cells);
  cl.hamiltonian = MatC::Zero(dim, dim);
  cl.positions.resize(dim);
  cl.frac_positions.resize(dim);

  auto cell_index = [&](int c1, int c2, int c3) {
    return (long(c1) * repeats[1] + c2) * repeats[2] + c3;
  };
  for (int c1 = 0; c1 < repeats[0]; ++c1)
    for (int c2 = 0; c2 < repeats[1]; ++c2)
      for (int c3 = 0; c3 < repeats[2]; ++c3) {
        const long base = cell_index(c1, c2, c3) * n_orb;
        for (int o = 0; o < n_orb; ++o) {
          const Vec3 f = Vec3(c1, c2, c3) + model.orbitals()[o].center_frac;
          cl.frac_positions[base + o] = f;
          cl.positions[base + o] = cl.lattice.transpose() * f;
          cl.hamiltonian(base + o, base + o) = model.orbitals()[o].onsite_ev;
        }
      }
  for (const auto& hop : model.hoppings())
    for (int c1 = 0; c1 < repeats[0]; ++c1)
      for (int c2 = 0; c2 < repeats[1]; ++c2)
        for (int c3 = 0; c3 < repeats[2]; ++c3) {
          const int d1 = c1 + hop.cell[0], d2 = c2 + hop.cell[1],
                    d3 = c3 + hop.cell[2];
          if (d1 < 0 || d1 >= repeats[0] || d2 < 0 || d2 >= repeats[1] ||
              d3 < 0 || d3 >= repeats[2])
            continue;  // open boundary: crossing hops dropped
          cl.hamiltonian(cell_index(c1, c2, c3) * n_orb + hop.from,
                         cell_index(d1, d2, d3) * n_orb + hop.to) +=
              hop.amplitude_ev;
        }
  cl.ion_dipole_per_cell = ionic_dipole(model);
  return cl;
}

struct ClusterSpectrum {
  Eigen::VectorXd eigenvalues;
  MatC eigenvectors;
};

inline ClusterSpectrum cluster_diagonalize(const ClusterModel& cl) {
  Eigen::SelfAdjointEigenSolver<MatC> solver(cl.hamiltonian);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace detail {

inline int occupied_levels(const ClusterModel& cl, double f) {
  if (f != 1.0 && f != 2.0)
    throw ValidationError("cluster occupation f must be 1 or 2");
  const double levels = cl.electron_count / f;
  if (std::abs(levels - std::round(levels)) > 1e-9)
    throw ValidationError("cluster electron count not divisible by occupation f");
  return static_cast<int>(std::round(levels));
}

}  // namespace detail

// Bulk electronic dipole per cell: eigenvalues of the occupied-subspace
// position operator are the cluster Wannier centers; interior centers (edge
// fraction excluded) are averaged on the circle, direction by direction.
// Result is wrapped to the fundamental branch. Finite clusters with all
// repeats = 1 (molecules) return the plain position expectation instead.
inline Vec3 cluster_dipole(const ClusterModel& cl, double f = 1.0,
                           double edge_exclusion = 0.25,
                           int level_offset = 0) {
  const int n_occ = detail::occupied_levels(cl, f);
  const ClusterSpectrum sp = cluster_diagonalize(cl);
  const long dim = cl.hamiltonian.rows();
  if (level_offset < 0 || level_offset + n_occ > dim)
    throw ValidationError("cluster_dipole: occupied level window out of range");
  if (level_offset + n_occ < dim) {
    const double gap =
        sp.eigenvalues[level_offset + n_occ] - sp.eigenvalues[level_offset + n_occ - 1];
    if (gap < 1e-6)
      throw GaplessClusterError("cluster_dipole: gap above occupied window " +
                                std::to_string(gap) + " eV");
  }
  if (level_offset > 0) {
    const double gap =
        sp.eigenvalues[level_offset] - sp.eigenvalues[level_offset - 1];
    if (gap < 1e-6)
      throw GaplessClusterError("cluster_dipole: gap below occupied window " +
                                std::to_string(gap) + " eV");
  }
  const MatC occ = sp.eigenvectors.middleCols(level_offset, n_occ);

  if (cl.repeats == std::array<int, 3>{1, 1, 1}) {
    Vec3 p = cl.ion_dipole_per_cell;
    for (int s = 0; s < n_occ; ++s)
      for (long v = 0; v < dim; ++v)
        p -= f * std::norm(occ(v, s)) * cl.positions[v];
    return p;
  }

  Vec3 p_frac = Vec3::Zero();
  for (int d = 0; d < 3; ++d) {
    if (cl.repeats[d] == 1) continue;
    Eigen::VectorXd xi(dim);
    for (long v = 0; v < dim; ++v) xi[v] = cl.frac_positions[v][d];
    const MatC pxp = occ.adjoint() * xi.asDiagonal() * occ;
    Eigen::SelfAdjointEigenSolver<MatC> centers(pxp);
    const double lo = edge_exclusion * cl.repeats[d];
    const double hi = (1.0 - edge_exclusion) * cl.repeats[d];
    cplx ring(0.0, 0.0);
    int used = 0;
    for (int s = 0; s < n_occ; ++s) {
      const double c = centers.eigenvalues()[s];
      if (c < lo || c > hi) continue;
      ring += std::exp(cplx(0.0, 2.0 * M_PI * c));
      ++used;
    }
    if (used == 0)
      throw SizeError("cluster_dipole: no Wannier centers left after edge exclusion");
    const double xbar = std::arg(ring) / (2.0 * M_PI);  // in (-1/2, 1/2]
    p_frac[d] = -f * xbar;
  }
  Vec3 p = cl.lattice.transpose() * p_frac + cl.ion_dipole_per_cell;
  return p;
}

// <i| e r |j> between cluster eigenstates, e Angstrom.
inline Vec3c cluster_transition_dipole(const ClusterModel& cl, int i, int j) {
  const ClusterSpectrum sp = cluster_diagonalize(cl);
  const long dim = cl.hamiltonian.rows();
  Vec3c mu = Vec3c::Zero();
  for (long v = 0; v < dim; ++v) {
    const cplx w = std::conj(sp.eigenvectors(v, i)) * sp.eigenvectors(v, j);
    for (int al = 0; al < 3; ++al) mu[al] += w * cl.positions[v][al];
  }
  return mu;
}

struct FiniteDifferenceResult {
  Vec3 value = Vec3::Zero();
  double error_estimate = 0.0;
};

// Central finite differences of a vector-valued function with a Richardson
// error estimate from halving the step.
inline FiniteDifferenceResult finite_difference(
    const std::function<Vec3(double)>& fn, double x, double delta,
    int order = 2) {
  auto stencil = [&](double h) -> Vec3 {
    if (order == 2) return (fn(x + h) - fn(x - h)) / (2.0 * h);
    if (order == 4)
      return (-fn(x + 2 * h) + 8.0 * fn(x + h) - 8.0 * fn(x - h) +
              fn(x - 2 * h)) /
             (12.0 * h);
    throw ValidationError("finite_difference: order must be 2 or 4");
  };
  const Vec3 coarse = stencil(delta);
  const Vec3 fine = stencil(delta / 2.0);
  FiniteDifferenceResult out;
  out.value = fine;
  out.error_estimate =
      (fine - coarse).norm() / (order == 2 ? 3.0 : 15.0);
  return out;
}

inline double finite_difference_scalar(const std::function<double(double)>& fn,
                                       double x, double delta, int order = 2,
                                       double* error = nullptr) {
  auto wrapped = [&](double t) { return Vec3(fn(t), 0.0, 0.0); };
  const auto r = finite_difference(wrapped, x, delta, order);
  if (error) *error = r.error_estimate;
  return r.value[0];
}

}  // namespace emkit
