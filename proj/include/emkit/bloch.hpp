#pragma once

#include <Eigen/Eigenvalues>
#include <array>
#include <vector>

#include "emkit/kgrid.hpp"
#include "emkit/model.hpp"
#include "emkit/occupation.hpp"

namespace emkit {

// Bloch Hamiltonian in the orbital-center phase convention,
//   H(k)_ij = onsite_i delta_ij + sum_R t_ij(R) exp(i k.(R + tau_j - tau_i)),
// so eigenvectors are cell-periodic up to the diagonal phase exp(-i b.tau).
inline MatC build_bloch_hamiltonian(const TightBindingModel& model,
                                    const Vec3& k_cart) {
  const int n = model.n_orbitals();
  MatC h = MatC::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = model.orbitals()[i].onsite_ev;
  const Mat3& a = model.geometry().lattice();
  for (const auto& hop : model.hoppings()) {
    const Vec3 r_cell = a.transpose() * hop.cell.cast<double>();
    const Vec3 d = r_cell + model.orbital_center_cart(hop.to) -
                   model.orbital_center_cart(hop.from);
    h(hop.from, hop.to) += hop.amplitude_ev * std::exp(cplx(0.0, k_cart.dot(d)));
  }
  return h;
}

// Analytic dH/dk_alpha of the Bloch sum, eV * Angstrom. Hermitian since the
// hopping list is closed under conjugation.
inline std::array<MatC, 3> velocity_matrices(const TightBindingModel& model,
                                             const Vec3& k_cart) {
  const int n = model.n_orbitals();
  std::array<MatC, 3> v{MatC::Zero(n, n), MatC::Zero(n, n), MatC::Zero(n, n)};
  const Mat3& a = model.geometry().lattice();
  for (const auto& hop : model.hoppings()) {
    const Vec3 r_cell = a.transpose() * hop.cell.cast<double>();
    const Vec3 d = r_cell + model.orbital_center_cart(hop.to) -
                   model.orbital_center_cart(hop.from);
    const cplx term =
        hop.amplitude_ev * std::exp(cplx(0.0, k_cart.dot(d))) * cplx(0.0, 1.0);
    for (int al = 0; al < 3; ++al) v[al](hop.from, hop.to) += term * d[al];
  }
  return v;
}

// Largest-magnitude coefficient made real positive; among equal magnitudes
// the lowest orbital index wins. Keeps golden files reproducible.
inline void fix_gauge(VecC& u) {
  int imax = 0;
  double best = std::abs(u[0]);
  for (int i = 1; i < u.size(); ++i) {
    const double m = std::abs(u[i]);
    if (m > best + 1e-14) {
      best = m;
      imax = i;
    }
  }
  if (best > 0) u *= std::conj(u[imax]) / std::abs(u[imax]);
}

struct BlochEigensystem {
  const TightBindingModel* model = nullptr;
  KPointGrid grid;
  OccupationConfig occ;
  // per flat k index
  std::vector<Eigen::VectorXd> eigenvalues;  // eV, ascending
  std::vector<MatC> eigenvectors;            // columns are u_kn
  bool degenerate_gauge_warning = false;

  int n_bands() const { return eigenvectors.empty() ? 0 : int(eigenvectors[0].rows()); }
};

inline BlochEigensystem diagonalize(const TightBindingModel& model,
                                    const KPointGrid& grid,
                                    const OccupationConfig& occ) {
  occ.check_electron_count(model.electron_count(), grid.size());
  BlochEigensystem es{&model, grid, occ, {}, {}, false};
  es.eigenvalues.reserve(grid.size());
  es.eigenvectors.reserve(grid.size());
  for (int ik = 0; ik < grid.size(); ++ik) {
    const Vec3 k = grid.cartesian(model.geometry(), ik);
    MatC h = build_bloch_hamiltonian(model, k);
    Eigen::SelfAdjointEigenSolver<MatC> solver(h);
    Eigen::VectorXd ev = solver.eigenvalues();
    MatC vecs = solver.eigenvectors();
    for (int n = 0; n < vecs.cols(); ++n) {
      VecC col = vecs.col(n);
      fix_gauge(col);
      vecs.col(n) = col;
    }
    for (int n = 0; n + 1 < ev.size(); ++n)
      if (std::abs(ev[n] - ev[n + 1]) < 1e-8) es.degenerate_gauge_warning = true;
    es.eigenvalues.push_back(std::move(ev));
    es.eigenvectors.push_back(std::move(vecs));
  }
  return es;
}

}  // namespace emkit
