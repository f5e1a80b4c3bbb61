#pragma once

#include "emkit/model.hpp"

namespace emkit {

// Canonical 1D fixtures. Unused directions are padded with 100 Angstrom
// orthogonal axes.

inline Mat3 chain_lattice(double a) {
  Mat3 m = Mat3::Zero();
  m(0, 0) = a;
  m(1, 1) = 100.0;
  m(2, 2) = 100.0;
  return m;
}

// Rice-Mele chain: onsite +/- delta, alternating hops t1 (intra-cell) and
// t2 (inter-cell). delta = 0 is the SSH chain.
inline TightBindingModel rice_mele_chain(double t1, double t2, double delta,
                                         double a = 1.0, int electron_count = 1,
                                         double z_a = 0.5, double z_b = 0.5) {
  std::vector<BasisSite> sites{{Vec3(0.0, 0.0, 0.0), "A", z_a},
                               {Vec3(0.5, 0.0, 0.0), "B", z_b}};
  LatticeGeometry geom(chain_lattice(a), sites, 1);
  std::vector<Orbital> orbs{{0, "s", delta, Vec3(0.0, 0.0, 0.0)},
                            {1, "s", -delta, Vec3(0.5, 0.0, 0.0)}};
  std::vector<Hopping> hops{
      {0, 1, Vec3i(0, 0, 0), cplx(t1, 0.0)},
      {1, 0, Vec3i(0, 0, 0), cplx(t1, 0.0)},
      {1, 0, Vec3i(1, 0, 0), cplx(t2, 0.0)},
      {0, 1, Vec3i(-1, 0, 0), cplx(t2, 0.0)},
  };
  return TightBindingModel(std::move(geom), std::move(orbs), std::move(hops),
                           electron_count);
}

inline TightBindingModel ssh_chain(double t1, double t2, double a = 1.0,
                                   int electron_count = 1) {
  return rice_mele_chain(t1, t2, 0.0, a, electron_count);
}

// SSH chain with both orbitals on the same site at the origin; inversion
// through the site quantizes the polarization to 0 or a/2 modulo the quantum.
inline TightBindingModel ssh_chain_site_centered(double t1, double t2,
                                                 double a = 1.0,
                                                 int electron_count = 1) {
  std::vector<BasisSite> sites{{Vec3(0.0, 0.0, 0.0), "A", 0.0}};
  LatticeGeometry geom(chain_lattice(a), sites, 1);
  std::vector<Orbital> orbs{{0, "s", 0.0, Vec3(0.0, 0.0, 0.0)},
                            {0, "p", 0.0, Vec3(0.0, 0.0, 0.0)}};
  std::vector<Hopping> hops{
      {0, 1, Vec3i(0, 0, 0), cplx(t1, 0.0)},
      {1, 0, Vec3i(0, 0, 0), cplx(t1, 0.0)},
      {1, 0, Vec3i(1, 0, 0), cplx(t2, 0.0)},
      {0, 1, Vec3i(-1, 0, 0), cplx(t2, 0.0)},
  };
  return TightBindingModel(std::move(geom), std::move(orbs), std::move(hops),
                           electron_count);
}

// One orbital per cell at a given fractional center, no hopping.
inline TightBindingModel flat_band_chain(double center_frac, double onsite_ev = 0.0,
                                         double a = 1.0, int electron_count = 1,
                                         double ionic_charge = 0.0) {
  std::vector<BasisSite> sites{{Vec3(center_frac, 0.0, 0.0), "A", ionic_charge}};
  LatticeGeometry geom(chain_lattice(a), sites, 1);
  std::vector<Orbital> orbs{{0, "s", onsite_ev, Vec3(center_frac, 0.0, 0.0)}};
  return TightBindingModel(std::move(geom), std::move(orbs), {}, electron_count);
}

// Two-site molecule in a large box: sites at +/- d/2 along x, one hop t.
inline TightBindingModel dimer_molecule(double d, double t, double box = 20.0,
                                        int electron_count = 1) {
  const double f = d / (2.0 * box);
  Mat3 m = Mat3::Identity() * box;
  std::vector<BasisSite> sites{{Vec3(wrap_unit(0.5 - f), 0.5, 0.5), "A", 0.0},
                               {Vec3(0.5 + f, 0.5, 0.5), "B", 0.0}};
  LatticeGeometry geom(m, sites, 3);
  std::vector<Orbital> orbs{{0, "s", 0.0, Vec3(wrap_unit(0.5 - f), 0.5, 0.5)},
                            {1, "s", 0.0, Vec3(0.5 + f, 0.5, 0.5)}};
  std::vector<Hopping> hops{{0, 1, Vec3i(0, 0, 0), cplx(t, 0.0)},
                            {1, 0, Vec3i(0, 0, 0), cplx(t, 0.0)}};
  return TightBindingModel(std::move(geom), std::move(orbs), std::move(hops),
                           electron_count);
}

}  // namespace emkit
