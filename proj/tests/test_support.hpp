#pragma once

#include <random>

#include "emkit/chains.hpp"
#include "emkit/model.hpp"

namespace emkit::testing {

// Random gapped n-orbital 1D model: random Hermitian onsite/hopping blocks
// plus a large diagonal spread to keep the spectrum gapped.
inline TightBindingModel random_gapped_chain(int n_orbitals, unsigned seed,
                                             int electron_count = 1) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<BasisSite> sites{{Vec3(0.0, 0.0, 0.0), "A", 0.0}};
  LatticeGeometry geom(chain_lattice(1.0), sites, 1);
  std::vector<Orbital> orbs;
  for (int i = 0; i < n_orbitals; ++i)
    orbs.push_back({0, "o" + std::to_string(i), 3.0 * i + u(rng),
                    Vec3(wrap_unit(0.1 * i), 0.0, 0.0)});
  std::vector<Hopping> hops;
  auto add_pair = [&](int i, int j, const Vec3i& r, cplx t) {
    hops.push_back({i, j, r, t});
    hops.push_back({j, i, -r, std::conj(t)});
  };
  for (int i = 0; i < n_orbitals; ++i)
    for (int j = 0; j < n_orbitals; ++j) {
      if (j > i) add_pair(i, j, Vec3i(0, 0, 0), cplx(u(rng), u(rng)));
      add_pair(i, j, Vec3i(1, 0, 0), cplx(u(rng), u(rng)));
    }
  return TightBindingModel(std::move(geom), std::move(orbs), std::move(hops),
                           electron_count);
}

inline std::complex<double> random_unit_phase(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  const double t = u(rng);
  return {std::cos(t), std::sin(t)};
}

}  // namespace emkit::testing
