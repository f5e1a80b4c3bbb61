#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emkit/bloch.hpp"
#include "emkit/constants.hpp"

namespace emkit {

struct PolarizationResult {
  Vec3 p_el = Vec3::Zero();   // e Angstrom per cell, fundamental branch
  Vec3 p_ion = Vec3::Zero();  // e Angstrom per cell
  Vec3 p_tot = Vec3::Zero();
  Mat3 quanta = Mat3::Zero();  // row i = dipole quantum e a_i
  Vec3i branch = Vec3i::Zero();
  std::array<int, 3> grid_used{0, 0, 0};
  std::string label;
};

struct DipoleDifference {
  Vec3 dp_ion = Vec3::Zero();
  Vec3 dp_el = Vec3::Zero();
  Vec3 dp_tot = Vec3::Zero();
  double magnitude_eA = 0.0;
  double magnitude_debye = 0.0;
  std::string from_label, to_label;
};

namespace detail {

// Occupied bands grouped by occupation value; the string determinant runs
// over each group so degeneracies inside a group are harmless.
inline std::map<double, std::vector<int>> occupation_groups(
    const OccupationConfig& occ, int n_bands) {
  if (!occ.is_uniform())
    throw MetallicOccupationError(
        "Berry-phase polarization needs per-band uniform occupations");
  std::map<double, std::vector<int>> groups;
  for (int n = 0; n < n_bands; ++n)
    if (occ.f(0, n) > 0) groups[occ.f(0, n)].push_back(n);
  return groups;
}

inline void check_gap(const BlochEigensystem& es, double threshold) {
  const int nb = es.n_bands();
  for (int ik = 0; ik < es.grid.size(); ++ik) {
    for (int n = 0; n < nb; ++n) {
      if (es.occ.f(ik, n) <= 0) continue;
      for (int m = 0; m < nb; ++m) {
        if (es.occ.f(ik, m) > 0) continue;
        if (std::abs(es.eigenvalues[ik][n] - es.eigenvalues[ik][m]) < threshold)
          throw GapClosureError(
              "occupied/unoccupied gap below threshold at k index " +
              std::to_string(ik));
      }
    }
  }
}

// -Im ln det of the product of link overlaps along one closed k-string; the
// closing link carries the cell-periodicity phase exp(-i b.tau).
inline double string_phase(const BlochEigensystem& es,
                           const std::vector<int>& string,
                           const std::vector<int>& bands, const Vec3& b_cart,
                           const std::vector<Vec3>& centers_cart) {
  const int nb = static_cast<int>(bands.size());
  const int ns = static_cast<int>(string.size());
  cplx det_prod(1.0, 0.0);
  for (int s = 0; s < ns; ++s) {
    const int k0 = string[s];
    const int k1 = string[(s + 1) % ns];
    const MatC& u0 = es.eigenvectors[k0];
    const MatC& u1 = es.eigenvectors[k1];
    MatC overlap(nb, nb);
    if (s + 1 < ns) {
      for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b)
          overlap(a, b) = u0.col(bands[a]).dot(u1.col(bands[b]));
    } else {
      VecC phase(u0.rows());
      for (int i = 0; i < u0.rows(); ++i)
        phase[i] = std::exp(cplx(0.0, -b_cart.dot(centers_cart[i])));
      for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b)
          overlap(a, b) =
              u0.col(bands[a]).dot(phase.asDiagonal() * u1.col(bands[b]));
    }
    const cplx det = overlap.determinant();
    if (std::abs(det) < 1e-300)
      throw GapClosureError("vanishing string overlap determinant");
    det_prod *= det;
  }
  return -std::arg(det_prod);
}

inline double wrap_to_half(double x, int* shifts = nullptr) {
  int n = 0;
  while (x > 0.5 + 1e-15) {
    x -= 1.0;
    ++n;
  }
  while (x <= -0.5 + 1e-15) {
    x += 1.0;
    --n;
  }
  if (shifts) *shifts = n;
  return x;
}

}  // namespace detail

inline Vec3 ionic_dipole(const TightBindingModel& model) {
  Vec3 p = Vec3::Zero();
  for (const auto& s : model.geometry().sites())
    p += s.ionic_charge * model.geometry().cartesian(s.frac_pos);
  return p;
}

// Discrete Berry-phase electronic polarization per k-string, King-Smith /
// Vanderbilt style, plus the ionic point-charge dipole. Reported p_el sits in
// the fundamental branch (-e a_i/2, +e a_i/2] per lattice direction.
inline PolarizationResult berry_phase_from_eigensystem(
    const TightBindingModel& model, const BlochEigensystem& es) {
  const KPointGrid& grid = es.grid;
  const OccupationConfig& occ = es.occ;
  detail::check_gap(es, 1e-6);
  const auto groups = detail::occupation_groups(occ, es.n_bands());

  std::vector<Vec3> centers(model.n_orbitals());
  for (int i = 0; i < model.n_orbitals(); ++i)
    centers[i] = model.orbital_center_cart(i);

  PolarizationResult out;
  out.grid_used = grid.divisions();
  out.label = occ.label();
  const auto& geom = model.geometry();
  for (int i = 0; i < 3; ++i) out.quanta.row(i) = geom.lattice_vector(i);

  Vec3 p_frac = Vec3::Zero();  // electronic dipole in lattice-fraction units
  for (int d = 0; d < 3; ++d) {
    const Vec3 b = geom.reciprocal_vector(d);
    const auto strings = grid.strings(d);
    double sum = 0.0;
    for (const auto& [f, bands] : groups) {
      double prev = 0.0;
      bool have_prev = false;
      double group_sum = 0.0;
      for (const auto& s : strings) {
        double phi = detail::string_phase(es, s, bands, b, centers);
        if (have_prev) {
          // keep neighbouring strings on the same branch
          while (phi - prev > M_PI) phi -= 2.0 * M_PI;
          while (phi - prev < -M_PI) phi += 2.0 * M_PI;
        }
        prev = phi;
        have_prev = true;
        group_sum += phi;
      }
      sum += f * group_sum / static_cast<double>(strings.size());
    }
    p_frac[d] = -sum / (2.0 * M_PI);
  }
  // Integer parts of the orbital-center fractions are pure bookkeeping: the
  // Berry phase only sees them modulo a reciprocal-lattice wrap, so fold them
  // into the branch integer. Shifting one center by a full lattice vector
  // then increments the branch by exactly one while the fundamental-branch
  // value is untouched.
  Vec3i winding = Vec3i::Zero();
  for (const auto& orb : model.orbitals())
    for (int d = 0; d < 3; ++d)
      winding[d] += static_cast<int>(std::floor(orb.center_frac[d] + 1e-12));
  for (int d = 0; d < 3; ++d) {
    int shift = 0;
    p_frac[d] = detail::wrap_to_half(p_frac[d], &shift);
    out.branch[d] = shift + winding[d];
  }
  out.p_el = geom.lattice().transpose() * p_frac;
  out.p_ion = ionic_dipole(model);
  out.p_tot = out.p_el + out.p_ion;
  return out;
}

inline PolarizationResult berry_phase_polarization(const TightBindingModel& model,
                                                   const KPointGrid& grid,
                                                   const OccupationConfig& occ) {
  return berry_phase_from_eigensystem(model, diagonalize(model, grid, occ));
}

// Minimal-norm representative of v modulo the dipole quanta (rows of quanta).
// On request reports the integer shift applied.
inline Vec3 branch_match(const Vec3& v, const Mat3& quanta,
                         Vec3i* shift_out = nullptr, int search = 2) {
  Vec3 best = v;
  double best_norm = v.norm();
  Vec3i best_shift = Vec3i::Zero();
  for (int i = -search; i <= search; ++i)
    for (int j = -search; j <= search; ++j)
      for (int k = -search; k <= search; ++k) {
        const Vec3 cand = v + i * Vec3(quanta.row(0)) + j * Vec3(quanta.row(1)) +
                          k * Vec3(quanta.row(2));
        if (cand.norm() < best_norm - 1e-14) {
          best_norm = cand.norm();
          best = cand;
          best_shift = Vec3i(i, j, k);
        }
      }
  if (shift_out) *shift_out = best_shift;
  return best;
}

inline DipoleDifference dipole_difference(const PolarizationResult& a,
                                          const PolarizationResult& b) {
  if (a.grid_used != b.grid_used)
    throw GridMismatchError("dipole_difference: k-grids differ");
  DipoleDifference d;
  d.from_label = a.label;
  d.to_label = b.label;
  d.dp_ion = b.p_ion - a.p_ion;
  d.dp_el = branch_match(b.p_el - a.p_el, a.quanta);
  d.dp_tot = d.dp_ion + d.dp_el;
  d.magnitude_eA = d.dp_tot.norm();
  d.magnitude_debye =
      d.magnitude_eA / PhysicalConstants::codata2018().debye_in_eA;
  return d;
}

// Z*_ab = (1/e) d p_a / d u_b by centered finite differences of the total
// dipole under a single-site displacement. Hoppings stay fixed; only the
// orbital-center phases and the ionic dipole move (documented limitation).
inline Mat3 born_effective_charge(const TightBindingModel& model, int site,
                                  const KPointGrid& grid,
                                  const OccupationConfig& occ,
                                  double delta = 1e-3) {
  const PolarizationResult ref = berry_phase_polarization(model, grid, occ);
  Mat3 z = Mat3::Zero();
  for (int beta = 0; beta < 3; ++beta) {
    Vec3 du = Vec3::Zero();
    du[beta] = delta;
    const PolarizationResult plus =
        berry_phase_polarization(model.displaced_site(site, du), grid, occ);
    const PolarizationResult minus =
        berry_phase_polarization(model.displaced_site(site, -du), grid, occ);
    Vec3i shift_p, shift_m;
    const Vec3 dp_p = branch_match(plus.p_el - ref.p_el, ref.quanta, &shift_p);
    const Vec3 dp_m = branch_match(minus.p_el - ref.p_el, ref.quanta, &shift_m);
    if (shift_p != shift_m)
      throw BranchJumpError(
          "born_effective_charge: branch differs between +delta and -delta");
    // A site displaced across the cell boundary wraps back into [0,1), which
    // offsets p_ion by a full quantum times the site charge; undo it by
    // minimal-norm matching against the charge-scaled quanta.
    Vec3 dp_ion = plus.p_ion - minus.p_ion;
    const double zq = model.geometry().sites()[site].ionic_charge;
    if (std::abs(zq) > 0.0)
      dp_ion = branch_match(dp_ion, Mat3(zq * ref.quanta));
    const Vec3 dp = (dp_p - dp_m) + dp_ion;
    z.col(beta) = dp / (2.0 * delta);
  }
  return z;
}

using ModelPath = std::function<TightBindingModel(double)>;

// Adiabatic polarization response dP/dlambda as a sum over occupied ->
// unoccupied pairs; dH/dlambda is finite-differenced along the model path.
inline Vec3 polarization_response(const ModelPath& path, double lambda,
                                  const KPointGrid& grid,
                                  const OccupationConfig& occ,
                                  double dlambda = 1e-6) {
  const TightBindingModel model = path(lambda);
  const TightBindingModel mp = path(lambda + dlambda);
  const TightBindingModel mm = path(lambda - dlambda);
  BlochEigensystem es = diagonalize(model, grid, occ);
  detail::check_gap(es, 1e-6);
  const int nb = es.n_bands();
  Vec3 dp = Vec3::Zero();
  for (int ik = 0; ik < grid.size(); ++ik) {
    const Vec3 k = grid.cartesian(model.geometry(), ik);
    const auto v = velocity_matrices(model, k);
    const MatC dh = (build_bloch_hamiltonian(mp, k) - build_bloch_hamiltonian(mm, k)) /
                    (2.0 * dlambda);
    const MatC& u = es.eigenvectors[ik];
    for (int n = 0; n < nb; ++n) {
      const double f = es.occ.f(ik, n);
      if (f <= 0) continue;
      for (int m = 0; m < nb; ++m) {
        if (es.occ.f(ik, m) > 0) continue;
        const double de = es.eigenvalues[ik][n] - es.eigenvalues[ik][m];
        if (std::abs(de) < 1e-8)
          throw DegeneracyError("polarization_response: degenerate occupied/unoccupied pair");
        const cplx dh_mn = u.col(m).dot(dh * u.col(n));
        for (int al = 0; al < 3; ++al) {
          const cplx v_nm = u.col(n).dot(v[al] * u.col(m));
          dp[al] -= 2.0 * f * std::imag(v_nm * dh_mn) / (de * de);
        }
      }
    }
  }
  return dp / static_cast<double>(grid.size());
}

}  // namespace emkit
