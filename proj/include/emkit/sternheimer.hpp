#pragma once

#include <array>
#include <vector>

#include "emkit/berry.hpp"
#include "emkit/bloch.hpp"

namespace emkit {

struct SternheimerSolution {
  int band = -1;
  int k_index = -1;
  std::array<VecC, 3> du_dk;  // parallel-transport gauge, Angstrom
  double residual_norm = 0.0;
  int iterations = 0;
};

namespace detail {

// Q projects onto the orthogonal complement of the occupied manifold.
struct OccupiedProjector {
  MatC u_occ;  // columns are occupied eigenvectors at this k

  VecC apply(const VecC& v) const {
    if (u_occ.cols() == 0) return v;
    return v - u_occ * (u_occ.adjoint() * v);
  }
};

// Solves Q (H - eps) Q x = Q rhs for x in Q-space with conjugate gradients on
// the normal equations (the projected operator is Hermitian but indefinite in
// general). Never touches unoccupied eigenvectors.
inline VecC solve_projected(const MatC& h, double eps,
                            const OccupiedProjector& q, const VecC& rhs,
                            double ref_norm, double tol, int max_iter,
                            double* residual_out, int* iters_out) {
  const VecC b = q.apply(rhs);
  auto apply_a = [&](const VecC& v) -> VecC {
    const VecC qv = q.apply(v);
    return q.apply(h * qv - eps * qv);
  };
  VecC x = VecC::Zero(b.size());
  if (ref_norm < 1e-300) {
    if (residual_out) *residual_out = 0.0;
    if (iters_out) *iters_out = 0;
    return x;
  }
  VecC r = b;                 // b - A x
  VecC z = apply_a(r);        // A^H r = A r
  VecC p = z;
  double zz = z.squaredNorm();
  double best_res = r.norm() / ref_norm;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (r.norm() / ref_norm < tol) break;
    const VecC ap = apply_a(p);
    const double denom = ap.squaredNorm();
    if (denom < 1e-300) break;
    const double alpha = zz / denom;
    x += alpha * p;
    r -= alpha * ap;
    best_res = std::min(best_res, r.norm() / ref_norm);
    const VecC z_new = apply_a(r);
    const double zz_new = z_new.squaredNorm();
    p = z_new + (zz_new / zz) * p;
    z = z_new;
    zz = zz_new;
  }
  const double res = r.norm() / ref_norm;
  if (res >= tol)
    throw NonConvergenceError("sternheimer: no convergence after " +
                              std::to_string(max_iter) +
                              " iterations, best residual " +
                              std::to_string(best_res));
  if (residual_out) *residual_out = res;
  if (iters_out) *iters_out = it;
  return q.apply(x);
}

inline OccupiedProjector make_projector(const BlochEigensystem& es, int ik) {
  const int nb = es.n_bands();
  std::vector<int> occ_bands;
  for (int n = 0; n < nb; ++n)
    if (es.occ.f(ik, n) > 0) occ_bands.push_back(n);
  MatC u(nb, static_cast<int>(occ_bands.size()));
  for (int c = 0; c < u.cols(); ++c) u.col(c) = es.eigenvectors[ik].col(occ_bands[c]);
  return OccupiedProjector{std::move(u)};
}

inline void check_separation(const BlochEigensystem& es, int ik, int n) {
  for (int m = 0; m < es.n_bands(); ++m) {
    if (es.occ.f(ik, m) > 0) continue;
    if (std::abs(es.eigenvalues[ik][n] - es.eigenvalues[ik][m]) < 1e-8)
      throw SingularSystemError(
          "sternheimer: occupied band degenerate with unoccupied band");
  }
}

}  // namespace detail

// d u_kn / d k_alpha from the projected Sternheimer system
//   Q (H(k) - eps_kn) Q x_alpha = -Q (dH/dk_alpha) u_kn.
inline SternheimerSolution solve_sternheimer(const BlochEigensystem& es,
                                             const TightBindingModel& model,
                                             int ik, int band,
                                             double tol = 1e-10,
                                             int max_iter = 500) {
  detail::check_separation(es, ik, band);
  const Vec3 k = es.grid.cartesian(model.geometry(), ik);
  const MatC h = build_bloch_hamiltonian(model, k);
  const auto v = velocity_matrices(model, k);
  const auto q = detail::make_projector(es, ik);
  const VecC u = es.eigenvectors[ik].col(band);
  const double eps = es.eigenvalues[ik][band];

  SternheimerSolution sol;
  sol.band = band;
  sol.k_index = ik;
  for (int al = 0; al < 3; ++al) {
    const VecC rhs = -(v[al] * u);
    double res = 0.0;
    int iters = 0;
    sol.du_dk[al] = detail::solve_projected(h, eps, q, rhs, rhs.norm(), tol,
                                            max_iter, &res, &iters);
    sol.residual_norm = std::max(sol.residual_norm, res);
    sol.iterations = std::max(sol.iterations, iters);
  }
  return sol;
}

// Per-k contribution to dP/dlambda assembled from Sternheimer solutions.
// The diagonal <u|Q du> vanishes by construction, so the inter-band response
// is reconstructed by pairing each du/dk with a lambda-perturbation solve.
inline Vec3 berry_integrand_from_sternheimer(
    const BlochEigensystem& es, const TightBindingModel& model, int ik,
    const std::vector<SternheimerSolution>& solutions, const MatC& dh_dlambda,
    double tol = 1e-10, int max_iter = 500) {
  const Vec3 k = es.grid.cartesian(model.geometry(), ik);
  const MatC h = build_bloch_hamiltonian(model, k);
  const auto q = detail::make_projector(es, ik);
  Vec3 contrib = Vec3::Zero();
  for (int n = 0; n < es.n_bands(); ++n) {
    const double f = es.occ.f(ik, n);
    if (f <= 0) continue;
    const SternheimerSolution* sol = nullptr;
    for (const auto& s : solutions)
      if (s.band == n && s.k_index == ik) sol = &s;
    if (!sol)
      throw MissingBandError("berry_integrand_from_sternheimer: no solution for band " +
                             std::to_string(n));
    const VecC u = es.eigenvectors[ik].col(n);
    const VecC rhs = -(dh_dlambda * u);
    const VecC y = detail::solve_projected(h, es.eigenvalues[ik][n], q, rhs,
                                           rhs.norm(), tol, max_iter, nullptr,
                                           nullptr);
    for (int al = 0; al < 3; ++al)
      contrib[al] -= 2.0 * f * std::imag(sol->du_dk[al].dot(y));
  }
  return contrib;
}

// dP/dlambda along a model path via Sternheimer solves at every k; the
// iterative counterpart of polarization_response.
inline Vec3 sternheimer_response(const ModelPath& path, double lambda,
                                 const KPointGrid& grid,
                                 const OccupationConfig& occ,
                                 double dlambda = 1e-6, double tol = 1e-10,
                                 int max_iter = 500) {
  const TightBindingModel model = path(lambda);
  const TightBindingModel mp = path(lambda + dlambda);
  const TightBindingModel mm = path(lambda - dlambda);
  BlochEigensystem es = diagonalize(model, grid, occ);
  detail::check_gap(es, 1e-6);
  Vec3 dp = Vec3::Zero();
  for (int ik = 0; ik < grid.size(); ++ik) {
    const Vec3 k = grid.cartesian(model.geometry(), ik);
    const MatC dh = (build_bloch_hamiltonian(mp, k) -
                     build_bloch_hamiltonian(mm, k)) /
                    (2.0 * dlambda);
    std::vector<SternheimerSolution> sols;
    for (int n = 0; n < es.n_bands(); ++n)
      if (es.occ.f(ik, n) > 0)
        sols.push_back(solve_sternheimer(es, model, ik, n, tol, max_iter));
    dp += berry_integrand_from_sternheimer(es, model, ik, sols, dh, tol, max_iter);
  }
  return dp / static_cast<double>(grid.size());
}

}  // namespace emkit
