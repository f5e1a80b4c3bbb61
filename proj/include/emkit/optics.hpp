#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "emkit/berry.hpp"
#include "emkit/bloch.hpp"
#include "emkit/constants.hpp"

namespace emkit {

using Vec3c = Eigen::Vector3cd;

struct TransitionDipole {
  Vec3c mu = Vec3c::Zero();  // e Angstrom
  cplx parallel{0.0, 0.0};   // component along the declared axis
  double perpendicular = 0.0;
  int band_g = -1, band_e = -1, k_index = -1;
  double energy_ev = 0.0;

  double mu_norm_eA() const { return mu.norm(); }
  double mu_sq_eA2() const { return mu.squaredNorm(); }
  double mu_sq_debye2() const {
    const double d = PhysicalConstants::codata2018().debye_in_eA;
    return mu.squaredNorm() / (d * d);
  }
};

struct DielectricSpectrum {
  std::vector<double> energies;  // eV, ascending, step <= gamma/5
  std::vector<double> im_eps;    // dimensionless, >= 0
  double gamma_ev = 0.02;        // Lorentzian HWHM
  double volume_nm3 = 0.0;
  double refractive_index = 1.0;

  // trapezoid integral of Im eps over the grid, eV
  double integrate() const {
    double s = 0.0;
    for (size_t i = 0; i + 1 < energies.size(); ++i)
      s += 0.5 * (im_eps[i] + im_eps[i + 1]) * (energies[i + 1] - energies[i]);
    return s;
  }
};

struct LorentzianFit {
  double center_ev = 0.0;
  double intensity_ev = 0.0;  // integrated area I
  double hwhm_ev = 0.0;
  double fit_residual = 0.0;  // relative RMS over the fit window
  bool poor_fit_warning = false;
};

struct RadiativeLifetime {
  double tau_ns = 0.0;
  double einstein_a_per_s = 0.0;
  double mu_sq_debye2 = 0.0;
};

struct CriteriaThresholds {
  double stability_eA = 0.1;       // max |dp_tot| for a stable ZPL
  double brightness_debye2 = 10.0; // min |mu|^2 for a bright transition
};

struct EmitterCriteriaReport {
  double dp_tot_eA = 0.0;
  double dp_tot_debye = 0.0;
  bool stability_pass = false;
  double mu_sq_debye2 = 0.0;
  bool brightness_pass = false;
  double polarization_axis_fraction = 0.0;
  double tau_ns = 0.0;
  std::string verdict;
};

// mu = e <u_e| dH/dk |u_g> / (eps_e - eps_g), with the axial split attached.
inline TransitionDipole transition_dipole(const BlochEigensystem& es, int ik,
                                          int band_g, int band_e,
                                          const Vec3& axis) {
  const TightBindingModel& model = *es.model;
  const double de = es.eigenvalues[ik][band_e] - es.eigenvalues[ik][band_g];
  if (std::abs(de) < 1e-8)
    throw DegenerateTransitionError("transition_dipole: degenerate pair");
  const Vec3 k = es.grid.cartesian(model.geometry(), ik);
  const auto v = velocity_matrices(model, k);
  TransitionDipole t;
  t.band_g = band_g;
  t.band_e = band_e;
  t.k_index = ik;
  t.energy_ev = de;
  for (int al = 0; al < 3; ++al)
    t.mu[al] = es.eigenvectors[ik].col(band_e).dot(v[al] * es.eigenvectors[ik].col(band_g)) / de;
  const Vec3 a = axis.normalized();
  t.parallel = t.mu[0] * a[0] + t.mu[1] * a[1] + t.mu[2] * a[2];
  const double perp_sq = t.mu.squaredNorm() - std::norm(t.parallel);
  t.perpendicular = std::sqrt(std::max(0.0, perp_sq));
  return t;
}

namespace detail {

// Unit-area Lorentzian renormalized over the finite energy window, so the
// grid integral inverts the intensity relation exactly.
inline void add_lorentzian(DielectricSpectrum& sp, double center, double area,
                           double gamma) {
  const double lo = sp.energies.front(), hi = sp.energies.back();
  const double window =
      (std::atan((hi - center) / gamma) + std::atan((center - lo) / gamma)) /
      M_PI;
  if (window <= 0) return;
  const double scale = area / window;
  for (size_t i = 0; i < sp.energies.size(); ++i) {
    const double x = sp.energies[i] - center;
    sp.im_eps[i] += scale * (gamma / M_PI) / (x * x + gamma * gamma);
  }
}

}  // namespace detail

// Im eps(E) = (pi e^2 / eps0 V) sum_t f_g (1 - f_e/2) |mu|^2 L_gamma(E - dE).
// The prefactor is fixed so that (eps0 V / pi) Int Im eps dE = |mu|^2 holds
// exactly for an isolated transition.
inline DielectricSpectrum imaginary_dielectric(const BlochEigensystem& es,
                                               double gamma_ev,
                                               double volume_nm3,
                                               double refractive_index,
                                               double window_hwhm = 200.0) {
  if (gamma_ev <= 0) throw DomainError("imaginary_dielectric: gamma must be > 0");
  if (volume_nm3 <= 0) throw DomainError("imaginary_dielectric: volume must be > 0");
  const auto& c = PhysicalConstants::codata2018();
  const int nk = es.grid.size();
  const int nb = es.n_bands();

  struct Line {
    double energy, weight_mu_sq;  // eV, (e Angstrom)^2
  };
  std::vector<Line> lines;
  for (int ik = 0; ik < nk; ++ik)
    for (int g = 0; g < nb; ++g) {
      const double fg = es.occ.f(ik, g);
      if (fg <= 0) continue;
      for (int e = 0; e < nb; ++e) {
        const double fe = es.occ.f(ik, e);
        if (fe >= 2.0) continue;
        const double de = es.eigenvalues[ik][e] - es.eigenvalues[ik][g];
        if (de <= 1e-8) continue;
        const TransitionDipole t = transition_dipole(es, ik, g, e, Vec3::UnitZ());
        const double w = fg * (1.0 - fe / 2.0) / nk;
        if (w * t.mu_sq_eA2() > 0) lines.push_back({de, w * t.mu_sq_eA2()});
      }
    }

  DielectricSpectrum sp;
  sp.gamma_ev = gamma_ev;
  sp.volume_nm3 = volume_nm3;
  sp.refractive_index = refractive_index;
  double emin = 1.0, emax = 1.0;
  if (!lines.empty()) {
    emin = emax = lines.front().energy;
    for (const auto& l : lines) {
      emin = std::min(emin, l.energy);
      emax = std::max(emax, l.energy);
    }
  }
  const double lo = std::max(0.0, emin - window_hwhm * gamma_ev);
  const double hi = emax + window_hwhm * gamma_ev;
  const double step = gamma_ev / 10.0;
  const int npts = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
  sp.energies.resize(npts);
  sp.im_eps.assign(npts, 0.0);
  for (int i = 0; i < npts; ++i) sp.energies[i] = lo + i * step;

  // (e Angstrom)^2 -> C^2 m^2, divided by eps0 V and expressed in eV
  const double ang = 1e-10;
  const double v_m3 = volume_nm3 * 1e-27;
  const double prefactor = M_PI * c.e_charge * c.e_charge * ang * ang /
                           (c.eps0 * v_m3 * c.ev_in_joule);
  for (const auto& l : lines)
    detail::add_lorentzian(sp, l.energy, prefactor * l.weight_mu_sq, gamma_ev);
  return sp;
}

// |mu|^2 recovered from a spectrum integral via the intensity relation,
// reported in Debye^2.
inline double mu_sq_debye2_from_intensity(double intensity_ev,
                                          double volume_nm3) {
  const auto& c = PhysicalConstants::codata2018();
  const double mu_sq_si =
      c.eps0 * volume_nm3 * 1e-27 * intensity_ev * c.ev_in_joule / M_PI;
  return mu_sq_si / (kDebyeSI * kDebyeSI);
}

// Least-squares Lorentzian over the window from the low-energy edge to the
// first local minimum after the first peak.
inline LorentzianFit fit_first_peak(const DielectricSpectrum& sp) {
  const auto& x = sp.energies;
  const auto& y = sp.im_eps;
  const int n = static_cast<int>(x.size());
  int peak = -1;
  for (int i = 1; i + 1 < n; ++i)
    if (y[i] > 1e-12 && y[i] >= y[i - 1] && y[i] >= y[i + 1]) {
      peak = i;
      break;
    }
  if (peak < 0) throw NoPeakError("fit_first_peak: no local maximum above 1e-12");
  int end = n - 1;
  for (int i = peak + 1; i + 1 < n; ++i)
    if (y[i] <= y[i - 1] && y[i] <= y[i + 1] && y[i] < y[peak]) {
      end = i;
      break;
    }

  // Levenberg-Marquardt on (center, area, hwhm)
  double c0 = x[peak];
  double g0 = sp.gamma_ev;
  double a0 = y[peak] * M_PI * g0;
  auto eval = [&](double c, double a, double g, int i) {
    const double dx = x[i] - c;
    return (a * g / M_PI) / (dx * dx + g * g);
  };
  auto chi2 = [&](double c, double a, double g) {
    double s = 0;
    for (int i = 0; i <= end; ++i) {
      const double r = eval(c, a, g, i) - y[i];
      s += r * r;
    }
    return s;
  };
  double lm = 1e-3;
  double cost = chi2(c0, a0, g0);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (int i = 0; i <= end; ++i) {
      const double dx = x[i] - c0;
      const double den = dx * dx + g0 * g0;
      const double f = (a0 * g0 / M_PI) / den;
      Eigen::Vector3d j;
      j[0] = f * 2.0 * dx / den;                          // d/dc
      j[1] = f / a0;                                      // d/da
      j[2] = (a0 / M_PI) * (dx * dx - g0 * g0) / (den * den);  // d/dg
      const double r = f - y[i];
      jtj += j * j.transpose();
      jtr += j * r;
    }
    Eigen::Matrix3d m = jtj + lm * Eigen::Matrix3d(jtj.diagonal().asDiagonal());
    const Eigen::Vector3d step = m.ldlt().solve(-jtr);
    const double c1 = c0 + step[0], a1 = a0 + step[1], g1 = std::abs(g0 + step[2]);
    const double new_cost = (a1 > 0 && g1 > 0) ? chi2(c1, a1, g1) : cost + 1.0;
    if (new_cost < cost) {
      c0 = c1;
      a0 = a1;
      g0 = g1;
      lm = std::max(lm * 0.3, 1e-12);
      if (cost - new_cost < 1e-18 * (1.0 + cost)) {
        cost = new_cost;
        break;
      }
      cost = new_cost;
    } else {
      lm *= 10.0;
      if (lm > 1e12) break;
    }
  }

  LorentzianFit fit;
  fit.center_ev = c0;
  fit.intensity_ev = a0;
  fit.hwhm_ev = g0;
  double ymax = 0;
  for (int i = 0; i <= end; ++i) ymax = std::max(ymax, y[i]);
  fit.fit_residual = std::sqrt(cost / (end + 1)) / ymax;
  fit.poor_fit_warning = fit.fit_residual >= 0.05;
  if (fit.intensity_ev <= 0)
    throw NoPeakError("fit_first_peak: fit collapsed to non-positive area");
  return fit;
}

// tau_r = 3 pi^2 hbar c^3 / (n omega^3 V I); the Einstein coefficient is its
// exact inverse by construction.
inline RadiativeLifetime radiative_lifetime(double refractive_index,
                                            double hw_ev, double volume_nm3,
                                            double intensity_ev) {
  if (refractive_index <= 0 || hw_ev <= 0 || volume_nm3 <= 0 ||
      intensity_ev <= 0)
    throw DomainError("radiative_lifetime: all inputs must be positive");
  const auto& c = PhysicalConstants::codata2018();
  const double omega = hw_ev * c.ev_in_joule / c.hbar;
  const double v_m3 = volume_nm3 * 1e-27;
  const double i_j = intensity_ev * c.ev_in_joule;
  const double tau_s = 3.0 * M_PI * M_PI * c.hbar * c.c_light * c.c_light *
                       c.c_light /
                       (refractive_index * omega * omega * omega * v_m3 * i_j);
  RadiativeLifetime out;
  out.tau_ns = tau_s * 1e9;
  out.einstein_a_per_s = 1.0 / tau_s;
  out.mu_sq_debye2 = mu_sq_debye2_from_intensity(intensity_ev, volume_nm3);
  return out;
}

inline EmitterCriteriaReport emitter_criteria(double dp_tot_eA,
                                              double mu_sq_debye2,
                                              double axis_fraction,
                                              double tau_ns,
                                              const CriteriaThresholds& th = {}) {
  const auto& c = PhysicalConstants::codata2018();
  EmitterCriteriaReport r;
  r.dp_tot_eA = dp_tot_eA;
  r.dp_tot_debye = dp_tot_eA / c.debye_in_eA;
  r.stability_pass = dp_tot_eA < th.stability_eA;
  r.mu_sq_debye2 = mu_sq_debye2;
  r.brightness_pass = mu_sq_debye2 > th.brightness_debye2;
  r.polarization_axis_fraction = axis_fraction;
  r.tau_ns = tau_ns;
  if (r.stability_pass && mu_sq_debye2 <= 1e-12) {
    r.verdict = "spectrally stable, dark emitter (no transition dipole)";
  } else if (r.stability_pass && r.brightness_pass) {
    r.verdict = "spectrally stable, bright: meets the emitter criteria";
  } else if (r.stability_pass) {
    r.verdict = "spectrally stable, weak transition dipole";
  } else if (r.brightness_pass) {
    r.verdict = "bright but spectrally unstable (permanent dipole change too large)";
  } else {
    r.verdict = "spectrally unstable, weak transition dipole";
  }
  return r;
}

inline EmitterCriteriaReport emitter_criteria(const DipoleDifference& dp,
                                              const TransitionDipole& mu,
                                              double tau_ns,
                                              const CriteriaThresholds& th = {}) {
  const double mu_sq = mu.mu_sq_eA2();
  const double frac = mu_sq > 0 ? std::norm(mu.parallel) / mu_sq : 0.0;
  return emitter_criteria(dp.magnitude_eA, mu.mu_sq_debye2(), frac, tau_ns, th);
}

}  // namespace emkit
