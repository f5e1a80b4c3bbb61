#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <tuple>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "emkit/errors.hpp"

namespace emkit {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;
using Vec3c = Eigen::Vector3cd;
using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

struct BasisSite {
  Vec3 frac_pos;        // fractional, reduced into [0,1)
  std::string species;
  double ionic_charge = 0.0;  // units of e
};

inline double wrap_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;  // guard against floor rounding
  return y;
}

// Real-space cell: lattice vectors in Angstrom plus ionic basis.
// 1D/2D models pad the unused directions with long orthogonal axes so the
// reciprocal cell stays well defined.
class LatticeGeometry {
 public:
  LatticeGeometry(const Mat3& lattice_vectors, std::vector<BasisSite> sites,
                  int dimensionality = 3)
      : a_(lattice_vectors), sites_(std::move(sites)), dim_(dimensionality) {
    if (dim_ < 1 || dim_ > 3)
      throw ValidationError("LatticeGeometry: dimensionality must be 1, 2 or 3");
    if (std::abs(a_.determinant()) < 1e-12)
      throw ValidationError("LatticeGeometry: lattice vectors are linearly dependent");
    if (a_.determinant() < 0)
      throw ValidationError("LatticeGeometry: left-handed lattice (volume < 0)");
    for (auto& s : sites_)
      for (int d = 0; d < 3; ++d) s.frac_pos[d] = wrap_unit(s.frac_pos[d]);
    // rows of b_ are the reciprocal vectors, b_i . a_j = 2 pi delta_ij
    b_ = 2.0 * M_PI * a_.inverse();
  }

  // Lattice vector a_i is the i-th row.
  const Mat3& lattice() const { return a_; }
  Vec3 lattice_vector(int i) const { return a_.row(i); }
  Vec3 reciprocal_vector(int i) const { return b_.row(i); }
  double volume() const { return a_.determinant(); }
  int dimensionality() const { return dim_; }
  const std::vector<BasisSite>& sites() const { return sites_; }

  Vec3 cartesian(const Vec3& frac) const { return a_.transpose() * frac; }
  Vec3 fractional(const Vec3& cart) const {
    return a_.transpose().inverse() * cart;
  }

 private:
  Mat3 a_;   // rows are lattice vectors (Angstrom)
  Mat3 b_;   // rows are reciprocal vectors (1/Angstrom)
  std::vector<BasisSite> sites_;
  int dim_;
};

struct Orbital {
  int site = 0;
  std::string label;
  double onsite_ev = 0.0;
  Vec3 center_frac = Vec3::Zero();  // orbital center, fractional
};

struct Hopping {
  int from = 0;  // orbital i
  int to = 0;    // orbital j
  Vec3i cell = Vec3i::Zero();
  cplx amplitude_ev{0.0, 0.0};
};

// Periodic tight-binding Hamiltonian. The Hermiticity closure is checked at
// construction: every (i, j, R, t) needs its partner (j, i, -R, conj t).
class TightBindingModel {
 public:
  TightBindingModel(LatticeGeometry geometry, std::vector<Orbital> orbitals,
                    std::vector<Hopping> hoppings, int electron_count)
      : geom_(std::move(geometry)),
        orbitals_(std::move(orbitals)),
        hoppings_(std::move(hoppings)),
        electron_count_(electron_count) {
    const int n = static_cast<int>(orbitals_.size());
    if (n == 0) throw ValidationError("TightBindingModel: no orbitals");
    for (const auto& o : orbitals_)
      if (o.site < 0 || o.site >= static_cast<int>(geom_.sites().size()))
        throw ValidationError("TightBindingModel: orbital refers to missing site");
    for (const auto& h : hoppings_)
      if (h.from < 0 || h.from >= n || h.to < 0 || h.to >= n)
        throw ValidationError("TightBindingModel: hopping refers to missing orbital");
    if (electron_count_ < 0 || electron_count_ > 2 * n)
      throw ValidationError(
          "TightBindingModel: electron_count outside [0, 2 * n_orbitals]");
    check_hermiticity_closure();
    // canonical order so results are bit-identical under input permutation
    std::sort(hoppings_.begin(), hoppings_.end(), [](const Hopping& x, const Hopping& y) {
      auto key = [](const Hopping& h) {
        return std::make_tuple(h.from, h.to, h.cell[0], h.cell[1], h.cell[2],
                               h.amplitude_ev.real(), h.amplitude_ev.imag());
      };
      return key(x) < key(y);
    });
  }

  const LatticeGeometry& geometry() const { return geom_; }
  const std::vector<Orbital>& orbitals() const { return orbitals_; }
  const std::vector<Hopping>& hoppings() const { return hoppings_; }
  int n_orbitals() const { return static_cast<int>(orbitals_.size()); }
  int electron_count() const { return electron_count_; }

  Vec3 orbital_center_cart(int i) const {
    return geom_.cartesian(orbitals_[i].center_frac);
  }

  // Returns a copy with one basis site (and the orbitals attached to it)
  // displaced by a Cartesian vector. Hopping amplitudes are kept fixed; only
  // the phase convention and the ionic dipole feel the displacement.
  TightBindingModel displaced_site(int site, const Vec3& delta_cart) const {
    auto sites = geom_.sites();
    if (site < 0 || site >= static_cast<int>(sites.size()))
      throw ValidationError("displaced_site: no such site");
    const Vec3 dfrac = geom_.fractional(delta_cart);
    sites[site].frac_pos += dfrac;
    auto orbs = orbitals_;
    for (auto& o : orbs)
      if (o.site == site) o.center_frac += dfrac;
    LatticeGeometry g(geom_.lattice(), std::move(sites), geom_.dimensionality());
    return TightBindingModel(std::move(g), std::move(orbs), hoppings_,
                             electron_count_);
  }

 private:
  void check_hermiticity_closure() const {
    auto key = [](const Hopping& h) {
      std::ostringstream os;
      os << h.from << ' ' << h.to << ' ' << h.cell[0] << ' ' << h.cell[1]
         << ' ' << h.cell[2];
      return os.str();
    };
    std::vector<std::string> missing;
    for (const auto& h : hoppings_) {
      bool found = false;
      for (const auto& g : hoppings_) {
        if (g.from == h.to && g.to == h.from && g.cell == -h.cell &&
            std::abs(g.amplitude_ev - std::conj(h.amplitude_ev)) < 1e-14) {
          found = true;
          break;
        }
      }
      if (!found) {
        Hopping want{h.to, h.from, -h.cell, std::conj(h.amplitude_ev)};
        missing.push_back("for (" + key(h) + ") need (" + key(want) + ") with t = " +
                          std::to_string(want.amplitude_ev.real()) + (want.amplitude_ev.imag() < 0 ? " - " : " + ") +
                          std::to_string(std::abs(want.amplitude_ev.imag())) + "i");
      }
    }
    if (!missing.empty()) {
      std::string msg = "TightBindingModel: hopping list is not Hermitian; missing conjugates:";
      for (const auto& m : missing) msg += "\n  " + m;
      throw ValidationError(msg);
    }
  }

  LatticeGeometry geom_;
  std::vector<Orbital> orbitals_;
  std::vector<Hopping> hoppings_;
  int electron_count_;
};

}  // namespace emkit
