#pragma once

#include <array>
#include <vector>

#include "emkit/errors.hpp"
#include "emkit/model.hpp"

namespace emkit {

// Gamma-centered Monkhorst-Pack style grid, k = sum_i (n_i / N_i) b_i.
// For each direction d the grid decomposes into N_perp strings of N_d points
// each; strings are closed under k -> k + b_d.
class KPointGrid {
 public:
  KPointGrid(int n1, int n2, int n3) : div_{n1, n2, n3} {
    if (n1 < 1 || n2 < 1 || n3 < 1)
      throw ValidationError("KPointGrid: divisions must be positive");
  }

  const std::array<int, 3>& divisions() const { return div_; }
  bool centered_on_gamma() const { return true; }
  int size() const { return div_[0] * div_[1] * div_[2]; }

  // flat index with n3 fastest
  int index(int n1, int n2, int n3) const {
    return (n1 * div_[1] + n2) * div_[2] + n3;
  }

  Vec3 frac(int flat) const {
    const int n3 = flat % div_[2];
    const int n2 = (flat / div_[2]) % div_[1];
    const int n1 = flat / (div_[1] * div_[2]);
    return {double(n1) / div_[0], double(n2) / div_[1], double(n3) / div_[2]};
  }

  Vec3 cartesian(const LatticeGeometry& g, int flat) const {
    const Vec3 f = frac(flat);
    return f[0] * g.reciprocal_vector(0) + f[1] * g.reciprocal_vector(1) +
           f[2] * g.reciprocal_vector(2);
  }

  // All strings along direction d: each string lists flat k indices in order
  // of increasing n_d. Every k-point appears in exactly one string.
  std::vector<std::vector<int>> strings(int d) const {
    std::vector<std::vector<int>> out;
    const int dp = (d + 1) % 3, dq = (d + 2) % 3;
    std::array<int, 3> n{};
    for (int p = 0; p < div_[dp]; ++p)
      for (int q = 0; q < div_[dq]; ++q) {
        std::vector<int> s;
        s.reserve(div_[d]);
        n[dp] = p;
        n[dq] = q;
        for (int m = 0; m < div_[d]; ++m) {
          n[d] = m;
          s.push_back(index(n[0], n[1], n[2]));
        }
        out.push_back(std::move(s));
      }
    return out;
  }

 private:
  std::array<int, 3> div_;
};

}  // namespace emkit
