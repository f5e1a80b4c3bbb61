#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "emkit/errors.hpp"
#include "emkit/kgrid.hpp"

namespace emkit {

// Band occupations with spin degeneracy folded in (f in {0, 1, 2}).
// Uniform mode fixes f_n per band; per-k mode allows f to vary with k
// (flagged metallic by the Berry-phase path).
class OccupationConfig {
 public:
  static OccupationConfig uniform(std::vector<double> f_band,
                                  std::string label = "ground") {
    OccupationConfig o;
    o.uniform_ = std::move(f_band);
    o.label_ = std::move(label);
    o.validate(o.uniform_);
    return o;
  }

  // per_kn[ik][n]
  static OccupationConfig per_k(std::vector<std::vector<double>> per_kn,
                                std::string label = "custom") {
    OccupationConfig o;
    o.per_kn_ = std::move(per_kn);
    o.label_ = std::move(label);
    for (const auto& row : o.per_kn_) o.validate(row);
    return o;
  }

  bool is_uniform() const { return !uniform_.empty(); }
  const std::string& label() const { return label_; }
  const std::vector<double>& band_occupations() const { return uniform_; }

  double f(int ik, int n) const {
    if (is_uniform()) return n < static_cast<int>(uniform_.size()) ? uniform_[n] : 0.0;
    const auto& row = per_kn_.at(ik);
    return n < static_cast<int>(row.size()) ? row[n] : 0.0;
  }

  // Electrons per cell, averaged over the grid in per-k mode.
  double electrons_per_cell(int n_k) const {
    if (is_uniform()) {
      double s = 0;
      for (double f : uniform_) s += f;
      return s;
    }
    double s = 0;
    for (const auto& row : per_kn_)
      for (double f : row) s += f;
    return s / n_k;
  }

  void check_electron_count(int electron_count, int n_k) const {
    if (std::abs(electrons_per_cell(n_k) - electron_count) > 1e-9)
      throw ValidationError("OccupationConfig '" + label_ +
                            "': occupations do not sum to the electron count");
  }

  int highest_occupied_band() const {
    int hi = -1;
    if (is_uniform()) {
      for (int n = 0; n < static_cast<int>(uniform_.size()); ++n)
        if (uniform_[n] > 0) hi = n;
    } else {
      for (const auto& row : per_kn_)
        for (int n = 0; n < static_cast<int>(row.size()); ++n)
          if (row[n] > 0) hi = std::max(hi, n);
    }
    return hi;
  }

 private:
  void validate(const std::vector<double>& row) const {
    for (double f : row)
      if (!(f == 0.0 || f == 1.0 || f == 2.0))
        throw ValidationError("OccupationConfig '" + label_ +
                              "': occupations must be 0, 1 or 2");
  }

  std::vector<double> uniform_;
  std::vector<std::vector<double>> per_kn_;
  std::string label_;
};

}  // namespace emkit
