#pragma once

#include <stdexcept>

namespace emkit {

// CODATA-2018 values, SI unless noted. Construction with anything else is
// rejected so that every report is traceable to one constant set.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;       // J s
  double e_charge = 1.602176634e-19;   // C
  double m_e = 9.1093837015e-31;       // kg
  double eps0 = 8.8541878128e-12;      // F/m
  double c_light = 2.99792458e8;       // m/s
  double debye_in_eA = 0.2081943;      // 1 Debye in e*Angstrom
  double ev_in_joule = 1.602176634e-19;  // J per eV

  static const PhysicalConstants& codata2018() {
    static const PhysicalConstants c{};
    return c;
  }

  // Rejects any constant set that is not CODATA-2018.
  static PhysicalConstants checked(const PhysicalConstants& c) {
    const PhysicalConstants ref{};
    if (c.hbar != ref.hbar || c.e_charge != ref.e_charge ||
        c.m_e != ref.m_e || c.eps0 != ref.eps0 ||
        c.c_light != ref.c_light || c.ev_in_joule != ref.ev_in_joule ||
        !(c.debye_in_eA > 0.2081 && c.debye_in_eA < 0.2082)) {
      throw std::invalid_argument("PhysicalConstants: not CODATA-2018");
    }
    return c;
  }
};

inline constexpr double kAngstromPerBohr = 0.529177210903;
inline constexpr double kDebyeSI = 3.33564095198152e-30;  // C m per Debye

}  // namespace emkit
