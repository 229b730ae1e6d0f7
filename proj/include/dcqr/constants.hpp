#pragma once

// Unit system: energies in meV, lengths in nm, magnetic fields in T.
// Masses are dimensionless multiples of the free electron mass m0.

namespace dcqr {

namespace codata {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double electron_mass = 9.1093837015e-31;    // kg
}  // namespace codata

struct PhysicalConstants {
  /// hbar^2 / (2 m0) in meV nm^2; the kinetic prefactor for m* = m0.
  double hbar2_over_2m0;
  /// hbar e / (2 m0) in meV/T.
  double mu_B;
  /// h / e in T nm^2.
  double flux_quantum;
};

inline constexpr PhysicalConstants kConstants = [] {
  using namespace codata;
  constexpr double joule_to_mev = 1e3 / elementary_charge;
  constexpr double m2_to_nm2 = 1e18;
  return PhysicalConstants{
      hbar * hbar / (2.0 * electron_mass) * joule_to_mev * m2_to_nm2,
      hbar * elementary_charge / (2.0 * electron_mass) * joule_to_mev,
      planck / elementary_charge * m2_to_nm2,
  };
}();

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dcqr
