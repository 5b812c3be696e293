#pragma once

// Physical constants (2019 SI exact values) and unit conventions.
//
// Conventions used throughout the library:
//   * frequencies are linear frequencies in GHz (value = omega / 2pi)
//   * decay / drive rates are linear frequencies in MHz (value = kappa / 2pi)
//   * time is in ns
// The factors of 2pi are applied internally wherever an angular rate is
// needed: 1 GHz (linear) = 2pi rad/ns, 1 MHz (linear) = 2pi * 1e-3 rad/ns.

namespace xkerr {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// reduced flux quantum phi0 = hbar / 2e, in Wb
inline constexpr double kReducedFluxQuantum =
    kPlanck / (kTwoPi * 2.0 * kElementaryCharge);

inline constexpr double ghz_to_rad_per_ns(double f_ghz) { return kTwoPi * f_ghz; }
inline constexpr double mhz_to_rad_per_ns(double f_mhz) { return kTwoPi * 1e-3 * f_mhz; }

// charging energy E_C = e^2 / (2 C), returned in GHz for C in fF
inline constexpr double charging_energy_ghz(double c_fF) {
  return kElementaryCharge * kElementaryCharge / (2.0 * c_fF * 1e-15) / kPlanck * 1e-9;
}

// Josephson energy of an inductance L (nH): E = phi0^2 / L, in GHz
inline constexpr double inductive_energy_ghz(double l_nH) {
  return kReducedFluxQuantum * kReducedFluxQuantum / (l_nH * 1e-9) / kPlanck * 1e-9;
}

}  // namespace xkerr
