#pragma once

// Transmon-molecule circuit model: two asymmetric transmons sharing a chain
// inductor, capacitively read out through a linear cavity. This layer turns
// fabrication-level constants (junction energy, capacitances, inductances)
// into mode frequencies, anharmonicities and the cross-Kerr strength, and
// diagonalizes the full flux-dependent Hamiltonian with labeled eigenstates.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "xkerr/qops.hpp"

namespace xkerr {

struct CircuitParams {
  double e_j_ghz = 0.0;   // mean Josephson energy E_J/h (GHz)
  double d_j = 0.0;       // junction asymmetry, |d_j| < 1
  double c_s_ff = 0.0;    // transmon shunt capacitance (fF)
  double c_t_ff = 0.0;    // coupling capacitance (fF)
  std::map<int, double> l_a_of_n_nh;  // coupling inductance vs integer flux index (nH)
  double l_j_nh = 0.0;    // Josephson inductance (nH); <= 0 means derive from e_j
  double flux = 0.0;      // applied flux, Phi/Phi0
  double omega_c_ghz = 0.0;  // bare cavity frequency (GHz)
  double g_ac_ghz = 0.0;     // ancilla-cavity coupling (GHz)
  double g_qc_ghz = 0.0;     // residual qubit-cavity coupling (GHz)

  // Effective junction inductance: explicit value if set, else phi0^2/(E_J h).
  double josephson_inductance_nh() const;
  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// All frequencies in GHz = angular frequency / 2pi; anharmonicities negative.
struct DerivedParams {
  double e_cq = 0.0;          // qubit charging energy (GHz)
  double e_ca = 0.0;          // ancilla charging energy (GHz)
  double omega_q_harm = 0.0;  // harmonic qubit frequency
  double omega_a_harm = 0.0;  // harmonic ancilla frequency
  double alpha_q = 0.0;       // qubit anharmonicity (< 0)
  double u_a = 0.0;           // ancilla anharmonicity (< 0)
  double g_zz = 0.0;          // cross-Kerr strength (> 0)
  double omega_q = 0.0;       // omega_q_harm + alpha_q
  double omega_a = 0.0;       // omega_a_harm + u_a
  double omega_q_prime = 0.0; // omega_q - g_zz
  double omega_a_prime = 0.0; // omega_a - 2 g_zz
  double omega_a_bar = 0.0;   // omega_a - g_zz (ground-referenced ancilla line)
  // carried through from the circuit for downstream consumers
  double omega_c = 0.0;
  double g_ac = 0.0;
  double g_qc = 0.0;
};

// Charging/inductive energy chain at integer flux index n.
// Throws std::invalid_argument on a missing L_a entry (names n) or when the
// transmon-regime check E_J / E_C > 20 fails.
DerivedParams derive_params(const CircuitParams& cp, int n);

struct InductanceAtFlux {
  double l_a_nh = 0.0;
  bool interpolated = false;  // true when linearly interpolated off-table
};
// Coupling inductance at arbitrary flux: table lookup at integers, linear
// interpolation between neighbors otherwise (flagged). Throws when the
// bracketing entries are absent, naming the flux index.
InductanceAtFlux coupling_inductance(const CircuitParams& cp, double flux);

// Full circuit Hamiltonian H/h in GHz on (qubit, ancilla, cavity):
//   4E_Cq n_q^2 + 4E_Ca n_a^2
//   - 2E_J [cos(phi_q) cos(phi_a) - (L_J/L_a)(phi_a - pi Phi/Phi0)^2]
//   - 2E_J d_J sin(phi_q) sin(phi_a)
//   + omega_c c'c + g_ac (a'c + c'a) + g_qc (q + q')(c + c')
// The ancilla oscillator basis is recentered on the classical minimum of its
// flux-biased potential, and the flux is reduced modulo one quantum (the
// spectrum is exactly periodic), so moderate truncations stay converged.
// Matrix trig is evaluated exactly on the truncated space by
// eigendecomposition of phi.
Operator build_full_hamiltonian(const CircuitParams& cp, double flux,
                                std::array<int, 3> dims = {8, 8, 8});

// Exchange-free anharmonic-oscillator model of the two transmons:
//   wq q'q + wa a'a + (alpha_q/12)(q+q')^4 + (u_a/12)(a+a')^4
//   - (g_zz/2)(q+q')^2 (a+a')^2
// on (qubit, ancilla); the caller composes cavity terms if needed.
Operator build_molecule_hamiltonian(const DerivedParams& dp,
                                    std::array<int, 2> dims = {6, 8});

struct LabeledLevel {
  double energy_ghz = 0.0;
  std::vector<int> label;  // bare occupation per mode
  double overlap = 0.0;    // squared overlap with that bare state, in (0,1]
  bool ambiguous = false;  // overlap < 0.5: reported, not fatal
};

struct LabeledSpectrum {
  std::vector<LabeledLevel> levels;  // ascending energy
  double flux = 0.0;
  // Level carrying a given bare label; throws std::invalid_argument if absent.
  const LabeledLevel& find(const std::vector<int>& label) const;
};

// Greedy maximum-overlap assignment of bare product labels to eigenvectors,
// in descending overlap, each label used at most once; ties broken by
// ascending energy.
LabeledSpectrum label_spectrum(const Operator& h, double flux = 0.0);

}  // namespace xkerr
