#pragma once

// Imperfection models: transverse couplings induced by junction asymmetry
// and by a misalignment of the qubit mode with the cavity field, and the
// Purcell-limited qubit lifetime they imply — analytically through the
// two-channel rate formula and numerically through matrix elements between
// dressed circuit eigenstates.

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "xkerr/circuit.hpp"

namespace xkerr {

struct ImperfectionParams {
  double d_j = 0.0;          // junction asymmetry, |d_j| < 1
  double theta_m_deg = 0.0;  // field misalignment angle, |theta_m| <= 90

  void validate() const;  // throws std::invalid_argument
};

// Transverse qubit-ancilla coupling from junction asymmetry:
//   g_qa = -(d_j/2) sqrt(wq_harm wa_harm / r),  r = 1 + 2 L_J / L_a.
// Frequencies are the harmonic (quartic-free) mode frequencies in GHz.
double g_qa_from_asymmetry(double d_j, double omega_q_harm_ghz,
                           double omega_a_harm_ghz, double inductance_ratio);

// Same coupling evaluated at integer flux index n from the circuit table.
double g_qa_at(const CircuitParams& cp, double d_j, int n);

// Transverse qubit-cavity coupling bound from the misalignment angle:
//   g_qc = tan(theta_m) g_ac.  Throws for |theta_m| >= 90 degrees.
double g_qc_from_misalignment(double theta_m_deg, double g_ac_ghz);

struct PurcellRate {
  double gamma_mhz = 0.0;  // linear decay rate
  double t1_ns = std::numeric_limits<double>::infinity();  // 1000/(2pi gamma)
  bool unbounded = false;  // gamma is exactly zero
  // purcell_numeric only: smallest squared overlap of the two dressed levels
  // with their bare labels; below 0.5 the labeling is ambiguous (reported,
  // not fatal).
  double label_overlap = 1.0;
  bool ambiguous = false;
};

// Two-channel far-detuned decay rate
//   Gamma_P = kappa_c (g_qc/Delta_qc)^2 + kappa_a (g_qa/Delta_qa)^2
// with kappas in linear MHz and couplings/detunings in GHz (only their
// ratios enter). Throws on a zero detuning or negative kappa. Zero couplings
// give gamma = 0 and an unbounded lifetime.
PurcellRate purcell_analytic(double kappa_c_mhz, double kappa_a_mhz,
                             double g_qc_ghz, double g_qa_ghz,
                             double delta_qc_ghz, double delta_qa_ghz);

// Analytic rate at integer flux index n: couplings from the imperfection
// parameters, detunings Delta_qc = wq' - wc and Delta_qa = wq' - wa_bar from
// the derived mode frequencies.
PurcellRate purcell_analytic_at(const CircuitParams& cp,
                                const ImperfectionParams& ip, int n,
                                double kappa_c_mhz, double kappa_a_mhz);

// Which imperfection enters the full-circuit Hamiltonian.
enum class ImperfectionMode { asymmetry, misalignment, both };

// Dressed-state decay rate
//   Gamma_P = kappa_c |<psi_g| c |psi_e>|^2 + kappa_a |<psi_g| a |psi_e>|^2
// where |psi_g>, |psi_e> are the full-circuit eigenstates of maximum overlap
// with the bare qubit ground/excited states (other modes in vacuum). The
// circuit's own d_j / g_qc entries are replaced according to `mode`:
// asymmetry keeps only d_j = ip.d_j, misalignment only the derived g_qc,
// both keeps both.
PurcellRate purcell_numeric(const CircuitParams& cp,
                            const ImperfectionParams& ip, double flux,
                            double kappa_c_mhz, double kappa_a_mhz,
                            ImperfectionMode mode = ImperfectionMode::both,
                            std::array<int, 3> dims = {6, 8, 8});

struct PurcellPoint {
  double flux = 0.0;
  // Optional reference lifetime (NaN when absent; kept for side-by-side CSV
  // export against measured data).
  double t1_measured_ns = std::numeric_limits<double>::quiet_NaN();
  double t1_asym_ns = 0.0;
  double t1_misalign_ns = 0.0;
  double t1_both_ns = 0.0;
};

// Numeric lifetimes for the three imperfection variants over a flux list.
std::vector<PurcellPoint> purcell_flux_table(
    const CircuitParams& cp, const ImperfectionParams& ip,
    const std::vector<double>& fluxes, double kappa_c_mhz, double kappa_a_mhz,
    std::array<int, 3> dims = {6, 8, 8});

// CSV "flux,t1_measured_ns,t1_asym_ns,t1_misalign_ns,t1_both_ns"; the
// measured field is left empty when it is NaN.
void write_purcell_csv(const std::string& path,
                       const std::vector<PurcellPoint>& points);

}  // namespace xkerr
