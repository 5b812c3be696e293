#pragma once

// Spectroscopy drivers and curve fitting: frequency sweeps of the two-pole
// transmission response, two-Lorentzian peak fits, flux maps from the full
// circuit model, avoided-crossing extraction, and conditional dispersive
// shift measurement.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "xkerr/circuit.hpp"
#include "xkerr/polariton.hpp"
#include "xkerr/qops.hpp"

namespace xkerr {

struct SpectroscopyCurve {
  std::vector<double> omega_d;      // GHz, strictly increasing
  std::vector<Complex> amplitude;   // complex samples (real = magnitude-only)
  int sigma_z = 0;                  // -1 / +1 conditioned, 0 unconditioned
  double flux = 0.0;                // flux bias label, units of flux quanta

  std::vector<double> magnitude() const;
  void validate() const;
};

struct PeakFit {
  double center_ghz = 0.0;
  double width_mhz = 0.0;     // FWHM of the underlying Lorentzian (linewidth)
  Complex weight{0.0, 0.0};   // lineshape weight (real for magnitude fits)
  double residual_norm = 0.0; // ||model - data||_2 at the solution
  double center_se_ghz = 0.0; // 1-sigma diagnostics from the fit covariance
  double width_se_mhz = 0.0;
};

// Samples transmission_amplitude over the grid for the given qubit condition.
SpectroscopyCurve sweep_frequency(const SystemParams& sp,
                                  const std::vector<double>& grid_ghz,
                                  int sigma_z);

// Damped least squares on the two-Lorentzian magnitude model
//   |a_l / (w_l/2 - i(w - c_l)) + a_u / (w_u/2 - i(w - c_u))|
// initialized from peak picking (local maxima + half-maximum crossings).
// Converges when the relative cost change drops below 1e-10 (at most 200
// iterations). Throws if the picked peaks are closer than a quarter of the
// summed widths, or if the solve breaks down. Fits are returned sorted by
// center (lower, upper).
std::pair<PeakFit, PeakFit> fit_two_lorentzians(const SpectroscopyCurve& curve);

// One flux bias point of a polariton flux map: exact circuit frequencies plus
// lineshape parameters from the hybridization angle via the sum identity
// omega_a_bar = omega_l + omega_u - omega_c.
struct FluxPoint {
  double flux = 0.0;
  double omega_l_ghz = 0.0;
  double omega_u_ghz = 0.0;
  double omega_a_bar_ghz = 0.0;
  double theta = 0.0;
  double kappa_l_mhz = 0.0;
  double kappa_u_mhz = 0.0;
};

struct FluxMap {
  std::vector<FluxPoint> tracks;
  std::vector<SpectroscopyCurve> curves;  // unit-drive lineshapes per flux
};

// Full-circuit polariton map over the flux list: per flux, the labeled
// single-excitation polariton lines set the peak centers and the
// hybridization angle sets widths/weights of the synthesized curve.
FluxMap flux_map(const CircuitParams& cp, const std::vector<double>& fluxes,
                 const std::vector<double>& grid_ghz, double kappa_c_mhz,
                 double kappa_a_mhz, std::array<int, 3> dims = {8, 8, 8});

// Two-level avoided-crossing fit to peak tracks. Solves the linearized
// least-squares system for (omega_c, g_ac) using the exact relations
//   d^2 = (s - 2 w_c)^2 + 4 g^2,  s = w_l + w_u,  d = w_u - w_l,
// then recovers the bare ancilla line per flux from the sum identity.
// Requires tracks that bracket the crossing.
struct CrossingFit {
  double g_ac_ghz = 0.0;
  double omega_c_ghz = 0.0;
  std::vector<double> omega_a_bar_ghz;  // per input point
  double residual_norm = 0.0;           // on the d^2 relation, GHz^2
};

CrossingFit extract_avoided_crossing(const std::vector<FluxPoint>& tracks);

// Fits both curves and reports the per-polariton center differences
// (e minus g): the full conditional shifts 2 chi_l and 2 chi_u.
struct ConditionalShift {
  double two_chi_l_ghz = 0.0;
  double two_chi_u_ghz = 0.0;
  PeakFit lower_g, upper_g, lower_e, upper_e;
};

ConditionalShift conditional_shift(const SpectroscopyCurve& curve_g,
                                   const SpectroscopyCurve& curve_e);

// CSV interfaces. Curves: "flux,omega_d_ghz,magnitude", one row per sample,
// consecutive curves delimited by the frequency grid resetting. Peaks:
// "flux,center_ghz,width_mhz,weight" with two rows (lower, upper) per flux.
void write_curves_csv(const std::string& path,
                      const std::vector<SpectroscopyCurve>& curves);
std::vector<SpectroscopyCurve> read_curves_csv(const std::string& path);
void write_peaks_csv(const std::string& path,
                     const std::vector<FluxPoint>& tracks);

}  // namespace xkerr
