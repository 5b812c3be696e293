#pragma once

// Driven-dissipative dynamics: Lindblad evolution, steady states, the
// two-polariton input-output response, and synthetic single-shot measurement
// records (conditional cavity response + classical jump process + additive
// Gaussian noise).

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "xkerr/polariton.hpp"
#include "xkerr/qops.hpp"

namespace xkerr {

// ---------------------------------------------------------------------------
// Master-equation models
// ---------------------------------------------------------------------------

struct LindbladModel {
  Operator hamiltonian;          // GHz (linear); already in the drive frame
  std::vector<JumpSpec> jumps;   // rates in MHz (linear)
  double drive_frame_ghz = 0.0;  // rotating-frame frequency (bookkeeping only)
};

// Polariton-only model for one qubit branch (sigma_z = -1 or +1). sigma_z is
// conserved by the full model, so branch solves on the (lower, upper) space
// replace joint solves. The frame rotates at the drive frequency.
LindbladModel branch_lindblad_model(const SystemParams& sp, int sigma_z,
                                    std::array<int, 2> dims = {4, 4});

// Joint qubit x lower x upper model built from the effective Hamiltonian.
// Jump operators: polariton decay (ground-branch rates), qubit relaxation
// kappa_q, and pure dephasing (sigma_z, gamma_phi/2) with
// gamma_phi = gamma_q - kappa_q/2 clamped at zero.
LindbladModel effective_lindblad_model(const SystemParams& sp,
                                       std::array<int, 3> dims = {2, 4, 4});

// Time evolution of rho0 through `t_grid` (ns, ascending, first entry = t of
// rho0). Embedded Dormand-Prince 5(4) pairs with local error kept below
// 1e-8 per unit trace; trace/hermiticity/positivity are revalidated on every
// returned state. Throws (with step diagnostics) if the step size collapses.
std::vector<QuantumState> evolve(const LindbladModel& model,
                                 const QuantumState& rho0,
                                 const std::vector<double>& t_grid);

// Nullspace steady state via SVD. Requires a unique null vector: the
// second-smallest singular value must exceed 1e-10 x max(1, sigma_max),
// otherwise a degenerate-steady-state error is raised. The result satisfies
// L rho_ss = 0 within 1e-10 and has unit trace.
QuantumState steady_state(const LindbladModel& model);

// ---------------------------------------------------------------------------
// Input-output response
// ---------------------------------------------------------------------------

// Weak-drive transmission amplitude conditioned on the qubit state:
//   t(omega_d) = -i W sin^2(th)/(k_u/2 - i(w_d - w_u))
//              - i W cos^2(th)/(k_l/2 - i(w_d - w_l))
// with every branch parameter taken from polariton_params(sp, sigma_z) and
// all rates/detunings converted to angular 1/ns. The drive amplitude is
// sp.drive.omega_mhz.
Complex transmission_amplitude(const SystemParams& sp, double omega_d_ghz,
                               int sigma_z);

// True when the configured drive satisfies the weak-drive regime the
// two-Lorentzian response assumes (Omega <= 0.05 x min branch linewidth).
bool drive_is_weak(const SystemParams& sp);

// ---------------------------------------------------------------------------
// Synthetic measurement records
// ---------------------------------------------------------------------------

enum class PreparedState { g, e };

struct MeasurementRecord {
  std::vector<double> times;     // uniform ns grid (sample midpoints)
  std::vector<double> i_values;  // in-phase quadrature samples
  PreparedState prepared = PreparedState::g;
  double integration_window_ns = 0.0;  // window the noise is anchored to
  std::vector<double> jump_times;      // ground-truth state-flip times
};

struct ReadoutSpec {
  double n_bar = 2.0;                  // target steady photons, drives Omega
  double integration_window_ns = 50.0; // SNR anchor window
  bool noiseless = false;              // diagnostic switch: skip the AWGN
};

// Continuous-drive records: the qubit state follows a two-level jump process
// (decay 1/T1, thermal excitation p_th/((1-p_th) T1)), the cavity quadrature
// relaxes toward the state-conditioned response through a first-order filter
// with bandwidth kappa_l/2, and white Gaussian noise is added per 1 ns
// sample. Fully deterministic for a given seed; records use independent
// substreams so batches parallelize.
std::vector<MeasurementRecord> simulate_records(
    const SystemParams& sp, PreparedState prepared, int n_records,
    double duration_ns, const ReadoutSpec& readout, double thermal_pop,
    std::uint64_t seed);

// Heralded two-window protocol used by the fidelity pipeline: herald window
// (drive on) -> idle wait (drive off, cavity rings down) -> instantaneous
// pi pulse on "e" records (error p_pi_error leaves the qubit in g, p_leak_f
// leaks to the second excited state, which relaxes at twice the qubit rate
// and pulls the response toward an intermediate level) -> measurement window
// (drive on). Initial state is thermal.
struct ProtocolSpec {
  double herald_ns = 50.0;
  double wait_ns = 300.0;
  double measure_ns = 50.0;
  double p_pi_error = 0.0;  // pi pulse leaves the qubit in g
  double p_leak_f = 0.0;    // pi pulse leaks to the f level
  double thermal_pop = 0.0;
  ReadoutSpec readout;
};

struct ProtocolRecord {
  std::vector<double> herald_times, herald_i;
  std::vector<double> measure_times, measure_i;
  PreparedState prepared = PreparedState::g;  // intended label
};

std::vector<ProtocolRecord> simulate_protocol_records(const SystemParams& sp,
                                                      PreparedState prepared,
                                                      int n_records,
                                                      const ProtocolSpec& spec,
                                                      std::uint64_t seed);

// Conditional response levels and timing constants the synthesizer uses;
// exposed for analysis and tests.
struct RecordModel {
  double omega_d_ghz = 0.0;   // readout drive frequency
  double omega_mhz = 0.0;     // drive amplitude
  double i_ground = 0.0;      // filter target, qubit in g
  double i_excited = 0.0;     // filter target, qubit in e
  double i_leaked = 0.0;      // filter target, qubit in f
  double tau_filter_ns = 0.0; // cavity response time 2/kappa_l
  double sigma_sample = 0.0;  // AWGN sigma per 1 ns sample
  double t1_ns = 0.0;         // qubit lifetime implied by kappa_q
};

RecordModel record_model(const SystemParams& sp, const ReadoutSpec& readout);

// ---------------------------------------------------------------------------
// Record I/O (CSV: time_ns,i_value,prepared; one row per sample, records
// delimited by the time grid resetting)
// ---------------------------------------------------------------------------

void write_records_csv(const std::string& path,
                       const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_csv(const std::string& path);

}  // namespace xkerr
