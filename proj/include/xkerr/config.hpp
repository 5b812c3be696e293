#pragma once

// Run configuration: a single JSON file describing the circuit, the system
// rates, readout/protocol settings, and sweep grids. Loading validates
// structure and reports problems by field path; resolve_system() merges the
// circuit-derived frequencies with the explicitly configured ones.
//
// Units are fixed per field and encoded in the name: GHz for frequencies
// and couplings (_ghz), linear MHz for rates (_mhz), ns for times (_ns),
// fF (_ff) and nH (_nh) for circuit elements; probabilities and eta are
// dimensionless.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xkerr/circuit.hpp"
#include "xkerr/imperfect.hpp"
#include "xkerr/polariton.hpp"

namespace xkerr {

inline constexpr char kToolkitVersion[] = "0.1.0";

// "system" section: decay rates, drive, and efficiency always come from the
// file; the five frequencies are optional and fall back to the circuit chain.
struct SystemConfig {
  std::optional<double> omega_q_prime_ghz;
  std::optional<double> omega_a_prime_ghz;
  std::optional<double> omega_c_ghz;
  std::optional<double> g_zz_ghz;
  std::optional<double> g_ac_ghz;
  double kappa_c_mhz = 0.0;
  double kappa_a_mhz = 0.0;
  double kappa_q_mhz = 0.0;  // accepted directly or as t1_ns
  double gamma_q_mhz = 0.0;  // accepted directly or as t2_ns
  double drive_omega_mhz = 0.0;
  double drive_omega_d_ghz = 0.0;
  double eta = 1.0;
  bool present = false;
};

struct ReadoutConfig {
  double n_bar = 2.0;
  double window_ns = 50.0;
  double duration_ns = 1000.0;
  int n_records = 1000;
  double thermal_pop = 0.0;
  double p_pi_error = 0.0;
  double p_leak_f = 0.0;
  double herald_ns = 50.0;
  double wait_ns = 300.0;
  double measure_ns = 50.0;
  double qnd_start_ns = 150.0;
  double qnd_stop_ns = 1000.0;
  double qnd_window_ns = 30.0;
  bool noiseless = false;
  bool heralding = true;
  std::optional<double> eta;  // overrides system.eta when present
  std::optional<std::uint64_t> seed;
};

struct SweepConfig {
  // either an explicit grid or lo/hi/step; resolved to a grid at load time
  std::vector<double> frequency_grid_ghz;
  std::vector<double> flux_list;
};

struct RunConfig {
  std::optional<CircuitParams> circuit;
  SystemConfig system;
  ReadoutConfig readout;
  SweepConfig sweep;
  ImperfectionParams imperfections;
  bool imperfections_present = false;
  double flux = 0.0;          // bias point for single-flux commands
  std::string output_dir = ".";
  std::string canonical_json; // sorted-key dump of the parsed file
};

// Parses and validates a config file. Structural problems (wrong type,
// unknown or missing field, bad values) throw std::invalid_argument naming
// the offending field path, e.g. "config: readout.n_records must be a
// positive integer".
RunConfig load_run_config(const std::string& path);

// SystemParams for dynamics/spectroscopy runs: configured frequencies win,
// missing ones are derived from the circuit section at the integer flux
// index rc.flux. Throws std::invalid_argument when neither source can
// provide a field, or on hard physics violations (validate_system).
SystemParams resolve_system(const RunConfig& rc);

// FNV-1a 64-bit hash of the canonical (sorted-key) JSON text, hex-encoded.
std::string config_hash_hex(const RunConfig& rc);

// Run provenance written beside every command's data files. Deterministic:
// no timestamps, so a rerun with the same inputs is byte-identical.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace xkerr
