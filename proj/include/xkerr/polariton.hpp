#pragma once

// Closed-form polariton model of the ancilla-cavity pair conditioned on the
// qubit state: hybridization angle, branch frequencies, cross-Kerr shifts,
// decay mixing, and the diagonal effective Hamiltonian
//   H = (wq'/2) sz + sum_j w_j n_j + sz sum_j chi_j n_j
// on (qubit, lower polariton, upper polariton).

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "xkerr/qops.hpp"

namespace xkerr {

struct DriveParams {
  double omega_mhz = 0.0;   // drive strength (MHz)
  double omega_d_ghz = 0.0; // drive frequency (GHz)
};

struct SystemParams {
  double omega_q_prime = 0.0;  // renormalized qubit frequency (GHz)
  double omega_a_prime = 0.0;  // renormalized ancilla frequency (GHz)
  double omega_c = 0.0;        // cavity frequency (GHz)
  double g_zz = 0.0;           // cross-Kerr strength (GHz)
  double g_ac = 0.0;           // ancilla-cavity coupling (GHz)
  double kappa_c = 0.0;        // cavity decay (MHz)
  double kappa_a = 0.0;        // ancilla decay (MHz)
  double kappa_q = 0.0;        // qubit relaxation 1/T1 (MHz)
  double gamma_q = 0.0;        // qubit total dephasing 1/T2* (MHz)
  DriveParams drive;
  double eta = 1.0;            // measurement quantum efficiency, in (0, 1]
};

// Linear rate in MHz whose Lindblad decay reproduces exp(-t/characteristic_ns):
// rate = 1000 / (2 pi t).
double rate_mhz_from_time_ns(double t_ns);

// Throws std::invalid_argument on hard violations (negative rates, eta out of
// (0,1]); returns human-readable warnings for soft issues such as weak
// ancilla-cavity hybridization.
std::vector<std::string> validate_system(const SystemParams& sp);

struct PolaritonParams {
  double theta = 0.0;         // hybridization angle (rad), in (0, pi/2)
  double omega_l_bare = 0.0;  // unconditional branch frequencies (GHz)
  double omega_u_bare = 0.0;
  double omega_l = 0.0;       // qubit-conditional branch frequencies (GHz)
  double omega_u = 0.0;
  double chi_l = 0.0;         // conditional shifts per sigma_z flip (GHz)
  double chi_u = 0.0;
  double kappa_l = 0.0;       // branch decay rates (MHz)
  double kappa_u = 0.0;
  double omega_drive_l = 0.0; // projected drive strengths (MHz)
  double omega_drive_u = 0.0;
};

// Angle diagonalizing the ancilla-cavity block with the ancilla line shifted
// by the qubit state: theta = (1/2) atan2(2 g_ac, wa' - g_zz sz - wc),
// branch fixed to (0, pi/2); sz = 0 gives the bare angle, exact resonance
// gives pi/4.
double hybridization_angle(double omega_a_prime, double omega_c, double g_ac,
                           double g_zz, int sigma_z);

// Branch parameters conditioned on sigma_z in {-1, 0, +1}.
//
//   theta, chi, kappa, drive projections: evaluated at theta(sigma_z).
//   omega_{l,u}_bare:                     exact normal modes at sigma_z = 0.
//   omega_{l,u} for sigma_z = +-1:        the model's linear-in-sigma_z
//       frequencies, anchored on the exact sigma_z = -1 normal modes:
//       omega_j(sz) = omega_j_exact(-1) + chi_j(-1) * (sz + 1).
//   omega_{l,u} for sigma_z = 0:          the bare values.
//
// The linear anchoring keeps omega_l + omega_u - omega_c = wa' - g_zz sz exact
// for every sigma_z while matching the measured ground-state branch exactly.
// With use_bare_angle all theta-dependent quantities use theta(0) instead
// (comparison variant).
PolaritonParams polariton_params(const SystemParams& sp, int sigma_z,
                                 bool use_bare_angle = false);

// Exact per-branch normal modes at theta(sigma_z), mu = wa' - g_zz sz: the
// full rediagonalization the linear model approximates. Diagnostic companion
// to polariton_params.
PolaritonParams exact_branch_params(const SystemParams& sp, int sigma_z);

// (kappa_c, kappa_a) from the measured branch rates; ill-conditioned within
// 1e-3 rad of theta = pi/4 (throws std::invalid_argument there).
std::pair<double, double> invert_decays(double kappa_l_mhz, double kappa_u_mhz,
                                        double theta);

// Diagonal model Hamiltonian on (qubit=2, lower, upper); dims[0] must be 2.
Operator effective_hamiltonian(const SystemParams& sp,
                               std::array<int, 3> dims = {2, 4, 4});

}  // namespace xkerr
