#include "xkerr/polariton.hpp"

#include <cmath>
#include <stdexcept>

#include "xkerr/constants.hpp"

namespace xkerr {

double rate_mhz_from_time_ns(double t_ns) {
  if (t_ns <= 0.0)
    throw std::invalid_argument("rate_mhz_from_time_ns: time must be > 0");
  return 1e3 / (kTwoPi * t_ns);
}

std::vector<std::string> validate_system(const SystemParams& sp) {
  auto need_nonneg = [](double v, const char* name) {
    if (v < 0.0)
      throw std::invalid_argument(std::string("SystemParams.") + name +
                                  " must be >= 0");
  };
  need_nonneg(sp.kappa_c, "kappa_c");
  need_nonneg(sp.kappa_a, "kappa_a");
  need_nonneg(sp.kappa_q, "kappa_q");
  need_nonneg(sp.gamma_q, "gamma_q");
  need_nonneg(sp.g_zz, "g_zz");
  if (sp.eta <= 0.0 || sp.eta > 1.0)
    throw std::invalid_argument("SystemParams.eta must be in (0, 1]");

  std::vector<std::string> warnings;
  const double detuning = std::abs(sp.omega_a_prime - sp.omega_c);
  if (sp.g_ac <= 0.0)
    warnings.push_back("g_ac <= 0: no ancilla-cavity hybridization");
  else if (2.0 * sp.g_ac < 0.1 * detuning)
    warnings.push_back(
        "weak hybridization: 2 g_ac below 10% of the ancilla-cavity detuning; "
        "polariton readout contrast will be small");
  return warnings;
}

double hybridization_angle(double omega_a_prime, double omega_c, double g_ac,
                           double g_zz, int sigma_z) {
  const double mu = omega_a_prime - g_zz * sigma_z;
  // atan2 keeps the branch in (0, pi) so theta lands in (0, pi/2); at exact
  // resonance this yields pi/4.
  return 0.5 * std::atan2(2.0 * g_ac, mu - omega_c);
}

namespace {

// Exact 2x2 normal modes at angle th with ancilla line mu.
void normal_modes(double mu, double omega_c, double g_ac, double th,
                  double& omega_l, double& omega_u) {
  const double s2 = std::sin(th) * std::sin(th);
  const double c2 = std::cos(th) * std::cos(th);
  const double s2t = std::sin(2.0 * th);
  omega_u = s2 * omega_c + c2 * mu + s2t * g_ac;
  omega_l = c2 * omega_c + s2 * mu - s2t * g_ac;
}

// Fill the theta-dependent fields (chi, kappa, drive projections).
void fill_angle_fields(const SystemParams& sp, double th, PolaritonParams& pp) {
  const double s2 = std::sin(th) * std::sin(th);
  const double c2 = std::cos(th) * std::cos(th);
  pp.theta = th;
  pp.chi_l = -sp.g_zz * s2;
  pp.chi_u = -sp.g_zz * c2;
  pp.kappa_l = sp.kappa_c * c2 + sp.kappa_a * s2;
  pp.kappa_u = sp.kappa_c * s2 + sp.kappa_a * c2;
  pp.omega_drive_l = sp.drive.omega_mhz * std::cos(th);
  pp.omega_drive_u = sp.drive.omega_mhz * std::sin(th);
}

}  // namespace

PolaritonParams polariton_params(const SystemParams& sp, int sigma_z,
                                 bool use_bare_angle) {
  if (sigma_z < -1 || sigma_z > 1)
    throw std::invalid_argument("polariton_params: sigma_z must be -1, 0 or +1");

  const double th_bare =
      hybridization_angle(sp.omega_a_prime, sp.omega_c, sp.g_ac, sp.g_zz, 0);
  const double th_cond =
      hybridization_angle(sp.omega_a_prime, sp.omega_c, sp.g_ac, sp.g_zz, sigma_z);
  const double th = use_bare_angle ? th_bare : th_cond;

  PolaritonParams pp;
  fill_angle_fields(sp, th, pp);
  normal_modes(sp.omega_a_prime, sp.omega_c, sp.g_ac, th_bare, pp.omega_l_bare,
               pp.omega_u_bare);

  if (sigma_z == 0) {
    pp.omega_l = pp.omega_l_bare;
    pp.omega_u = pp.omega_u_bare;
    return pp;
  }

  // Anchor frequencies on the exact ground-branch (sigma_z = -1) normal modes
  // and move linearly in sigma_z with the anchor-angle shifts. This is the
  // model the diagonal Hamiltonian realises, and it preserves the trace
  // identity omega_l + omega_u - omega_c = wa' - g_zz sz exactly.
  const double th_anchor =
      use_bare_angle
          ? th_bare
          : hybridization_angle(sp.omega_a_prime, sp.omega_c, sp.g_ac, sp.g_zz, -1);
  const double mu_minus = sp.omega_a_prime + sp.g_zz;
  double wl_minus, wu_minus;
  normal_modes(mu_minus, sp.omega_c, sp.g_ac, th_anchor, wl_minus, wu_minus);
  const double s2 = std::sin(th_anchor) * std::sin(th_anchor);
  const double chi_l_anchor = -sp.g_zz * s2;
  const double chi_u_anchor = -sp.g_zz * (1.0 - s2);
  pp.omega_l = wl_minus + chi_l_anchor * (sigma_z + 1);
  pp.omega_u = wu_minus + chi_u_anchor * (sigma_z + 1);
  return pp;
}

PolaritonParams exact_branch_params(const SystemParams& sp, int sigma_z) {
  if (sigma_z < -1 || sigma_z > 1)
    throw std::invalid_argument("exact_branch_params: sigma_z must be -1, 0 or +1");
  const double th =
      hybridization_angle(sp.omega_a_prime, sp.omega_c, sp.g_ac, sp.g_zz, sigma_z);
  PolaritonParams pp;
  fill_angle_fields(sp, th, pp);
  const double th_bare =
      hybridization_angle(sp.omega_a_prime, sp.omega_c, sp.g_ac, sp.g_zz, 0);
  normal_modes(sp.omega_a_prime, sp.omega_c, sp.g_ac, th_bare, pp.omega_l_bare,
               pp.omega_u_bare);
  const double mu = sp.omega_a_prime - sp.g_zz * sigma_z;
  normal_modes(mu, sp.omega_c, sp.g_ac, th, pp.omega_l, pp.omega_u);
  return pp;
}

std::pair<double, double> invert_decays(double kappa_l_mhz, double kappa_u_mhz,
                                        double theta) {
  const double c2t = std::cos(2.0 * theta);
  if (std::abs(theta - kPi / 4.0) < 1e-3)
    throw std::invalid_argument(
        "invert_decays: theta within 1e-3 rad of pi/4, inversion ill-conditioned");
  const double s2 = std::sin(theta) * std::sin(theta);
  const double c2 = std::cos(theta) * std::cos(theta);
  const double kappa_c = (-s2 * kappa_u_mhz + c2 * kappa_l_mhz) / c2t;
  const double kappa_a = (c2 * kappa_u_mhz - s2 * kappa_l_mhz) / c2t;
  return {kappa_c, kappa_a};
}

Operator effective_hamiltonian(const SystemParams& sp, std::array<int, 3> dims) {
  if (dims[0] != 2)
    throw std::invalid_argument("effective_hamiltonian: qubit dimension must be 2");
  if (dims[1] < 2 || dims[2] < 2)
    throw std::invalid_argument("effective_hamiltonian: polariton dims must be >= 2");

  // Model frequencies: anchored so the sigma_z = -1 branch is exact.
  auto minus = polariton_params(sp, -1);
  const double omega_l = minus.omega_l + minus.chi_l;  // = anchor + chi
  const double omega_u = minus.omega_u + minus.chi_u;
  const double chi_l = minus.chi_l;
  const double chi_u = minus.chi_u;

  auto space =
      HilbertSpace::make({{"qubit", dims[0]}, {"lower", dims[1]}, {"upper", dims[2]}});
  Matrix sz = Matrix::Zero(2, 2);
  sz(0, 0) = -1.0;
  sz(1, 1) = 1.0;
  const Operator sz_full = embed(space, 0, sz);
  const Operator a_l = ladder(space, "lower");
  const Operator a_u = ladder(space, "upper");
  const Matrix n_l = a_l.matrix.adjoint() * a_l.matrix;
  const Matrix n_u = a_u.matrix.adjoint() * a_u.matrix;

  Matrix h = 0.5 * sp.omega_q_prime * sz_full.matrix;
  h += omega_l * n_l + omega_u * n_u;
  h += sz_full.matrix * (chi_l * n_l + chi_u * n_u);
  return {space, std::move(h)};
}

}  // namespace xkerr
