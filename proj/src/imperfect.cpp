#include "xkerr/imperfect.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <stdexcept>

#include "xkerr/constants.hpp"
#include "xkerr/qops.hpp"

namespace xkerr {

void ImperfectionParams::validate() const {
  if (!(std::abs(d_j) < 1.0))
    throw std::invalid_argument("ImperfectionParams.d_j must satisfy |d_j| < 1");
  if (!(std::abs(theta_m_deg) <= 90.0))
    throw std::invalid_argument(
        "ImperfectionParams.theta_m_deg must satisfy |theta_m| <= 90");
}

double g_qa_from_asymmetry(double d_j, double omega_q_harm_ghz,
                           double omega_a_harm_ghz, double inductance_ratio) {
  if (!(std::abs(d_j) < 1.0))
    throw std::invalid_argument("g_qa_from_asymmetry: |d_j| must be < 1");
  if (omega_q_harm_ghz <= 0.0 || omega_a_harm_ghz <= 0.0)
    throw std::invalid_argument(
        "g_qa_from_asymmetry: mode frequencies must be > 0");
  if (inductance_ratio <= 0.0)
    throw std::invalid_argument(
        "g_qa_from_asymmetry: inductance ratio must be > 0");
  return -(d_j / 2.0) *
         std::sqrt(omega_q_harm_ghz * omega_a_harm_ghz / inductance_ratio);
}

double g_qa_at(const CircuitParams& cp, double d_j, int n) {
  const DerivedParams dp = derive_params(cp, n);
  const double l_a = coupling_inductance(cp, static_cast<double>(n)).l_a_nh;
  const double r = 1.0 + 2.0 * cp.josephson_inductance_nh() / l_a;
  return g_qa_from_asymmetry(d_j, dp.omega_q_harm, dp.omega_a_harm, r);
}

double g_qc_from_misalignment(double theta_m_deg, double g_ac_ghz) {
  if (!(std::abs(theta_m_deg) < 90.0))
    throw std::invalid_argument(
        "g_qc_from_misalignment: |theta_m| must be < 90 degrees");
  if (g_ac_ghz < 0.0)
    throw std::invalid_argument("g_qc_from_misalignment: g_ac must be >= 0");
  return std::tan(theta_m_deg * kPi / 180.0) * g_ac_ghz;
}

namespace {

PurcellRate rate_from_gamma(double gamma_mhz) {
  PurcellRate out;
  out.gamma_mhz = gamma_mhz;
  if (gamma_mhz > 0.0) {
    out.t1_ns = 1.0 / mhz_to_rad_per_ns(gamma_mhz);
    out.unbounded = false;
  } else {
    out.t1_ns = std::numeric_limits<double>::infinity();
    out.unbounded = true;
  }
  return out;
}

}  // namespace

PurcellRate purcell_analytic(double kappa_c_mhz, double kappa_a_mhz,
                             double g_qc_ghz, double g_qa_ghz,
                             double delta_qc_ghz, double delta_qa_ghz) {
  if (kappa_c_mhz < 0.0 || kappa_a_mhz < 0.0)
    throw std::invalid_argument("purcell_analytic: kappas must be >= 0");
  if (delta_qc_ghz == 0.0 || delta_qa_ghz == 0.0)
    throw std::invalid_argument("purcell_analytic: detunings must be nonzero");
  const double rc = g_qc_ghz / delta_qc_ghz;
  const double ra = g_qa_ghz / delta_qa_ghz;
  return rate_from_gamma(kappa_c_mhz * rc * rc + kappa_a_mhz * ra * ra);
}

PurcellRate purcell_analytic_at(const CircuitParams& cp,
                                const ImperfectionParams& ip, int n,
                                double kappa_c_mhz, double kappa_a_mhz) {
  ip.validate();
  const DerivedParams dp = derive_params(cp, n);
  const double g_qc = g_qc_from_misalignment(ip.theta_m_deg, cp.g_ac_ghz);
  const double g_qa = g_qa_at(cp, ip.d_j, n);
  const double delta_qc = dp.omega_q_prime - dp.omega_c;
  const double delta_qa = dp.omega_q_prime - dp.omega_a_bar;
  return purcell_analytic(kappa_c_mhz, kappa_a_mhz, g_qc, g_qa, delta_qc,
                          delta_qa);
}

PurcellRate purcell_numeric(const CircuitParams& cp,
                            const ImperfectionParams& ip, double flux,
                            double kappa_c_mhz, double kappa_a_mhz,
                            ImperfectionMode mode, std::array<int, 3> dims) {
  ip.validate();
  if (kappa_c_mhz < 0.0 || kappa_a_mhz < 0.0)
    throw std::invalid_argument("purcell_numeric: kappas must be >= 0");

  CircuitParams cpm = cp;
  cpm.d_j = (mode == ImperfectionMode::misalignment) ? 0.0 : ip.d_j;
  cpm.g_qc_ghz = (mode == ImperfectionMode::asymmetry)
                     ? 0.0
                     : g_qc_from_misalignment(ip.theta_m_deg, cp.g_ac_ghz);

  const Operator h = build_full_hamiltonian(cpm, flux, dims);
  const EigResult eig = eig_hermitian(h);

  // Dressed level of maximum overlap with a bare product ket.
  auto dressed_column = [&](const std::vector<int>& occ, double* overlap) {
    const QuantumState bare = basis_ket(h.space, occ);
    Eigen::Index row = 0;
    bare.ket.cwiseAbs().maxCoeff(&row);
    Eigen::Index col = 0;
    double best = -1.0;
    for (Eigen::Index j = 0; j < eig.vectors.cols(); ++j) {
      const double p = std::norm(eig.vectors(row, j));
      if (p > best) {
        best = p;
        col = j;
      }
    }
    *overlap = best;
    return col;
  };

  double overlap_g = 0.0, overlap_e = 0.0;
  const Eigen::Index col_g = dressed_column({0, 0, 0}, &overlap_g);
  const Eigen::Index col_e = dressed_column({1, 0, 0}, &overlap_e);
  if (col_g == col_e)
    throw std::runtime_error(
        "purcell_numeric: ground and excited labels collapsed onto one "
        "eigenstate; increase truncation");

  const Vector psi_g = eig.vectors.col(col_g);
  const Vector psi_e = eig.vectors.col(col_e);
  const Operator a_anc = ladder(h.space, 1);
  const Operator a_cav = ladder(h.space, 2);
  const std::complex<double> me_a = (psi_g.adjoint() * a_anc.matrix * psi_e).value();
  const std::complex<double> me_c = (psi_g.adjoint() * a_cav.matrix * psi_e).value();

  PurcellRate out = rate_from_gamma(kappa_c_mhz * std::norm(me_c) +
                                    kappa_a_mhz * std::norm(me_a));
  out.label_overlap = std::min(overlap_g, overlap_e);
  out.ambiguous = out.label_overlap < 0.5;
  return out;
}

std::vector<PurcellPoint> purcell_flux_table(
    const CircuitParams& cp, const ImperfectionParams& ip,
    const std::vector<double>& fluxes, double kappa_c_mhz, double kappa_a_mhz,
    std::array<int, 3> dims) {
  std::vector<PurcellPoint> out;
  out.reserve(fluxes.size());
  for (double flux : fluxes) {
    PurcellPoint p;
    p.flux = flux;
    p.t1_asym_ns = purcell_numeric(cp, ip, flux, kappa_c_mhz, kappa_a_mhz,
                                   ImperfectionMode::asymmetry, dims)
                       .t1_ns;
    p.t1_misalign_ns = purcell_numeric(cp, ip, flux, kappa_c_mhz, kappa_a_mhz,
                                       ImperfectionMode::misalignment, dims)
                           .t1_ns;
    p.t1_both_ns = purcell_numeric(cp, ip, flux, kappa_c_mhz, kappa_a_mhz,
                                   ImperfectionMode::both, dims)
                       .t1_ns;
    out.push_back(p);
  }
  return out;
}

void write_purcell_csv(const std::string& path,
                       const std::vector<PurcellPoint>& points) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "flux,t1_measured_ns,t1_asym_ns,t1_misalign_ns,t1_both_ns\n";
  for (const PurcellPoint& p : points) {
    os << p.flux << ',';
    if (std::isfinite(p.t1_measured_ns)) os << p.t1_measured_ns;
    os << ',' << p.t1_asym_ns << ',' << p.t1_misalign_ns << ',' << p.t1_both_ns
       << '\n';
  }
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace xkerr
