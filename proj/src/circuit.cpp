#include "xkerr/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xkerr/constants.hpp"

namespace xkerr {

double CircuitParams::josephson_inductance_nh() const {
  if (l_j_nh > 0.0) return l_j_nh;
  // E_J = phi0^2 / L_J with phi0 the reduced flux quantum
  const double e_j_joule = e_j_ghz * 1e9 * kPlanck;
  return kReducedFluxQuantum * kReducedFluxQuantum / e_j_joule * 1e9;
}

void CircuitParams::validate() const {
  if (e_j_ghz <= 0.0) throw std::invalid_argument("CircuitParams.e_j_ghz must be > 0");
  if (std::abs(d_j) >= 1.0)
    throw std::invalid_argument("CircuitParams.d_j must satisfy |d_j| < 1");
  if (c_s_ff <= 0.0) throw std::invalid_argument("CircuitParams.c_s_ff must be > 0");
  if (c_t_ff <= 0.0) throw std::invalid_argument("CircuitParams.c_t_ff must be > 0");
  if (l_a_of_n_nh.empty())
    throw std::invalid_argument("CircuitParams.l_a_of_n_nh must not be empty");
  for (const auto& [n, la] : l_a_of_n_nh)
    if (la <= 0.0)
      throw std::invalid_argument("CircuitParams.l_a_of_n_nh[" + std::to_string(n) +
                                  "] must be > 0");
  if (josephson_inductance_nh() <= 0.0)
    throw std::invalid_argument("CircuitParams.l_j_nh must be > 0");
  const double e_cq = charging_energy_ghz(2.0 * c_s_ff);
  const double e_ca = charging_energy_ghz(2.0 * (c_s_ff + 2.0 * c_t_ff));
  if (e_j_ghz / e_cq <= 20.0 || e_j_ghz / e_ca <= 20.0)
    throw std::invalid_argument(
        "CircuitParams: transmon regime violated, need E_J/E_C > 20");
}

DerivedParams derive_params(const CircuitParams& cp, int n) {
  cp.validate();
  auto it = cp.l_a_of_n_nh.find(n);
  if (it == cp.l_a_of_n_nh.end())
    throw std::invalid_argument("derive_params: no coupling inductance entry for flux index " +
                                std::to_string(n));
  const double l_a = it->second;
  const double l_j = cp.josephson_inductance_nh();
  const double r = 1.0 + 2.0 * l_j / l_a;

  DerivedParams dp;
  dp.e_cq = charging_energy_ghz(2.0 * cp.c_s_ff);
  dp.e_ca = charging_energy_ghz(2.0 * (cp.c_s_ff + 2.0 * cp.c_t_ff));
  dp.omega_q_harm = std::sqrt(8.0 * 2.0 * cp.e_j_ghz * dp.e_cq);
  dp.omega_a_harm = std::sqrt(8.0 * 2.0 * cp.e_j_ghz * r * dp.e_ca);
  dp.alpha_q = -dp.e_cq;
  dp.u_a = -dp.e_ca / r;
  dp.g_zz = std::sqrt(dp.alpha_q * dp.u_a);
  dp.omega_q = dp.omega_q_harm + dp.alpha_q;
  dp.omega_a = dp.omega_a_harm + dp.u_a;
  dp.omega_q_prime = dp.omega_q - dp.g_zz;
  dp.omega_a_prime = dp.omega_a - 2.0 * dp.g_zz;
  dp.omega_a_bar = dp.omega_a - dp.g_zz;
  dp.omega_c = cp.omega_c_ghz;
  dp.g_ac = cp.g_ac_ghz;
  dp.g_qc = cp.g_qc_ghz;
  return dp;
}

InductanceAtFlux coupling_inductance(const CircuitParams& cp, double flux) {
  const double lo_f = std::floor(flux);
  const int lo = static_cast<int>(lo_f);
  if (flux == lo_f) {
    auto it = cp.l_a_of_n_nh.find(lo);
    if (it == cp.l_a_of_n_nh.end())
      throw std::invalid_argument(
          "coupling_inductance: no entry for flux index " + std::to_string(lo));
    return {it->second, false};
  }
  const int hi = lo + 1;
  auto it_lo = cp.l_a_of_n_nh.find(lo);
  auto it_hi = cp.l_a_of_n_nh.find(hi);
  if (it_lo == cp.l_a_of_n_nh.end() || it_hi == cp.l_a_of_n_nh.end())
    throw std::invalid_argument(
        "coupling_inductance: flux " + std::to_string(flux) +
        " needs table entries at indices " + std::to_string(lo) + " and " +
        std::to_string(hi));
  const double t = flux - lo_f;
  return {(1.0 - t) * it_lo->second + t * it_hi->second, true};
}

Operator build_full_hamiltonian(const CircuitParams& cp, double flux,
                                std::array<int, 3> dims) {
  cp.validate();
  for (int d : dims)
    if (d < 4)
      throw std::invalid_argument("build_full_hamiltonian: each mode needs >= 4 levels");

  const double l_a = coupling_inductance(cp, flux).l_a_nh;
  const double lj_over_la = cp.josephson_inductance_nh() / l_a;
  const double e_j = cp.e_j_ghz;
  const double e_cq = charging_energy_ghz(2.0 * cp.c_s_ff);
  const double e_ca = charging_energy_ghz(2.0 * (cp.c_s_ff + 2.0 * cp.c_t_ff));

  // The spectrum is exactly periodic under flux -> flux + 1 (a joint pi shift
  // of both phases restores every term), so reduce the bias first.
  const double delta = kPi * (flux - std::round(flux));

  // Classical minimum of the ancilla potential: sin(phi) + 2(LJ/La)(phi - delta) = 0.
  double phi_min = delta;
  for (int i = 0; i < 200; ++i) {
    const double f = std::sin(phi_min) + 2.0 * lj_over_la * (phi_min - delta);
    const double fp = std::cos(phi_min) + 2.0 * lj_over_la;
    const double step = f / fp;
    phi_min -= step;
    if (std::abs(step) < 1e-15) break;
  }

  // Oscillator bases: qubit about phi_q = 0, ancilla recentered on phi_min with
  // the local curvature setting its zero-point spread.
  const double e_jq_eff = 2.0 * e_j;
  const double e_ja_eff = 2.0 * e_j * (std::cos(phi_min) + 2.0 * lj_over_la);
  if (e_ja_eff <= 0.0)
    throw std::runtime_error("build_full_hamiltonian: non-positive ancilla curvature");
  const double zq = std::pow(8.0 * e_cq / e_jq_eff, 0.25);
  const double za = std::pow(8.0 * e_ca / e_ja_eff, 0.25);

  const auto [dq, da, dc] = dims;
  auto space = qubit_ancilla_cavity_space(dq, da, dc);
  auto lower = [](int d) {
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
  };
  const Matrix q = lower(dq), a = lower(da), c = lower(dc);
  const Matrix iq = Matrix::Identity(dq, dq), ia = Matrix::Identity(da, da),
               ic = Matrix::Identity(dc, dc);

  const Matrix phi_q = zq / std::sqrt(2.0) * (q + Matrix(q.adjoint()));
  const Matrix n_q =
      Complex(0, -1) / (zq * std::sqrt(2.0)) * (q - Matrix(q.adjoint()));
  const Matrix phi_a =
      phi_min * ia + za / std::sqrt(2.0) * (a + Matrix(a.adjoint()));
  const Matrix n_a =
      Complex(0, -1) / (za * std::sqrt(2.0)) * (a - Matrix(a.adjoint()));

  const Matrix cos_q = hermitian_matrix_function(phi_q, std::cos);
  const Matrix sin_q = hermitian_matrix_function(phi_q, std::sin);
  const Matrix cos_a = hermitian_matrix_function(phi_a, std::cos);
  const Matrix sin_a = hermitian_matrix_function(phi_a, std::sin);

  auto kron3 = [](const Matrix& x, const Matrix& y, const Matrix& z) {
    return kron(kron(x, y), z);
  };

  const Matrix phi_a_shift = phi_a - delta * ia;
  Matrix h = 4.0 * e_cq * kron3(n_q * n_q, ia, ic);
  h += 4.0 * e_ca * kron3(iq, n_a * n_a, ic);
  h += -2.0 * e_j * kron3(cos_q, cos_a, ic);
  h += 2.0 * e_j * lj_over_la * kron3(iq, phi_a_shift * phi_a_shift, ic);
  h += -2.0 * e_j * cp.d_j * kron3(sin_q, sin_a, ic);
  h += cp.omega_c_ghz * kron3(iq, ia, Matrix(c.adjoint()) * c);
  h += cp.g_ac_ghz * (kron3(iq, a, Matrix(c.adjoint())) +
                      kron3(iq, Matrix(a.adjoint()), c));
  if (cp.g_qc_ghz != 0.0)
    h += cp.g_qc_ghz *
         kron3(Matrix(q + Matrix(q.adjoint())), ia, Matrix(c + Matrix(c.adjoint())));
  return {space, std::move(h)};
}

Operator build_molecule_hamiltonian(const DerivedParams& dp, std::array<int, 2> dims) {
  const auto [dq, da] = dims;
  if (dq < 4 || da < 4)
    throw std::invalid_argument("build_molecule_hamiltonian: each mode needs >= 4 levels");
  auto space = HilbertSpace::make({{"qubit", dq}, {"ancilla", da}});
  auto lower = [](int d) {
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
  };
  const Matrix q = lower(dq), a = lower(da);
  const Matrix iq = Matrix::Identity(dq, dq), ia = Matrix::Identity(da, da);
  const Matrix xq = q + Matrix(q.adjoint());
  const Matrix xa = a + Matrix(a.adjoint());

  Matrix h = dp.omega_q_harm * kron(Matrix(q.adjoint()) * q, ia);
  h += dp.omega_a_harm * kron(iq, Matrix(a.adjoint()) * a);
  h += dp.alpha_q / 12.0 * kron(xq * xq * xq * xq, ia);
  h += dp.u_a / 12.0 * kron(iq, xa * xa * xa * xa);
  h += -dp.g_zz / 2.0 * kron(xq * xq, xa * xa);
  return {space, std::move(h)};
}

const LabeledLevel& LabeledSpectrum::find(const std::vector<int>& label) const {
  for (const auto& lv : levels)
    if (lv.label == label) return lv;
  std::string want;
  for (int v : label) want += std::to_string(v) + ",";
  throw std::invalid_argument("LabeledSpectrum: no level labeled (" + want + ")");
}

LabeledSpectrum label_spectrum(const Operator& h, double flux) {
  const auto eig = eig_hermitian(h);
  const int n = h.space.total_dim;
  const int n_modes = static_cast<int>(h.space.modes.size());

  // probs(bare, k): squared overlap of eigenvector k with bare product state.
  Eigen::MatrixXd probs = eig.vectors.cwiseAbs2();

  struct Entry {
    double p;
    int bare, k;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (int bare = 0; bare < n; ++bare)
    for (int k = 0; k < n; ++k) entries.push_back({probs(bare, k), bare, k});
  // Descending overlap; ties resolved toward the lower-energy eigenstate.
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.p != y.p) return x.p > y.p;
    if (x.k != y.k) return x.k < y.k;
    return x.bare < y.bare;
  });

  std::vector<int> label_of(n, -1);
  std::vector<double> overlap_of(n, 0.0);
  std::vector<bool> bare_used(n, false), eig_used(n, false);
  int assigned = 0;
  for (const auto& e : entries) {
    if (bare_used[e.bare] || eig_used[e.k]) continue;
    bare_used[e.bare] = true;
    eig_used[e.k] = true;
    label_of[e.k] = e.bare;
    overlap_of[e.k] = e.p;
    if (++assigned == n) break;
  }

  LabeledSpectrum spec;
  spec.flux = flux;
  spec.levels.resize(n);
  for (int k = 0; k < n; ++k) {
    LabeledLevel& lv = spec.levels[k];
    lv.energy_ghz = eig.values(k);
    lv.overlap = overlap_of[k];
    lv.ambiguous = overlap_of[k] < 0.5;
    lv.label.resize(n_modes);
    int rem = label_of[k];
    for (int m = n_modes - 1; m >= 0; --m) {
      lv.label[m] = rem % h.space.modes[m].dim;
      rem /= h.space.modes[m].dim;
    }
  }
  return spec;
}

}  // namespace xkerr
