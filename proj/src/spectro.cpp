#include "xkerr/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "xkerr/dynamics.hpp"

namespace xkerr {

std::vector<double> SpectroscopyCurve::magnitude() const {
  std::vector<double> out(amplitude.size());
  for (std::size_t i = 0; i < amplitude.size(); ++i)
    out[i] = std::abs(amplitude[i]);
  return out;
}

void SpectroscopyCurve::validate() const {
  if (omega_d.size() != amplitude.size())
    throw std::invalid_argument(
        "SpectroscopyCurve: grid and samples differ in length");
  if (omega_d.size() < 2)
    throw std::invalid_argument("SpectroscopyCurve: need at least two points");
  for (std::size_t i = 1; i < omega_d.size(); ++i)
    if (!(omega_d[i] > omega_d[i - 1]))
      throw std::invalid_argument(
          "SpectroscopyCurve: grid must be strictly increasing");
  for (const Complex& a : amplitude)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw std::invalid_argument("SpectroscopyCurve: samples must be finite");
}

SpectroscopyCurve sweep_frequency(const SystemParams& sp,
                                  const std::vector<double>& grid_ghz,
                                  int sigma_z) {
  SpectroscopyCurve curve;
  curve.omega_d = grid_ghz;
  curve.sigma_z = sigma_z;
  curve.amplitude.reserve(grid_ghz.size());
  for (double w : grid_ghz)
    curve.amplitude.push_back(transmission_amplitude(sp, w, sigma_z));
  curve.validate();
  return curve;
}

// ---------------------------------------------------------------------------
// Two-Lorentzian fit
// ---------------------------------------------------------------------------

namespace {

// p = {c_l, w_l, a_l, c_u, w_u, a_u}; centers/widths in GHz.
double two_lorentzian_mag(const std::array<double, 6>& p, double w) {
  const Complex dl(0.5 * std::abs(p[1]), -(w - p[0]));
  const Complex du(0.5 * std::abs(p[4]), -(w - p[3]));
  return std::abs(std::abs(p[2]) / dl + std::abs(p[5]) / du);
}

struct PeakPick {
  double center, width, height, reach;
};

// Short moving average so single-sample noise spikes do not masquerade as
// maxima; the result only seeds the fit, so the mild broadening is harmless.
std::vector<double> smooth_samples(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  const int half = std::max(1, std::min(3, n / 400));
  std::vector<double> out(y.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) acc += y[k];
    out[i] = acc / (hi - lo + 1);
  }
  return out;
}

// Local maxima with half-maximum width estimates, strongest first, keeping
// only maxima outside the half-height span of every stronger one (noise
// wiggles on a peak top all sit inside that span). For the magnitude of a
// Lorentzian the half-height points lie sqrt(3)/2 linewidths from center.
std::vector<PeakPick> pick_peaks(const std::vector<double>& w,
                                 const std::vector<double>& y_raw) {
  const std::vector<double> y = smooth_samples(y_raw);
  std::vector<PeakPick> cand;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] >= y[i - 1] && y[i] > y[i + 1])) continue;
    const double half = 0.5 * y[i];
    std::size_t lo = i, hi = i;
    while (lo > 0 && y[lo] > half) --lo;
    while (hi + 1 < y.size() && y[hi] > half) ++hi;
    const double span = w[hi] - w[lo];  // ~ sqrt(3) x linewidth
    const double width = std::max(span / std::sqrt(3.0), w[1] - w[0]);
    const double reach = std::max(w[hi] - w[i], w[i] - w[lo]);
    cand.push_back({w[i], width, y[i], reach});
  }
  std::sort(cand.begin(), cand.end(),
            [](const PeakPick& a, const PeakPick& b) {
              return a.height > b.height;
            });
  std::vector<PeakPick> picks;
  for (const PeakPick& c : cand) {
    bool shadowed = false;
    for (const PeakPick& p : picks)
      if (std::abs(c.center - p.center) <= p.reach) shadowed = true;
    if (!shadowed) picks.push_back(c);
    if (picks.size() == 2) break;
  }
  return picks;
}

}  // namespace

std::pair<PeakFit, PeakFit> fit_two_lorentzians(
    const SpectroscopyCurve& curve) {
  curve.validate();
  const std::vector<double>& w = curve.omega_d;
  const std::vector<double> y = curve.magnitude();
  const std::size_t n = w.size();
  if (n < 12)
    throw std::invalid_argument(
        "fit_two_lorentzians: need at least 12 samples");

  const std::vector<PeakPick> picks = pick_peaks(w, y);
  if (picks.size() < 2)
    throw std::runtime_error(
        "fit_two_lorentzians: fewer than two resolvable maxima");
  const PeakPick& p1 = picks[0];
  const PeakPick& p2 = picks[1];
  if (std::abs(p1.center - p2.center) <= 0.25 * (p1.width + p2.width))
    throw std::runtime_error(
        "fit_two_lorentzians: maxima closer than a quarter of the summed "
        "widths; peaks are not resolvable");

  std::array<double, 6> p;
  const bool first_lower = p1.center < p2.center;
  const PeakPick& lo = first_lower ? p1 : p2;
  const PeakPick& hi = first_lower ? p2 : p1;
  p = {lo.center, lo.width, lo.height * lo.width / 2.0,
       hi.center, hi.width, hi.height * hi.width / 2.0};

  auto cost_of = [&](const std::array<double, 6>& q) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = two_lorentzian_mag(q, w[i]) - y[i];
      c += r * r;
    }
    return c;
  };

  // Damped least squares with a multiplicative trust parameter and numeric
  // forward-difference Jacobian.
  Eigen::MatrixXd jac(n, 6);
  Eigen::VectorXd resid(n);
  double cost = cost_of(p);
  double lambda = 1e-3;
  Eigen::MatrixXd jtj_final = Eigen::MatrixXd::Zero(6, 6);

  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t i = 0; i < n; ++i)
      resid(i) = two_lorentzian_mag(p, w[i]) - y[i];
    for (int j = 0; j < 6; ++j) {
      const double h = 1e-6 * std::max(std::abs(p[j]), 1e-3);
      std::array<double, 6> q = p;
      q[j] += h;
      for (std::size_t i = 0; i < n; ++i)
        jac(i, j) = (two_lorentzian_mag(q, w[i]) - resid(i) - y[i]) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;
    jtj_final = jtj;

    bool improved = false;
    bool stationary = false;
    while (!improved && !stationary) {
      Eigen::MatrixXd damped = jtj;
      for (int j = 0; j < 6; ++j)
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      std::array<double, 6> q = p;
      for (int j = 0; j < 6; ++j) q[j] += step(j);
      const double new_cost = cost_of(q);
      if (std::isfinite(new_cost) && new_cost < cost) {
        const double rel = (cost - new_cost) / std::max(cost, 1e-300);
        p = q;
        cost = new_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (rel < 1e-10 || cost < 1e-28) iter = 200;  // converged
      } else {
        lambda *= 10.0;
        // Even a bare gradient step fails to descend: a (local) minimum
        // within floating-point resolution.
        if (lambda > 1e14) stationary = true;
      }
    }
    if (stationary) break;
  }
  if (!std::isfinite(cost))
    throw std::runtime_error("fit_two_lorentzians: fit diverged");

  // Canonical signs and ordering.
  p[1] = std::abs(p[1]);
  p[2] = std::abs(p[2]);
  p[4] = std::abs(p[4]);
  p[5] = std::abs(p[5]);
  if (p[0] > p[3]) {
    std::swap(p[0], p[3]);
    std::swap(p[1], p[4]);
    std::swap(p[2], p[5]);
  }

  // Covariance diagnostics from the Gauss-Newton normal matrix.
  const double dof = static_cast<double>(n) - 6.0;
  const double sigma2 = dof > 0 ? cost / dof : 0.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(6, 6);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj_final);
  if (lu.isInvertible()) cov = sigma2 * lu.inverse();

  auto make_fit = [&](int base) {
    PeakFit f;
    f.center_ghz = p[base];
    f.width_mhz = 1e3 * p[base + 1];
    f.weight = Complex(p[base + 2], 0.0);
    f.residual_norm = std::sqrt(cost);
    f.center_se_ghz = std::sqrt(std::max(0.0, cov(base, base)));
    f.width_se_mhz = 1e3 * std::sqrt(std::max(0.0, cov(base + 1, base + 1)));
    return f;
  };
  return {make_fit(0), make_fit(3)};
}

// ---------------------------------------------------------------------------
// Flux map
// ---------------------------------------------------------------------------

FluxMap flux_map(const CircuitParams& cp, const std::vector<double>& fluxes,
                 const std::vector<double>& grid_ghz, double kappa_c_mhz,
                 double kappa_a_mhz, std::array<int, 3> dims) {
  if (fluxes.empty())
    throw std::invalid_argument("flux_map: empty flux list");
  if (kappa_c_mhz < 0.0 || kappa_a_mhz < 0.0)
    throw std::invalid_argument("flux_map: decay rates must be >= 0");

  FluxMap map;
  map.tracks.reserve(fluxes.size());
  for (double flux : fluxes) {
    const Operator h = build_full_hamiltonian(cp, flux, dims);
    const LabeledSpectrum spec = label_spectrum(h, flux);
    const double e0 = spec.find({0, 0, 0}).energy_ghz;
    const double e_anc = spec.find({0, 1, 0}).energy_ghz - e0;
    const double e_cav = spec.find({0, 0, 1}).energy_ghz - e0;

    FluxPoint pt;
    pt.flux = flux;
    pt.omega_l_ghz = std::min(e_anc, e_cav);
    pt.omega_u_ghz = std::max(e_anc, e_cav);
    pt.omega_a_bar_ghz = pt.omega_l_ghz + pt.omega_u_ghz - cp.omega_c_ghz;
    pt.theta = 0.5 * std::atan2(2.0 * cp.g_ac_ghz,
                                pt.omega_a_bar_ghz - cp.omega_c_ghz);
    const double s2 = std::sin(pt.theta) * std::sin(pt.theta);
    const double c2 = 1.0 - s2;
    pt.kappa_l_mhz = kappa_c_mhz * c2 + kappa_a_mhz * s2;
    pt.kappa_u_mhz = kappa_c_mhz * s2 + kappa_a_mhz * c2;
    map.tracks.push_back(pt);

    if (!grid_ghz.empty()) {
      SpectroscopyCurve curve;
      curve.flux = flux;
      curve.sigma_z = 0;
      curve.omega_d = grid_ghz;
      curve.amplitude.reserve(grid_ghz.size());
      const Complex mi(0.0, -1.0);
      for (double wd : grid_ghz) {
        // Unit (1 MHz) drive two-pole lineshape in GHz form.
        const Complex dl(0.5e-3 * pt.kappa_l_mhz, -(wd - pt.omega_l_ghz));
        const Complex du(0.5e-3 * pt.kappa_u_mhz, -(wd - pt.omega_u_ghz));
        curve.amplitude.push_back(mi * (1e-3 * c2 / dl + 1e-3 * s2 / du));
      }
      curve.validate();
      map.curves.push_back(std::move(curve));
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// Avoided crossing
// ---------------------------------------------------------------------------

CrossingFit extract_avoided_crossing(const std::vector<FluxPoint>& tracks) {
  if (tracks.size() < 3)
    throw std::invalid_argument(
        "extract_avoided_crossing: need at least three flux points");

  // d^2 - s^2 = -2 s x + z with x = 2 w_c and z = x^2 + 4 g^2: linear least
  // squares in (x, z).
  Eigen::MatrixXd a(tracks.size(), 2);
  Eigen::VectorXd b(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const double s = tracks[i].omega_l_ghz + tracks[i].omega_u_ghz;
    const double d = tracks[i].omega_u_ghz - tracks[i].omega_l_ghz;
    a(i, 0) = -2.0 * s;
    a(i, 1) = 1.0;
    b(i) = d * d - s * s;
  }
  // QR on the design matrix itself: the two columns are nearly collinear
  // over a narrow flux window, and normal equations would square that
  // conditioning.
  const Eigen::VectorXd xz = a.colPivHouseholderQr().solve(b);
  const double x = xz(0);
  const double z = xz(1);
  const double g2 = 0.25 * (z - x * x);
  if (!(g2 > 0.0))
    throw std::runtime_error(
        "extract_avoided_crossing: fitted coupling is not positive; tracks "
        "do not describe an avoided crossing");

  CrossingFit fit;
  fit.omega_c_ghz = 0.5 * x;
  fit.g_ac_ghz = std::sqrt(g2);
  fit.residual_norm = (a * xz - b).norm();

  double min_det = std::numeric_limits<double>::infinity();
  double max_det = -min_det;
  fit.omega_a_bar_ghz.reserve(tracks.size());
  for (const FluxPoint& t : tracks) {
    const double wa = t.omega_l_ghz + t.omega_u_ghz - fit.omega_c_ghz;
    fit.omega_a_bar_ghz.push_back(wa);
    const double det = wa - fit.omega_c_ghz;
    min_det = std::min(min_det, det);
    max_det = std::max(max_det, det);
  }
  if (!(min_det <= 0.0 && max_det >= 0.0))
    throw std::runtime_error(
        "extract_avoided_crossing: tracks do not bracket the crossing");
  return fit;
}

// ---------------------------------------------------------------------------
// Conditional shift
// ---------------------------------------------------------------------------

ConditionalShift conditional_shift(const SpectroscopyCurve& curve_g,
                                   const SpectroscopyCurve& curve_e) {
  ConditionalShift out;
  std::tie(out.lower_g, out.upper_g) = fit_two_lorentzians(curve_g);
  std::tie(out.lower_e, out.upper_e) = fit_two_lorentzians(curve_e);
  out.two_chi_l_ghz = out.lower_e.center_ghz - out.lower_g.center_ghz;
  out.two_chi_u_ghz = out.upper_e.center_ghz - out.upper_g.center_ghz;
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_curves_csv(const std::string& path,
                      const std::vector<SpectroscopyCurve>& curves) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_curves_csv: cannot open " + path);
  out << "flux,omega_d_ghz,magnitude\n";
  out.precision(17);
  for (const SpectroscopyCurve& c : curves)
    for (std::size_t i = 0; i < c.omega_d.size(); ++i)
      out << c.flux << ',' << c.omega_d[i] << ',' << std::abs(c.amplitude[i])
          << '\n';
  if (!out) throw std::runtime_error("write_curves_csv: write failed");
}

std::vector<SpectroscopyCurve> read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_curves_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("flux,omega_d_ghz,magnitude", 0) != 0)
    throw std::runtime_error(
        "read_curves_csv: missing 'flux,omega_d_ghz,magnitude' header in " +
        path);

  std::vector<SpectroscopyCurve> curves;
  double prev_w = std::numeric_limits<double>::infinity();
  double prev_flux = 0.0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f_str, w_str, m_str;
    if (!std::getline(row, f_str, ',') || !std::getline(row, w_str, ',') ||
        !std::getline(row, m_str))
      throw std::runtime_error("read_curves_csv: malformed row at line " +
                               std::to_string(line_no));
    const double flux = std::stod(f_str);
    const double wd = std::stod(w_str);
    const double mag = std::stod(m_str);
    if (curves.empty() || wd <= prev_w || flux != prev_flux) {
      curves.emplace_back();
      curves.back().flux = flux;
    }
    curves.back().omega_d.push_back(wd);
    curves.back().amplitude.push_back(Complex(mag, 0.0));
    prev_w = wd;
    prev_flux = flux;
  }
  for (const SpectroscopyCurve& c : curves) c.validate();
  return curves;
}

void write_peaks_csv(const std::string& path,
                     const std::vector<FluxPoint>& tracks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_peaks_csv: cannot open " + path);
  out << "flux,center_ghz,width_mhz,weight\n";
  out.precision(17);
  for (const FluxPoint& t : tracks) {
    const double s2 = std::sin(t.theta) * std::sin(t.theta);
    out << t.flux << ',' << t.omega_l_ghz << ',' << t.kappa_l_mhz << ','
        << (1.0 - s2) << '\n';
    out << t.flux << ',' << t.omega_u_ghz << ',' << t.kappa_u_mhz << ',' << s2
        << '\n';
  }
  if (!out) throw std::runtime_error("write_peaks_csv: write failed");
}

}  // namespace xkerr
