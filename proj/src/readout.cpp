#include "xkerr/readout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "xkerr/constants.hpp"

namespace xkerr {

namespace {

double phi_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double gauss_pdf(double x, double mean, double sigma) {
  const double u = (x - mean) / sigma;
  return std::exp(-0.5 * u * u) / (sigma * std::sqrt(kTwoPi));
}

}  // namespace

// ---------------------------------------------------------------------------
// weights and integration
// ---------------------------------------------------------------------------

std::vector<double> matched_weights(const std::vector<double>& mean_trace_g,
                                    const std::vector<double>& mean_trace_e) {
  if (mean_trace_g.empty() || mean_trace_g.size() != mean_trace_e.size())
    throw std::invalid_argument(
        "matched_weights: traces must be non-empty and on the same grid");
  std::vector<double> w(mean_trace_g.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::abs(mean_trace_e[i] - mean_trace_g[i]);
    sum += w[i];
  }
  if (!(sum > 0.0))
    throw std::invalid_argument(
        "matched_weights: traces are identical (zero separation)");
  for (double& wi : w) wi /= sum;
  return w;
}

std::vector<double> single_shot_values(
    const std::vector<MeasurementRecord>& records,
    const std::vector<double>& weights) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const MeasurementRecord& rec : records) {
    if (rec.i_values.size() != weights.size())
      throw std::invalid_argument(
          "single_shot_values: record length does not match the weights");
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      acc += weights[i] * rec.i_values[i];
    out.push_back(acc);
  }
  return out;
}

std::vector<double> window_means(const std::vector<MeasurementRecord>& records,
                                 double start_ns, double stop_ns) {
  if (!(stop_ns > start_ns))
    throw std::invalid_argument("window_means: empty window");
  std::vector<double> out;
  out.reserve(records.size());
  for (const MeasurementRecord& rec : records) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      if (rec.times[i] >= start_ns && rec.times[i] < stop_ns) {
        acc += rec.i_values[i];
        ++n;
      }
    }
    if (n == 0)
      throw std::invalid_argument(
          "window_means: a record has no samples inside the window");
    out.push_back(acc / n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// histogram
// ---------------------------------------------------------------------------

void Histogram::validate() const {
  if (edges.size() < 2)
    throw std::invalid_argument("Histogram: need at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("Histogram: edges must be increasing");
  if (counts_g.size() != bins() || counts_e.size() != bins())
    throw std::invalid_argument("Histogram: counts do not match bin count");
  const auto sum = [](const std::vector<std::size_t>& c) {
    return std::accumulate(c.begin(), c.end(), std::size_t{0});
  };
  if (sum(counts_g) != total_g || sum(counts_e) != total_e)
    throw std::invalid_argument("Histogram: totals do not match counts");
}

Histogram make_histogram(const std::vector<double>& values_g,
                         const std::vector<double>& values_e, int bins) {
  if (values_g.empty() || values_e.empty())
    throw std::invalid_argument("make_histogram: both labels need values");

  std::vector<double> pooled = values_g;
  pooled.insert(pooled.end(), values_e.begin(), values_e.end());
  std::sort(pooled.begin(), pooled.end());
  double lo = pooled.front();
  double hi = pooled.back();
  if (lo == hi) {  // degenerate point mass: give it a finite footprint
    lo -= 0.5;
    hi += 0.5;
  }

  if (bins <= 0) {
    // Freedman-Diaconis width on the pooled sample, floored at 60 bins.
    const std::size_t n = pooled.size();
    const double q1 = pooled[n / 4];
    const double q3 = pooled[(3 * n) / 4];
    const double width = 2.0 * (q3 - q1) / std::cbrt(static_cast<double>(n));
    bins = 60;
    if (width > 0.0)
      bins = std::max(60, static_cast<int>(std::ceil((hi - lo) / width)));
  }

  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b)
    h.edges[b] = lo + (hi - lo) * b / static_cast<double>(bins);
  h.counts_g.assign(bins, 0);
  h.counts_e.assign(bins, 0);

  const auto drop = [&](const std::vector<double>& vals,
                        std::vector<std::size_t>& counts) {
    for (double v : vals) {
      int b = static_cast<int>((v - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0, bins - 1);
      ++counts[b];
    }
  };
  drop(values_g, h.counts_g);
  drop(values_e, h.counts_e);
  h.total_g = values_g.size();
  h.total_e = values_e.size();
  h.validate();
  return h;
}

// ---------------------------------------------------------------------------
// Gaussian mixture fit
// ---------------------------------------------------------------------------

namespace {

struct MixtureState {
  double mu[2], sig[2], w[2];
};

double log_likelihood(const MixtureState& s, const std::vector<double>& x,
                      const std::vector<double>& cnt) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = s.w[0] * gauss_pdf(x[i], s.mu[0], s.sig[0]) +
                     s.w[1] * gauss_pdf(x[i], s.mu[1], s.sig[1]);
    ll += cnt[i] * std::log(std::max(p, 1e-300));
  }
  return ll;
}

// Expectation-maximization on (point, multiplicity) data.
MixtureState run_em(MixtureState s, const std::vector<double>& x,
                    const std::vector<double>& cnt, double sigma_floor) {
  const std::size_t m = x.size();
  std::vector<double> resp(m);
  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500; ++iter) {
    double n0 = 0.0, n1 = 0.0, s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double p0 = s.w[0] * gauss_pdf(x[i], s.mu[0], s.sig[0]);
      const double p1 = s.w[1] * gauss_pdf(x[i], s.mu[1], s.sig[1]);
      const double r = p0 + p1 > 0.0 ? p0 / (p0 + p1) : 0.5;
      resp[i] = r;
      n0 += cnt[i] * r;
      n1 += cnt[i] * (1.0 - r);
      s0 += cnt[i] * r * x[i];
      s1 += cnt[i] * (1.0 - r) * x[i];
    }
    const double total = n0 + n1;
    if (n0 <= 0.0 || n1 <= 0.0) break;  // a component lost all mass
    s.mu[0] = s0 / n0;
    s.mu[1] = s1 / n1;
    double v0 = 0.0, v1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d0 = x[i] - s.mu[0];
      const double d1 = x[i] - s.mu[1];
      v0 += cnt[i] * resp[i] * d0 * d0;
      v1 += cnt[i] * (1.0 - resp[i]) * d1 * d1;
    }
    s.sig[0] = std::max(std::sqrt(v0 / n0), sigma_floor);
    s.sig[1] = std::max(std::sqrt(v1 / n1), sigma_floor);
    s.w[0] = n0 / total;
    s.w[1] = n1 / total;
    const double ll = log_likelihood(s, x, cnt);
    if (std::abs(ll - prev) < 1e-10 * (1.0 + std::abs(ll))) break;
    prev = ll;
  }
  return s;
}

MixtureFit fit_mixture_points(const std::vector<double>& x,
                              const std::vector<double>& cnt,
                              double sigma_floor) {
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += cnt[i];
    mean += cnt[i] * x[i];
  }
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    var += cnt[i] * (x[i] - mean) * (x[i] - mean);
  const double sd = std::max(std::sqrt(var / total), sigma_floor);

  // Weighted median for the split initialization.
  double acc = 0.0, median = x.front();
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += cnt[i];
    if (acc >= 0.5 * total) {
      median = x[i];
      break;
    }
  }

  const MixtureState inits[3] = {
      // split around the median
      {{mean - 0.8 * sd, mean + 0.8 * sd}, {0.7 * sd, 0.7 * sd}, {0.5, 0.5}},
      // minority component above
      {{median, median + 2.5 * sd}, {0.8 * sd, 0.8 * sd}, {0.95, 0.05}},
      // minority component below
      {{median - 2.5 * sd, median}, {0.8 * sd, 0.8 * sd}, {0.05, 0.95}},
  };

  MixtureState best{};
  double best_ll = -std::numeric_limits<double>::infinity();
  for (const MixtureState& init : inits) {
    const MixtureState fit = run_em(init, x, cnt, sigma_floor);
    const double ll = log_likelihood(fit, x, cnt);
    if (ll > best_ll) {
      best_ll = ll;
      best = fit;
    }
  }

  MixtureFit out;
  const int lo = best.mu[0] <= best.mu[1] ? 0 : 1;
  out.low = {best.mu[lo], best.sig[lo], best.w[lo]};
  out.high = {best.mu[1 - lo], best.sig[1 - lo], best.w[1 - lo]};
  out.log_likelihood = best_ll;

  // Likelihood-ratio check against the plain single-Gaussian fit: with no
  // resolvable second component the mixture does not beat it meaningfully.
  const MixtureState single = {{mean, mean}, {sd, sd}, {1.0, 0.0}};
  const double ll_single = log_likelihood(single, x, cnt);
  const double w_min = std::min(out.low.weight, out.high.weight);
  if (w_min < 1e-4 || 2.0 * (best_ll - ll_single) < 6.0) {
    out.effectively_single = true;
    out.low = {mean, sd, 1.0};
    out.high = {mean, sd, 0.0};
    out.log_likelihood = ll_single;
  }
  return out;
}

}  // namespace

MixtureFit fit_mixture(const std::vector<double>& values) {
  if (values.size() < 2)
    throw std::invalid_argument("fit_mixture: need at least two values");
  std::vector<double> x = values;
  std::sort(x.begin(), x.end());
  const std::vector<double> cnt(x.size(), 1.0);
  const double range = x.back() - x.front();
  const double floor_sigma =
      range > 0.0 ? 1e-6 * range : std::max(1e-12, 1e-12 * std::abs(x[0]));
  return fit_mixture_points(x, cnt, floor_sigma);
}

DoubleGaussianFit fit_double_gaussian(const Histogram& hist) {
  hist.validate();
  if (hist.total_g < 1000 || hist.total_e < 1000)
    throw std::invalid_argument(
        "fit_double_gaussian: need at least 1000 counts per label");

  std::vector<double> centers(hist.bins());
  for (std::size_t b = 0; b < hist.bins(); ++b)
    centers[b] = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
  const double bin_width = hist.edges[1] - hist.edges[0];

  const auto fit_label = [&](const std::vector<std::size_t>& counts,
                             std::size_t total) {
    std::vector<double> cnt(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b)
      cnt[b] = static_cast<double>(counts[b]);
    MixtureFit fit = fit_mixture_points(centers, cnt, 0.25 * bin_width);
    // rms deviation between observed and model-predicted bin counts,
    // relative to the total count
    double ss = 0.0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
      const double model =
          total * bin_width *
          (fit.low.weight * gauss_pdf(centers[b], fit.low.mean,
                                      fit.low.sigma) +
           fit.high.weight * gauss_pdf(centers[b], fit.high.mean,
                                       fit.high.sigma));
      const double d = cnt[b] - model;
      ss += d * d;
    }
    fit.residual = std::sqrt(ss / counts.size()) / total;
    return fit;
  };

  DoubleGaussianFit out;
  out.g = fit_label(hist.counts_g, hist.total_g);
  out.e = fit_label(hist.counts_e, hist.total_e);
  return out;
}

// ---------------------------------------------------------------------------
// threshold and fidelity
// ---------------------------------------------------------------------------

double gaussian_intersection(const GaussianComponent& a,
                             const GaussianComponent& b) {
  if (!(a.sigma > 0.0) || !(b.sigma > 0.0))
    throw std::invalid_argument("gaussian_intersection: sigma must be > 0");
  const double lo = std::min(a.mean, b.mean);
  const double hi = std::max(a.mean, b.mean);
  if (lo == hi)
    throw std::runtime_error(
        "gaussian_intersection: equal means (degenerate separation)");

  // equal log densities: quadratic in x
  const double ia = 1.0 / (2.0 * a.sigma * a.sigma);
  const double ib = 1.0 / (2.0 * b.sigma * b.sigma);
  const double qa = ia - ib;
  const double qb = -2.0 * (ia * a.mean - ib * b.mean);
  const double qc = ia * a.mean * a.mean - ib * b.mean * b.mean +
                    std::log(a.sigma / b.sigma);

  if (std::abs(qa) < 1e-14 * std::max(ia, ib)) {
    const double x = -qc / qb;
    if (!(x > lo && x < hi))
      throw std::runtime_error(
          "gaussian_intersection: no crossing between the means");
    return x;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0)
    throw std::runtime_error(
        "gaussian_intersection: no crossing between the means");
  const double root = std::sqrt(disc);
  for (double x : {(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)})
    if (x > lo && x < hi) return x;
  throw std::runtime_error(
      "gaussian_intersection: no crossing between the means");
}

FidelityReport fidelity(const std::vector<double>& values_g,
                        const std::vector<double>& values_e,
                        const DoubleGaussianFit& fit) {
  if (values_g.empty() || values_e.empty())
    throw std::invalid_argument("fidelity: both labels need values");

  const GaussianComponent& mg = fit.g.majority();
  const GaussianComponent& me = fit.e.majority();

  FidelityReport rep;
  rep.i_threshold = gaussian_intersection(mg, me);
  rep.n_g = values_g.size();
  rep.n_e = values_e.size();

  // Orientation: which side of the threshold reads "e".
  const bool e_low = me.mean < mg.mean;
  std::size_t wrong_g = 0, wrong_e = 0;
  for (double v : values_g)
    if (e_low ? v <= rep.i_threshold : v >= rep.i_threshold) ++wrong_g;
  for (double v : values_e)
    if (e_low ? v >= rep.i_threshold : v <= rep.i_threshold) ++wrong_e;
  rep.eps_g = static_cast<double>(wrong_g) / rep.n_g;
  rep.eps_e = static_cast<double>(wrong_e) / rep.n_e;

  rep.eps_o_g = phi_tail(std::abs(rep.i_threshold - mg.mean) / mg.sigma);
  rep.eps_o_e = phi_tail(std::abs(rep.i_threshold - me.mean) / me.sigma);
  rep.eps_o = rep.eps_o_g + rep.eps_o_e;
  rep.eps_r_g = rep.eps_g - rep.eps_o_g;
  rep.eps_r_e = rep.eps_e - rep.eps_o_e;

  rep.fidelity = 1.0 - 0.5 * (rep.eps_g + rep.eps_e);
  rep.stat_error =
      0.5 * std::sqrt(rep.eps_g * (1.0 - rep.eps_g) / rep.n_g +
                      rep.eps_e * (1.0 - rep.eps_e) / rep.n_e);
  return rep;
}

// ---------------------------------------------------------------------------
// QND metrics
// ---------------------------------------------------------------------------

QndReport qnd_metrics(const std::vector<MeasurementRecord>& records,
                      double i_threshold, bool e_is_low,
                      const SegmentSpec& spec) {
  if (records.empty())
    throw std::invalid_argument("qnd_metrics: no records");
  if (!(spec.window_ns > 0.0))
    throw std::invalid_argument("qnd_metrics: window must be > 0");
  const int n_seg =
      static_cast<int>(std::floor((spec.stop_ns - spec.start_ns) /
                                  spec.window_ns + 1e-9));
  if (n_seg < 2)
    throw std::invalid_argument(
        "qnd_metrics: window spec yields fewer than 2 segments");

  std::size_t c_gg = 0, c_ge = 0, c_eg = 0, c_ee = 0;
  std::vector<double> acc(n_seg);
  std::vector<std::size_t> num(n_seg);
  for (const MeasurementRecord& rec : records) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(num.begin(), num.end(), 0);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      const double t = rec.times[i] - spec.start_ns;
      if (t < 0.0) continue;
      const int k = static_cast<int>(t / spec.window_ns);
      if (k >= n_seg) continue;
      acc[k] += rec.i_values[i];
      ++num[k];
    }
    bool prev_e = false;
    for (int k = 0; k < n_seg; ++k) {
      if (num[k] == 0)
        throw std::invalid_argument(
            "qnd_metrics: record does not cover the segment window");
      const double mean = acc[k] / num[k];
      const bool is_e = e_is_low ? mean <= i_threshold : mean >= i_threshold;
      if (k > 0) {
        if (prev_e)
          ++(is_e ? c_ee : c_eg);
        else
          ++(is_e ? c_ge : c_gg);
      }
      prev_e = is_e;
    }
  }

  QndReport rep;
  rep.segment_ns = spec.window_ns;
  rep.pairs_from_g = c_gg + c_ge;
  rep.pairs_from_e = c_ee + c_eg;
  // Off-diagonals as complements so each row sums to 1 exactly even after
  // floating-point division.
  if (rep.pairs_from_g > 0) {
    rep.p_gg = static_cast<double>(c_gg) / rep.pairs_from_g;
    rep.p_ge = 1.0 - rep.p_gg;
  }
  if (rep.pairs_from_e > 0) {
    rep.p_ee = static_cast<double>(c_ee) / rep.pairs_from_e;
    rep.p_eg = 1.0 - rep.p_ee;
  }
  rep.q = 0.5 * (rep.p_gg + rep.p_ee);
  double var = 0.0;
  if (rep.pairs_from_g > 0)
    var += rep.p_gg * (1.0 - rep.p_gg) / rep.pairs_from_g;
  if (rep.pairs_from_e > 0)
    var += rep.p_ee * (1.0 - rep.p_ee) / rep.pairs_from_e;
  rep.stat_error = 0.5 * std::sqrt(var);
  return rep;
}

// ---------------------------------------------------------------------------
// figures of merit
// ---------------------------------------------------------------------------

double quality_factor(double chi_mhz, double kappa_mhz, double t1_ns) {
  if (!(kappa_mhz > 0.0) || !(t1_ns > 0.0))
    throw std::invalid_argument("quality_factor: kappa and T1 must be > 0");
  const double chi = mhz_to_rad_per_ns(chi_mhz);
  const double kap = mhz_to_rad_per_ns(kappa_mhz);
  return 4.0 * chi * chi * kap * t1_ns / (0.25 * kap * kap + chi * chi);
}

double snr(double eta, double n_bar, double q_r) {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::invalid_argument("snr: eta must be in (0, 1]");
  if (!(n_bar > 0.0) || !(q_r > 0.0))
    throw std::invalid_argument("snr: nbar and Q_r must be > 0");
  return eta * n_bar * q_r;
}

DispersiveEquivalent dispersive_equivalent(double chi_target_mhz,
                                           double delta_mhz,
                                           double alpha_q_mhz,
                                           double kappa_mhz) {
  if (alpha_q_mhz == 0.0 || delta_mhz * (delta_mhz + alpha_q_mhz) == 0.0)
    throw std::invalid_argument(
        "dispersive_equivalent: Delta (Delta + alpha_q) and alpha_q must be "
        "nonzero");
  if (!(kappa_mhz > 0.0))
    throw std::invalid_argument("dispersive_equivalent: kappa must be > 0");
  const double g2 =
      chi_target_mhz * delta_mhz * (delta_mhz + alpha_q_mhz) / alpha_q_mhz;
  if (!(g2 > 0.0))
    throw std::invalid_argument(
        "dispersive_equivalent: inconsistent signs, g_x^2 <= 0");
  DispersiveEquivalent out;
  out.g_x_mhz = std::sqrt(g2);
  out.validity_ratio = std::abs(delta_mhz) / out.g_x_mhz;
  out.purcell_t1_ns =
      out.validity_ratio * out.validity_ratio / mhz_to_rad_per_ns(kappa_mhz);
  return out;
}

// ---------------------------------------------------------------------------
// protocol pipeline
// ---------------------------------------------------------------------------

ProtocolAnalysis analyze_protocol(const std::vector<ProtocolRecord>& records,
                                  bool use_heralding) {
  if (records.empty())
    throw std::invalid_argument("analyze_protocol: no records");

  const auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };

  ProtocolAnalysis out;
  std::vector<char> keep(records.size(), 1);
  if (use_heralding) {
    std::vector<double> herald_values(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
      if (records[r].herald_i.empty())
        throw std::invalid_argument(
            "analyze_protocol: heralding requested but a record has no "
            "herald segment");
      herald_values[r] = mean_of(records[r].herald_i);
    }
    const MixtureFit herald_fit = fit_mixture(herald_values);
    if (!herald_fit.effectively_single) {
      // Every record starts (nominally) in the ground state, so ground is
      // the majority herald component; keep that side of the threshold.
      out.herald_threshold = gaussian_intersection(herald_fit.low,
                                                   herald_fit.high);
      const bool g_low =
          herald_fit.majority().mean < herald_fit.minority().mean;
      for (std::size_t r = 0; r < records.size(); ++r)
        keep[r] = g_low ? herald_values[r] <= out.herald_threshold
                        : herald_values[r] >= out.herald_threshold;
      out.heralded = true;
    }
  }

  // Mean measurement-window traces of the kept records, per label.
  std::vector<const ProtocolRecord*> kept_g, kept_e;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const bool is_e = records[r].prepared == PreparedState::e;
    if (!keep[r]) {
      ++(is_e ? out.dropped_e : out.dropped_g);
      continue;
    }
    (is_e ? kept_e : kept_g).push_back(&records[r]);
  }
  out.kept_g = kept_g.size();
  out.kept_e = kept_e.size();
  if (kept_g.empty() || kept_e.empty())
    throw std::invalid_argument(
        "analyze_protocol: heralding left one label empty");

  const std::size_t n_samples = kept_g.front()->measure_i.size();
  const auto mean_trace = [&](const std::vector<const ProtocolRecord*>& rs) {
    std::vector<double> m(n_samples, 0.0);
    for (const ProtocolRecord* r : rs) {
      if (r->measure_i.size() != n_samples)
        throw std::invalid_argument(
            "analyze_protocol: records disagree on the measurement grid");
      for (std::size_t i = 0; i < n_samples; ++i) m[i] += r->measure_i[i];
    }
    for (double& v : m) v /= rs.size();
    return m;
  };
  const std::vector<double> weights =
      matched_weights(mean_trace(kept_g), mean_trace(kept_e));

  const auto integrate = [&](const std::vector<const ProtocolRecord*>& rs) {
    std::vector<double> vals;
    vals.reserve(rs.size());
    for (const ProtocolRecord* r : rs) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n_samples; ++i)
        acc += weights[i] * r->measure_i[i];
      vals.push_back(acc);
    }
    return vals;
  };
  out.values_g = integrate(kept_g);
  out.values_e = integrate(kept_e);

  out.histogram = make_histogram(out.values_g, out.values_e);
  out.fit = fit_double_gaussian(out.histogram);
  out.report = fidelity(out.values_g, out.values_e, out.fit);
  return out;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

void write_histogram_csv(const std::string& path, const Histogram& hist) {
  hist.validate();
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_histogram_csv: cannot open " + path);
  out << "bin_lo,bin_hi,count_g,count_e\n";
  out.precision(17);
  for (std::size_t b = 0; b < hist.bins(); ++b)
    out << hist.edges[b] << ',' << hist.edges[b + 1] << ','
        << hist.counts_g[b] << ',' << hist.counts_e[b] << '\n';
  if (!out) throw std::runtime_error("write_histogram_csv: write failed");
}

void write_fidelity_json(const std::string& path, const FidelityReport& rep) {
  nlohmann::ordered_json j;
  j["i_threshold"] = rep.i_threshold;
  j["fidelity"] = rep.fidelity;
  j["eps_g"] = rep.eps_g;
  j["eps_e"] = rep.eps_e;
  j["eps_o"] = rep.eps_o;
  j["eps_o_g"] = rep.eps_o_g;
  j["eps_o_e"] = rep.eps_o_e;
  j["eps_r_g"] = rep.eps_r_g;
  j["eps_r_e"] = rep.eps_r_e;
  j["stat_error"] = rep.stat_error;
  j["n_g"] = rep.n_g;
  j["n_e"] = rep.n_e;
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_fidelity_json: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write_fidelity_json: write failed");
}

void write_qnd_json(const std::string& path, const QndReport& rep) {
  nlohmann::ordered_json j;
  j["p_gg"] = rep.p_gg;
  j["p_ge"] = rep.p_ge;
  j["p_eg"] = rep.p_eg;
  j["p_ee"] = rep.p_ee;
  j["q"] = rep.q;
  j["stat_error"] = rep.stat_error;
  j["segment_ns"] = rep.segment_ns;
  j["pairs_from_g"] = rep.pairs_from_g;
  j["pairs_from_e"] = rep.pairs_from_e;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_qnd_json: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write_qnd_json: write failed");
}

}  // namespace xkerr
