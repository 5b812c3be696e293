#pragma once

// Single-shot readout analysis: matched-filter weights, weighted integration
// of measurement records, histogramming, two-component Gaussian mixture fits,
// threshold/fidelity with an error budget, repeatability (QND) metrics, and
// the readout quality factor / SNR figures with their dispersive-equivalent
// comparison.

#include <cstddef>
#include <string>
#include <vector>

#include "xkerr/dynamics.hpp"

namespace xkerr {

// Weight function over the integration window, proportional to the
// separation of the mean traces and normalized to unit sum.
// Throws std::invalid_argument on mismatched grids or zero separation.
std::vector<double> matched_weights(const std::vector<double>& mean_trace_g,
                                    const std::vector<double>& mean_trace_e);

// Per-record weighted time integral sum_i w_i I_i. Every record must carry
// exactly weights.size() samples.
std::vector<double> single_shot_values(
    const std::vector<MeasurementRecord>& records,
    const std::vector<double>& weights);

// Mean of each record's samples over [start_ns, stop_ns) (uniform window).
std::vector<double> window_means(const std::vector<MeasurementRecord>& records,
                                 double start_ns, double stop_ns);

struct Histogram {
  std::vector<double> edges;            // bin edges, strictly increasing
  std::vector<std::size_t> counts_g;    // per-bin counts, g-prepared
  std::vector<std::size_t> counts_e;
  std::size_t total_g = 0;
  std::size_t total_e = 0;

  std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
  void validate() const;  // throws std::invalid_argument
};

// Shared-edge histogram of both label populations. bins == 0 selects the
// Freedman-Diaconis width on the pooled values with a floor of 60 bins.
Histogram make_histogram(const std::vector<double>& values_g,
                         const std::vector<double>& values_e, int bins = 0);

struct GaussianComponent {
  double mean = 0.0;
  double sigma = 1.0;
  double weight = 0.0;  // mixture weight, weights sum to 1 per label
};

struct MixtureFit {
  GaussianComponent low, high;  // ordered by mean
  double log_likelihood = 0.0;
  double residual = 0.0;  // rms count residual over bins / total count
  // True when the data carry no resolvable second component (minority
  // weight < 1e-4, or the mixture does not beat a single Gaussian by a
  // likelihood-ratio margin); `low`/`high` then both hold the single fit.
  bool effectively_single = false;

  const GaussianComponent& majority() const {
    return low.weight >= high.weight ? low : high;
  }
  const GaussianComponent& minority() const {
    return low.weight >= high.weight ? high : low;
  }
};

struct DoubleGaussianFit {
  MixtureFit g, e;
};

// Binned maximum-likelihood EM fit (500 iteration cap, three deterministic
// initializations, best likelihood kept) of a two-Gaussian mixture to each
// label of the histogram. Requires >= 1000 counts per label.
DoubleGaussianFit fit_double_gaussian(const Histogram& hist);

// Same mixture fit on raw (unbinned) samples.
MixtureFit fit_mixture(const std::vector<double>& values);

// Signal value where the two unit-normalized Gaussians have equal density,
// restricted to the open interval between the means. Throws
// std::runtime_error when no such crossing exists (degenerate separation).
double gaussian_intersection(const GaussianComponent& a,
                             const GaussianComponent& b);

struct FidelityReport {
  double i_threshold = 0.0;
  double fidelity = 0.0;  // 1 - (eps_g + eps_e)/2
  double eps_g = 0.0;     // fraction of g records classified e
  double eps_e = 0.0;     // fraction of e records classified g
  double eps_o = 0.0;     // analytic overlap error, eps_o_g + eps_o_e
  double eps_o_g = 0.0;   // majority-Gaussian tail beyond the threshold
  double eps_o_e = 0.0;
  double eps_r_g = 0.0;   // remainders eps_x - eps_o_x
  double eps_r_e = 0.0;
  double stat_error = 0.0;  // binomial standard error on the fidelity
  std::size_t n_g = 0;
  std::size_t n_e = 0;
};

// Threshold at the majority-Gaussian intersection, empirical
// misclassification fractions, and the overlap/remainder error budget.
FidelityReport fidelity(const std::vector<double>& values_g,
                        const std::vector<double>& values_e,
                        const DoubleGaussianFit& fit);

struct SegmentSpec {
  double start_ns = 150.0;   // steady-state window begins here
  double stop_ns = 1000.0;   // and ends here
  double window_ns = 30.0;   // consecutive segment length = spacing
};

struct QndReport {
  double p_gg = 0.0, p_ge = 0.0;  // row-normalized transition probabilities
  double p_eg = 0.0, p_ee = 0.0;  // between consecutive segments
  double q = 0.0;                 // (p_gg + p_ee)/2
  double stat_error = 0.0;        // binomial standard error on q
  double segment_ns = 0.0;
  std::size_t pairs_from_g = 0;   // consecutive pairs entering each row
  std::size_t pairs_from_e = 0;
};

// Segments each record into consecutive windows inside
// [spec.start_ns, spec.stop_ns), classifies each segment mean against the
// threshold (`e_is_low` gives the orientation), and accumulates transition
// statistics over consecutive segment pairs.
QndReport qnd_metrics(const std::vector<MeasurementRecord>& records,
                      double i_threshold, bool e_is_low,
                      const SegmentSpec& spec = {});

// Readout quality factor 4 chi^2 kappa T1 / (kappa^2/4 + chi^2) with chi and
// kappa given as linear MHz (converted to angular internally) and T1 in ns.
double quality_factor(double chi_mhz, double kappa_mhz, double t1_ns);

// SNR = eta nbar Q_r.
double snr(double eta, double n_bar, double q_r);

struct DispersiveEquivalent {
  double g_x_mhz = 0.0;        // transverse coupling reproducing chi_target
  double purcell_t1_ns = 0.0;  // (Delta/g_x)^2 / kappa
  double validity_ratio = 0.0; // |Delta| / g_x
};

// Transverse-coupling strength a dispersive readout would need for the same
// conditional shift: chi = alpha_q g_x^2 / (Delta (Delta + alpha_q)), then
// the Purcell lifetime limit that coupling would impose. All inputs linear
// MHz. Throws std::invalid_argument when the signs make g_x^2 negative or
// the denominator vanishes.
DispersiveEquivalent dispersive_equivalent(double chi_target_mhz,
                                           double delta_mhz,
                                           double alpha_q_mhz,
                                           double kappa_mhz);

struct ProtocolAnalysis {
  FidelityReport report;
  DoubleGaussianFit fit;
  Histogram histogram;
  std::vector<double> values_g, values_e;  // measurement-window values kept
  std::size_t kept_g = 0, kept_e = 0;      // records surviving the herald
  std::size_t dropped_g = 0, dropped_e = 0;
  double herald_threshold = 0.0;
  bool heralded = false;
};

// Full single-shot pipeline over protocol records: optional heralding (keep
// records whose herald-window mean classifies as ground), matched weights
// from the kept mean traces, weighted single-shot values, histogram, mixture
// fits, and the fidelity report.
ProtocolAnalysis analyze_protocol(const std::vector<ProtocolRecord>& records,
                                  bool use_heralding);

// --- persistence ---------------------------------------------------------

// CSV with header "bin_lo,bin_hi,count_g,count_e".
void write_histogram_csv(const std::string& path, const Histogram& hist);

// JSON objects carrying every report field.
void write_fidelity_json(const std::string& path, const FidelityReport& rep);
void write_qnd_json(const std::string& path, const QndReport& rep);

}  // namespace xkerr
