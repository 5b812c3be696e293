// xkerr: simulation and analysis drivers for non-perturbative cross-Kerr
// qubit readout. Each subcommand reads one JSON config, writes plot-ready
// CSV/JSON files into --out, and drops a manifest describing the run.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "xkerr/circuit.hpp"
#include "xkerr/config.hpp"
#include "xkerr/dynamics.hpp"
#include "xkerr/imperfect.hpp"
#include "xkerr/polariton.hpp"
#include "xkerr/readout.hpp"
#include "xkerr/spectro.hpp"

namespace {

using nlohmann::ordered_json;
using namespace xkerr;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;  // empty: use config output_dir
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration")
      ->required();
  cmd->add_option("--out", o.out_dir,
                  "output directory (default: config output_dir)");
  cmd->add_option("--seed", o.seed, "RNG seed override")
      ->each([&o](const std::string&) { o.seed_given = true; });
}

std::string out_dir_for(const CommonOpts& o, const RunConfig& rc) {
  const std::string dir = o.out_dir.empty() ? rc.output_dir : o.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

std::uint64_t require_seed(const CommonOpts& o, const RunConfig& rc) {
  if (o.seed_given) return o.seed;
  if (rc.readout.seed) return *rc.readout.seed;
  throw std::invalid_argument(
      "config: readout.seed (or --seed) is required for stochastic runs");
}

int integer_flux(double flux, const char* what) {
  const double n = std::round(flux);
  if (std::abs(flux - n) > 1e-9)
    throw std::invalid_argument(std::string("config: flux must be an integer "
                                            "index for ") +
                                what);
  return static_cast<int>(n);
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path);
}

void finish_run(const std::string& dir, const std::string& command,
                const CommonOpts& o, const RunConfig& rc,
                std::optional<std::uint64_t> seed,
                std::vector<std::string> outputs) {
  RunManifest m;
  m.command = command;
  m.config_path = o.config_path;
  m.config_hash = config_hash_hex(rc);
  m.seed = seed;
  m.outputs = std::move(outputs);
  std::string name = command;
  std::replace(name.begin(), name.end(), '-', '_');
  write_manifest(dir + "/" + name + "_manifest.json", m);
}

// --- derive-params ---------------------------------------------------------

int run_derive_params(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  if (!rc.circuit)
    throw std::invalid_argument(
        "config: circuit section is required for derive-params");
  const int n = integer_flux(rc.flux, "derive-params");
  const DerivedParams dp = derive_params(*rc.circuit, n);

  SystemParams sp;
  sp.omega_q_prime = dp.omega_q_prime;
  sp.omega_a_prime = dp.omega_a_prime;
  sp.omega_c = dp.omega_c;
  sp.g_zz = dp.g_zz;
  sp.g_ac = dp.g_ac;
  sp.kappa_c = rc.system.kappa_c_mhz;
  sp.kappa_a = rc.system.kappa_a_mhz;
  sp.kappa_q = rc.system.kappa_q_mhz;
  sp.gamma_q = rc.system.gamma_q_mhz;
  sp.drive.omega_mhz = rc.system.drive_omega_mhz;
  sp.drive.omega_d_ghz = rc.system.drive_omega_d_ghz;
  sp.eta = rc.readout.eta.value_or(rc.system.eta);

  const PolaritonParams pp = polariton_params(sp, -1);
  const double theta_bar =
      hybridization_angle(sp.omega_a_prime, sp.omega_c, sp.g_ac, sp.g_zz, 0);

  // consistency residuals: branch-sum identity, linear-in-sigma_z model vs
  // exact rediagonalization, and the decay-rate mixing roundtrip
  const double sum_resid = std::abs(pp.omega_l + pp.omega_u - sp.omega_c -
                                    (sp.omega_a_prime + sp.g_zz));
  const PolaritonParams lin = polariton_params(sp, +1);
  const PolaritonParams ex = exact_branch_params(sp, +1);
  const double lin_resid = std::max(std::abs(lin.omega_l - ex.omega_l),
                                    std::abs(lin.omega_u - ex.omega_u));
  double kappa_resid = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto [kc, ka] = invert_decays(pp.kappa_l, pp.kappa_u, pp.theta);
    kappa_resid = std::max(std::abs(kc - sp.kappa_c), std::abs(ka - sp.kappa_a));
  } catch (const std::invalid_argument&) {
    // theta too close to the mixing degeneracy; leave the residual null
  }

  ordered_json j;
  j["flux"] = n;
  ordered_json& c = j["derived"];
  c["e_cq_ghz"] = dp.e_cq;
  c["e_ca_ghz"] = dp.e_ca;
  c["omega_q_harm_ghz"] = dp.omega_q_harm;
  c["omega_a_harm_ghz"] = dp.omega_a_harm;
  c["alpha_q_ghz"] = dp.alpha_q;
  c["u_a_ghz"] = dp.u_a;
  c["g_zz_ghz"] = dp.g_zz;
  c["omega_q_ghz"] = dp.omega_q;
  c["omega_a_ghz"] = dp.omega_a;
  c["omega_q_prime_ghz"] = dp.omega_q_prime;
  c["omega_a_prime_ghz"] = dp.omega_a_prime;
  c["omega_a_bar_ghz"] = dp.omega_a_bar;
  c["omega_c_ghz"] = dp.omega_c;
  c["g_ac_ghz"] = dp.g_ac;
  c["g_qc_ghz"] = dp.g_qc;
  ordered_json& p = j["polariton_sigma_z_minus"];
  p["theta_rad"] = pp.theta;
  p["omega_l_ghz"] = pp.omega_l;
  p["omega_u_ghz"] = pp.omega_u;
  p["chi_l_mhz"] = 1e3 * pp.chi_l;
  p["chi_u_mhz"] = 1e3 * pp.chi_u;
  p["kappa_l_mhz"] = pp.kappa_l;
  p["kappa_u_mhz"] = pp.kappa_u;
  j["theta_bar_rad"] = theta_bar;
  ordered_json& r = j["residuals"];
  r["branch_sum_identity_ghz"] = sum_resid;
  r["branch_linearization_ghz"] = lin_resid;
  if (std::isnan(kappa_resid))
    r["decay_roundtrip_mhz"] = nullptr;
  else
    r["decay_roundtrip_mhz"] = kappa_resid;

  const std::string dir = out_dir_for(o, rc);
  write_json(dir + "/derived_params.json", j);
  finish_run(dir, "derive-params", o, rc, std::nullopt,
             {"derived_params.json"});
  return 0;
}

// --- spectroscopy ----------------------------------------------------------

int run_spectroscopy(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  if (rc.sweep.frequency_grid_ghz.empty())
    throw std::invalid_argument(
        "config: sweep.frequency_grid_ghz (or lo/hi/step) is required for "
        "spectroscopy");
  const SystemParams sp = resolve_system(rc);

  SpectroscopyCurve curve_g = sweep_frequency(sp, rc.sweep.frequency_grid_ghz, -1);
  SpectroscopyCurve curve_e = sweep_frequency(sp, rc.sweep.frequency_grid_ghz, +1);
  curve_g.flux = rc.flux;
  curve_e.flux = rc.flux;

  const ConditionalShift cs = conditional_shift(curve_g, curve_e);

  ordered_json j;
  j["two_chi_l_mhz"] = 1e3 * cs.two_chi_l_ghz;
  j["two_chi_u_mhz"] = 1e3 * cs.two_chi_u_ghz;
  j["shift_sum_mhz"] = 1e3 * (cs.two_chi_l_ghz + cs.two_chi_u_ghz);
  j["minus_two_g_zz_mhz"] = -2e3 * sp.g_zz;
  ordered_json& lg = j["peaks"];
  lg["lower_g_ghz"] = cs.lower_g.center_ghz;
  lg["upper_g_ghz"] = cs.upper_g.center_ghz;
  lg["lower_e_ghz"] = cs.lower_e.center_ghz;
  lg["upper_e_ghz"] = cs.upper_e.center_ghz;
  lg["lower_width_mhz"] = cs.lower_g.width_mhz;
  lg["upper_width_mhz"] = cs.upper_g.width_mhz;
  j["fit_se_mhz"] = 1e3 * std::max({cs.lower_g.center_se_ghz,
                                    cs.upper_g.center_se_ghz,
                                    cs.lower_e.center_se_ghz,
                                    cs.upper_e.center_se_ghz});

  const std::string dir = out_dir_for(o, rc);
  write_curves_csv(dir + "/spectroscopy.csv", {curve_g, curve_e});
  write_json(dir + "/shifts.json", j);
  finish_run(dir, "spectroscopy", o, rc, std::nullopt,
             {"spectroscopy.csv", "shifts.json"});
  return 0;
}

// --- flux-map ----------------------------------------------------------

int run_flux_map(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  if (!rc.circuit)
    throw std::invalid_argument(
        "config: circuit section is required for flux-map");
  if (rc.sweep.flux_list.empty())
    throw std::invalid_argument(
        "config: sweep.flux_list is required for flux-map");
  if (rc.sweep.frequency_grid_ghz.empty())
    throw std::invalid_argument(
        "config: sweep frequency grid is required for flux-map");
  if (rc.system.kappa_c_mhz <= 0.0 || rc.system.kappa_a_mhz <= 0.0)
    throw std::invalid_argument(
        "config: system.kappa_c_mhz and system.kappa_a_mhz must be > 0 for "
        "flux-map");

  const FluxMap fm =
      flux_map(*rc.circuit, rc.sweep.flux_list, rc.sweep.frequency_grid_ghz,
               rc.system.kappa_c_mhz, rc.system.kappa_a_mhz);
  const CrossingFit cf = extract_avoided_crossing(fm.tracks);

  double min_split = std::numeric_limits<double>::infinity();
  double min_flux = 0.0;
  for (const FluxPoint& t : fm.tracks) {
    const double split = t.omega_u_ghz - t.omega_l_ghz;
    if (split < min_split) {
      min_split = split;
      min_flux = t.flux;
    }
  }

  ordered_json j;
  j["g_ac_mhz"] = 1e3 * cf.g_ac_ghz;
  j["omega_c_ghz"] = cf.omega_c_ghz;
  j["residual_norm_ghz2"] = cf.residual_norm;
  j["min_splitting_mhz"] = 1e3 * min_split;
  j["min_splitting_flux"] = min_flux;
  j["omega_a_bar_ghz"] = cf.omega_a_bar_ghz;

  const std::string dir = out_dir_for(o, rc);
  write_curves_csv(dir + "/fluxmap_curves.csv", fm.curves);
  write_peaks_csv(dir + "/fluxmap_peaks.csv", fm.tracks);
  write_json(dir + "/crossing.json", j);
  finish_run(dir, "flux-map", o, rc, std::nullopt,
             {"fluxmap_curves.csv", "fluxmap_peaks.csv", "crossing.json"});
  return 0;
}

// --- trajectories ------------------------------------------------------

int run_trajectories(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  const SystemParams sp = resolve_system(rc);
  const std::uint64_t seed = require_seed(o, rc);
  const ReadoutSpec rs{rc.readout.n_bar, rc.readout.window_ns,
                       rc.readout.noiseless};

  const auto recs_g =
      simulate_records(sp, PreparedState::g, rc.readout.n_records,
                       rc.readout.duration_ns, rs, rc.readout.thermal_pop, seed);
  const auto recs_e =
      simulate_records(sp, PreparedState::e, rc.readout.n_records,
                       rc.readout.duration_ns, rs, rc.readout.thermal_pop,
                       seed + 1);

  // ensemble mean/std per sample time
  const std::size_t n_t = recs_g.front().times.size();
  auto stats = [n_t](const std::vector<MeasurementRecord>& recs) {
    std::vector<double> mean(n_t, 0.0), sd(n_t, 0.0);
    for (const auto& r : recs)
      for (std::size_t k = 0; k < n_t; ++k) mean[k] += r.i_values[k];
    for (auto& m : mean) m /= static_cast<double>(recs.size());
    if (recs.size() > 1) {
      for (const auto& r : recs)
        for (std::size_t k = 0; k < n_t; ++k) {
          const double d = r.i_values[k] - mean[k];
          sd[k] += d * d;
        }
      for (auto& s : sd)
        s = std::sqrt(s / static_cast<double>(recs.size() - 1));
    }
    return std::make_pair(mean, sd);
  };
  const auto [mean_g, sd_g] = stats(recs_g);
  const auto [mean_e, sd_e] = stats(recs_e);

  auto jumped_fraction = [](const std::vector<MeasurementRecord>& recs) {
    std::size_t jumped = 0;
    for (const auto& r : recs) jumped += !r.jump_times.empty();
    return static_cast<double>(jumped) / static_cast<double>(recs.size());
  };

  const RecordModel rm = record_model(sp, rs);
  ordered_json j;
  j["n_records"] = rc.readout.n_records;
  j["duration_ns"] = rc.readout.duration_ns;
  j["jumped_fraction_g"] = jumped_fraction(recs_g);
  j["jumped_fraction_e"] = jumped_fraction(recs_e);
  ordered_json& m = j["record_model"];
  m["omega_d_ghz"] = rm.omega_d_ghz;
  m["omega_mhz"] = rm.omega_mhz;
  m["i_ground"] = rm.i_ground;
  m["i_excited"] = rm.i_excited;
  m["i_leaked"] = rm.i_leaked;
  m["tau_filter_ns"] = rm.tau_filter_ns;
  m["sigma_sample"] = rm.sigma_sample;
  m["t1_ns"] = rm.t1_ns;

  const std::string dir = out_dir_for(o, rc);
  write_records_csv(dir + "/records_g.csv", recs_g);
  write_records_csv(dir + "/records_e.csv", recs_e);
  {
    std::ofstream os(dir + "/traces.csv");
    if (!os)
      throw std::runtime_error("cannot open " + dir + "/traces.csv for writing");
    os.precision(17);
    os << "time_ns,mean_g,std_g,mean_e,std_e\n";
    for (std::size_t k = 0; k < n_t; ++k)
      os << recs_g.front().times[k] << ',' << mean_g[k] << ',' << sd_g[k]
         << ',' << mean_e[k] << ',' << sd_e[k] << '\n';
  }
  write_json(dir + "/trajectories_summary.json", j);
  finish_run(dir, "trajectories", o, rc, seed,
             {"records_g.csv", "records_e.csv", "traces.csv",
              "trajectories_summary.json"});
  return 0;
}

// --- histogram -----------------------------------------------------------

ordered_json mixture_json(const MixtureFit& f) {
  ordered_json j;
  j["means"] = {f.low.mean, f.high.mean};
  j["sigmas"] = {f.low.sigma, f.high.sigma};
  j["weights"] = {f.low.weight, f.high.weight};
  j["effectively_single"] = f.effectively_single;
  j["residual"] = f.residual;
  return j;
}

int run_histogram(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  const SystemParams sp = resolve_system(rc);
  const std::uint64_t seed = require_seed(o, rc);

  ProtocolSpec ps;
  ps.herald_ns = rc.readout.herald_ns;
  ps.wait_ns = rc.readout.wait_ns;
  ps.measure_ns = rc.readout.measure_ns;
  ps.p_pi_error = rc.readout.p_pi_error;
  ps.p_leak_f = rc.readout.p_leak_f;
  ps.thermal_pop = rc.readout.thermal_pop;
  ps.readout = {rc.readout.n_bar, rc.readout.window_ns, rc.readout.noiseless};

  auto records = simulate_protocol_records(sp, PreparedState::g,
                                           rc.readout.n_records, ps, seed);
  const auto recs_e = simulate_protocol_records(sp, PreparedState::e,
                                                rc.readout.n_records, ps,
                                                seed + 1);
  records.insert(records.end(), recs_e.begin(), recs_e.end());

  const ProtocolAnalysis an = analyze_protocol(records, rc.readout.heralding);

  ordered_json j;
  j["heralded"] = an.heralded;
  j["herald_threshold"] = an.herald_threshold;
  j["kept_g"] = an.kept_g;
  j["kept_e"] = an.kept_e;
  j["dropped_g"] = an.dropped_g;
  j["dropped_e"] = an.dropped_e;
  j["fit_g"] = mixture_json(an.fit.g);
  j["fit_e"] = mixture_json(an.fit.e);

  const std::string dir = out_dir_for(o, rc);
  write_histogram_csv(dir + "/histogram.csv", an.histogram);
  write_fidelity_json(dir + "/fidelity.json", an.report);
  write_json(dir + "/histogram_analysis.json", j);
  finish_run(dir, "histogram", o, rc, seed,
             {"histogram.csv", "fidelity.json", "histogram_analysis.json"});
  return 0;
}

// --- qnd -----------------------------------------------------------------

int run_qnd(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  const SystemParams sp = resolve_system(rc);
  const std::uint64_t seed = require_seed(o, rc);
  if (rc.readout.qnd_stop_ns > rc.readout.duration_ns)
    throw std::invalid_argument(
        "config: readout.qnd_stop_ns must not exceed readout.duration_ns");

  const ReadoutSpec rs{rc.readout.n_bar, rc.readout.window_ns,
                       rc.readout.noiseless};
  auto records =
      simulate_records(sp, PreparedState::g, rc.readout.n_records,
                       rc.readout.duration_ns, rs, rc.readout.thermal_pop, seed);
  const auto recs_e =
      simulate_records(sp, PreparedState::e, rc.readout.n_records,
                       rc.readout.duration_ns, rs, rc.readout.thermal_pop,
                       seed + 1);
  records.insert(records.end(), recs_e.begin(), recs_e.end());

  const RecordModel rm = record_model(sp, rs);
  const double threshold = 0.5 * (rm.i_ground + rm.i_excited);
  const bool e_is_low = rm.i_excited < rm.i_ground;
  const SegmentSpec seg{rc.readout.qnd_start_ns, rc.readout.qnd_stop_ns,
                        rc.readout.qnd_window_ns};
  const QndReport rep = qnd_metrics(records, threshold, e_is_low, seg);

  const std::string dir = out_dir_for(o, rc);
  write_qnd_json(dir + "/qnd.json", rep);
  finish_run(dir, "qnd", o, rc, seed, {"qnd.json"});
  return 0;
}

// --- purcell ---------------------------------------------------------------

int run_purcell(const CommonOpts& o) {
  const RunConfig rc = load_run_config(o.config_path);
  if (!rc.circuit)
    throw std::invalid_argument(
        "config: circuit section is required for purcell");
  if (rc.sweep.flux_list.empty())
    throw std::invalid_argument(
        "config: sweep.flux_list is required for purcell");
  if (rc.system.kappa_c_mhz < 0.0 || rc.system.kappa_a_mhz < 0.0 ||
      (rc.system.kappa_c_mhz == 0.0 && rc.system.kappa_a_mhz == 0.0))
    throw std::invalid_argument(
        "config: system.kappa_c_mhz / kappa_a_mhz must provide a positive "
        "decay channel for purcell");

  const auto table =
      purcell_flux_table(*rc.circuit, rc.imperfections, rc.sweep.flux_list,
                         rc.system.kappa_c_mhz, rc.system.kappa_a_mhz);

  ordered_json j;
  j["d_j"] = rc.imperfections.d_j;
  j["theta_m_deg"] = rc.imperfections.theta_m_deg;
  j["g_qc_mhz"] =
      1e3 * g_qc_from_misalignment(rc.imperfections.theta_m_deg,
                                   rc.circuit->g_ac_ghz);
  // analytic anchor at the configured bias when it is an integer index
  const double n = std::round(rc.flux);
  if (std::abs(rc.flux - n) <= 1e-9) {
    const int ni = static_cast<int>(n);
    j["g_qa_mhz"] = 1e3 * g_qa_at(*rc.circuit, rc.imperfections.d_j, ni);
    const PurcellRate ar =
        purcell_analytic_at(*rc.circuit, rc.imperfections, ni,
                            rc.system.kappa_c_mhz, rc.system.kappa_a_mhz);
    j["analytic_gamma_mhz"] = ar.gamma_mhz;
    j["analytic_t1_ns"] = ar.unbounded ? ordered_json(nullptr)
                                       : ordered_json(ar.t1_ns);
  } else {
    j["g_qa_mhz"] = nullptr;
    j["analytic_gamma_mhz"] = nullptr;
    j["analytic_t1_ns"] = nullptr;
  }

  const std::string dir = out_dir_for(o, rc);
  write_purcell_csv(dir + "/purcell.csv", table);
  write_json(dir + "/purcell_summary.json", j);
  finish_run(dir, "purcell", o, rc, std::nullopt,
             {"purcell.csv", "purcell_summary.json"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation and analysis toolkit for cross-Kerr qubit readout"};
  app.require_subcommand(1);

  CommonOpts o;
  CLI::App* c_derive = app.add_subcommand(
      "derive-params", "circuit parameter chain and consistency report");
  CLI::App* c_spectro = app.add_subcommand(
      "spectroscopy", "conditional two-branch transmission sweep");
  CLI::App* c_fluxmap = app.add_subcommand(
      "flux-map", "polariton lines vs flux and avoided-crossing fit");
  CLI::App* c_traj = app.add_subcommand(
      "trajectories", "synthetic continuous measurement records");
  CLI::App* c_hist = app.add_subcommand(
      "histogram", "heralded single-shot histograms and fidelity");
  CLI::App* c_qnd =
      app.add_subcommand("qnd", "repeated-measurement transition statistics");
  CLI::App* c_purcell = app.add_subcommand(
      "purcell", "imperfection-induced lifetime limits vs flux");
  for (CLI::App* c :
       {c_derive, c_spectro, c_fluxmap, c_traj, c_hist, c_qnd, c_purcell})
    add_common(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit clean; bad usage is 2
  }

  try {
    if (app.got_subcommand(c_derive)) return run_derive_params(o);
    if (app.got_subcommand(c_spectro)) return run_spectroscopy(o);
    if (app.got_subcommand(c_fluxmap)) return run_flux_map(o);
    if (app.got_subcommand(c_traj)) return run_trajectories(o);
    if (app.got_subcommand(c_hist)) return run_histogram(o);
    if (app.got_subcommand(c_qnd)) return run_qnd(o);
    if (app.got_subcommand(c_purcell)) return run_purcell(o);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
