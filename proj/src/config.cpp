#include "xkerr/config.hpp"

#include <json.hpp>

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <utility>

namespace xkerr {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

// One JSON object; fetches are recorded so finish() can reject typos.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  std::string at(const char* key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const char* key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::optional<double> opt_num(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(at(key) + " must be a number");
    return v.get<double>();
  }

  double num(const char* key, double def) { return opt_num(key).value_or(def); }

  double req_num(const char* key) {
    auto v = opt_num(key);
    if (!v) fail(at(key) + " is required");
    return *v;
  }

  std::optional<std::uint64_t> opt_u64(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<double>() < 0)
      fail(at(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  int pos_int(const char* key, int def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<int>() < 1)
      fail(at(key) + " must be a positive integer");
    return v.get<int>();
  }

  bool boolean(const char* key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string str(const char* key, std::string def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> num_list(const char* key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) fail(at(key) + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) {
      if (!e.is_number()) fail(at(key) + " must contain numbers only");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        fail(at(item.key().c_str()) + " is not a recognized field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double probability(Section& s, const char* key, double def) {
  const double p = s.num(key, def);
  if (p < 0.0 || p > 1.0) fail(s.at(key) + " must lie in [0, 1]");
  return p;
}

double positive(Section& s, const char* key, double def) {
  const double v = s.num(key, def);
  if (v <= 0.0) fail(s.at(key) + " must be > 0");
  return v;
}

CircuitParams parse_circuit(const json& j) {
  Section s(j, "circuit");
  CircuitParams cp;
  cp.e_j_ghz = s.req_num("e_j_ghz");
  cp.d_j = s.num("d_j", 0.0);
  cp.c_s_ff = s.req_num("c_s_ff");
  cp.c_t_ff = s.req_num("c_t_ff");
  cp.l_j_nh = s.num("l_j_nh", 0.0);
  cp.omega_c_ghz = s.req_num("omega_c_ghz");
  cp.g_ac_ghz = s.req_num("g_ac_ghz");
  cp.g_qc_ghz = s.num("g_qc_ghz", 0.0);

  if (!s.has("l_a_nh_by_flux")) fail("circuit.l_a_nh_by_flux is required");
  const json& table = s.raw("l_a_nh_by_flux");
  if (!table.is_object() || table.empty())
    fail("circuit.l_a_nh_by_flux must be a non-empty object mapping a flux "
         "index to an inductance in nH");
  for (const auto& item : table.items()) {
    int n = 0;
    try {
      std::size_t pos = 0;
      n = std::stoi(item.key(), &pos);
      if (pos != item.key().size()) throw std::invalid_argument(item.key());
    } catch (const std::exception&) {
      fail("circuit.l_a_nh_by_flux key \"" + item.key() +
           "\" must be an integer flux index");
    }
    if (!item.value().is_number())
      fail("circuit.l_a_nh_by_flux[\"" + item.key() + "\"] must be a number");
    cp.l_a_of_n_nh[n] = item.value().get<double>();
  }
  s.finish();
  cp.validate();
  return cp;
}

SystemConfig parse_system(const json& j) {
  Section s(j, "system");
  SystemConfig sc;
  sc.present = true;
  sc.omega_q_prime_ghz = s.opt_num("omega_q_prime_ghz");
  sc.omega_a_prime_ghz = s.opt_num("omega_a_prime_ghz");
  sc.omega_c_ghz = s.opt_num("omega_c_ghz");
  sc.g_zz_ghz = s.opt_num("g_zz_ghz");
  sc.g_ac_ghz = s.opt_num("g_ac_ghz");
  sc.kappa_c_mhz = s.num("kappa_c_mhz", 0.0);
  sc.kappa_a_mhz = s.num("kappa_a_mhz", 0.0);

  const auto kq = s.opt_num("kappa_q_mhz");
  const auto t1 = s.opt_num("t1_ns");
  if (kq && t1) fail("system.kappa_q_mhz and system.t1_ns are mutually exclusive");
  if (t1) {
    if (*t1 <= 0.0) fail("system.t1_ns must be > 0");
    sc.kappa_q_mhz = rate_mhz_from_time_ns(*t1);
  } else if (kq) {
    sc.kappa_q_mhz = *kq;
  }

  const auto gq = s.opt_num("gamma_q_mhz");
  const auto t2 = s.opt_num("t2_ns");
  if (gq && t2) fail("system.gamma_q_mhz and system.t2_ns are mutually exclusive");
  if (t2) {
    if (*t2 <= 0.0) fail("system.t2_ns must be > 0");
    sc.gamma_q_mhz = rate_mhz_from_time_ns(*t2);
  } else if (gq) {
    sc.gamma_q_mhz = *gq;
  }

  sc.drive_omega_mhz = s.num("drive_omega_mhz", 0.0);
  sc.drive_omega_d_ghz = s.num("drive_omega_d_ghz", 0.0);
  sc.eta = s.num("eta", 1.0);
  s.finish();
  return sc;
}

ReadoutConfig parse_readout(const json& j) {
  Section s(j, "readout");
  ReadoutConfig rc;
  rc.n_bar = positive(s, "n_bar", rc.n_bar);
  rc.window_ns = positive(s, "window_ns", rc.window_ns);
  rc.duration_ns = positive(s, "duration_ns", rc.duration_ns);
  rc.n_records = s.pos_int("n_records", rc.n_records);
  rc.thermal_pop = probability(s, "thermal_pop", rc.thermal_pop);
  rc.p_pi_error = probability(s, "p_pi_error", rc.p_pi_error);
  rc.p_leak_f = probability(s, "p_leak_f", rc.p_leak_f);
  rc.herald_ns = positive(s, "herald_ns", rc.herald_ns);
  rc.wait_ns = positive(s, "wait_ns", rc.wait_ns);
  rc.measure_ns = positive(s, "measure_ns", rc.measure_ns);
  rc.qnd_start_ns = positive(s, "qnd_start_ns", rc.qnd_start_ns);
  rc.qnd_stop_ns = positive(s, "qnd_stop_ns", rc.qnd_stop_ns);
  rc.qnd_window_ns = positive(s, "qnd_window_ns", rc.qnd_window_ns);
  rc.noiseless = s.boolean("noiseless", rc.noiseless);
  rc.heralding = s.boolean("heralding", rc.heralding);
  rc.eta = s.opt_num("eta");
  if (rc.eta && (*rc.eta <= 0.0 || *rc.eta > 1.0))
    fail("readout.eta must lie in (0, 1]");
  rc.seed = s.opt_u64("seed");
  s.finish();
  return rc;
}

SweepConfig parse_sweep(const json& j) {
  Section s(j, "sweep");
  SweepConfig sw;
  sw.frequency_grid_ghz = s.num_list("frequency_grid_ghz");
  const auto lo = s.opt_num("frequency_lo_ghz");
  const auto hi = s.opt_num("frequency_hi_ghz");
  const auto step = s.opt_num("frequency_step_mhz");
  const int n_range = int(lo.has_value()) + int(hi.has_value()) + int(step.has_value());
  if (n_range != 0 && n_range != 3)
    fail("sweep.frequency_lo_ghz / frequency_hi_ghz / frequency_step_mhz must "
         "be given together");
  if (n_range == 3) {
    if (!sw.frequency_grid_ghz.empty())
      fail("sweep.frequency_grid_ghz and the lo/hi/step form are mutually "
           "exclusive");
    if (*step <= 0.0) fail("sweep.frequency_step_mhz must be > 0");
    if (*hi <= *lo) fail("sweep.frequency_hi_ghz must exceed frequency_lo_ghz");
    const double dw = *step * 1e-3;
    const int n = static_cast<int>(std::floor((*hi - *lo) / dw + 1e-9)) + 1;
    sw.frequency_grid_ghz.reserve(n);
    for (int i = 0; i < n; ++i) sw.frequency_grid_ghz.push_back(*lo + i * dw);
  }
  sw.flux_list = s.num_list("flux_list");
  s.finish();
  return sw;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail("cannot open " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");

  RunConfig rc;
  Section top(j, "");
  if (top.has("circuit")) rc.circuit = parse_circuit(j.at("circuit"));
  if (top.has("system")) rc.system = parse_system(j.at("system"));
  if (top.has("readout")) rc.readout = parse_readout(j.at("readout"));
  if (top.has("sweep")) rc.sweep = parse_sweep(j.at("sweep"));
  if (top.has("imperfections")) {
    Section s(j.at("imperfections"), "imperfections");
    rc.imperfections_present = true;
    rc.imperfections.d_j = s.num("d_j", rc.circuit ? rc.circuit->d_j : 0.0);
    rc.imperfections.theta_m_deg = s.num("theta_m_deg", 0.0);
    s.finish();
    rc.imperfections.validate();
  } else if (rc.circuit) {
    rc.imperfections.d_j = rc.circuit->d_j;
  }
  {
    Section s(j, "");
    s.has("circuit");
    s.has("system");
    s.has("readout");
    s.has("sweep");
    s.has("imperfections");
    rc.flux = s.num("flux", 0.0);
    rc.output_dir = s.str("output_dir", ".");
    s.finish();
  }

  rc.canonical_json = j.dump();  // object keys serialize sorted
  return rc;
}

SystemParams resolve_system(const RunConfig& rc) {
  const SystemConfig& sc = rc.system;
  const bool all_explicit = sc.omega_q_prime_ghz && sc.omega_a_prime_ghz &&
                            sc.omega_c_ghz && sc.g_zz_ghz && sc.g_ac_ghz;
  DerivedParams dp;
  bool derived = false;
  if (!all_explicit) {
    if (!rc.circuit)
      fail("system section omits derivable frequencies and there is no "
           "circuit section to derive them from");
    const double n = std::round(rc.flux);
    if (std::abs(rc.flux - n) > 1e-9)
      fail("flux must be an integer index when system frequencies are "
           "derived from the circuit");
    dp = derive_params(*rc.circuit, static_cast<int>(n));
    derived = true;
  }
  auto pick = [&](const std::optional<double>& v, double fallback,
                  const char* name) {
    if (v) return *v;
    if (!derived) fail(std::string("system.") + name + " is required");
    return fallback;
  };

  SystemParams sp;
  sp.omega_q_prime =
      pick(sc.omega_q_prime_ghz, dp.omega_q_prime, "omega_q_prime_ghz");
  sp.omega_a_prime =
      pick(sc.omega_a_prime_ghz, dp.omega_a_prime, "omega_a_prime_ghz");
  sp.omega_c = pick(sc.omega_c_ghz, dp.omega_c, "omega_c_ghz");
  sp.g_zz = pick(sc.g_zz_ghz, dp.g_zz, "g_zz_ghz");
  sp.g_ac = pick(sc.g_ac_ghz, dp.g_ac, "g_ac_ghz");
  sp.kappa_c = sc.kappa_c_mhz;
  sp.kappa_a = sc.kappa_a_mhz;
  sp.kappa_q = sc.kappa_q_mhz;
  sp.gamma_q = sc.gamma_q_mhz;
  sp.drive.omega_mhz = sc.drive_omega_mhz;
  sp.drive.omega_d_ghz = sc.drive_omega_d_ghz;
  sp.eta = rc.readout.eta.value_or(sc.eta);
  validate_system(sp);  // hard violations throw; warnings are advisory
  return sp;
}

std::string config_hash_hex(const RunConfig& rc) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : rc.canonical_json) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["config_hash_fnv1a64"] = m.config_hash;
  j["versions"]["toolkit"] = kToolkitVersion;
  j["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION);
  if (m.seed)
    j["seed"] = *m.seed;
  else
    j["seed"] = nullptr;
  j["outputs"] = m.outputs;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace xkerr
