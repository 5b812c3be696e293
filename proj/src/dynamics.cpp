#include "xkerr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "xkerr/constants.hpp"
#include "xkerr/rng.hpp"

namespace xkerr {

namespace {

constexpr double kSampleStepNs = 1.0;

// Two-pole input-output amplitude with explicit pole parameters. Amplitude in
// MHz, angles in rad, linewidths in MHz, frequencies in GHz; everything is
// converted to angular 1/ns internally.
Complex two_pole_amplitude(double omega_mhz, double theta, double kappa_l_mhz,
                           double kappa_u_mhz, double omega_l_ghz,
                           double omega_u_ghz, double omega_d_ghz) {
  const Complex i(0.0, 1.0);
  const double w = mhz_to_rad_per_ns(omega_mhz);
  const double kl = mhz_to_rad_per_ns(kappa_l_mhz);
  const double ku = mhz_to_rad_per_ns(kappa_u_mhz);
  const double dl = ghz_to_rad_per_ns(omega_d_ghz - omega_l_ghz);
  const double du = ghz_to_rad_per_ns(omega_d_ghz - omega_u_ghz);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double c2 = 1.0 - s2;
  return -i * w * s2 / (0.5 * ku - i * du) - i * w * c2 / (0.5 * kl - i * dl);
}

}  // namespace

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

LindbladModel branch_lindblad_model(const SystemParams& sp, int sigma_z,
                                    std::array<int, 2> dims) {
  if (sigma_z != -1 && sigma_z != 1)
    throw std::invalid_argument(
        "branch_lindblad_model: sigma_z must be -1 or +1");

  const PolaritonParams pp = polariton_params(sp, sigma_z);
  const HilbertSpace space = HilbertSpace::make(
      {{"lower", dims[0]}, {"upper", dims[1]}});
  const Operator cl = ladder(space, "lower");
  const Operator cu = ladder(space, "upper");
  const Operator nl = Operator{space, cl.matrix.adjoint() * cl.matrix};
  const Operator nu = Operator{space, cu.matrix.adjoint() * cu.matrix};

  const double wd = sp.drive.omega_d_ghz;
  Matrix h = (pp.omega_l - wd) * nl.matrix + (pp.omega_u - wd) * nu.matrix;
  // Drive projections are in MHz; the Hamiltonian is kept in GHz.
  h += 1e-3 * pp.omega_drive_l * (cl.matrix + cl.matrix.adjoint());
  h += 1e-3 * pp.omega_drive_u * (cu.matrix + cu.matrix.adjoint());

  LindbladModel model;
  model.hamiltonian = Operator{space, h};
  model.jumps = {{cl, pp.kappa_l}, {cu, pp.kappa_u}};
  model.drive_frame_ghz = wd;
  return model;
}

LindbladModel effective_lindblad_model(const SystemParams& sp,
                                       std::array<int, 3> dims) {
  const Operator h_lab = effective_hamiltonian(sp, dims);
  const HilbertSpace& space = h_lab.space;
  const Operator cl = ladder(space, "lower");
  const Operator cu = ladder(space, "upper");
  const Operator sm = ladder(space, "qubit");  // |g><e|

  const double wd = sp.drive.omega_d_ghz;
  const PolaritonParams pp = polariton_params(sp, -1);

  Matrix h = h_lab.matrix;
  h -= wd * (cl.matrix.adjoint() * cl.matrix + cu.matrix.adjoint() * cu.matrix);
  h += 1e-3 * pp.omega_drive_l * (cl.matrix + cl.matrix.adjoint());
  h += 1e-3 * pp.omega_drive_u * (cu.matrix + cu.matrix.adjoint());

  LindbladModel model;
  model.hamiltonian = Operator{space, h};
  model.jumps.push_back({cl, pp.kappa_l});
  model.jumps.push_back({cu, pp.kappa_u});
  if (sp.kappa_q > 0.0) model.jumps.push_back({sm, sp.kappa_q});
  const double gamma_phi = std::max(0.0, sp.gamma_q - 0.5 * sp.kappa_q);
  if (gamma_phi > 0.0) {
    Matrix sz = 2.0 * (sm.matrix.adjoint() * sm.matrix);
    sz -= Matrix::Identity(space.total_dim, space.total_dim);
    model.jumps.push_back({Operator{space, sz}, 0.5 * gamma_phi});
  }
  model.drive_frame_ghz = wd;
  return model;
}

// ---------------------------------------------------------------------------
// Time evolution (embedded Dormand-Prince 5(4))
// ---------------------------------------------------------------------------

namespace {

struct AngularJump {
  Matrix x;
  Matrix xdx;  // x^dag x
  double gamma;
};

// drho/dt in 1/ns, matrix form (no superoperator is materialized).
Matrix lindblad_rhs(const Matrix& h_ang, const std::vector<AngularJump>& jumps,
                    const Matrix& rho) {
  const Complex i(0.0, 1.0);
  Matrix out = -i * (h_ang * rho - rho * h_ang);
  for (const AngularJump& j : jumps) {
    out += j.gamma * (j.x * rho * j.x.adjoint()) -
           (0.5 * j.gamma) * (j.xdx * rho + rho * j.xdx);
  }
  return out;
}

}  // namespace

std::vector<QuantumState> evolve(const LindbladModel& model,
                                 const QuantumState& rho0,
                                 const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("evolve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("evolve: time grid must be ascending");
  if (!rho0.space.same_shape(model.hamiltonian.space))
    throw std::invalid_argument("evolve: state and model spaces differ");

  const Matrix h_ang = ghz_to_rad_per_ns(1.0) * model.hamiltonian.matrix;
  std::vector<AngularJump> jumps;
  for (const JumpSpec& j : model.jumps) {
    if (j.rate_mhz < 0.0)
      throw std::invalid_argument("evolve: negative jump rate");
    if (j.rate_mhz == 0.0) continue;
    jumps.push_back(
        {j.op.matrix, j.op.matrix.adjoint() * j.op.matrix,
         mhz_to_rad_per_ns(j.rate_mhz)});
  }

  // Dormand-Prince 5(4) tableau (the RHS is autonomous, so the nodes are
  // not needed). a[6] doubles as the 5th-order weights.
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double e[7] = {35.0 / 384 - 5179.0 / 57600,
                              0.0,
                              500.0 / 1113 - 7571.0 / 16695,
                              125.0 / 192 - 393.0 / 640,
                              -2187.0 / 6784 + 92097.0 / 339200,
                              11.0 / 84 - 187.0 / 2100,
                              -1.0 / 40};

  Matrix rho = rho0.as_density();
  const double trace0 = std::abs(rho.trace().real());
  // Tighter than the 1e-8 contract so accumulated error stays well inside the
  // positivity validation floor on long evolutions.
  const double atol = 1e-10 * std::max(1.0, trace0);
  const double t_span = std::max(1.0, t_grid.back() - t_grid.front());
  const double min_dt = 1e-12 * t_span;

  std::vector<QuantumState> out;
  out.reserve(t_grid.size());
  out.push_back(QuantumState::density_state(rho0.space, rho));

  double t = t_grid.front();
  double dt = 1e-2;
  Matrix k[7];

  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const double t_target = t_grid[gi];
    while (t < t_target) {
      const double remain = t_target - t;
      if (remain <= min_dt) {  // within roundoff of the grid point
        t = t_target;
        break;
      }
      const double step = std::min(dt, remain);
      k[0] = lindblad_rhs(h_ang, jumps, rho);
      for (int s = 1; s < 7; ++s) {
        Matrix y = rho;
        for (int j = 0; j < s; ++j)
          if (a[s][j] != 0.0) y += (step * a[s][j]) * k[j];
        k[s] = lindblad_rhs(h_ang, jumps, y);
      }
      Matrix y5 = rho;
      for (int s = 0; s < 6; ++s)
        if (a[6][s] != 0.0) y5 += (step * a[6][s]) * k[s];
      Matrix err_m = Matrix::Zero(rho.rows(), rho.cols());
      for (int s = 0; s < 7; ++s)
        if (e[s] != 0.0) err_m += (step * e[s]) * k[s];
      const double err = err_m.norm();

      const bool accepted = err <= atol;
      if (accepted) {
        rho = 0.5 * (y5 + Matrix(y5.adjoint()));  // keep hermitian drift out
        t += step;
      }
      const double grow = err > 0.0 ? 0.9 * std::pow(atol / err, 0.2) : 5.0;
      const double factor = std::min(5.0, std::max(0.2, grow));
      // A step capped to land on the grid must not shrink the working size.
      if (accepted && step < dt)
        dt = std::max(dt, factor * step);
      else
        dt = factor * step;
      if (dt < min_dt) {
        std::ostringstream msg;
        msg << "evolve: step size collapsed (stiff problem?) at t=" << t
            << " ns, dt=" << dt << " ns, local error=" << err
            << ", tolerance=" << atol
            << "; consider a rotating frame or a branch model";
        throw std::runtime_error(msg.str());
      }
    }
    out.push_back(QuantumState::density_state(rho0.space, rho));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Steady state
// ---------------------------------------------------------------------------

QuantumState steady_state(const LindbladModel& model) {
  const HilbertSpace& space = model.hamiltonian.space;
  const int d = space.total_dim;
  if (d > 64)
    throw std::invalid_argument(
        "steady_state: joint solves are restricted to total dimension <= 64; "
        "use a per-branch model");

  const Matrix l = liouvillian(model.hamiltonian, model.jumps);
  Eigen::BDCSVD<Matrix> svd(l, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int n = static_cast<int>(sv.size());
  const double scale = std::max(1.0, sv(0));
  if (n >= 2 && sv(n - 2) <= 1e-10 * scale) {
    std::ostringstream msg;
    msg << "steady_state: degenerate steady space (second-smallest singular "
           "value "
        << sv(n - 2) << " vs largest " << sv(0) << ")";
    throw std::runtime_error(msg.str());
  }

  Vector v = svd.matrixV().col(n - 1);
  Matrix rho = Eigen::Map<const Matrix>(v.data(), d, d);
  rho = 0.5 * (rho + Matrix(rho.adjoint()));
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-8 * rho.norm())
    throw std::runtime_error(
        "steady_state: null vector is traceless; steady space is degenerate");
  rho /= tr;

  const Vector resid = l * Eigen::Map<const Vector>(rho.data(), d * d);
  if (resid.norm() > 1e-10 * scale * rho.norm())
    throw std::runtime_error(
        "steady_state: residual ||L rho|| exceeded tolerance");

  return QuantumState::density_state(space, rho);
}

// ---------------------------------------------------------------------------
// Input-output response
// ---------------------------------------------------------------------------

Complex transmission_amplitude(const SystemParams& sp, double omega_d_ghz,
                               int sigma_z) {
  const PolaritonParams pp = polariton_params(sp, sigma_z);
  return two_pole_amplitude(sp.drive.omega_mhz, pp.theta, pp.kappa_l,
                            pp.kappa_u, pp.omega_l, pp.omega_u, omega_d_ghz);
}

bool drive_is_weak(const SystemParams& sp) {
  const PolaritonParams pp = polariton_params(sp, 0);
  return sp.drive.omega_mhz <= 0.05 * std::min(pp.kappa_l, pp.kappa_u);
}

// ---------------------------------------------------------------------------
// Record synthesis
// ---------------------------------------------------------------------------

RecordModel record_model(const SystemParams& sp, const ReadoutSpec& readout) {
  validate_system(sp);
  if (readout.n_bar <= 0.0)
    throw std::invalid_argument("record_model: n_bar must be > 0");
  if (readout.integration_window_ns < kSampleStepNs)
    throw std::invalid_argument(
        "record_model: integration window must cover at least one sample");

  const PolaritonParams ppm = polariton_params(sp, -1);
  const PolaritonParams ppp = polariton_params(sp, +1);

  RecordModel rm;
  // Readout tone: on the excited-branch lower polariton, i.e. the
  // ground-branch line shifted by the full conditional 2 chi_l.
  rm.omega_d_ghz = ppm.omega_l + 2.0 * ppm.chi_l;
  // Amplitude chosen so the driven (excited-branch) lower polariton holds
  // n_bar photons on resonance: |a_l|^2 = (2 W cos(th)/kappa_l)^2 = n_bar.
  rm.omega_mhz =
      0.5 * ppp.kappa_l * std::sqrt(readout.n_bar) / std::cos(ppp.theta);

  const Complex t_g =
      two_pole_amplitude(rm.omega_mhz, ppm.theta, ppm.kappa_l, ppm.kappa_u,
                         ppm.omega_l, ppm.omega_u, rm.omega_d_ghz);
  const Complex t_e =
      two_pole_amplitude(rm.omega_mhz, ppp.theta, ppp.kappa_l, ppp.kappa_u,
                         ppp.omega_l, ppp.omega_u, rm.omega_d_ghz);
  // Second excited level: the conditional shift doubles again (the response
  // centers move to 4 chi), while the angle/linewidths stay at the excited-
  // branch values.
  const Complex t_f = two_pole_amplitude(
      rm.omega_mhz, ppp.theta, ppp.kappa_l, ppp.kappa_u,
      ppm.omega_l + 4.0 * ppm.chi_l, ppm.omega_u + 4.0 * ppm.chi_u,
      rm.omega_d_ghz);

  // Rotate the measurement quadrature onto the g-e separation axis.
  const double phase = -std::arg(t_g - t_e);
  const Complex rot = std::exp(Complex(0.0, phase));
  rm.i_ground = (rot * t_g).real();
  rm.i_excited = (rot * t_e).real();
  rm.i_leaked = (rot * t_f).real();

  rm.tau_filter_ns = 2.0 / mhz_to_rad_per_ns(ppp.kappa_l);
  rm.t1_ns = sp.kappa_q > 0.0 ? 1.0 / mhz_to_rad_per_ns(sp.kappa_q)
                              : std::numeric_limits<double>::infinity();

  // Noise anchor: the steady-state integrated SNR over the anchor window is
  //   z = eta n_bar Q_r t_w / T1,  Q_r = 4 chi^2 kappa T1 / (kappa^2/4+chi^2)
  // (ground-branch chi_l, kappa_l, angular units). T1 cancels, so the anchor
  // also holds in the lossless limit.
  const double chi = ghz_to_rad_per_ns(std::abs(ppm.chi_l));
  const double kap = mhz_to_rad_per_ns(ppm.kappa_l);
  const double rate = 4.0 * chi * chi * kap / (0.25 * kap * kap + chi * chi);
  const double z_ss = sp.eta * readout.n_bar * rate *
                      readout.integration_window_ns;
  const double delta_i = std::abs(rm.i_ground - rm.i_excited);
  const double sigma_int = delta_i / (2.0 * z_ss);
  rm.sigma_sample =
      sigma_int * std::sqrt(readout.integration_window_ns / kSampleStepNs);
  return rm;
}

namespace {

enum class Level { g, e, f };

double level_target(const RecordModel& rm, Level s) {
  switch (s) {
    case Level::g: return rm.i_ground;
    case Level::e: return rm.i_excited;
    case Level::f: return rm.i_leaked;
  }
  return 0.0;
}

// Jump rate out of `s` in 1/ns. g only climbs thermally; f relaxes at twice
// the qubit rate.
double level_rate(Level s, double t1_ns, double thermal_pop) {
  if (!std::isfinite(t1_ns)) return 0.0;
  switch (s) {
    case Level::g:
      return thermal_pop > 0.0 ? thermal_pop / ((1.0 - thermal_pop) * t1_ns)
                               : 0.0;
    case Level::e: return 1.0 / t1_ns;
    case Level::f: return 2.0 / t1_ns;
  }
  return 0.0;
}

Level level_after_jump(Level s) {
  switch (s) {
    case Level::g: return Level::e;
    case Level::e: return Level::g;
    case Level::f: return Level::e;
  }
  return Level::g;
}

// Walks the conditional filter response through [t0, t1) with the drive
// gate `drive_on`, sampling at every integer-plus-half time inside and
// appending jump times. State/filter value are carried via refs.
struct FilterWalker {
  const RecordModel& rm;
  double thermal_pop;
  RandomStream& rng;
  bool noiseless;

  Level state;
  double t;             // current time
  double i_value;       // current filter output
  double next_jump;

  std::vector<double>* jump_times = nullptr;

  void advance_to(double t_new, bool drive_on) {
    const double target = drive_on ? level_target(rm, state) : 0.0;
    i_value = target + (i_value - target) *
                           std::exp(-(t_new - t) / rm.tau_filter_ns);
    t = t_new;
  }

  void schedule_jump() {
    next_jump =
        t + rng.exponential(level_rate(state, rm.t1_ns, thermal_pop));
  }

  // Walk through [t, t_end): jumps are processed at their exact times, the
  // filter is advanced exactly (piecewise exponential), and samples land on
  // the integer-plus-half grid strictly inside the segment.
  void run_segment(double t_end, bool drive_on, std::vector<double>* times,
                   std::vector<double>* values) {
    double ts = std::floor(t) + 0.5;
    if (ts < t) ts += 1.0;
    while (t < t_end) {
      const bool sample_due = ts < t_end;
      const double t_stop = sample_due ? ts : t_end;
      if (next_jump < t_stop) {
        advance_to(next_jump, drive_on);
        state = level_after_jump(state);
        if (jump_times) jump_times->push_back(t);
        schedule_jump();
        continue;
      }
      advance_to(t_stop, drive_on);
      if (sample_due) {
        if (times) {
          times->push_back(t);
          const double noise = noiseless ? 0.0 : rm.sigma_sample * rng.normal();
          values->push_back(i_value + noise);
        }
        ts += 1.0;
      }
    }
  }
};

void require_whole_ns(double v, const char* what) {
  if (v < kSampleStepNs || std::abs(v - std::llround(v)) > 1e-9)
    throw std::invalid_argument(std::string(what) +
                                " must be a whole number of 1 ns samples");
}

}  // namespace

std::vector<MeasurementRecord> simulate_records(
    const SystemParams& sp, PreparedState prepared, int n_records,
    double duration_ns, const ReadoutSpec& readout, double thermal_pop,
    std::uint64_t seed) {
  if (n_records < 0)
    throw std::invalid_argument("simulate_records: n_records must be >= 0");
  require_whole_ns(duration_ns, "simulate_records: duration");
  if (thermal_pop < 0.0 || thermal_pop >= 0.5)
    throw std::invalid_argument(
        "simulate_records: thermal_pop must be in [0, 0.5)");
  if (readout.n_bar > 5.0)
    std::cerr << "simulate_records: n_bar > 5 leaves the weak-dispersive "
                 "regime the response model assumes\n";

  const RecordModel rm = record_model(sp, readout);

  std::vector<MeasurementRecord> records;
  records.reserve(static_cast<std::size_t>(n_records));
  for (int k = 0; k < n_records; ++k) {
    RandomStream rng(seed, static_cast<std::uint64_t>(k));
    MeasurementRecord rec;
    rec.prepared = prepared;
    rec.integration_window_ns = readout.integration_window_ns;

    FilterWalker w{rm,
                   thermal_pop,
                   rng,
                   readout.noiseless,
                   prepared == PreparedState::e ? Level::e : Level::g,
                   0.0,
                   0.0,
                   0.0,
                   &rec.jump_times};
    w.schedule_jump();
    w.run_segment(duration_ns, /*drive_on=*/true, &rec.times, &rec.i_values);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ProtocolRecord> simulate_protocol_records(const SystemParams& sp,
                                                      PreparedState prepared,
                                                      int n_records,
                                                      const ProtocolSpec& spec,
                                                      std::uint64_t seed) {
  if (n_records < 0)
    throw std::invalid_argument(
        "simulate_protocol_records: n_records must be >= 0");
  require_whole_ns(spec.herald_ns, "simulate_protocol_records: herald window");
  require_whole_ns(spec.measure_ns,
                   "simulate_protocol_records: measurement window");
  if (spec.wait_ns < 0.0)
    throw std::invalid_argument(
        "simulate_protocol_records: wait must be >= 0");
  if (spec.thermal_pop < 0.0 || spec.thermal_pop >= 0.5)
    throw std::invalid_argument(
        "simulate_protocol_records: thermal_pop must be in [0, 0.5)");
  if (spec.p_pi_error < 0.0 || spec.p_leak_f < 0.0 ||
      spec.p_pi_error + spec.p_leak_f > 1.0)
    throw std::invalid_argument(
        "simulate_protocol_records: pulse error probabilities must be >= 0 "
        "and sum to <= 1");
  if (spec.readout.n_bar > 5.0)
    std::cerr << "simulate_protocol_records: n_bar > 5 leaves the "
                 "weak-dispersive regime the response model assumes\n";

  const RecordModel rm = record_model(sp, spec.readout);
  const double t_pulse = spec.herald_ns + spec.wait_ns;
  const double t_total = t_pulse + spec.measure_ns;

  std::vector<ProtocolRecord> records;
  records.reserve(static_cast<std::size_t>(n_records));
  for (int k = 0; k < n_records; ++k) {
    RandomStream rng(seed, static_cast<std::uint64_t>(k));
    ProtocolRecord rec;
    rec.prepared = prepared;

    const Level init =
        rng.uniform() <= spec.thermal_pop ? Level::e : Level::g;
    FilterWalker w{rm,    spec.thermal_pop, rng, spec.readout.noiseless,
                   init,  0.0,              0.0, 0.0,
                   nullptr};
    w.schedule_jump();

    w.run_segment(spec.herald_ns, /*drive_on=*/true, &rec.herald_times,
                  &rec.herald_i);
    w.run_segment(t_pulse, /*drive_on=*/false, nullptr, nullptr);

    if (prepared == PreparedState::e) {
      const double u = rng.uniform();
      if (u <= spec.p_pi_error) {
        // pulse failed: state unchanged
      } else if (u <= spec.p_pi_error + spec.p_leak_f) {
        w.state = Level::f;
      } else if (w.state == Level::g) {
        w.state = Level::e;
      } else if (w.state == Level::e) {
        w.state = Level::g;
      }
      w.schedule_jump();  // rates changed with the state
    }

    w.run_segment(t_total, /*drive_on=*/true, &rec.measure_times,
                  &rec.measure_i);
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

void write_records_csv(const std::string& path,
                       const std::vector<MeasurementRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_records_csv: cannot open " + path);
  out << "time_ns,i_value,prepared\n";
  out.precision(17);
  for (const MeasurementRecord& rec : records) {
    const char label = rec.prepared == PreparedState::e ? 'e' : 'g';
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      out << rec.times[i] << ',' << rec.i_values[i] << ',' << label << '\n';
  }
  if (!out) throw std::runtime_error("write_records_csv: write failed");
}

std::vector<MeasurementRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_records_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("time_ns,i_value,prepared", 0) != 0)
    throw std::runtime_error(
        "read_records_csv: missing 'time_ns,i_value,prepared' header in " +
        path);

  std::vector<MeasurementRecord> records;
  double prev_time = std::numeric_limits<double>::infinity();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_str, i_str, label;
    if (!std::getline(row, t_str, ',') || !std::getline(row, i_str, ',') ||
        !std::getline(row, label))
      throw std::runtime_error("read_records_csv: malformed row at line " +
                               std::to_string(line_no));
    const double t = std::stod(t_str);
    const double iv = std::stod(i_str);
    if (label != "g" && label != "e")
      throw std::runtime_error(
          "read_records_csv: prepared label must be 'g' or 'e' at line " +
          std::to_string(line_no));
    if (t < prev_time) {
      records.emplace_back();
      records.back().prepared =
          label == "e" ? PreparedState::e : PreparedState::g;
    }
    records.back().times.push_back(t);
    records.back().i_values.push_back(iv);
    prev_time = t;
  }
  return records;
}

}  // namespace xkerr
