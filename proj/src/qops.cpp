#include "xkerr/qops.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "xkerr/constants.hpp"

namespace xkerr {

Tolerances& tolerances() {
  static Tolerances tol;
  return tol;
}

HilbertSpace HilbertSpace::make(std::vector<ModeSpec> modes) {
  if (modes.empty()) throw std::invalid_argument("HilbertSpace: no modes given");
  std::set<std::string> seen;
  long total = 1;
  for (const auto& m : modes) {
    if (m.dim < 2)
      throw std::invalid_argument("HilbertSpace: mode '" + m.name +
                                  "' needs dim >= 2, got " + std::to_string(m.dim));
    if (!seen.insert(m.name).second)
      throw std::invalid_argument("HilbertSpace: duplicate mode name '" + m.name + "'");
    total *= m.dim;
  }
  if (total > 4096)
    throw std::invalid_argument("HilbertSpace: total dimension " + std::to_string(total) +
                                " exceeds dense limit 4096");
  HilbertSpace s;
  s.modes = std::move(modes);
  s.total_dim = static_cast<int>(total);
  return s;
}

int HilbertSpace::mode_index(const std::string& name) const {
  for (size_t i = 0; i < modes.size(); ++i)
    if (modes[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("HilbertSpace: unknown mode '" + name + "'");
}

bool HilbertSpace::same_shape(const HilbertSpace& other) const {
  if (modes.size() != other.modes.size()) return false;
  for (size_t i = 0; i < modes.size(); ++i)
    if (modes[i].dim != other.modes[i].dim || modes[i].name != other.modes[i].name)
      return false;
  return true;
}

HilbertSpace qubit_ancilla_cavity_space(int dq, int da, int dc) {
  return HilbertSpace::make({{"qubit", dq}, {"ancilla", da}, {"cavity", dc}});
}

HilbertSpace single_mode_space(const std::string& name, int dim) {
  return HilbertSpace::make({{name, dim}});
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator identity_op(const HilbertSpace& space) {
  return {space, Matrix::Identity(space.total_dim, space.total_dim)};
}

Operator embed(const HilbertSpace& space, int mode, const Matrix& local) {
  if (mode < 0 || mode >= static_cast<int>(space.modes.size()))
    throw std::invalid_argument("embed: mode index out of range");
  const int d = space.dim(mode);
  if (local.rows() != d || local.cols() != d)
    throw std::invalid_argument("embed: local matrix shape does not match mode dim");
  Matrix acc = Matrix::Identity(1, 1);
  for (size_t k = 0; k < space.modes.size(); ++k) {
    if (static_cast<int>(k) == mode)
      acc = kron(acc, local);
    else
      acc = kron(acc, Matrix::Identity(space.modes[k].dim, space.modes[k].dim));
  }
  return {space, std::move(acc)};
}

Operator ladder(const HilbertSpace& space, int mode) {
  const int d = space.dim(mode);
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed(space, mode, a);
}

Operator ladder(const HilbertSpace& space, const std::string& mode_name) {
  return ladder(space, space.mode_index(mode_name));
}

NumberPhase number_and_phase(const HilbertSpace& space, int mode, double e_c,
                             double e_j_eff) {
  if (e_c <= 0.0 || e_j_eff <= 0.0)
    throw std::invalid_argument("number_and_phase: energies must be positive");
  const double xi = std::pow(8.0 * e_c / e_j_eff, 0.25);  // zero-point phase scale
  const int d = space.dim(mode);
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Matrix ad = a.adjoint();
  Matrix phase = xi / std::sqrt(2.0) * (a + ad);
  Matrix number = Complex(0, -1) / (xi * std::sqrt(2.0)) * (a - ad);
  return {embed(space, mode, number), embed(space, mode, phase)};
}

QuantumState QuantumState::ket_state(const HilbertSpace& space, Vector v) {
  if (v.size() != space.total_dim)
    throw std::invalid_argument("ket_state: vector length does not match space");
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > tolerances().ket_norm)
    throw std::invalid_argument("ket_state: norm deviates from 1 by " +
                                std::to_string(std::abs(norm - 1.0)));
  QuantumState s;
  s.kind = Kind::ket;
  s.space = space;
  s.ket = std::move(v);
  return s;
}

QuantumState QuantumState::density_state(const HilbertSpace& space, Matrix m,
                                         bool check_positivity) {
  if (m.rows() != space.total_dim || m.cols() != space.total_dim)
    throw std::invalid_argument("density_state: matrix shape does not match space");
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() / scale > tolerances().hermiticity)
    throw std::invalid_argument("density_state: matrix is not hermitian");
  const double tr_err = std::abs(m.trace().real() - 1.0) + std::abs(m.trace().imag());
  if (tr_err > tolerances().trace)
    throw std::invalid_argument("density_state: trace deviates from 1 by " +
                                std::to_string(tr_err));
  if (check_positivity) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < tolerances().positivity_floor)
      throw std::invalid_argument("density_state: negative eigenvalue " +
                                  std::to_string(min_eig));
  }
  QuantumState s;
  s.kind = Kind::density;
  s.space = space;
  s.rho = std::move(m);
  return s;
}

Matrix QuantumState::as_density() const {
  if (kind == Kind::density) return rho;
  return ket * ket.adjoint();
}

QuantumState basis_ket(const HilbertSpace& space, const std::vector<int>& occ) {
  if (occ.size() != space.modes.size())
    throw std::invalid_argument("basis_ket: occupation list length mismatch");
  long idx = 0;
  for (size_t k = 0; k < occ.size(); ++k) {
    if (occ[k] < 0 || occ[k] >= space.modes[k].dim)
      throw std::invalid_argument("basis_ket: occupation out of range for mode '" +
                                  space.modes[k].name + "'");
    idx = idx * space.modes[k].dim + occ[k];
  }
  Vector v = Vector::Zero(space.total_dim);
  v(idx) = 1.0;
  return QuantumState::ket_state(space, std::move(v));
}

EigResult eig_hermitian(const Matrix& m) {
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() / scale > tolerances().hermiticity)
    throw std::invalid_argument("eig_hermitian: matrix is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  EigResult r{es.eigenvalues(), es.eigenvectors()};
  // Residual check: ||A V - V diag(w)|| against ||A||.
  const double resid =
      (m * r.vectors - r.vectors * r.values.asDiagonal().toDenseMatrix().cast<Complex>())
          .norm();
  if (resid > tolerances().eig_residual * scale)
    throw std::runtime_error("eig_hermitian: residual " + std::to_string(resid) +
                             " exceeds tolerance");
  return r;
}

EigResult eig_hermitian(const Operator& op) { return eig_hermitian(op.matrix); }

Matrix hermitian_matrix_function(const Matrix& m, double (*f)(double)) {
  EigResult r = eig_hermitian(m);
  RealVector fw(r.values.size());
  for (Eigen::Index i = 0; i < r.values.size(); ++i) fw(i) = f(r.values(i));
  return r.vectors * fw.asDiagonal().toDenseMatrix().cast<Complex>() *
         r.vectors.adjoint();
}

Matrix liouvillian(const Operator& hamiltonian_ghz, const std::vector<JumpSpec>& jumps) {
  const Matrix& h = hamiltonian_ghz.matrix;
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  const double scale = std::max(1.0, h.norm());
  if ((h - h.adjoint()).norm() / scale > tolerances().hermiticity)
    throw std::invalid_argument("liouvillian: hamiltonian is not hermitian");

  // Coherent part: dρ/dt = -i 2π [H, ρ], H in GHz, t in ns.
  Matrix l = Complex(0, -1) * ghz_to_rad_per_ns(1.0) *
             (kron(id, h) - kron(h.transpose(), id));

  for (const auto& j : jumps) {
    if (j.rate_mhz < 0.0)
      throw std::invalid_argument("liouvillian: negative jump rate");
    if (j.rate_mhz == 0.0) continue;
    if (!j.op.space.same_shape(hamiltonian_ghz.space))
      throw std::invalid_argument("liouvillian: jump operator lives on a different space");
    const Matrix& x = j.op.matrix;
    const Matrix xdx = x.adjoint() * x;
    const double g = mhz_to_rad_per_ns(j.rate_mhz);  // 2π · 1e-3 · rate, 1/ns
    l += g * (kron(x.conjugate(), x) - 0.5 * kron(id, xdx) -
              0.5 * kron(xdx.transpose(), id));
  }
  return l;
}

}  // namespace xkerr
