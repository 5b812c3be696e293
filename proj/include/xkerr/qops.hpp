#pragma once

// Operator-algebra kernel: truncated bosonic/qubit modes on a tensor-product
// number basis, ladder/number/phase operators, hermitian eigensolves, and
// vectorized Liouvillian construction.
//
// Everything is dense complex; working truncations stay small (~8 levels per
// mode, ~512 total states; hard cap 4096 for convergence checks). Values are
// immutable after construction and safe to share across threads.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace xkerr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Numerical tolerances. Fixed defaults, overridable from the run config.
struct Tolerances {
  double ket_norm = 1e-9;        // | ||psi|| - 1 |
  double hermiticity = 1e-9;     // ||A - A^dag|| / max(1, ||A||)
  double trace = 1e-9;           // | tr(rho) - 1 |
  double positivity_floor = -1e-8;  // smallest admissible eigenvalue of rho
  double eig_residual = 1e-8;    // ||A v - lambda v|| / ||A||
};

// Global tolerance set; config loading may override it once at startup.
Tolerances& tolerances();

struct ModeSpec {
  std::string name;
  int dim = 0;  // truncation levels, >= 2
};

struct HilbertSpace {
  std::vector<ModeSpec> modes;  // fixed canonical order (qubit, ancilla, cavity)
  int total_dim = 0;

  static HilbertSpace make(std::vector<ModeSpec> modes);
  int mode_index(const std::string& name) const;  // throws on unknown label
  int dim(int mode) const { return modes.at(static_cast<size_t>(mode)).dim; }
  bool same_shape(const HilbertSpace& other) const;
};

// The canonical three-mode space used by the circuit and dynamics layers.
HilbertSpace qubit_ancilla_cavity_space(int dq, int da, int dc);
HilbertSpace single_mode_space(const std::string& name, int dim);

struct Operator {
  HilbertSpace space;
  Matrix matrix;  // total_dim x total_dim
};

Matrix kron(const Matrix& a, const Matrix& b);

Operator identity_op(const HilbertSpace& space);
// Embed a dim(mode) x dim(mode) matrix into the full space with identity
// factors on the other modes.
Operator embed(const HilbertSpace& space, int mode, const Matrix& local);

// Annihilation operator on one mode, <n-1|a|n> = sqrt(n), identity elsewhere.
Operator ladder(const HilbertSpace& space, int mode);
Operator ladder(const HilbertSpace& space, const std::string& mode_name);

// Harmonic-basis number and phase operators for a transmon-like mode:
//   phi = (8 E_C / E_J_eff)^{1/4} (x + x^dag) / sqrt(2)
//   n   = -i (E_J_eff / 8 E_C)^{1/4} (x - x^dag) / sqrt(2)
// Both energies in the same (frequency) units; only their ratio enters.
struct NumberPhase {
  Operator number;
  Operator phase;
};
NumberPhase number_and_phase(const HilbertSpace& space, int mode, double e_c,
                             double e_j_eff);

struct QuantumState {
  enum class Kind { ket, density };
  Kind kind = Kind::ket;
  HilbertSpace space;
  Vector ket;  // valid when kind == ket
  Matrix rho;  // valid when kind == density

  // Validating constructors; throw std::invalid_argument on violations.
  static QuantumState ket_state(const HilbertSpace& space, Vector v);
  static QuantumState density_state(const HilbertSpace& space, Matrix m,
                                    bool check_positivity = true);
  Matrix as_density() const;
};

// Basis ket |n0, n1, ...> of the product space.
QuantumState basis_ket(const HilbertSpace& space, const std::vector<int>& occ);

struct EigResult {
  RealVector values;  // ascending
  Matrix vectors;     // columns are orthonormal eigenvectors
};

// Hermitian eigensolve with residual verification. Throws on non-hermitian
// input (within tolerances().hermiticity) or residuals above tolerance.
EigResult eig_hermitian(const Operator& op);
EigResult eig_hermitian(const Matrix& m);

// Apply f to a hermitian matrix through its eigendecomposition. This is how
// all matrix cosines/sines are evaluated: exact on the truncated space.
Matrix hermitian_matrix_function(const Matrix& m, double (*f)(double));

// One Lindblad collapse channel: operator and linear rate in MHz.
struct JumpSpec {
  Operator op;
  double rate_mhz = 0.0;
};

// Vectorized Lindblad generator, column-stacking convention
// (vec(A X B) = (B^T kron A) vec(X)):
//   L = -i 2pi (I kron H - H^T kron I)
//     + sum_k 2pi 1e-3 kappa_k [ conj(x) kron x
//                                - 1/2 I kron x^dag x - 1/2 (x^dag x)^T kron I ]
// with H in GHz and rates in MHz, so that d vec(rho)/dt is in 1/ns.
Matrix liouvillian(const Operator& hamiltonian_ghz,
                   const std::vector<JumpSpec>& jumps);

}  // namespace xkerr
