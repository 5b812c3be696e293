#include "xkerr/qops.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "xkerr/constants.hpp"

using namespace xkerr;

namespace {

Matrix random_hermitian(int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (m + Matrix(m.adjoint()));
}

Matrix random_density(int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return rho;
}

// Column-stacked matrix <-> vector helpers matching the liouvillian convention.
Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}
Matrix unvec(const Vector& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

}  // namespace

TEST(HilbertSpaceTest, RejectsBadModes) {
  EXPECT_THROW(HilbertSpace::make({{"q", 1}}), std::invalid_argument);
  EXPECT_THROW(HilbertSpace::make({{"q", 2}, {"q", 3}}), std::invalid_argument);
  EXPECT_THROW(HilbertSpace::make({{"a", 17}, {"b", 16}, {"c", 16}}),
               std::invalid_argument);  // 4352 > 4096
  EXPECT_NO_THROW(qubit_ancilla_cavity_space(8, 8, 8));
}

TEST(HilbertSpaceTest, CanonicalOrderAndIndexing) {
  auto s = qubit_ancilla_cavity_space(2, 3, 4);
  EXPECT_EQ(s.total_dim, 24);
  EXPECT_EQ(s.mode_index("qubit"), 0);
  EXPECT_EQ(s.mode_index("ancilla"), 1);
  EXPECT_EQ(s.mode_index("cavity"), 2);
  EXPECT_THROW(s.mode_index("flux"), std::invalid_argument);

  // Mode 0 is the leftmost kron factor: |q,n_a,n_c> lives at ((q*3)+n_a)*4+n_c.
  auto ket = basis_ket(s, {1, 2, 3});
  Eigen::Index idx;
  ket.ket.cwiseAbs().maxCoeff(&idx);
  EXPECT_EQ(idx, (1 * 3 + 2) * 4 + 3);

  auto n_q = embed(s, 0, (Matrix(2, 2) << 0, 0, 0, 1).finished());
  Complex val = ket.ket.adjoint() * n_q.matrix * ket.ket;
  EXPECT_NEAR(val.real(), 1.0, 1e-14);
}

TEST(LadderTest, TwoLevelMatrix) {
  auto s = single_mode_space("m", 2);
  auto a = ladder(s, 0);
  Matrix expect(2, 2);
  expect << 0, 1, 0, 0;
  EXPECT_LT((a.matrix - expect).norm(), 1e-15);
}

TEST(LadderTest, SqrtNSuperdiagonal) {
  auto s = single_mode_space("m", 7);
  auto a = ladder(s, "m");
  for (int n = 1; n < 7; ++n)
    EXPECT_NEAR(a.matrix(n - 1, n).real(), std::sqrt(double(n)), 1e-14);
  EXPECT_NEAR(a.matrix.cwiseAbs().sum(),
              a.matrix.diagonal(1).cwiseAbs().sum(), 1e-14);
}

TEST(LadderTest, CommutatorIsIdentityAwayFromTruncation) {
  auto s = single_mode_space("m", 8);
  auto a = ladder(s, 0);
  Matrix comm = a.matrix * a.matrix.adjoint() - a.matrix.adjoint() * a.matrix;
  // [a, a^dag] = 1 on every level except the truncated top one.
  for (int n = 0; n < 7; ++n) EXPECT_NEAR(comm(n, n).real(), 1.0, 1e-13);
  EXPECT_NEAR(comm(7, 7).real(), -7.0, 1e-12);
}

TEST(LadderTest, EmbeddedOnMultiModeSpace) {
  auto s = qubit_ancilla_cavity_space(2, 3, 4);
  auto a_c = ladder(s, "cavity");
  auto ket = basis_ket(s, {0, 1, 2});
  Vector lowered = a_c.matrix * ket.ket;
  auto target = basis_ket(s, {0, 1, 1});
  Complex overlap = target.ket.adjoint() * lowered;
  EXPECT_NEAR(overlap.real(), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(lowered.norm(), std::sqrt(2.0), 1e-14);
}

TEST(NumberPhaseTest, UnitPrefactorWhenEnergiesMatch) {
  // 8 E_C = E_J makes the zero-point scale exactly 1.
  auto s = single_mode_space("t", 10);
  auto np = number_and_phase(s, 0, 1.0, 8.0);
  auto a = ladder(s, 0).matrix;
  Matrix x = (a + Matrix(a.adjoint())) / std::sqrt(2.0);
  EXPECT_LT((np.phase.matrix - x).norm(), 1e-14);
}

TEST(NumberPhaseTest, CanonicalCommutator) {
  auto s = single_mode_space("t", 12);
  auto np = number_and_phase(s, 0, 0.088, 29.2 * 2.0);
  Matrix comm = np.phase.matrix * np.number.matrix - np.number.matrix * np.phase.matrix;
  // [phi, n] = i away from the truncation boundary.
  for (int n = 0; n < 11; ++n) {
    EXPECT_NEAR(comm(n, n).imag(), 1.0, 1e-12);
    EXPECT_NEAR(comm(n, n).real(), 0.0, 1e-12);
  }
}

TEST(NumberPhaseTest, VacuumPhaseVariance) {
  const double e_c = 0.088, e_j = 58.4;
  auto s = single_mode_space("t", 8);
  auto np = number_and_phase(s, 0, e_c, e_j);
  Matrix phi2 = np.phase.matrix * np.phase.matrix;
  EXPECT_NEAR(phi2(0, 0).real(), std::sqrt(2.0 * e_c / e_j), 1e-13);
}

TEST(QuantumStateTest, KetNormValidation) {
  auto s = single_mode_space("m", 3);
  Vector v = Vector::Zero(3);
  v(0) = 1.0 + 1e-6;
  EXPECT_THROW(QuantumState::ket_state(s, v), std::invalid_argument);
  v(0) = 1.0 + 1e-12;
  EXPECT_NO_THROW(QuantumState::ket_state(s, v));
}

TEST(QuantumStateTest, DensityValidation) {
  auto s = single_mode_space("m", 3);
  Matrix rho = Matrix::Zero(3, 3);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.3;
  rho(0, 1) = Complex(0.1, 0.05);
  EXPECT_THROW(QuantumState::density_state(s, rho), std::invalid_argument);  // not hermitian
  rho(1, 0) = std::conj(rho(0, 1));
  EXPECT_NO_THROW(QuantumState::density_state(s, rho));

  Matrix bad_trace = rho;
  bad_trace(2, 2) = 0.1;
  EXPECT_THROW(QuantumState::density_state(s, bad_trace), std::invalid_argument);

  Matrix neg = Matrix::Zero(3, 3);
  neg(0, 0) = 1.001;
  neg(1, 1) = -0.001;  // well below the -1e-8 floor
  EXPECT_THROW(QuantumState::density_state(s, neg), std::invalid_argument);
}

TEST(EigHermitianTest, DiagonalMatrix) {
  Matrix m = Matrix::Zero(4, 4);
  m.diagonal() << 3.0, -1.0, 2.0, 0.5;
  auto r = eig_hermitian(m);
  EXPECT_NEAR(r.values(0), -1.0, 1e-14);
  EXPECT_NEAR(r.values(3), 3.0, 1e-14);
  EXPECT_TRUE(std::is_sorted(r.values.data(), r.values.data() + 4));
}

TEST(EigHermitianTest, PauliX) {
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  auto r = eig_hermitian(sx);
  EXPECT_NEAR(r.values(0), -1.0, 1e-14);
  EXPECT_NEAR(r.values(1), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(r.vectors(0, 0)), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(EigHermitianTest, RandomResidualAndOrthonormality) {
  Matrix m = random_hermitian(64, 7);
  auto r = eig_hermitian(m);
  double resid = (m * r.vectors -
                  r.vectors * r.values.asDiagonal().toDenseMatrix().cast<Complex>())
                     .norm();
  EXPECT_LT(resid, 1e-8 * m.norm());
  EXPECT_LT((r.vectors.adjoint() * r.vectors - Matrix::Identity(64, 64)).norm(), 1e-12);
  EXPECT_TRUE(std::is_sorted(r.values.data(), r.values.data() + 64));
}

TEST(EigHermitianTest, PermutationInvariance) {
  const int d = 24;
  Matrix m = random_hermitian(d, 11);
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix p = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) p(perm[i], i) = 1.0;
  auto r1 = eig_hermitian(m);
  auto r2 = eig_hermitian(Matrix(p * m * p.transpose()));
  EXPECT_LT((r1.values - r2.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EigHermitianTest, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(eig_hermitian(m), std::invalid_argument);
}

TEST(MatrixFunctionTest, TrigIdentity) {
  auto s = single_mode_space("t", 8);
  auto np = number_and_phase(s, 0, 0.088, 58.4);
  Matrix c = hermitian_matrix_function(np.phase.matrix, std::cos);
  Matrix sn = hermitian_matrix_function(np.phase.matrix, std::sin);
  EXPECT_LT((c * c + sn * sn - Matrix::Identity(8, 8)).norm(), 1e-12);
  // cos is even in phi, so it commutes with the parity that flips x -> -x.
  EXPECT_LT((c - Matrix(c.adjoint())).norm(), 1e-12);
}

TEST(LiouvillianTest, TracePreservation) {
  auto s = single_mode_space("c", 5);
  auto a = ladder(s, 0);
  Operator h = {s, random_hermitian(5, 21)};
  Matrix l = liouvillian(h, {{a, 3.0}, {{s, a.matrix.adjoint() * a.matrix}, 0.7}});
  Matrix rho = random_density(5, 5);
  Vector drho = l * vec(rho);
  Complex tr = unvec(drho, 5).trace();
  EXPECT_LT(std::abs(tr), 1e-12);
}

TEST(LiouvillianTest, RejectsNegativeRate) {
  auto s = single_mode_space("c", 3);
  auto a = ladder(s, 0);
  Operator h = {s, Matrix::Zero(3, 3)};
  EXPECT_THROW(liouvillian(h, {{a, -1.0}}), std::invalid_argument);
}

TEST(LiouvillianTest, AmplitudeDampingRate) {
  // With the rate in MHz and time in ns, population decays as exp(-2pi*1e-3*kappa*t).
  auto s = single_mode_space("c", 3);
  auto a = ladder(s, 0);
  Operator h = {s, Matrix::Zero(3, 3)};
  const double kappa_mhz = 10.0;
  Matrix l = liouvillian(h, {{a, kappa_mhz}});
  Matrix rho0 = Matrix::Zero(3, 3);
  rho0(1, 1) = 1.0;
  const double t = 20.0;  // ns
  Matrix prop = (l * t).exp();
  Matrix rho_t = unvec(prop * vec(rho0), 3);
  const double expected = std::exp(-mhz_to_rad_per_ns(kappa_mhz) * t);
  EXPECT_NEAR(rho_t(1, 1).real(), expected, 1e-10);
  EXPECT_NEAR(rho_t.trace().real(), 1.0, 1e-12);
}

TEST(LiouvillianTest, DrivenCavitySteadyState) {
  // Rotating-frame drive: H = (w0 - wd) c^dag c + Omega (c + c^dag) in GHz.
  // Steady state: <c> = -i W / (k/2 - i (wd - w0)) with W, k, detuning angular.
  const int d = 12;
  auto s = single_mode_space("c", d);
  auto a = ladder(s, 0);
  const double delta_ghz = 0.005;   // w0 - wd
  const double omega_ghz = 0.002;
  const double kappa_mhz = 10.0;
  Matrix h = delta_ghz * (a.matrix.adjoint() * a.matrix).eval() +
             omega_ghz * (a.matrix + Matrix(a.matrix.adjoint()));
  Matrix l = liouvillian({s, h}, {{a, kappa_mhz}});

  Eigen::JacobiSVD<Matrix> svd(l, Eigen::ComputeFullV);
  Vector null = svd.matrixV().col(d * d - 1);
  Matrix rho = unvec(null, d);
  rho /= rho.trace();

  EXPECT_LT((l * vec(rho)).norm(), 1e-8);

  const Complex expect = Complex(0, -1) * ghz_to_rad_per_ns(omega_ghz) /
                         Complex(mhz_to_rad_per_ns(kappa_mhz) / 2.0,
                                 -(-ghz_to_rad_per_ns(delta_ghz)));
  const Complex got = (a.matrix * rho).trace();
  EXPECT_NEAR(std::abs(got - expect), 0.0, 1e-6);
}
