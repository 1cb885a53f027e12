#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bic/parity.hpp"
#include "bic/specfun.hpp"

using namespace bic;

namespace {
Eigen::VectorXcd random_betas(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd b(n - 1);
  for (int i = 0; i < n - 1; ++i) b[i] = Complex(u(rng), u(rng));
  return b;
}
}  // namespace

TEST_CASE("build_A basics") {
  // n=2, theta=pi, beta=0: [[1+i b0, -1], [-1, 1+i b0]]
  Eigen::VectorXcd betas = Eigen::VectorXcd::Zero(1);
  const Complex b0(0.3, 0.0);
  ModelMatrix A = build_A(Complex(M_PI, 0.0), b0, betas, 2);
  CHECK(std::abs(A.entries(0, 0) - (1.0 + Complex(0, 1) * b0)) < 1e-14);
  CHECK(std::abs(A.entries(0, 1) - (-1.0)) < 1e-14);
  CHECK(std::abs(A.entries(1, 0) - (-1.0)) < 1e-14);

  // diagonal entries all equal 1 + i beta0
  std::mt19937 rng(3);
  for (int n : {3, 5, 8}) {
    ModelMatrix An = build_A(Complex(0.7, 0.1), Complex(0.2, -0.1),
                             random_betas(n, rng), n);
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(An.entries(j, j) - (1.0 + Complex(0, 1) * Complex(0.2, -0.1))) <
            1e-14);
  }
  CHECK_THROWS(build_A(Complex(0.0, 0.0), Complex(0.0, 0.0),
                       Eigen::VectorXcd::Zero(3), 3));
}

TEST_CASE("A_n(nu pi, 0, 0) is singular with null space of dimension n-1") {
  for (int n : {2, 3, 4, 6}) {
    for (int nu : {1, 2}) {
      ModelMatrix A = build_A(Complex(nu * M_PI, 0.0), Complex(0.0, 0.0),
                              Eigen::VectorXcd::Zero(n - 1), n);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A.entries);
      const auto& sv = svd.singularValues();
      CHECK(sv(0) > 0.5);                    // exactly one above threshold
      for (int i = 1; i < n; ++i) CHECK(sv(i) < 1e-12 * sv(0));
    }
  }
}

TEST_CASE("parity transform orthogonality and fixed middle vector") {
  for (int n = 2; n <= 12; ++n) {
    Eigen::MatrixXd U = parity_transform(n);
    CHECK((U * U.transpose() - Eigen::MatrixXd::Identity(n, n)).norm() <
          1e-14);
  }
  Eigen::MatrixXd U2 = parity_transform(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(U2(0, 0) == doctest::Approx(s));
  CHECK(U2(0, 1) == doctest::Approx(-s));
  CHECK(U2(1, 0) == doctest::Approx(s));
  CHECK(U2(1, 1) == doctest::Approx(s));
  // n=3: middle basis vector maps to itself
  Eigen::MatrixXd U3 = parity_transform(3);
  Eigen::Vector3d e1(0.0, 1.0, 0.0);
  CHECK((U3 * e1 - e1).norm() < 1e-15);
}

TEST_CASE("block decomposition: residual, determinant factorization") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n = 2; n <= 12; ++n) {
    ModelMatrix A = build_A(Complex(u(rng), u(rng) * 0.2),
                            Complex(u(rng), u(rng)), random_betas(n, rng), n);
    auto [minus, plus] = block_decompose(A);
    CHECK(minus.matrix.rows() == n / 2);
    CHECK(plus.matrix.rows() == n - n / 2);
    const Complex det_full = A.entries.determinant();
    const Complex det_blocks =
        minus.matrix.determinant() * plus.matrix.determinant();
    CHECK(std::abs(det_full - det_blocks) <= 1e-10 * std::abs(det_full));
  }
  // non-Toeplitz input trips the residual check
  Eigen::MatrixXcd junk = Eigen::MatrixXcd::Random(4, 4);
  CHECK_THROWS_AS(block_decompose(junk), DecompositionError);
}

TEST_CASE("n=2 blocks: scalars 1 -+ e^{i theta} + i(chi -+ b1)") {
  const Complex th(M_PI, 0.0), chi(0.37, 0.0), b1(0.11, 0.0);
  Eigen::VectorXcd betas(1);
  betas[0] = b1;
  ModelMatrix A = build_A(th, chi, betas, 2);
  auto [minus, plus] = block_decompose(A);
  const Complex I(0, 1);
  CHECK(std::abs(minus.matrix(0, 0) - (2.0 + I * (chi - b1))) < 1e-14);
  CHECK(std::abs(plus.matrix(0, 0) - (I * (chi + b1))) < 1e-14);
}

TEST_CASE("n=3 antisymmetric block is 1 - e^{2 i theta} + i(chi - b2)") {
  const Complex th(0.9, 0.0), chi(0.2, 0.0);
  Eigen::VectorXcd betas(2);
  betas << Complex(0.05, 0.0), Complex(0.02, 0.0);
  ModelMatrix A = build_A(th, chi, betas, 3);
  auto [minus, plus] = block_decompose(A);
  const Complex I(0, 1);
  const Complex expect = 1.0 - std::exp(2.0 * I * th) + I * (chi - betas[1]);
  CHECK(std::abs(minus.matrix(0, 0) - expect) < 1e-14);
  // symmetric block (1,1) entry = 1 + i chi (center emitter)
  CHECK(std::abs(plus.matrix(0, 0) - (1.0 + I * chi)) < 1e-14);
  CHECK(std::abs(plus.matrix(0, 1) -
                 std::sqrt(2.0) * (std::exp(I * th) + I * betas[0])) < 1e-14);
}

TEST_CASE("n=4 blocks match the 2x2 singularity matrices") {
  const Complex th(0.6, 0.0), chi(0.15, 0.0);
  Eigen::VectorXcd b(3);
  b << Complex(0.07, 0.0), Complex(0.03, 0.0), Complex(0.01, 0.0);
  ModelMatrix A = build_A(th, chi, b, 4);
  auto [minus, plus] = block_decompose(A);
  const Complex I(0, 1);
  const Complex e1 = std::exp(I * th), e2 = e1 * e1, e3 = e2 * e1;
  // symmetric: [[1+e+i(chi+b1), e+e2+i(b1+b2)], [., 1+e3+i(chi+b3)]]
  CHECK(std::abs(plus.matrix(0, 0) - (1.0 + e1 + I * (chi + b[0]))) < 1e-14);
  CHECK(std::abs(plus.matrix(0, 1) - (e1 + e2 + I * (b[0] + b[1]))) < 1e-14);
  CHECK(std::abs(plus.matrix(1, 1) - (1.0 + e3 + I * (chi + b[2]))) < 1e-14);
  // antisymmetric: signs flipped
  CHECK(std::abs(minus.matrix(0, 0) - (1.0 - e1 + I * (chi - b[0]))) < 1e-14);
  CHECK(std::abs(minus.matrix(0, 1) - (e1 - e2 + I * (b[0] - b[1]))) < 1e-14);
  CHECK(std::abs(minus.matrix(1, 1) - (1.0 - e3 + I * (chi - b[2]))) < 1e-14);
}

TEST_CASE("null_vector") {
  // 1x1 zero matrix
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(1, 1);
  NullVector nv = null_vector(Z);
  CHECK(nv.sigma_min == 0.0);
  CHECK(std::abs(nv.vector[0] - 1.0) < 1e-15);
  // random nonsingular 2x2
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Eigen::MatrixXcd R(2, 2);
  R << Complex(u(rng), 0.1), Complex(0.0, u(rng)), Complex(-0.2, u(rng)),
      Complex(u(rng), -0.5);
  CHECK(null_vector(R).sigma_min > 0.0);
}

TEST_CASE("embed_to_local parity and examples") {
  // n=3, antisymmetric scalar 1 -> a ~ (1, 0, -1)
  Eigen::VectorXcd v1(1);
  v1[0] = 1.0;
  Eigen::VectorXcd a3 = embed_to_local(v1, Parity::Antisymmetric, 3);
  CHECK(std::abs(a3[0] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(a3[1]) < 1e-15);
  CHECK(std::abs(a3[2] + 1.0 / std::sqrt(2.0)) < 1e-14);
  // n=2 symmetric: a2/a1 = +1
  Eigen::VectorXcd a2 = embed_to_local(v1, Parity::Symmetric, 2);
  CHECK(std::abs(a2[1] / a2[0] - 1.0) < 1e-14);
  // n=4 symmetric pair fills with reflection symmetry
  Eigen::VectorXcd v2(2);
  v2 << Complex(0.3, 0.1), Complex(-0.7, 0.2);
  Eigen::VectorXcd a4 = embed_to_local(v2, Parity::Symmetric, 4);
  CHECK(std::abs(a4[0] - a4[3]) < 1e-14);
  CHECK(std::abs(a4[1] - a4[2]) < 1e-14);
  // definite parity property for random embeddings
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {4, 5, 6, 7}) {
    for (Parity s : {Parity::Antisymmetric, Parity::Symmetric}) {
      const int m = (s == Parity::Antisymmetric) ? n / 2 : n - n / 2;
      Eigen::VectorXcd v(m);
      for (int i = 0; i < m; ++i) v[i] = Complex(u(rng), u(rng));
      Eigen::VectorXcd a = embed_to_local(v, s, n);
      const double sign = (s == Parity::Antisymmetric) ? -1.0 : 1.0;
      double worst = 0.0;
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(a[j] - sign * a[n - 1 - j]));
      CHECK(worst <= 1e-10 * a.norm());
    }
  }
  CHECK_THROWS(embed_to_local(v2, Parity::Antisymmetric, 3));
}
