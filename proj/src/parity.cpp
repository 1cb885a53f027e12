#include "bic/parity.hpp"

#include <cmath>

namespace bic {

ModelMatrix build_A(Complex theta, Complex beta0,
                    const Eigen::VectorXcd& betas, int n) {
  if (betas.size() != n - 1) {
    throw std::invalid_argument("build_A: betas must have length n-1");
  }
  ModelMatrix out;
  out.theta = theta;
  out.beta0 = beta0;
  out.betas = betas;
  out.entries.resize(n, n);
  const Complex I(0.0, 1.0);
  for (int a = 0; a < n; ++a) {
    const Complex beta = (a == 0) ? beta0 : betas[a - 1];
    const Complex entry = std::exp(I * double(a) * theta) + I * beta;
    for (int j = 0; j + a < n; ++j) {
      out.entries(j, j + a) = entry;
      out.entries(j + a, j) = entry;
    }
  }
  return out;
}

Eigen::MatrixXd parity_transform(int n) {
  if (n < 2) throw std::invalid_argument("parity_transform requires n >= 2");
  const int h = n / 2;
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < h; ++j) {
    U(j, j) = s;
    U(j, n - 1 - j) = -s;
  }
  if (n % 2 == 1) U(h, h) = 1.0;
  const int off = (n % 2 == 1) ? h + 1 : h;
  for (int j = 0; j < h; ++j) {
    U(off + j, h - 1 - j) = s;          // J_h block
    U(off + j, off + j) = s;
  }
  return U;
}

std::pair<PropagatorBlock, PropagatorBlock> block_decompose(
    const Eigen::MatrixXcd& A) {
  const int n = int(A.rows());
  const Eigen::MatrixXd U = parity_transform(n);
  const Eigen::MatrixXcd M = U * A * U.transpose();
  const int hm = n / 2;
  const int hp = n - hm;
  const double off_norm =
      std::max(M.block(0, hm, hm, hp).norm(), M.block(hm, 0, hp, hm).norm());
  if (off_norm > 1e-12 * A.norm()) {
    throw DecompositionError(
        "block decomposition residual above threshold (input not "
        "Toeplitz-symmetric)");
  }
  PropagatorBlock minus, plus;
  minus.sector = Parity::Antisymmetric;
  minus.matrix = M.block(0, 0, hm, hm);
  plus.sector = Parity::Symmetric;
  plus.matrix = M.block(hm, hm, hp, hp);
  return {minus, plus};
}

std::pair<PropagatorBlock, PropagatorBlock> block_decompose(
    const ModelMatrix& A) {
  return block_decompose(A.entries);
}

NullVector null_vector(const Eigen::MatrixXcd& B) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  NullVector out;
  out.sigma_min = sv(sv.size() - 1);
  out.sigma_max = sv(0);
  out.vector = svd.matrixV().col(sv.size() - 1);
  // phase convention: largest-magnitude component real positive
  int imax = 0;
  for (int i = 1; i < out.vector.size(); ++i)
    if (std::abs(out.vector[i]) > std::abs(out.vector[imax])) imax = i;
  const Complex piv = out.vector[imax];
  if (std::abs(piv) > 0) out.vector *= std::abs(piv) / piv;
  return out;
}

Eigen::VectorXcd embed_to_local(const Eigen::VectorXcd& block_vec,
                                Parity sector, int n) {
  const int hm = n / 2;
  const int hp = n - hm;
  const int expected = (sector == Parity::Antisymmetric) ? hm : hp;
  if (block_vec.size() != expected) {
    throw std::invalid_argument("embed_to_local: block vector size mismatch");
  }
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n);
  if (sector == Parity::Antisymmetric) {
    w.head(hm) = block_vec;
  } else {
    w.tail(hp) = block_vec;
  }
  const Eigen::MatrixXd U = parity_transform(n);
  return U.transpose() * w;
}

}  // namespace bic
