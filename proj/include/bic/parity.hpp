#ifndef BIC_PARITY_HPP
#define BIC_PARITY_HPP

#include <Eigen/Dense>
#include <vector>

#include "bic/types.hpp"

namespace bic {

/// The n x n matrix [A_n]_{jl} = e^{i|j-l|theta} + i beta_{|j-l|} through
/// which the inverse propagator factorizes:
///   G^{-1}(E) = -(i gamma/sqrt(E^2-1)) A_n(theta(E), chi(E), b(E)).
struct ModelMatrix {
  Eigen::MatrixXcd entries;
  Complex theta;
  Complex beta0;
  Eigen::VectorXcd betas;  ///< beta_1 .. beta_{n-1}
};

ModelMatrix build_A(Complex theta, Complex beta0,
                    const Eigen::VectorXcd& betas, int n);

/// Reflection transform U_n about the array midpoint; real orthogonal,
/// built from the identity and counterdiagonal exchange blocks. The first
/// floor(n/2) rows span the antisymmetric sector.
Eigen::MatrixXd parity_transform(int n);

struct PropagatorBlock {
  Parity sector = Parity::Antisymmetric;
  Eigen::MatrixXcd matrix;
};

/// U A U^T = A^- oplus A^+ for centrosymmetric A; throws DecompositionError
/// if the off-block residual exceeds 1e-12 * ||A||_F.
std::pair<PropagatorBlock, PropagatorBlock> block_decompose(
    const ModelMatrix& A);
std::pair<PropagatorBlock, PropagatorBlock> block_decompose(
    const Eigen::MatrixXcd& A);

/// Right-singular vector of the smallest singular value, with the
/// largest-magnitude component rotated to the positive real axis.
struct NullVector {
  Eigen::VectorXcd vector;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};
NullVector null_vector(const Eigen::MatrixXcd& B);

/// Embeds a sector-block vector back into the local emitter basis via U^T;
/// the result satisfies a_j = +-a_{n+1-j}.
Eigen::VectorXcd embed_to_local(const Eigen::VectorXcd& block_vec,
                                Parity sector, int n);

}  // namespace bic

#endif
