#ifndef BIC_ORACLE_HPP
#define BIC_ORACLE_HPP

#include <Eigen/Dense>
#include <vector>

#include "bic/types.hpp"

namespace bic {

/// Single-excitation Hamiltonian of the emitter array coupled to a periodic
/// box of plane-wave modes k_q = 2 pi q / L, q = -M/2 .. M/2. The array is
/// centered in the box. Fully independent of the resolvent machinery; used
/// as a brute-force validator.
struct DiscretizedModel {
  double L = 0.0;
  int M = 0;  ///< even; M+1 modes, symmetric about 0
  int n = 0;
  double epsilon = 0.0;
  double d = 0.0;
  double gamma = 0.0;
  Eigen::VectorXd k_grid;
  Eigen::MatrixXcd H;  ///< (n + M + 1) x (n + M + 1), Hermitian
};

DiscretizedModel build_hamiltonian(const EmitterArrayParams& params, double L,
                                   int M);

struct OracleState {
  double energy = 0.0;
  double atomic_weight = 0.0;  ///< sum_j |a_j|^2 of the unit eigenvector
  double confinement = 0.0;    ///< field probability fraction inside the
                               ///< padded array interval
  Eigen::VectorXcd atomic_amplitudes;
};

/// Eigenstates with energy in [emin, emax]; those with confinement above
/// `confinement_threshold` approximate bound states in the continuum.
/// The k-cutoff pi M / L must comfortably exceed the window momentum.
std::vector<OracleState> find_bic_candidates(const DiscretizedModel& model,
                                             double emin, double emax,
                                             double confinement_threshold = 0.99);

/// All window eigenstates regardless of confinement (for diagnostics).
std::vector<OracleState> window_states(const DiscretizedModel& model,
                                       double emin, double emax);

/// Builds the model at (L, M) and (2L, 2M) and keeps candidates whose energy
/// is stable under the box doubling; the returned energy is the Richardson
/// extrapolation 2 E(2L) - E(L).
struct VerifiedCandidate {
  OracleState at_L;
  OracleState at_2L;
  double energy_extrapolated = 0.0;
};
std::vector<VerifiedCandidate> verified_candidates(
    const EmitterArrayParams& params, double L, int M, double emin,
    double emax, double confinement_threshold = 0.99,
    double stability_tol_scale = 4.0);

}  // namespace bic

#endif
