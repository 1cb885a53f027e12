#ifndef BIC_SPECTRUM_HPP
#define BIC_SPECTRUM_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bic/parity.hpp"
#include "bic/specfun.hpp"
#include "bic/types.hpp"

namespace bic {

/// Resonant energy E_nu(d) = sqrt(1 + nu^2 pi^2 / d^2); nu = 0 is the band
/// edge, not a bound state, and is rejected.
double resonant_energy(int nu, double d);

/// Large-spacing existence constraint, Eq. chi(E_nu) = 0 rearranged:
///   eps = E_nu(d) + (gamma d/(nu pi)) log(E_nu(d) - nu pi/d).
double epsilon_constraint(int nu, double d, double gamma);

/// One resonant family: the curve d -> (E_nu(d), eps_nu(d)) at fixed gamma.
struct ResonantFamily {
  int nu = 1;
  double gamma = 0.0;
  double energy(double d) const { return resonant_energy(nu, d); }
  double epsilon(double d) const { return epsilon_constraint(nu, d, gamma); }
};

enum class SolveMode { Full, LargeSpacing };

struct BoundStateInContinuum {
  double E = 0.0;        ///< eigenvalue, > 1
  double epsilon = 0.0;  ///< compatible excitation energy
  double chi = 0.0;      ///< chi value at the root
  int nu_nearest = 0;    ///< nearest resonance index (ties toward lower nu)
  Parity sector = Parity::Indefinite;
  Eigen::VectorXcd amplitudes;      ///< full-state normalized: p + field = 1
  double p = 0.0;                   ///< atomic excitation probability
  double constraint_residual = 0.0; ///< max of the two Eq.-constraint sums
  double sigma_min = 0.0;           ///< smallest singular value at the root
  SolveMode mode = SolveMode::Full;
};

struct SolveOptions {
  double emin = 1.0 + 1e-9;
  double emax = 3.0;
  SolveMode mode = SolveMode::Full;
  int grid_points = 400;          ///< scan resolution along the window
  double accept_im_tol = 1e-9;    ///< |Im chi-root| accepted as a tangency
  double sigma_rel_tol = 1e-8;    ///< singularity threshold sigma_min/sigma_max
  double constraint_tol = 1e-8;   ///< Eq.-constraint residual bound
  double quad_tol = 1e-13;        ///< cut-integral tolerance in refinement
};

struct UnresolvedSeed {
  double E = 0.0;
  Parity sector = Parity::Indefinite;
  std::string reason;
};

struct SolveReport {
  std::vector<BoundStateInContinuum> states;  ///< sorted by E
  std::vector<UnresolvedSeed> unresolved;
};

/// Finds bound states in the continuum of one parity sector inside
/// [emin, emax]. The admissible chi values at energy E are the eigenvalues
/// of i B_sector(E) (B = sector block of A_n(theta(E), 0, b(E))); their
/// imaginary parts are nonnegative on the real axis and a bound state is a
/// tangency Im lambda = 0, located by a scan over the window plus resonance
/// seeds and refined by iterated parabolic fits along the eigenbranch.
/// epsilon does not enter the search; each state reports the compatible
/// epsilon via chi_to_epsilon. In LargeSpacing mode the degenerate resonant
/// eigenspaces are returned as parity-adapted orthonormal bases.
SolveReport solve_bic(const EmitterArrayParams& params, Parity sector,
                      const SolveOptions& opt);

/// Both sectors merged (sector = Indefinite selects both).
SolveReport solve_bic_all(const EmitterArrayParams& params,
                          const SolveOptions& opt);

/// Exact persistence of the resonant energies (Hermitian reformulation):
/// at E = E_nu(d) the sector with A_n^{+-}(nu pi, 0, 0) = 0 admits exactly
/// block-size many real chi values, the eigenvalues of a real symmetric
/// matrix assembled from b_j(E_nu); each maps to a compatible epsilon. The
/// complementary sector's matrix is not Hermitian and its complex
/// eigenvalues are reported as evidence of no exact resonance there.
struct ExactResonantState {
  double epsilon;
  double chi;
  Eigen::VectorXcd amplitudes;  ///< full-state normalized
  double p;
};
struct ExactResonantResult {
  int nu = 1;
  double E = 0.0;
  Parity hermitian_sector = Parity::Antisymmetric;
  std::vector<ExactResonantState> states;
  std::vector<Complex> complementary_chis;  ///< generally off the real axis
};
ExactResonantResult exact_resonant_epsilons(int n, int nu, double d,
                                            double gamma);

/// Closed-form probability approximants, valid up to O(e^{-d}).
enum class StateClass {
  Sym3,          ///< n=3 symmetric
  Anti3,         ///< n=3 antisymmetric
  GoldenSymPlus, ///< n=4 symmetric, a1/a2 = -(1+sqrt5)/2 (odd nu)
  GoldenSymMinus,///< n=4 symmetric, a1/a2 = -(1-sqrt5)/2 (odd nu)
  GoldenAntiPlus, ///< n=4 antisymmetric golden pair (even nu)
  GoldenAntiMinus,
  Persistent4,   ///< n=4 a1=a2=-a3=-a4 (odd nu) / a1=-a2=-a3=a4 (even nu)
  Numeric4       ///< n=4 a1 ~ 0.33 a2 class
};
StateClass state_class_from_string(const std::string& label);
const char* to_string(StateClass c);

double probability_approximant(StateClass c, int nu, double d, double gamma);

/// p = a^H a for a full-state-normalized amplitude vector.
double atomic_probability(const BoundStateInContinuum& state);

/// Field wavefunction xi(x) = sum_l a_l xi1(x - (l-1)d) and its norm.
struct FieldSample {
  Eigen::VectorXd grid;
  Eigen::VectorXcd values;
  SolveMode mode = SolveMode::Full;
};
FieldSample field_wavefunction(const BoundStateInContinuum& state,
                               const EmitterArrayParams& params,
                               const Eigen::VectorXd& grid);
double field_norm(const Eigen::VectorXcd& amplitudes, double E,
                  const EmitterArrayParams& params, SolveMode mode,
                  double abs_tol = 1e-10);

/// Eq.-constraint residual max_{+-} |sum_l a_l e^{+-i(l-1) d sqrt(E^2-1)}|.
double constraint_residual(const Eigen::VectorXcd& amplitudes, double E,
                           double d);

/// Spectral lines: continuation of every solve_bic branch over a d-range.
struct SpectralPoint {
  double d;
  double E;
  Parity sector;
  int nu;
  int branch;  ///< continuation label within (sector, nu)
};
struct SpectralLines {
  std::vector<SpectralPoint> points;  ///< sorted by (sector, nu, branch, d)
  std::vector<std::pair<double, int>> gaps;  ///< (d, branch) continuation losses
};
SpectralLines spectral_lines(int n, double gamma, double dmin, double dmax,
                             int d_points, double emax,
                             const SolveOptions& base_opt = {});

}  // namespace bic

#endif
