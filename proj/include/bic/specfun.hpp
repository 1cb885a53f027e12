#ifndef BIC_SPECFUN_HPP
#define BIC_SPECFUN_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bic/types.hpp"

namespace bic {

/// sqrt(z^2 - 1) with the branch cut on [-1, 1], positive for z = E > 1,
/// computed as the product of principal square roots of (z-1) and (z+1).
/// Satisfies Schwarz reflection and Im > 0 (< 0) in the upper (lower)
/// half-plane.
Complex sqrt_cut(Complex z);

/// Interemitter phase theta(z) = d * sqrt(z^2 - 1), same branch as sqrt_cut.
Complex theta_phase(Complex z, double d);

/// Closed form of the j = 0 cut integral, b0(E) = -log(E - sqrt(E^2-1))/pi.
/// Requires E >= 1; increasing, nonnegative, b0(1) = 0.
double b0_closed(double E);

/// Analytic continuation of b0 off the real axis (cut on [-1, 1]).
Complex b0_closed_z(Complex z);

/// Cut integral b_j(z) around one branch cut of the continuation, evaluated
/// under the substitution lambda = cosh t which removes the endpoint
/// singularity:
///   b_j(z) = (sqrt(z^2-1)/pi) * Int_0^inf exp(-j d cosh t) z/(z^2+sinh^2 t) dt
/// Real-valued for real z = E > 1. The real-lambda contour is the analytic
/// continuation as long as z^2 is not in (-inf, 0].
Complex cut_term(int j, Complex z, double d, double abs_tol = 1e-12);

/// b_1 .. b_{n-1} at a common z, sharing one adaptive pass.
struct CutVector {
  Complex z;
  double d;
  std::vector<Complex> values;  ///< values[j-1] = b_j
};
CutVector cut_vector(int n, Complex z, double d, double abs_tol = 1e-12);

/// Field-kernel cut contribution eta(x; E) of the single-emitter boson
/// wavefunction; even in x, decays at least as exp(-|x|).
double eta(double x, double E, double abs_tol = 1e-12);

/// Single-emitter boson wavefunction kernel
///   xi1(x) = sqrt(gamma E/(E^2-1)) (sin(|x| sqrt(E^2-1)) - eta(x)).
/// with_eta = false drops the cut contribution (large-spacing mode).
double xi1(double x, double E, double gamma, bool with_eta = true,
           double abs_tol = 1e-12);

/// chi(E) = (eps - E) sqrt(E^2-1)/gamma + b0(E) and its inverse at fixed
/// (E, gamma): eps = E + gamma (chi - b0(E))/sqrt(E^2-1).
double chi_of_epsilon(double E, double epsilon, double gamma);
double chi_to_epsilon(double chi, double E, double gamma);
Complex chi_of_epsilon_z(Complex z, double epsilon, double gamma);

/// Self-energy matrix on a chosen Riemann sheet.
///
/// Boundary values on the cut (Eq.-level closed decomposition):
///   Sigma_{jl}(E +- i0) = (+-i gamma/sqrt(E^2-1)) (e^{+-i|j-l|theta} +- i b_{|j-l|}).
/// First sheet: the physical function, i.e. the + form for Im z >= 0 and the
/// - form for Im z < 0 (discontinuous across [1, inf)). Second sheet: the
/// + form everywhere (continuation from above; resonance poles in the lower
/// half-plane). Third sheet: the - form everywhere. At every z,
/// Sigma^II - Sigma^III = (2 i gamma/sqrt(z^2-1)) cos(|j-l| theta(z)).
struct SelfEnergyMatrix {
  Complex z;
  Sheet sheet = Sheet::First;
  Eigen::MatrixXcd sigma;
};
SelfEnergyMatrix self_energy(Complex z, const EmitterArrayParams& params,
                             Sheet sheet = Sheet::First,
                             double abs_tol = 1e-12);

}  // namespace bic

#endif
