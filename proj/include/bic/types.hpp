#ifndef BIC_TYPES_HPP
#define BIC_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace bic {

using Complex = std::complex<double>;

/// Dimensionless system definition: n equally spaced two-level emitters
/// coupled to a massive 1D boson field, all quantities in units of the
/// boson mass m (energies in m, lengths in 1/m, gamma in m^2).
struct EmitterArrayParams {
  int n = 2;         ///< emitter count
  double epsilon = 1.0;  ///< emitter excitation energy
  double d = 1.0;        ///< spacing
  double gamma = 0.01;   ///< squared coupling

  EmitterArrayParams() = default;
  EmitterArrayParams(int n_, double epsilon_, double d_, double gamma_)
      : n(n_), epsilon(epsilon_), d(d_), gamma(gamma_) {
    validate();
  }

  /// Rescale dimensional (m, eps, d, gamma) to the m=1 units used everywhere.
  static EmitterArrayParams from_dimensional(double m, int n, double epsilon,
                                             double d, double gamma) {
    if (m <= 0) throw std::invalid_argument("boson mass must be positive");
    return EmitterArrayParams(n, epsilon / m, m * d, gamma / (m * m));
  }

  void validate() const {
    // n = 1 and gamma = 0 are admitted for the brute-force oracle; the
    // analytic solvers enforce n >= 2 and gamma > 0 at entry.
    if (n < 1) throw std::invalid_argument("emitter count must be >= 1");
    if (d <= 0) throw std::invalid_argument("spacing d must be positive");
    if (gamma < 0) throw std::invalid_argument("coupling gamma must be >= 0");
    if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  }
};

/// Riemann sheet of the self-energy with respect to the continuum cut
/// [1, inf). Second: continuation from above the cut into the lower
/// half-plane; Third: continuation from below into the upper half-plane.
enum class Sheet { First, Second, Third };

enum class Parity { Antisymmetric, Symmetric, Indefinite };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::Antisymmetric: return "antisymmetric";
    case Parity::Symmetric: return "symmetric";
    default: return "indefinite";
  }
}

inline const char* to_string(Sheet s) {
  switch (s) {
    case Sheet::First: return "I";
    case Sheet::Second: return "II";
    default: return "III";
  }
}

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Requested point violates the analytic-continuation preconditions
/// (integration-path pole, branch-cut crossing).
struct ContinuationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Quadrature failed to reach the requested tolerance; carries what it got.
struct AccuracyError : std::runtime_error {
  double achieved;
  double requested;
  AccuracyError(const std::string& what, double achieved_, double requested_)
      : std::runtime_error(what), achieved(achieved_), requested(requested_) {}
};

/// Block decomposition residual above threshold (non-Toeplitz input).
struct DecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bic

#endif
