#ifndef BIC_POLES_HPP
#define BIC_POLES_HPP

#include <optional>
#include <vector>

#include "bic/spectrum.hpp"
#include "bic/types.hpp"

namespace bic {

struct PoleResult {
  Complex z = 0.0;        ///< E_p - i gamma_p/2 on sheet II
  Parity sector = Parity::Symmetric;
  Sheet sheet = Sheet::Second;
  double residual = 0.0;  ///< |det| relative to the block's Hadamard bound
  double decay_rate = 0.0;  ///< gamma_p = 2|Im z|
  bool converged = false;
  std::vector<Complex> trajectory;  ///< Newton iterates, for diagnosis
};

/// Determinant of the sector block of the inverse propagator
/// (eps - z) I - Sigma^{sheet}(z) at complex energy z.
Complex det_on_sheet(Complex z, const EmitterArrayParams& params,
                     Parity sector, Sheet sheet, double quad_tol = 1e-12);

/// Scale for det residuals: Hadamard bound of the sector block.
double det_scale(Complex z, const EmitterArrayParams& params, Parity sector,
                 Sheet sheet, double quad_tol = 1e-12);

struct PoleOptions {
  int max_iter = 60;
  double residual_tol = 1e-12;  ///< on |det|/scale
  double fd_step = 1e-7;        ///< derivative step factor, h = fd_step (1+|z|)
  double quad_tol = 1e-12;
};

/// Complex-Newton refinement of det = 0 from a seed.
PoleResult find_pole(Complex seed, const EmitterArrayParams& params,
                     Parity sector, Sheet sheet, const PoleOptions& opt = {});

/// Paper-form discriminant for the n = 3 symmetric block (as printed,
/// conjugate representation); exposed for cross-checks.
Complex f3(Complex theta, Complex b1, Complex b2);

enum class PoleBranch { Plus, Minus };

/// Closed-form pole approximants: the singularity condition of the sector
/// block solved for chi, inverted to z = eps - gamma (chi_req - b0)/sqrt(z^2-1)
/// and evaluated on the real axis (two passes starting at E = eps, width from
/// the final imaginary part). Intrinsic error O(gamma^2).
Complex approx_pole_n3(const EmitterArrayParams& params, Parity sector,
                       PoleBranch branch = PoleBranch::Minus);
Complex approx_pole_n4(const EmitterArrayParams& params, Parity sector,
                       PoleBranch branch = PoleBranch::Minus);

struct TrajectoryPoint {
  double parameter;  ///< epsilon (or d) value of the sweep
  PoleResult pole;
  int branch;  ///< eigenbranch index within the sector block
};
struct Trajectory {
  std::vector<TrajectoryPoint> points;  ///< ordered by (branch, parameter)
  std::vector<std::pair<double, Complex>> touches;  ///< near-real-axis events
};

/// Sweeps epsilon at fixed (n, d, gamma), tracking every sector eigenbranch
/// pole on the chosen sheet; poles are seeded per point by a fixed-point pass
/// on the eigenbranch and polished by find_pole.
Trajectory pole_trajectory_epsilon(const EmitterArrayParams& base,
                                   Parity sector, Sheet sheet,
                                   double eps_min, double eps_max, int steps,
                                   double touch_tol = 1e-9);

struct CriticalPoint {
  int n = 0;
  double d_c = 0.0;
  double E_c = 0.0;
  std::pair<int, int> nu_window = {1, 2};
  double chi_c = 0.0;      ///< chi at the touching point
  double epsilon_c = 0.0;  ///< compatible epsilon at (d_c, E_c) for gamma
};

struct CriticalOptions {
  double d_hi = 0.8;
  double d_tol = 1e-3;
  int scan_points = 400;
  double window_margin = 0.10;  ///< fraction of pi kept clear of resonances
  double quad_tol = 1e-12;
};

/// Critical spacing for the birth of the nonperturbative symmetric pair
/// between E_nu(d) and E_{nu+1}(d): bisects on d over the indicator "the
/// sheet-II pole trajectory touches the real axis inside the window", i.e.
/// the minimum over the window of Im lambda reaches zero, then polishes the
/// tangency. d_c and E_c are gamma-independent; epsilon_c reports the
/// touching epsilon for the given gamma.
CriticalPoint critical_distance(int n, double gamma,
                                std::pair<int, int> nu_window = {1, 2},
                                const CriticalOptions& opt = {});

/// Minimum over the window of Im lambda at fixed d (the bisection
/// indicator), with the achieving (E, chi). Exposed for tests.
struct WindowMinimum {
  double min_im = 0.0;
  double E = 0.0;
  double chi = 0.0;
};
WindowMinimum window_min_im(int n, double d, std::pair<int, int> nu_window,
                            const CriticalOptions& opt = {});

}  // namespace bic

#endif
