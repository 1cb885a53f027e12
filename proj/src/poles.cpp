#include "bic/poles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bic/parity.hpp"
#include "bic/quadrature.hpp"

namespace bic {

namespace {

Eigen::MatrixXcd sector_block(Complex z, const EmitterArrayParams& params,
                              Parity sector, Sheet sheet, double quad_tol) {
  SelfEnergyMatrix se = self_energy(z, params, sheet, quad_tol);
  Eigen::MatrixXcd M =
      (params.epsilon - z) *
          Eigen::MatrixXcd::Identity(params.n, params.n) -
      se.sigma;
  auto blocks = block_decompose(M);
  return (sector == Parity::Antisymmetric) ? blocks.first.matrix
                                           : blocks.second.matrix;
}

}  // namespace

Complex det_on_sheet(Complex z, const EmitterArrayParams& params,
                     Parity sector, Sheet sheet, double quad_tol) {
  return sector_block(z, params, sector, sheet, quad_tol).determinant();
}

double det_scale(Complex z, const EmitterArrayParams& params, Parity sector,
                 Sheet sheet, double quad_tol) {
  const Eigen::MatrixXcd B = sector_block(z, params, sector, sheet, quad_tol);
  double scale = 1.0;
  for (int r = 0; r < B.rows(); ++r) scale *= B.row(r).norm();
  return std::max(scale, 1e-300);
}

PoleResult find_pole(Complex seed, const EmitterArrayParams& params,
                     Parity sector, Sheet sheet, const PoleOptions& opt) {
  PoleResult out;
  out.sector = sector;
  out.sheet = sheet;
  Complex z = seed;
  out.trajectory.push_back(z);
  auto f = [&](Complex w) {
    return det_on_sheet(w, params, sector, sheet, opt.quad_tol);
  };
  Complex fz = f(z);
  double scale = det_scale(z, params, sector, sheet, opt.quad_tol);
  for (int it = 0; it < opt.max_iter; ++it) {
    if (std::abs(fz) <= opt.residual_tol * scale) {
      out.converged = true;
      break;
    }
    const double h = opt.fd_step * (1.0 + std::abs(z));
    const Complex df = (f(z + h) - f(z - h)) / (2.0 * h);
    if (df == Complex(0.0, 0.0)) break;
    Complex step = -fz / df;
    // damped update
    Complex znew = z + step;
    Complex fnew = f(znew);
    int halvings = 0;
    while (std::abs(fnew) > std::abs(fz) && halvings < 8) {
      step *= 0.5;
      znew = z + step;
      fnew = f(znew);
      ++halvings;
    }
    z = znew;
    fz = fnew;
    out.trajectory.push_back(z);
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) {
      out.converged = std::abs(fz) <= 1e3 * opt.residual_tol * scale;
      break;
    }
    if (it + 1 == opt.max_iter) break;
    scale = det_scale(z, params, sector, sheet, opt.quad_tol);
  }
  out.z = z;
  out.residual = std::abs(fz) / scale;
  out.decay_rate = 2.0 * std::abs(z.imag());
  return out;
}

Complex f3(Complex theta, Complex b1, Complex b2) {
  const Complex I(0.0, 1.0);
  const Complex e1 = std::exp(-I * theta);
  const Complex e2 = e1 * e1;
  const Complex e4 = e2 * e2;
  return 8.0 * b1 * b1 + b2 * b2 + 16.0 * I * b1 * e1 - 8.0 * e2 +
         2.0 * I * b2 * e2 - e4;
}

namespace {

/// Discriminant of the n = 3 symmetric block in the analytic (non-conjugate)
/// representation; equals -conj(f3) for real arguments.
Complex disc3(Complex theta, Complex b1, Complex b2) {
  const Complex I(0.0, 1.0);
  const Complex e1 = std::exp(I * theta);
  const Complex e2 = e1 * e1;
  const Complex e4 = e2 * e2;
  return e4 + 2.0 * I * b2 * e2 + 8.0 * e2 + 16.0 * I * b1 * e1 -
         8.0 * b1 * b1 - b2 * b2;
}

Complex disc4(Complex theta, Complex b1, Complex b2, Complex b3, bool sym) {
  const Complex I(0.0, 1.0);
  const Complex e1 = std::exp(I * theta);
  const Complex e2 = e1 * e1;
  const Complex e3 = e2 * e1;
  const double s = sym ? 1.0 : -1.0;
  // (alpha - beta)^2 + 4 sigma^2 of the 2x2 sector block
  const Complex amb = s * (e1 - e3) + I * (b1 - b3);
  const Complex sig = e1 + s * e2 + I * (b1 + s * b2);
  return amb * amb + 4.0 * sig * sig;
}

/// chi required by the singularity condition of the sector block, as an
/// analytic function evaluated at (possibly real) z.
Complex chi_required_n3(Complex z, double d, Parity sector, PoleBranch branch,
                        double quad_tol) {
  const Complex I(0.0, 1.0);
  const Complex th = theta_phase(z, d);
  CutVector cv = cut_vector(3, z, d, quad_tol);
  const Complex b1 = cv.values[0], b2 = cv.values[1];
  if (sector == Parity::Antisymmetric) {
    return b2 + I * (1.0 - std::exp(2.0 * I * th));
  }
  const Complex e2 = std::exp(2.0 * I * th);
  const Complex root = std::sqrt(disc3(th, b1, b2));
  const double s = (branch == PoleBranch::Plus) ? 1.0 : -1.0;
  return 0.5 * I * (2.0 + e2) - 0.5 * b2 + s * 0.5 * I * root;
}

Complex chi_required_n4(Complex z, double d, Parity sector, PoleBranch branch,
                        double quad_tol) {
  const Complex I(0.0, 1.0);
  const Complex th = theta_phase(z, d);
  CutVector cv = cut_vector(4, z, d, quad_tol);
  const Complex b1 = cv.values[0], b2 = cv.values[1], b3 = cv.values[2];
  const Complex e1 = std::exp(I * th);
  const Complex e3 = std::exp(3.0 * I * th);
  const double s = (branch == PoleBranch::Plus) ? 1.0 : -1.0;
  if (sector == Parity::Symmetric) {
    const Complex root = std::sqrt(disc4(th, b1, b2, b3, true));
    return 0.5 * I * (2.0 + e1 + e3) - 0.5 * (b1 + b3) + s * 0.5 * I * root;
  }
  const Complex root = std::sqrt(disc4(th, b1, b2, b3, false));
  return 0.5 * I * (2.0 - e1 - e3) + 0.5 * (b1 + b3) + s * 0.5 * I * root;
}

template <typename ChiReq>
Complex approx_pole_impl(const EmitterArrayParams& params, ChiReq&& chi_req) {
  // Real-axis fixed point: E <- eps + (gamma/sqrt(E^2-1)) Re Phi(E), two
  // passes from E = eps, then the width from Im Phi at the final E. Keeping
  // the argument real is what leaves the O(gamma^2) remainder.
  double E = params.epsilon;
  Complex phi;
  for (int pass = 0; pass < 2; ++pass) {
    const double sq = std::sqrt(E * E - 1.0);
    phi = b0_closed(E) - chi_req(Complex(E, 0.0));
    E = params.epsilon + params.gamma / sq * phi.real();
  }
  const double sq = std::sqrt(E * E - 1.0);
  phi = b0_closed(E) - chi_req(Complex(E, 0.0));
  return Complex(E, params.gamma / sq * phi.imag());
}

}  // namespace

Complex approx_pole_n3(const EmitterArrayParams& params, Parity sector,
                       PoleBranch branch) {
  if (params.n != 3) throw std::invalid_argument("approx_pole_n3: n must be 3");
  if (params.epsilon <= 1.0)
    throw DomainError("approx_pole_n3 requires eps > 1");
  return approx_pole_impl(params, [&](Complex z) {
    return chi_required_n3(z, params.d, sector, branch, 1e-13);
  });
}

Complex approx_pole_n4(const EmitterArrayParams& params, Parity sector,
                       PoleBranch branch) {
  if (params.n != 4) throw std::invalid_argument("approx_pole_n4: n must be 4");
  if (params.epsilon <= 1.0)
    throw DomainError("approx_pole_n4 requires eps > 1");
  return approx_pole_impl(params, [&](Complex z) {
    return chi_required_n4(z, params.d, sector, branch, 1e-13);
  });
}

namespace {

/// chi-roots of the sector block at complex z (eigenvalues of i B(z)).
Eigen::VectorXcd chi_roots_z(Complex z, int n, double d, Parity sector,
                             double quad_tol) {
  CutVector cv = cut_vector(n, z, d, quad_tol);
  Eigen::VectorXcd bs(n - 1);
  for (int j = 0; j < n - 1; ++j) bs[j] = cv.values[j];
  ModelMatrix A0 = build_A(theta_phase(z, d), Complex(0.0, 0.0), bs, n);
  auto blocks = block_decompose(A0);
  const Eigen::MatrixXcd& B = (sector == Parity::Antisymmetric)
                                  ? blocks.first.matrix
                                  : blocks.second.matrix;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Complex(0.0, 1.0) * B, false);
  return es.eigenvalues();
}

/// One pole per eigenbranch by fixed-point iteration of
/// z = eps - (gamma/sqrt(z^2-1))(lambda_k(z) - b0(z)), polished by Newton.
std::vector<PoleResult> branch_poles(const EmitterArrayParams& params,
                                     Parity sector, Sheet sheet,
                                     double quad_tol) {
  const double eps = params.epsilon;
  Eigen::VectorXcd lam0 = chi_roots_z(Complex(eps, 0.0), params.n, params.d,
                                      sector, quad_tol);
  std::vector<PoleResult> out;
  const double sheet_sign = (sheet == Sheet::Third) ? -1.0 : 1.0;
  for (int k = 0; k < lam0.size(); ++k) {
    Complex z(eps, 0.0);
    Complex lam = lam0[k];
    for (int it = 0; it < 30; ++it) {
      const Complex sq = sqrt_cut(z);
      Complex znew = eps - params.gamma / sq * (lam - b0_closed_z(z));
      // sheet III mirrors sheet II; reuse the sheet-II fixed point and
      // conjugate the seed at the end if needed
      if (std::abs(znew - z) < 1e-13 * (1.0 + std::abs(znew))) {
        z = znew;
        break;
      }
      z = znew;
      Eigen::VectorXcd roots =
          chi_roots_z(z, params.n, params.d, sector, quad_tol);
      int best = 0;
      for (int i = 1; i < roots.size(); ++i)
        if (std::abs(roots[i] - lam) < std::abs(roots[best] - lam)) best = i;
      lam = roots[best];
    }
    Complex seed = (sheet_sign > 0) ? z : std::conj(z);
    PoleResult pr = find_pole(seed, params, sector, sheet);
    out.push_back(pr);
  }
  return out;
}

}  // namespace

Trajectory pole_trajectory_epsilon(const EmitterArrayParams& base,
                                   Parity sector, Sheet sheet,
                                   double eps_min, double eps_max, int steps,
                                   double touch_tol) {
  if (eps_min <= 1.0 || eps_max <= eps_min)
    throw DomainError("epsilon sweep must lie above the continuum threshold");
  Trajectory out;
  std::vector<Complex> prev;  // previous pole per branch label
  for (int i = 0; i < steps; ++i) {
    const double eps =
        eps_min + (eps_max - eps_min) * i / std::max(1, steps - 1);
    EmitterArrayParams p = base;
    p.epsilon = eps;
    std::vector<PoleResult> poles = branch_poles(p, sector, sheet, 1e-12);
    std::vector<int> order(poles.size());
    if (prev.empty()) {
      std::sort(poles.begin(), poles.end(),
                [](const PoleResult& a, const PoleResult& b) {
                  return a.z.real() < b.z.real();
                });
      for (size_t k = 0; k < poles.size(); ++k) order[k] = int(k);
      prev.resize(poles.size());
    } else {
      // greedy proximity to the previous step's branch positions
      std::vector<bool> used(poles.size(), false);
      for (size_t k = 0; k < poles.size() && k < prev.size(); ++k) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < poles.size(); ++j) {
          if (used[j]) continue;
          const double dd = std::abs(poles[j].z - prev[k]);
          if (dd < bd) {
            bd = dd;
            best = int(j);
          }
        }
        used[best] = true;
        order[k] = best;
      }
    }
    for (size_t k = 0; k < poles.size(); ++k) {
      const PoleResult& pr = poles[order[k]];
      prev[k] = pr.z;
      out.points.push_back({eps, pr, int(k)});
      if (std::abs(pr.z.imag()) < touch_tol && pr.converged) {
        out.touches.push_back({eps, pr.z});
      }
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const TrajectoryPoint& a, const TrajectoryPoint& b) {
              if (a.branch != b.branch) return a.branch < b.branch;
              return a.parameter < b.parameter;
            });
  return out;
}

namespace {

struct BranchState {
  Eigen::VectorXcd lam;
};

/// Refined local minima of Im lambda over the window for one d.
WindowMinimum scan_window(int n, double d, std::pair<int, int> nu_window,
                          const CriticalOptions& opt) {
  const double th_lo = (nu_window.first + opt.window_margin) * M_PI;
  const double th_hi = (nu_window.second - opt.window_margin) * M_PI;
  const int G = opt.scan_points;
  const int m = n - n / 2;  // symmetric block size

  auto roots_at = [&](double th) -> Eigen::VectorXcd {
    const double E = std::sqrt(1.0 + th * th / (d * d));
    return chi_roots_z(Complex(E, 0.0), n, d, Parity::Symmetric, opt.quad_tol);
  };

  std::vector<Eigen::VectorXcd> lam(G);
  std::vector<double> ths(G);
  for (int g = 0; g < G; ++g) {
    ths[g] = th_lo + (th_hi - th_lo) * g / (G - 1);
    Eigen::VectorXcd r = roots_at(ths[g]);
    if (g == 0) {
      lam[g] = r;
    } else {
      // greedy proximity match against the previous node
      const int mm = int(r.size());
      Eigen::VectorXcd matched(mm);
      std::vector<bool> used(mm, false);
      for (int i = 0; i < mm; ++i) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < mm; ++j) {
          if (used[j]) continue;
          const double dd = std::abs(r[j] - lam[g - 1][i]);
          if (dd < bd) {
            bd = dd;
            best = j;
          }
        }
        used[best] = true;
        matched[i] = r[best];
      }
      lam[g] = matched;
    }
  }

  WindowMinimum best;
  best.min_im = std::numeric_limits<double>::infinity();

  auto follow = [&](double th, Complex guess) -> Complex {
    Eigen::VectorXcd r = roots_at(th);
    int bi = 0;
    for (int i = 1; i < r.size(); ++i)
      if (std::abs(r[i] - guess) < std::abs(r[bi] - guess)) bi = i;
    return r[bi];
  };

  for (int k = 0; k < m; ++k) {
    for (int g = 0; g < G; ++g) {
      const double im = lam[g][k].imag();
      const bool is_min = (g == 0 || im <= lam[g - 1][k].imag()) &&
                          (g == G - 1 || im <= lam[g + 1][k].imag());
      if (!is_min) continue;
      // parabolic refinement along the branch
      double x1 = ths[g];
      double h = (th_hi - th_lo) / (G - 1);
      Complex l1 = lam[g][k];
      for (int round = 0; round < 8; ++round) {
        const Complex la = follow(x1 - h, l1);
        const Complex lb = follow(x1 + h, l1);
        const double f0 = la.imag(), f1 = l1.imag(), f2 = lb.imag();
        const double denom = f0 - 2 * f1 + f2;
        if (denom > 0) {
          double step = 0.5 * h * (f0 - f2) / denom;
          step = std::clamp(step, -2.0 * h, 2.0 * h);
          const double xn = std::clamp(x1 + step, th_lo, th_hi);
          const Complex ln = follow(xn, l1);
          if (ln.imag() < f1) {
            x1 = xn;
            l1 = ln;
          }
        } else {
          // walk downhill
          if (f0 < f1 && f0 <= f2) {
            x1 = std::max(th_lo, x1 - h);
            l1 = la;
          } else if (f2 < f1) {
            x1 = std::min(th_hi, x1 + h);
            l1 = lb;
          }
        }
        h *= 0.35;
        if (h < 1e-10) break;
      }
      if (l1.imag() < best.min_im) {
        best.min_im = l1.imag();
        best.E = std::sqrt(1.0 + x1 * x1 / (d * d));
        best.chi = l1.real();
      }
    }
  }
  return best;
}

}  // namespace

WindowMinimum window_min_im(int n, double d, std::pair<int, int> nu_window,
                            const CriticalOptions& opt) {
  return scan_window(n, d, nu_window, opt);
}

CriticalPoint critical_distance(int n, double gamma,
                                std::pair<int, int> nu_window,
                                const CriticalOptions& opt) {
  if (n < 3) throw std::invalid_argument("critical_distance requires n >= 3");
  const double touch_tol = 1e-9;

  // bracket: touching below d_c, clear above
  double d_hi = opt.d_hi;
  WindowMinimum w_hi = scan_window(n, d_hi, nu_window, opt);
  int guard = 0;
  while (w_hi.min_im <= touch_tol && guard++ < 6) {
    d_hi *= 1.6;
    w_hi = scan_window(n, d_hi, nu_window, opt);
  }
  double d_lo = 0.5 * d_hi;
  WindowMinimum w_lo = scan_window(n, d_lo, nu_window, opt);
  guard = 0;
  while (w_lo.min_im > touch_tol && guard++ < 16) {
    d_lo *= 0.6;
    w_lo = scan_window(n, d_lo, nu_window, opt);
  }
  if (w_lo.min_im > touch_tol) {
    throw std::runtime_error(
        "critical_distance: no touching found (window widening exhausted)");
  }

  while (d_hi - d_lo > 0.25 * opt.d_tol) {
    const double dm = 0.5 * (d_lo + d_hi);
    WindowMinimum wm = scan_window(n, dm, nu_window, opt);
    if (wm.min_im <= touch_tol) {
      d_lo = dm;
    } else {
      d_hi = dm;
      w_hi = wm;
    }
  }

  // E_c from just above d_c, where the dip has a single sharp minimum (below
  // d_c it splits into the two tangency points of the pair).
  CriticalPoint out;
  out.n = n;
  out.nu_window = nu_window;
  out.d_c = 0.5 * (d_lo + d_hi);
  out.E_c = w_hi.E;
  out.chi_c = w_hi.chi;
  out.epsilon_c = chi_to_epsilon(w_hi.chi, w_hi.E, gamma);
  return out;
}

}  // namespace bic
