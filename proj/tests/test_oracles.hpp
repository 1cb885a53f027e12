// Test-only independent numerics: second quadrature scheme for the cut
// integrals (substitution lambda = 1 + u^2 with a Gauss-Laguerre tail) and
// direct momentum-space quadrature of the self-energy integral. These stay
// independent of the implementation path they cross-check.
#ifndef BIC_TEST_ORACLES_HPP
#define BIC_TEST_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "bic/quadrature.hpp"
#include "bic/types.hpp"

namespace bic_test {

using bic::Complex;

/// Gauss-Laguerre nodes/weights via Golub-Welsch on the Jacobi matrix.
inline void gauss_laguerre(int n, std::vector<double>& x,
                           std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = 2 * i + 1;
    if (i + 1 < n) {
      J(i, i + 1) = i + 1;
      J(i + 1, i) = i + 1;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    w[i] = v0 * v0;  // weights for weight function e^{-x} on [0, inf)
  }
}

/// b_j(E) by the lambda = 1 + u^2 substitution (j >= 1):
///   b_j = (sqrt(E^2-1)/pi) Int_1^inf e^{-j lam d}/sqrt(lam^2-1) E/(E^2+lam^2-1) dlam
/// u-part on [0, U], then lambda-tail by 20-node Gauss-Laguerre.
inline double cut_term_scheme2(int j, double E, double d) {
  const double pref = std::sqrt(E * E - 1.0) / M_PI;
  auto g = [&](double lam) {
    return E / (std::sqrt(lam * lam - 1.0) * (E * E + lam * lam - 1.0));
  };
  const double U = std::sqrt(std::max(4.0, 36.0 / (j * d)));
  auto fu = [&](double u) {
    const double lam = 1.0 + u * u;
    const double s = std::sqrt(2.0 + u * u);
    return std::exp(-j * d * lam) * 2.0 * E /
           (s * (E * E + lam * lam - 1.0));
  };
  bic::QuadOptions opt;
  opt.abs_tol = 1e-14;
  double val = bic::integrate_adaptive<double>(fu, 0.0, U, opt);
  // tail from lam_U with Laguerre in v = j d (lam - lam_U)
  const double lamU = 1.0 + U * U;
  std::vector<double> x, w;
  gauss_laguerre(20, x, w);
  double tail = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double lam = lamU + x[i] / (j * d);
    tail += w[i] * g(lam);
  }
  tail *= std::exp(-j * d * lamU) / (j * d);
  return pref * (val + tail);
}

/// eta(x; E) by the same lambda = 1 + u^2 substitution (x > 0).
inline double eta_scheme2(double x, double E) {
  const double ax = std::abs(x);
  auto fu = [&](double u) {
    const double lam = 1.0 + u * u;
    const double sq = std::sqrt(lam * lam - 1.0);
    const double quarter = std::sqrt(sq);
    return std::exp(-ax * lam) / quarter * (sq - E) /
           (E * E + lam * lam - 1.0) * 2.0 * u;
  };
  const double U = std::sqrt(std::max(9.0, 40.0 / ax));
  bic::QuadOptions opt;
  opt.abs_tol = 1e-14;
  double val = bic::integrate_adaptive<double>(fu, 0.0, U, opt);
  // Laguerre tail in lambda
  const double lamU = 1.0 + U * U;
  std::vector<double> xg, wg;
  gauss_laguerre(20, xg, wg);
  double tail = 0.0;
  for (size_t i = 0; i < xg.size(); ++i) {
    const double lam = lamU + xg[i] / ax;
    const double sq = std::sqrt(lam * lam - 1.0);
    tail += wg[i] * (sq - E) / (std::sqrt(sq) * (E * E + lam * lam - 1.0));
  }
  tail *= std::exp(-ax * lamU) / ax;
  return (val + tail) / (2.0 * M_PI) * std::sqrt((E * E - 1.0) / (2.0 * E));
}

/// Direct quadrature of the self-energy momentum integral at complex z,
///   Sigma_a(z) = (gamma/pi) Int_0^inf cos(a k d)/(w(k)(w(k) - z)) dk,
/// with an integration-by-parts (a > 0) or asymptotic (a = 0) tail.
inline Complex sigma_direct(int a, Complex z, double d, double gamma) {
  const double K = 60.0;
  const double k0 = std::sqrt(std::max(0.0, z.real() * z.real() - 1.0));
  auto f = [&](double k) -> Complex {
    const double w = std::sqrt(k * k + 1.0);
    return std::cos(a * k * d) / (w * (w - z));
  };
  std::vector<double> pts = {0.0};
  if (k0 > 1e-3 && k0 < K) {
    pts.push_back(k0 - std::min(0.5, k0 * 0.5));
    pts.push_back(k0);
    pts.push_back(k0 + 0.5);
  }
  pts.push_back(K);
  bic::QuadOptions opt;
  opt.abs_tol = 1e-13;
  opt.max_panels = 60000;
  Complex val = bic::integrate_adaptive_pts<Complex>(f, pts, opt);
  if (a == 0) {
    val += 1.0 / K + z / (2.0 * K * K) + (z * z - 1.0) / (3.0 * K * K * K);
  } else {
    const double q = a * d;
    auto u = [&](double k) -> Complex {
      const double w = std::sqrt(k * k + 1.0);
      return 1.0 / (w * (w - z));
    };
    const double h = 1e-3;
    const Complex u0 = u(K);
    const Complex u1 = (u(K + h) - u(K - h)) / (2.0 * h);
    const Complex u2 = (u(K + h) - 2.0 * u0 + u(K - h)) / (h * h);
    const double s = std::sin(q * K), c = std::cos(q * K);
    val += -u0 * s / q - u1 * c / (q * q) + u2 * s / (q * q * q);
  }
  return gamma / M_PI * val;
}

/// delta -> 0 extrapolation of sigma_direct from above or below the cut.
inline Complex sigma_direct_extrap(int a, double E, double d, double gamma,
                                   int sign) {
  const double d1 = 1e-3 * sign, d2 = 0.5e-3 * sign, d3 = 0.25e-3 * sign;
  const Complex s1 = sigma_direct(a, Complex(E, d1), d, gamma);
  const Complex s2 = sigma_direct(a, Complex(E, d2), d, gamma);
  const Complex s3 = sigma_direct(a, Complex(E, d3), d, gamma);
  // quadratic Richardson with deltas (1, 1/2, 1/4)*d1
  return (s1 - 6.0 * s2 + 8.0 * s3) / 3.0;
}

}  // namespace bic_test

#endif
