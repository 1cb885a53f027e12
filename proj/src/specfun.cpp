#include "bic/specfun.hpp"

#include <cmath>

#include "bic/quadrature.hpp"

namespace bic {

Complex sqrt_cut(Complex z) {
  return std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
}

Complex theta_phase(Complex z, double d) { return d * sqrt_cut(z); }

double b0_closed(double E) {
  if (E < 1.0) throw DomainError("b0 requires E >= 1 (continuum threshold)");
  if (E == 1.0) return 0.0;
  // E - sqrt(E^2-1) = 1/(E + sqrt(E^2-1)); the second form is stable for
  // large E.
  return std::log(E + std::sqrt(E * E - 1.0)) / M_PI;
}

Complex b0_closed_z(Complex z) {
  return std::log(z + sqrt_cut(z)) / M_PI;
}

namespace {

// Upper integration limit for integrands decaying like
// exp(-w cosh t - r t); smallest T with w cosh(T) + r T >= target.
double decay_cutoff(double w, double r, double target) {
  double lo = 1.0, hi = 2.0;
  auto val = [&](double t) { return w * std::cosh(t) + r * t; };
  while (val(hi) < target && hi < 800.0) hi *= 1.5;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (val(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

void check_continuation(Complex z) {
  // The real-lambda contour hits the integrand pole when z^2 lies on
  // (-inf, 0], i.e. z on the imaginary axis.
  if (z.real() == 0.0) {
    throw ContinuationError(
        "cut integral undefined for z^2 on (-inf, 0] (imaginary axis)");
  }
}

}  // namespace

Complex cut_term(int j, Complex z, double d, double abs_tol) {
  if (j < 0) throw DomainError("cut_term requires j >= 0");
  check_continuation(z);
  const double T =
      decay_cutoff(j * d, 2.0, 40.0 + std::log1p(std::abs(z)));
  const Complex z2 = z * z;
  auto f = [&](double t) -> Complex {
    const double sh = std::sinh(t);
    return std::exp(-j * d * std::cosh(t)) * z / (z2 + sh * sh);
  };
  QuadOptions opt;
  opt.abs_tol = abs_tol;
  Complex integral = integrate_adaptive<Complex>(f, 0.0, T, opt);
  return sqrt_cut(z) / M_PI * integral;
}

CutVector cut_vector(int n, Complex z, double d, double abs_tol) {
  CutVector out;
  out.z = z;
  out.d = d;
  if (n <= 1) return out;
  check_continuation(z);
  const int m = n - 1;
  // One adaptive pass over the shared contour; the j = 1 cutoff dominates.
  const double T = decay_cutoff(d, 2.0, 40.0 + std::log1p(std::abs(z)));
  const Complex z2 = z * z;
  auto f = [&](double t) -> Eigen::VectorXcd {
    Eigen::VectorXcd v(m);
    const double ch = std::cosh(t);
    const double sh = std::sinh(t);
    const Complex base = z / (z2 + sh * sh);
    const double e1 = std::exp(-d * ch);
    double ej = 1.0;
    for (int j = 0; j < m; ++j) {
      ej *= e1;
      v[j] = ej * base;
    }
    return v;
  };
  QuadOptions opt;
  opt.abs_tol = abs_tol;
  Eigen::VectorXcd integral =
      integrate_adaptive<Eigen::VectorXcd>(f, 0.0, T, opt);
  const Complex pref = sqrt_cut(z) / M_PI;
  out.values.resize(m);
  for (int j = 0; j < m; ++j) out.values[j] = pref * integral[j];
  return out;
}

double eta(double x, double E, double abs_tol) {
  if (E <= 1.0) throw DomainError("eta requires E > 1");
  const double ax = std::abs(x);
  const double T = decay_cutoff(ax, 0.5, 42.0);
  const double E2m1 = E * E - 1.0;
  auto f = [&](double t) -> double {
    const double sh = std::sinh(t);
    return std::exp(-ax * std::cosh(t)) * std::sqrt(sh) * (sh - E) /
           (E * E + sh * sh);
  };
  QuadOptions opt;
  opt.abs_tol = abs_tol;
  double integral = integrate_adaptive<double>(f, 0.0, T, opt);
  return integral / (2.0 * M_PI) * std::sqrt(E2m1 / (2.0 * E));
}

double xi1(double x, double E, double gamma, bool with_eta, double abs_tol) {
  if (E <= 1.0) throw DomainError("xi1 requires E > 1");
  const double s = std::sqrt(E * E - 1.0);
  double val = std::sin(std::abs(x) * s);
  if (with_eta) val -= eta(x, E, abs_tol);
  return std::sqrt(gamma * E / (E * E - 1.0)) * val;
}

double chi_of_epsilon(double E, double epsilon, double gamma) {
  return (epsilon - E) * std::sqrt(E * E - 1.0) / gamma + b0_closed(E);
}

double chi_to_epsilon(double chi, double E, double gamma) {
  return E + gamma * (chi - b0_closed(E)) / std::sqrt(E * E - 1.0);
}

Complex chi_of_epsilon_z(Complex z, double epsilon, double gamma) {
  return (epsilon - z) * sqrt_cut(z) / gamma + b0_closed_z(z);
}

SelfEnergyMatrix self_energy(Complex z, const EmitterArrayParams& params,
                             Sheet sheet, double abs_tol) {
  const int n = params.n;
  const double gamma = params.gamma;
  const Complex sq = sqrt_cut(z);
  const Complex th = params.d * sq;
  const Complex I(0.0, 1.0);

  // Sign of the boundary form: + above the cut, - below; sheet II is the
  // + form continued everywhere, sheet III the - form.
  bool plus_form;
  switch (sheet) {
    case Sheet::Second:
      plus_form = true;
      break;
    case Sheet::Third:
      plus_form = false;
      break;
    default:
      plus_form = (z.imag() >= 0.0);
  }

  std::vector<Complex> b(n);
  b[0] = b0_closed_z(z);
  if (n > 1) {
    CutVector cv = cut_vector(n, z, params.d, abs_tol);
    for (int j = 1; j < n; ++j) b[j] = cv.values[j - 1];
  }

  SelfEnergyMatrix out;
  out.z = z;
  out.sheet = sheet;
  out.sigma.resize(n, n);
  const double s = plus_form ? 1.0 : -1.0;
  for (int a = 0; a < n; ++a) {
    const Complex entry =
        s * I * gamma / sq *
        (std::exp(s * I * double(a) * th) + s * I * b[a]);
    for (int j = 0; j + a < n; ++j) {
      out.sigma(j, j + a) = entry;
      out.sigma(j + a, j) = entry;
    }
  }
  return out;
}

}  // namespace bic
