#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bic/specfun.hpp"
#include "test_oracles.hpp"

using namespace bic;
using bic_test::cut_term_scheme2;
using bic_test::eta_scheme2;
using bic_test::sigma_direct;
using bic_test::sigma_direct_extrap;

namespace {
const double SQRT2 = std::sqrt(2.0);
}

TEST_CASE("b0 closed form values") {
  CHECK(b0_closed(1.0) == doctest::Approx(0.0).epsilon(1e-14));
  // -(1/pi) ln(sqrt2 - 1)
  CHECK(b0_closed(SQRT2) ==
        doctest::Approx(-std::log(SQRT2 - 1.0) / M_PI).epsilon(1e-14));
  CHECK(b0_closed(SQRT2) == doctest::Approx(0.2805499261).epsilon(1e-9));
  // E = 5/4: sqrt(E^2-1) = 3/4, value (ln 2)/pi
  CHECK(b0_closed(1.25) == doctest::Approx(std::log(2.0) / M_PI).epsilon(1e-14));
  CHECK(b0_closed(1.25) == doctest::Approx(0.2206356001).epsilon(1e-9));
  CHECK_THROWS_AS(b0_closed(0.99), DomainError);
}

TEST_CASE("b0 monotone increasing and nonnegative") {
  double prev = 0.0;
  for (double E = 1.0; E <= 40.0; E += 0.37) {
    const double v = b0_closed(E);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("cut_term j=0 agrees with the closed form to 1e-10 relative") {
  // 100 log-spaced energies in (1, 100]
  for (int i = 0; i < 100; ++i) {
    const double E = 1.0 + std::pow(10.0, -6.0 + 8.0 * i / 99.0);
    if (E > 100.0) break;
    const Complex v = cut_term(0, Complex(E, 0.0), 7.0, 1e-14);
    const double ref = b0_closed(E);
    CHECK(std::abs(v.real() - ref) <= 1e-10 * ref + 1e-15);
    CHECK(std::abs(v.imag()) <= 1e-12);
  }
}

TEST_CASE("cut terms are real for real E and obey the e^{-jd} bound") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> logE(-2.0, 2.0), dd(0.05, 20.0);
  for (int trial = 0; trial < 60; ++trial) {
    const double E = 1.0 + std::pow(10.0, logE(rng));
    const double d = dd(rng);
    const double b0 = b0_closed(E);
    CutVector cv = cut_vector(9, Complex(E, 0.0), d, 1e-13);
    for (int j = 1; j <= 8; ++j) {
      const Complex bj = cv.values[j - 1];
      CHECK(std::abs(bj.imag()) <= 1e-12);
      CHECK(std::abs(bj) <= std::exp(-j * d) * b0 * (1.0 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("cut_term j=5 bound at E=2, d=7") {
  const Complex b5 = cut_term(5, Complex(2.0, 0.0), 7.0);
  CHECK(std::abs(b5) <= std::exp(-35.0) * b0_closed(2.0));
}

TEST_CASE("dual quadrature: cosh scheme vs lambda=1+u^2 + Laguerre tail") {
  const double b1 = cut_term(1, Complex(SQRT2, 0.0), 7.0, 1e-14).real();
  const double b1_alt = cut_term_scheme2(1, SQRT2, 7.0);
  CHECK(std::abs(b1 - b1_alt) <= 1e-9 * std::max(1.0, std::abs(b1)));

  const double b2 = cut_term(2, Complex(1.7, 0.0), 3.0, 1e-14).real();
  const double b2_alt = cut_term_scheme2(2, 1.7, 3.0);
  CHECK(std::abs(b2 - b2_alt) <= 1e-9);
}

TEST_CASE("cut_term rejects the imaginary axis") {
  CHECK_THROWS_AS(cut_term(1, Complex(0.0, 0.5), 3.0), ContinuationError);
}

TEST_CASE("eta: symmetry, decay, dual quadrature") {
  const double E = SQRT2;
  CHECK(eta(1.3, E) == doctest::Approx(eta(-1.3, E)).epsilon(1e-13));
  CHECK(std::abs(eta(40.0, E)) < 1e-16);
  CHECK(std::abs(eta(-35.0, E)) < 1e-14);
  // decays at least as e^{-|x|}
  for (double x : {1.0, 2.0, 4.0, 8.0}) {
    CHECK(std::abs(eta(x, E)) <= std::exp(-x) * std::abs(eta(0.0, E)) * 10.0);
  }
  const double v = eta(1.0, E, 1e-14);
  const double v_alt = eta_scheme2(1.0, E);
  CHECK(std::abs(v - v_alt) <= 1e-9);
}

TEST_CASE("xi1 basics") {
  const double E = SQRT2, g = 0.01;
  // x = 0: sin term vanishes
  const double expect0 = -std::sqrt(g * E / (E * E - 1.0)) * eta(0.0, E);
  CHECK(xi1(0.0, E, g) == doctest::Approx(expect0).epsilon(1e-12));
  CHECK(xi1(0.8, E, g) == doctest::Approx(xi1(-0.8, E, g)).epsilon(1e-13));
  // resonant zeros of the large-spacing kernel at multiples of d/nu
  const double d = 7.0;
  const int nu = 2;
  const double Enu = std::sqrt(1.0 + nu * nu * M_PI * M_PI / (d * d));
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::abs(xi1(k * d / nu, Enu, g, false)) < 1e-12);
  }
  CHECK_THROWS_AS(xi1(1.0, 0.9, g), DomainError);
}

TEST_CASE("theta branch") {
  CHECK(theta_phase(Complex(SQRT2, 0.0), M_PI).real() ==
        doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(std::abs(theta_phase(Complex(1.0, 0.0), 5.0)) < 1e-7);
  // Schwarz reflection off the axis
  const Complex z(1.4, 0.3);
  const Complex a = theta_phase(z, 2.0);
  const Complex b = theta_phase(std::conj(z), 2.0);
  CHECK(std::abs(b - std::conj(a)) < 1e-14);
  // upper half-plane: positive imaginary part of sqrt
  CHECK(sqrt_cut(Complex(0.0, 2.0)).imag() > 0.0);
  CHECK(sqrt_cut(Complex(1.2, 1e-12)).real() > 0.0);
}

TEST_CASE("chi and its inverse") {
  const double E = SQRT2, g = 0.01;
  CHECK(chi_of_epsilon(E, E, g) == doctest::Approx(b0_closed(E)).epsilon(1e-13));
  // (E=sqrt2, eps=sqrt2+0.01, gamma=0.01) -> chi = 1 + b0
  CHECK(chi_of_epsilon(E, E + 0.01, g) ==
        doctest::Approx(1.0 + b0_closed(E)).epsilon(1e-12));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> eps(1.0, 3.0), en(1.01, 5.0);
  for (int i = 0; i < 40; ++i) {
    const double Ei = en(rng), epsi = eps(rng);
    const double chi = chi_of_epsilon(Ei, epsi, g);
    CHECK(chi_to_epsilon(chi, Ei, g) == doctest::Approx(epsi).epsilon(1e-12));
  }
}

TEST_CASE("self-energy boundary values match direct quadrature of the "
          "defining integral") {
  // delta -> 0 extrapolation of the momentum integral at E = sqrt2, d = 7,
  // n = 3, checked against the closed decomposition on both cut sides.
  EmitterArrayParams params(3, 1.2, 7.0, 0.01);
  const double E = SQRT2;
  SelfEnergyMatrix plus = self_energy(Complex(E, 0.0), params, Sheet::Second);
  SelfEnergyMatrix minus = self_energy(Complex(E, 0.0), params, Sheet::Third);
  for (int a = 0; a < 3; ++a) {
    const Complex qp = sigma_direct_extrap(a, E, 7.0, params.gamma, +1);
    const Complex qm = sigma_direct_extrap(a, E, 7.0, params.gamma, -1);
    CHECK(std::abs(qp - plus.sigma(0, a)) < 1e-6);
    CHECK(std::abs(qm - minus.sigma(0, a)) < 1e-6);
  }
}

TEST_CASE("first sheet matches the integral off the axis and reflects") {
  EmitterArrayParams params(3, 1.2, 7.0, 0.01);
  for (const Complex z : {Complex(1.3, 0.05), Complex(1.3, -0.05)}) {
    SelfEnergyMatrix se = self_energy(z, params, Sheet::First);
    for (int a = 0; a < 3; ++a) {
      const Complex q = sigma_direct(a, z, params.d, params.gamma);
      CHECK(std::abs(q - se.sigma(0, a)) < 1e-9);
    }
    // Schwarz reflection
    SelfEnergyMatrix sec = self_energy(std::conj(z), params, Sheet::First);
    CHECK((sec.sigma - se.sigma.conjugate()).norm() < 1e-12);
  }
}

TEST_CASE("sheet relations") {
  EmitterArrayParams params(4, 1.2, 5.0, 0.02);
  const Complex I(0.0, 1.0);
  for (const Complex z :
       {Complex(1.25, 0.004), Complex(1.25, -0.004), Complex(1.6, -0.1)}) {
    SelfEnergyMatrix s1 = self_energy(z, params, Sheet::First);
    SelfEnergyMatrix s2 = self_energy(z, params, Sheet::Second);
    SelfEnergyMatrix s3 = self_energy(z, params, Sheet::Third);
    // II and III straddle the first sheet: II - III equals the cut
    // discontinuity, and I coincides with II above the cut, III below.
    const Complex sq = sqrt_cut(z);
    const Complex th = theta_phase(z, params.d);
    Eigen::MatrixXcd disc(params.n, params.n);
    for (int j = 0; j < params.n; ++j)
      for (int l = 0; l < params.n; ++l)
        disc(j, l) =
            2.0 * I * params.gamma / sq * std::cos(double(std::abs(j - l)) * th);
    CHECK((s2.sigma - s3.sigma - disc).norm() < 1e-10 * disc.norm());
    if (z.imag() >= 0.0) {
      CHECK((s1.sigma - s2.sigma).norm() == 0.0);
    } else {
      CHECK((s1.sigma - s3.sigma).norm() == 0.0);
    }
  }
}

TEST_CASE("sheet II continues the first sheet through the cut") {
  EmitterArrayParams params(3, 1.2, 7.0, 0.01);
  const double E = 1.3;
  SelfEnergyMatrix above =
      self_energy(Complex(E, 1e-9), params, Sheet::First);
  SelfEnergyMatrix below_II =
      self_energy(Complex(E, -1e-9), params, Sheet::Second);
  CHECK((above.sigma - below_II.sigma).norm() < 1e-7);
}

TEST_CASE("self-energy is Toeplitz symmetric") {
  EmitterArrayParams params(5, 1.4, 3.0, 0.03);
  SelfEnergyMatrix se = self_energy(Complex(1.7, -0.02), params, Sheet::Second);
  for (int j = 0; j < 5; ++j)
    for (int l = 0; l < 5; ++l) {
      CHECK(std::abs(se.sigma(j, l) - se.sigma(l, j)) < 1e-15);
      if (j + 1 < 5 && l + 1 < 5)
        CHECK(std::abs(se.sigma(j, l) - se.sigma(j + 1, l + 1)) < 1e-15);
    }
}
