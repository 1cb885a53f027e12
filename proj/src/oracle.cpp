#include "bic/oracle.hpp"

#include <algorithm>
#include <cmath>

#ifdef BIC_HAVE_LAPACKE
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace bic {

DiscretizedModel build_hamiltonian(const EmitterArrayParams& params, double L,
                                   int M) {
  params.validate();
  if (M < 2 || M % 2 != 0)
    throw ConfigError("mode count M must be even and >= 2");
  if (L <= (params.n - 1) * params.d)
    throw ConfigError("box must be much longer than the array");

  DiscretizedModel model;
  model.L = L;
  model.M = M;
  model.n = params.n;
  model.epsilon = params.epsilon;
  model.d = params.d;
  model.gamma = params.gamma;

  const int nmodes = M + 1;
  const int N = params.n + nmodes;
  model.k_grid.resize(nmodes);
  for (int q = 0; q <= M; ++q)
    model.k_grid[q] = 2.0 * M_PI * (q - M / 2) / L;

  model.H = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 0; j < params.n; ++j) model.H(j, j) = params.epsilon;
  const double mid = 0.5 * (params.n - 1) * params.d;
  for (int q = 0; q < nmodes; ++q) {
    const double k = model.k_grid[q];
    const double w = std::sqrt(k * k + 1.0);
    model.H(params.n + q, params.n + q) = w;
    const double g = std::sqrt(params.gamma / (L * w));
    for (int j = 0; j < params.n; ++j) {
      const double x = j * params.d - mid;  // array centered in the box
      const Complex c = g * Complex(std::cos(k * x), std::sin(k * x));
      model.H(j, params.n + q) = c;
      model.H(params.n + q, j) = std::conj(c);
    }
  }
  return model;
}

namespace {

struct EigPair {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

EigPair window_eig(const DiscretizedModel& model, double emin, double emax) {
  const int N = int(model.H.rows());
#ifdef BIC_HAVE_LAPACKE
  {
    Eigen::MatrixXcd A = model.H;  // zheevr overwrites
    Eigen::VectorXd w(N);
    Eigen::MatrixXcd Z(N, N);
    std::vector<lapack_int> isuppz(2 * std::max(1, N));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'V', 'L', N, A.data(), N, emin, emax, 0, 0,
        2.0 * LAPACKE_dlamch('S'), &found, w.data(), Z.data(), N,
        isuppz.data());
    if (info == 0) {
      EigPair out;
      out.values = w.head(found);
      out.vectors = Z.leftCols(found);
      return out;
    }
    // fall through to the Eigen path on failure
  }
#endif
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(model.H);
  std::vector<int> idx;
  for (int i = 0; i < N; ++i)
    if (es.eigenvalues()[i] >= emin && es.eigenvalues()[i] <= emax)
      idx.push_back(i);
  EigPair out;
  out.values.resize(idx.size());
  out.vectors.resize(N, idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    out.values[i] = es.eigenvalues()[idx[i]];
    out.vectors.col(i) = es.eigenvectors().col(idx[i]);
  }
  return out;
}

/// Field probability inside [lo, hi] (box coordinates) for mode amplitudes
/// xi: integral of |sum_q xi_q e^{i k_q x}/sqrt(L)|^2 via the closed-form
/// pair integrals.
double field_prob_inside(const DiscretizedModel& model,
                         const Eigen::VectorXcd& xi, double lo, double hi) {
  const int nm = int(xi.size());
  double total = 0.0;
  // sum_{q,q'} xi_q conj(xi_q') I(k_q - k_q') / L with
  // I(dk) = int_lo^hi e^{i dk x} dx; k-grid is uniform so I depends on q - q'.
  const double dk0 = 2.0 * M_PI / model.L;
  std::vector<Complex> I(2 * nm - 1);
  for (int s = -(nm - 1); s <= nm - 1; ++s) {
    const double dk = s * dk0;
    if (s == 0) {
      I[s + nm - 1] = hi - lo;
    } else {
      const Complex ehi(std::cos(dk * hi), std::sin(dk * hi));
      const Complex elo(std::cos(dk * lo), std::sin(dk * lo));
      I[s + nm - 1] = (ehi - elo) / Complex(0.0, dk);
    }
  }
  Complex acc = 0.0;
  for (int q = 0; q < nm; ++q) {
    for (int p = 0; p < nm; ++p) {
      acc += xi[q] * std::conj(xi[p]) * I[(q - p) + nm - 1];
    }
  }
  total = acc.real() / model.L;
  return total;
}

std::vector<OracleState> states_impl(const DiscretizedModel& model,
                                     double emin, double emax) {
  EigPair eig = window_eig(model, emin, emax);
  std::vector<OracleState> out;
  const double mid = 0.5 * (model.n - 1) * model.d;
  const double lo = -mid - 2.0;  // array interval padded by 2 units
  const double hi = mid + 2.0;
  for (int i = 0; i < eig.values.size(); ++i) {
    OracleState st;
    st.energy = eig.values[i];
    const Eigen::VectorXcd v = eig.vectors.col(i);
    st.atomic_amplitudes = v.head(model.n);
    st.atomic_weight = st.atomic_amplitudes.squaredNorm();
    const Eigen::VectorXcd xi = v.tail(v.size() - model.n);
    const double field_total = xi.squaredNorm();
    if (field_total > 1e-300) {
      st.confinement =
          field_prob_inside(model, xi, lo, hi) / field_total;
    } else {
      st.confinement = 1.0;
    }
    out.push_back(st);
  }
  std::sort(out.begin(), out.end(), [](const OracleState& a,
                                       const OracleState& b) {
    return a.energy < b.energy;
  });
  return out;
}

}  // namespace

std::vector<OracleState> window_states(const DiscretizedModel& model,
                                       double emin, double emax) {
  return states_impl(model, emin, emax);
}

std::vector<OracleState> find_bic_candidates(const DiscretizedModel& model,
                                             double emin, double emax,
                                             double confinement_threshold) {
  const double kmax = M_PI * model.M / model.L;
  const double kwin = std::sqrt(std::max(0.0, emax * emax - 1.0));
  if (kmax < 5.0 * kwin) {
    throw ConfigError(
        "momentum cutoff pi M / L too low for the requested E-window");
  }
  std::vector<OracleState> all = states_impl(model, emin, emax);
  std::vector<OracleState> out;
  for (auto& st : all)
    if (st.confinement > confinement_threshold) out.push_back(st);
  return out;
}

std::vector<VerifiedCandidate> verified_candidates(
    const EmitterArrayParams& params, double L, int M, double emin,
    double emax, double confinement_threshold, double stability_tol_scale) {
  DiscretizedModel m1 = build_hamiltonian(params, L, M);
  DiscretizedModel m2 = build_hamiltonian(params, 2.0 * L, 2 * M);
  std::vector<OracleState> c1 =
      find_bic_candidates(m1, emin, emax, confinement_threshold);
  std::vector<OracleState> c2 =
      find_bic_candidates(m2, emin, emax, confinement_threshold);
  std::vector<VerifiedCandidate> out;
  const double tol = stability_tol_scale / L;
  for (auto& a : c1) {
    const OracleState* best = nullptr;
    double bd = tol;
    for (auto& b : c2) {
      const double dd = std::abs(a.energy - b.energy);
      if (dd < bd) {
        bd = dd;
        best = &b;
      }
    }
    if (best) {
      VerifiedCandidate vc;
      vc.at_L = a;
      vc.at_2L = *best;
      vc.energy_extrapolated = 2.0 * best->energy - a.energy;
      out.push_back(vc);
    }
  }
  return out;
}

}  // namespace bic
