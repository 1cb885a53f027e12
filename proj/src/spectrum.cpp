#include "bic/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bic/quadrature.hpp"

namespace bic {

double resonant_energy(int nu, double d) {
  if (nu < 1) throw DomainError("nu = 0 is the band edge, not a bound state");
  if (d <= 0) throw DomainError("spacing must be positive");
  const double r = nu * M_PI / d;
  return std::sqrt(1.0 + r * r);
}

double epsilon_constraint(int nu, double d, double gamma) {
  if (gamma < 0) throw DomainError("gamma must be >= 0");
  const double E = resonant_energy(nu, d);
  const double arg = E - nu * M_PI / d;
  if (arg <= 0) throw DomainError("log argument must be positive");
  return E + gamma * d / (nu * M_PI) * std::log(arg);
}

namespace {

struct SectorScan {
  int n;
  double d;
  Parity sector;
  double quad_tol;

  Eigen::MatrixXcd block_at(double E, Eigen::VectorXcd* bs_out = nullptr) const {
    Eigen::VectorXcd bs(n - 1);
    CutVector cv = cut_vector(n, Complex(E, 0.0), d, quad_tol);
    for (int j = 0; j < n - 1; ++j) bs[j] = cv.values[j];
    if (bs_out) *bs_out = bs;
    const Complex th = theta_phase(Complex(E, 0.0), d);
    ModelMatrix A0 = build_A(th, Complex(0.0, 0.0), bs, n);
    auto blocks = block_decompose(A0);
    return (sector == Parity::Antisymmetric) ? blocks.first.matrix
                                             : blocks.second.matrix;
  }

  /// chi-roots at energy E: eigenvalues of i * B_sector(E).
  Eigen::VectorXcd roots_at(double E) const {
    const Eigen::MatrixXcd B = block_at(E);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Complex(0.0, 1.0) * B,
                                                   false);
    return es.eigenvalues();
  }

  /// Root closest to `guess` at energy E.
  Complex follow(double E, Complex guess) const {
    Eigen::VectorXcd r = roots_at(E);
    int best = 0;
    for (int i = 1; i < r.size(); ++i)
      if (std::abs(r[i] - guess) < std::abs(r[best] - guess)) best = i;
    return r[best];
  }
};

/// Greedy proximity matching of eigenvalue branches between grid nodes.
Eigen::VectorXcd match_branches(const Eigen::VectorXcd& prev,
                                Eigen::VectorXcd roots) {
  const int m = int(prev.size());
  Eigen::VectorXcd out(m);
  std::vector<bool> used(m, false);
  for (int i = 0; i < m; ++i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      const double dd = std::abs(roots[j] - prev[i]);
      if (dd < bd) {
        bd = dd;
        best = j;
      }
    }
    used[best] = true;
    out[i] = roots[best];
  }
  return out;
}

/// Sector with exact resonant persistence at E_nu (Hermitian reformulation):
/// antisymmetric for odd n, parity (-1)^{nu+1} for even n.
Parity hermitian_sector_for(int n, int nu) {
  if (n % 2 == 1) return Parity::Antisymmetric;
  return (nu % 2 == 1) ? Parity::Symmetric : Parity::Antisymmetric;
}

int nearest_nu(double E, double d) {
  const double th = d * std::sqrt(E * E - 1.0);
  int nu = std::max(1, int(std::lround(th / M_PI)));
  double best = std::abs(E - resonant_energy(nu, d));
  for (int cand : {nu - 1, nu + 1}) {
    if (cand < 1) continue;
    const double diff = std::abs(E - resonant_energy(cand, d));
    if (diff < best - 1e-15 ||
        (std::abs(diff - best) <= 1e-15 && cand < nu)) {
      best = diff;
      nu = cand;
    }
  }
  return nu;
}

struct Candidate {
  double E;
  Complex lambda;
  bool exact_resonant = false;
  int nu = 0;
};

/// Successive parabolic refinement of the Im-lambda tangency along a branch.
/// Returns false if the bracket degenerates.
bool refine_tangency(const SectorScan& scan, double Elo, double Emid,
                     double Ehi, Complex lam_guess, Candidate& out) {
  double x0 = Elo, x1 = Emid, x2 = Ehi;
  Complex l1 = scan.follow(x1, lam_guess);
  double f0 = scan.follow(x0, l1).imag();
  double f1 = l1.imag();
  double f2 = scan.follow(x2, l1).imag();
  double xbest = x1, fbest = f1;
  Complex lbest = l1;
  for (int it = 0; it < 40; ++it) {
    // parabola vertex through (x0,f0),(x1,f1),(x2,f2)
    const double d01 = (f1 - f0) / (x1 - x0);
    const double d12 = (f2 - f1) / (x2 - x1);
    const double c2 = (d12 - d01) / (x2 - x0);
    double xv;
    if (c2 <= 0) {  // not convex; fall back to the midpoint
      xv = 0.5 * (x0 + x2);
    } else {
      xv = 0.5 * ((x1 + x0) - d01 / c2);
    }
    if (!(xv > std::min(x0, x2) && xv < std::max(x0, x2))) {
      xv = 0.5 * (x0 + x2);
    }
    Complex lv = scan.follow(xv, lbest);
    const double fv = lv.imag();
    if (fv < fbest) {
      fbest = fv;
      xbest = xv;
      lbest = lv;
    }
    // shrink the triple around the best point
    double pts[4] = {x0, x1, x2, xv};
    double vals[4] = {f0, f1, f2, fv};
    int order[4] = {0, 1, 2, 3};
    std::sort(order, order + 4, [&](int a, int b) { return pts[a] < pts[b]; });
    // locate best among sorted, keep neighbors
    int bi = 0;
    for (int i = 1; i < 4; ++i)
      if (vals[order[i]] < vals[order[bi]]) bi = i;
    const int lo = std::max(0, bi - 1), hi = std::min(3, bi + 1);
    if (hi - lo < 2) {
      // best at an edge: expand slightly toward it is not possible; shrink
      if (bi == 0) {
        x0 = pts[order[0]];
        x1 = 0.5 * (pts[order[0]] + pts[order[1]]);
        x2 = pts[order[1]];
      } else {
        x0 = pts[order[2]];
        x1 = 0.5 * (pts[order[2]] + pts[order[3]]);
        x2 = pts[order[3]];
      }
      l1 = scan.follow(x1, lbest);
      f0 = scan.follow(x0, l1).imag();
      f1 = l1.imag();
      f2 = scan.follow(x2, l1).imag();
    } else {
      x0 = pts[order[lo]];
      x1 = pts[order[bi]];
      x2 = pts[order[hi]];
      f0 = vals[order[lo]];
      f1 = vals[order[bi]];
      f2 = vals[order[hi]];
    }
    if (std::abs(x2 - x0) < 1e-12 * (1.0 + std::abs(x1))) break;
  }
  out.E = xbest;
  out.lambda = scan.follow(xbest, lbest);
  return true;
}

}  // namespace

double constraint_residual(const Eigen::VectorXcd& amplitudes, double E,
                           double d) {
  const double th = d * std::sqrt(E * E - 1.0);
  Complex sp = 0.0, sm = 0.0;
  for (int l = 0; l < amplitudes.size(); ++l) {
    const Complex ph(std::cos(l * th), std::sin(l * th));
    sp += amplitudes[l] * ph;
    sm += amplitudes[l] * std::conj(ph);
  }
  return std::max(std::abs(sp), std::abs(sm));
}

double field_norm(const Eigen::VectorXcd& amplitudes, double E,
                  const EmitterArrayParams& params, SolveMode mode,
                  double abs_tol) {
  const int n = params.n;
  const double d = params.d;
  const bool with_eta = (mode == SolveMode::Full);
  const double pad = with_eta ? 19.0 : 0.0;
  const double s = std::sqrt(E * E - 1.0);

  auto xi = [&](double x) -> Complex {
    Complex v = 0.0;
    for (int l = 0; l < n; ++l)
      v += amplitudes[l] * xi1(x - l * d, E, params.gamma, with_eta, 1e-12);
    return v;
  };
  auto f = [&](double x) -> double { return std::norm(xi(x)); };

  std::vector<double> pts;
  pts.push_back(-pad);
  for (int l = 0; l < n; ++l) pts.push_back(l * d);
  pts.push_back((n - 1) * d + pad);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // subdivide long spans to the oscillation half-wavelength
  std::vector<double> grid;
  const double half_wave = M_PI / std::max(s, 1e-6);
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = pts[i + 1] - pts[i];
    const int pieces = std::max(1, int(std::ceil(len / half_wave)));
    for (int k = 0; k < pieces; ++k)
      grid.push_back(pts[i] + len * k / pieces);
  }
  grid.push_back(pts.back());

  QuadOptions opt;
  opt.abs_tol = abs_tol;
  opt.max_panels = 20000;
  return integrate_adaptive_pts<double>(f, grid, opt);
}

FieldSample field_wavefunction(const BoundStateInContinuum& state,
                               const EmitterArrayParams& params,
                               const Eigen::VectorXd& grid) {
  FieldSample out;
  out.grid = grid;
  out.mode = state.mode;
  out.values.resize(grid.size());
  const bool with_eta = (state.mode == SolveMode::Full);
  for (int i = 0; i < grid.size(); ++i) {
    Complex v = 0.0;
    for (int l = 0; l < params.n; ++l)
      v += state.amplitudes[l] *
           xi1(grid[i] - l * params.d, state.E, params.gamma, with_eta, 1e-12);
    out.values[i] = v;
  }
  return out;
}

double atomic_probability(const BoundStateInContinuum& state) {
  return state.amplitudes.squaredNorm();
}

namespace {

BoundStateInContinuum make_state(const EmitterArrayParams& params,
                                 Parity sector, double E, double chi,
                                 const Eigen::VectorXcd& unit_amps,
                                 double sigma_min, SolveMode mode) {
  BoundStateInContinuum st;
  st.E = E;
  st.chi = chi;
  st.sector = sector;
  st.mode = mode;
  st.nu_nearest = nearest_nu(E, params.d);
  st.epsilon = chi_to_epsilon(chi, E, params.gamma);
  st.sigma_min = sigma_min;
  // residual relative to ||a||, measured before rescaling
  st.constraint_residual =
      constraint_residual(unit_amps, E, params.d) / unit_amps.norm();
  const double fn = field_norm(unit_amps, E, params, mode) /
                    unit_amps.squaredNorm();
  const double scale = 1.0 / (std::sqrt(1.0 + fn) * unit_amps.norm());
  st.amplitudes = unit_amps * scale;
  st.p = st.amplitudes.squaredNorm();
  return st;
}

std::vector<BoundStateInContinuum> large_spacing_states(
    const EmitterArrayParams& params, Parity sector, const SolveOptions& opt) {
  std::vector<BoundStateInContinuum> states;
  const int n = params.n;
  const int nu_min =
      std::max(1, int(std::ceil(params.d * std::sqrt(opt.emin * opt.emin - 1.0) /
                                M_PI)));
  const int nu_max =
      int(std::floor(params.d * std::sqrt(opt.emax * opt.emax - 1.0) / M_PI));
  for (int nu = nu_min; nu <= nu_max; ++nu) {
    const double E = resonant_energy(nu, params.d);
    if (E < opt.emin || E > opt.emax) continue;
    const double eps = epsilon_constraint(nu, params.d, params.gamma);
    // constraint vector c_j = (-1)^{(j-1) nu}; eigenspace = its orthogonal
    // complement, returned as a parity-adapted orthonormal basis.
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c[j] = (j * nu) % 2 == 0 ? 1.0 : -1.0;
    c.normalize();
    // parity of c under j -> n+1-j
    auto reflect = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd r(n);
      for (int j = 0; j < n; ++j) r[j] = v[n - 1 - j];
      return r;
    };
    const double c_parity = (reflect(c) - c).norm() < 1e-12 ? 1.0 : -1.0;
    // build parity-definite orthonormal bases of each sector, then project
    // out c from its own sector
    std::vector<std::pair<Eigen::VectorXd, Parity>> basis;
    const Eigen::MatrixXd U = parity_transform(n);
    const int hm = n / 2;
    for (int r = 0; r < n; ++r) {
      Eigen::VectorXd v = U.row(r).transpose();
      Parity par = (r < hm) ? Parity::Antisymmetric : Parity::Symmetric;
      basis.push_back({v, par});
    }
    std::vector<std::pair<Eigen::VectorXd, Parity>> kept;
    Parity c_sector = c_parity > 0 ? Parity::Symmetric : Parity::Antisymmetric;
    // Gram-Schmidt the c-sector against c
    for (auto& [v, par] : basis) {
      if (par != c_sector) {
        kept.push_back({v, par});
        continue;
      }
      Eigen::VectorXd w = v - c * (c.dot(v));
      for (auto& [kv, kp] : kept)
        if (kp == c_sector) w -= kv * (kv.dot(w));
      const double nn = w.norm();
      if (nn > 1e-9) kept.push_back({w / nn, par});
    }
    for (auto& [v, par] : kept) {
      if (sector != Parity::Indefinite && par != sector) continue;
      BoundStateInContinuum st = make_state(
          params, par, E, 0.0, v.cast<Complex>(), 0.0, SolveMode::LargeSpacing);
      st.nu_nearest = nu;
      st.epsilon = eps;
      states.push_back(st);
    }
  }
  return states;
}

}  // namespace

SolveReport solve_bic(const EmitterArrayParams& params, Parity sector,
                      const SolveOptions& opt) {
  params.validate();
  if (params.n < 2)
    throw std::invalid_argument("solve_bic requires n >= 2 emitters");
  if (params.gamma <= 0)
    throw std::invalid_argument("solve_bic requires gamma > 0");
  if (opt.emin <= 1.0)
    throw DomainError("E-window must lie inside the continuum (emin > 1)");
  if (opt.emax <= opt.emin) throw DomainError("empty E-window");

  SolveReport report;
  if (opt.mode == SolveMode::LargeSpacing) {
    report.states = large_spacing_states(params, sector, opt);
    std::sort(report.states.begin(), report.states.end(),
              [](auto& a, auto& b) { return a.E < b.E; });
    return report;
  }
  if (sector == Parity::Indefinite) {
    return solve_bic_all(params, opt);
  }

  const int n = params.n;
  const double d = params.d;
  SectorScan scan{n, d, sector, opt.quad_tol};
  const int m = (sector == Parity::Antisymmetric) ? n / 2 : n - n / 2;

  const double th_lo = d * std::sqrt(opt.emin * opt.emin - 1.0);
  const double th_hi = d * std::sqrt(opt.emax * opt.emax - 1.0);
  const int G = std::max(8, opt.grid_points);

  std::vector<double> Es(G);
  std::vector<Eigen::VectorXcd> lam(G);
  for (int g = 0; g < G; ++g) {
    const double th = th_lo + (th_hi - th_lo) * g / (G - 1);
    Es[g] = std::sqrt(1.0 + th * th / (d * d));
    Eigen::VectorXcd r = scan.roots_at(Es[g]);
    lam[g] = (g == 0) ? r : match_branches(lam[g - 1], r);
  }

  std::vector<Candidate> cands;
  for (int k = 0; k < m; ++k) {
    for (int g = 1; g + 1 < G; ++g) {
      const double im0 = lam[g - 1][k].imag();
      const double im1 = lam[g][k].imag();
      const double im2 = lam[g + 1][k].imag();
      if (im1 <= im0 && im1 <= im2 && im1 < 0.05 * (1.0 + std::abs(lam[g][k]))) {
        Candidate c;
        if (!refine_tangency(scan, Es[g - 1], Es[g], Es[g + 1], lam[g][k], c))
          continue;
        cands.push_back(c);
      }
    }
  }

  // resonance seeds: exact persistence at E_nu holds in the Hermitian
  // sector only; the complementary sector's near-resonant states are shifted
  // and must go through the tangency path.
  {
    const int nu_lo = std::max(1, int(std::ceil(th_lo / M_PI)));
    const int nu_hi = int(std::floor(th_hi / M_PI));
    for (int nu = nu_lo; nu <= nu_hi; ++nu) {
      if (hermitian_sector_for(n, nu) != sector) continue;
      const double E = resonant_energy(nu, d);
      if (E <= opt.emin || E >= opt.emax) continue;
      Eigen::VectorXcd r = scan.roots_at(E);
      for (int k = 0; k < r.size(); ++k) {
        if (std::abs(r[k].imag()) <= opt.accept_im_tol * (1.0 + std::abs(r[k]))) {
          Candidate c;
          c.E = E;
          c.lambda = r[k];
          c.exact_resonant = true;
          c.nu = nu;
          cands.push_back(c);
        }
      }
    }
  }

  // snap near-resonant refined minima onto the exact resonance (Hermitian
  // sector only)
  for (auto& c : cands) {
    if (c.exact_resonant) continue;
    const int nu = nearest_nu(c.E, d);
    if (hermitian_sector_for(n, nu) != sector) continue;
    const double Enu = resonant_energy(nu, d);
    if (std::abs(c.E - Enu) < 1e-6 * Enu && Enu > opt.emin && Enu < opt.emax) {
      const Complex r = scan.follow(Enu, c.lambda);
      if (std::abs(r.imag()) <= opt.accept_im_tol * (1.0 + std::abs(r)) &&
          std::abs(r - c.lambda) < 0.3 * (1.0 + std::abs(r))) {
        c.E = Enu;
        c.lambda = r;
        c.exact_resonant = true;
        c.nu = nu;
      }
    }
  }

  // constraint-based polish for non-resonant tangencies
  for (auto& c : cands) {
    if (c.exact_resonant) continue;
    if (std::abs(c.lambda.imag()) > 64 * opt.accept_im_tol * (1.0 + std::abs(c.lambda)))
      continue;  // plainly not a state; skip the expensive polish
    auto q_of = [&](double E, Complex guess) -> std::pair<double, Complex> {
      const Complex lamE = scan.follow(E, guess);
      Eigen::VectorXcd bs;
      const Eigen::MatrixXcd B = scan.block_at(E, &bs);
      // unit-norm kernel vector at (E, Re lambda)
      Eigen::MatrixXcd A =
          Complex(0.0, 1.0) * Complex(lamE.real(), 0.0) *
              Eigen::MatrixXcd::Identity(B.rows(), B.cols()) +
          B;
      NullVector nv = null_vector(A);
      Eigen::VectorXcd a = embed_to_local(nv.vector, scan.sector, n);
      const double r = constraint_residual(a, E, d);
      return {r * r, lamE};
    };
    double h = std::max(1e-7, 1e-7 * c.E);
    double x1 = c.E;
    Complex lref = c.lambda;
    for (int round = 0; round < 3; ++round) {
      auto [q0, l0] = q_of(x1 - h, lref);
      auto [q1, l1] = q_of(x1, lref);
      auto [q2, l2] = q_of(x1 + h, lref);
      const double denom = q0 - 2 * q1 + q2;
      if (denom <= 0) break;
      const double step = 0.5 * h * (q0 - q2) / denom;
      if (std::abs(step) > 4 * h) break;
      x1 += step;
      lref = l1;
      h *= 0.25;
    }
    const Complex lam_fin = scan.follow(x1, lref);
    if (std::abs(lam_fin.imag()) <= std::abs(c.lambda.imag()) * 4 + 1e-14) {
      c.E = x1;
      c.lambda = lam_fin;
    }
  }

  // dedupe
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.E < b.E; });
  std::vector<Candidate> uniq;
  for (auto& c : cands) {
    bool dup = false;
    for (auto& u : uniq) {
      if (std::abs(c.E - u.E) < 1e-7 * (1.0 + std::abs(u.E)) &&
          std::abs(c.lambda - u.lambda) < 1e-5 * (1.0 + std::abs(u.lambda))) {
        dup = true;
        if (c.exact_resonant && !u.exact_resonant) u = c;
        break;
      }
    }
    if (!dup) uniq.push_back(c);
  }

  for (auto& c : uniq) {
    const double imacc = opt.accept_im_tol * (1.0 + std::abs(c.lambda));
    if (std::abs(c.lambda.imag()) > imacc) continue;  // resonance width, not a state
    const double E = c.E;
    const double chi = c.lambda.real();
    Eigen::VectorXcd bs;
    const Eigen::MatrixXcd B = scan.block_at(E, &bs);
    Eigen::MatrixXcd A = Complex(0.0, chi) *
                             Eigen::MatrixXcd::Identity(B.rows(), B.cols()) +
                         B;
    NullVector nv = null_vector(A);
    if (nv.sigma_min > opt.sigma_rel_tol * std::max(nv.sigma_max, 1e-30)) {
      report.unresolved.push_back(
          {E, sector, "sigma_min above singularity threshold at claimed root"});
      continue;
    }
    Eigen::VectorXcd a = embed_to_local(nv.vector, sector, n);
    BoundStateInContinuum st =
        make_state(params, sector, E, chi, a, nv.sigma_min, SolveMode::Full);
    if (c.exact_resonant) st.nu_nearest = c.nu;
    if (st.constraint_residual > opt.constraint_tol) {
      report.unresolved.push_back(
          {E, sector, "normalizability constraint residual above tolerance"});
      continue;
    }
    report.states.push_back(st);
  }
  std::sort(report.states.begin(), report.states.end(),
            [](auto& a, auto& b) { return a.E < b.E; });
  return report;
}

SolveReport solve_bic_all(const EmitterArrayParams& params,
                          const SolveOptions& opt) {
  if (opt.mode == SolveMode::LargeSpacing) {
    SolveReport report;
    report.states = large_spacing_states(params, Parity::Indefinite, opt);
    std::sort(report.states.begin(), report.states.end(),
              [](auto& a, auto& b) { return a.E < b.E; });
    return report;
  }
  SolveReport all;
  for (Parity s : {Parity::Antisymmetric, Parity::Symmetric}) {
    SolveReport r = solve_bic(params, s, opt);
    all.states.insert(all.states.end(), r.states.begin(), r.states.end());
    all.unresolved.insert(all.unresolved.end(), r.unresolved.begin(),
                          r.unresolved.end());
  }
  std::sort(all.states.begin(), all.states.end(),
            [](auto& a, auto& b) { return a.E < b.E; });
  return all;
}

ExactResonantResult exact_resonant_epsilons(int n, int nu, double d,
                                            double gamma) {
  if (n < 2) throw std::invalid_argument("n >= 2 required");
  if (nu < 1) throw DomainError("nu >= 1 required");
  ExactResonantResult out;
  out.nu = nu;
  out.E = resonant_energy(nu, d);
  const double E = out.E;

  // the sector with A_n^{+-}(nu pi, 0, 0) = 0: antisymmetric for odd n,
  // parity (-1)^{nu+1} for even n
  const bool odd_n = (n % 2 == 1);
  if (odd_n) {
    out.hermitian_sector = Parity::Antisymmetric;
  } else {
    out.hermitian_sector =
        (nu % 2 == 1) ? Parity::Symmetric : Parity::Antisymmetric;
  }

  CutVector cv = cut_vector(n, Complex(E, 0.0), d, 1e-13);
  auto b = [&](int j) -> double { return cv.values[j - 1].real(); };

  const int h = n / 2;
  // Toeplitz part with zero diagonal: [A0]_{jl} = b_{|j-l|}
  Eigen::MatrixXd A0 = Eigen::MatrixXd::Zero(h, h);
  for (int j = 0; j < h; ++j)
    for (int l = 0; l < h; ++l)
      if (j != l) A0(j, l) = b(std::abs(j - l));
  // Hankel part: [Bqp]_{jl} = beta_{q - j - l} (0-based j,l)
  const int q = odd_n ? 2 * h : 2 * h - 1;
  Eigen::MatrixXd Bq(h, h);
  for (int j = 0; j < h; ++j)
    for (int l = 0; l < h; ++l) Bq(j, l) = b(q - j - l);

  Eigen::MatrixXd K;
  if (odd_n || nu % 2 == 0) {
    K = Bq - A0;  // good sector is antisymmetric: -iA^- = (chi I + A0) - Bq
  } else {
    K = -A0 - Bq;  // good sector symmetric, even n, odd nu
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);

  EmitterArrayParams params(n, 1.0, d, gamma);
  const Complex th(nu * M_PI, 0.0);
  Eigen::VectorXcd bs(n - 1);
  for (int j = 1; j < n; ++j) bs[j - 1] = b(j);

  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double chi = es.eigenvalues()[k];
    ModelMatrix A = build_A(th, Complex(chi, 0.0), bs, n);
    auto blocks = block_decompose(A);
    const Eigen::MatrixXcd& blk = (out.hermitian_sector == Parity::Antisymmetric)
                                      ? blocks.first.matrix
                                      : blocks.second.matrix;
    NullVector nv = null_vector(blk);
    Eigen::VectorXcd a = embed_to_local(nv.vector, out.hermitian_sector, n);
    ExactResonantState st;
    st.chi = chi;
    st.epsilon = chi_to_epsilon(chi, E, gamma);
    const double fn = field_norm(a, E, params, SolveMode::Full);
    st.amplitudes = a / std::sqrt(1.0 + fn);
    st.p = st.amplitudes.squaredNorm();
    out.states.push_back(st);
  }
  std::sort(out.states.begin(), out.states.end(),
            [](auto& a, auto& b) { return a.epsilon < b.epsilon; });

  // complementary sector: chi-roots of the non-Hermitian block
  {
    ModelMatrix A0c = build_A(th, Complex(0.0, 0.0), bs, n);
    auto blocks = block_decompose(A0c);
    const Eigen::MatrixXcd& blk = (out.hermitian_sector == Parity::Antisymmetric)
                                      ? blocks.second.matrix
                                      : blocks.first.matrix;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(Complex(0.0, 1.0) * blk,
                                                    false);
    for (int k = 0; k < ces.eigenvalues().size(); ++k)
      out.complementary_chis.push_back(ces.eigenvalues()[k]);
  }
  return out;
}

StateClass state_class_from_string(const std::string& label) {
  if (label == "sym3" || label == "sym") return StateClass::Sym3;
  if (label == "anti3" || label == "anti") return StateClass::Anti3;
  if (label == "golden-sym-plus") return StateClass::GoldenSymPlus;
  if (label == "golden-sym-minus") return StateClass::GoldenSymMinus;
  if (label == "golden-anti-plus") return StateClass::GoldenAntiPlus;
  if (label == "golden-anti-minus") return StateClass::GoldenAntiMinus;
  if (label == "persistent") return StateClass::Persistent4;
  if (label == "numeric") return StateClass::Numeric4;
  throw std::invalid_argument("unknown state class label: " + label);
}

const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::Sym3: return "sym3";
    case StateClass::Anti3: return "anti3";
    case StateClass::GoldenSymPlus: return "golden-sym-plus";
    case StateClass::GoldenSymMinus: return "golden-sym-minus";
    case StateClass::GoldenAntiPlus: return "golden-anti-plus";
    case StateClass::GoldenAntiMinus: return "golden-anti-minus";
    case StateClass::Persistent4: return "persistent";
    default: return "numeric";
  }
}

double probability_approximant(StateClass c, int nu, double d, double gamma) {
  const double E = resonant_energy(nu, d);
  const double gdE = gamma * d * E / (E * E - 1.0);
  const double edge = gamma / (M_PI * (E + 1.0));
  const double s5 = std::sqrt(5.0);
  switch (c) {
    case StateClass::Sym3:
      return 1.0 / (1.0 + 2.0 * gdE / 3.0 + edge);
    case StateClass::Anti3:
      return 1.0 / (1.0 + 2.0 * gdE + 2.0 * edge);
    case StateClass::GoldenAntiPlus:
      return 1.0 / (1.0 + (9.0 + s5) / (5.0 + s5) * gdE + edge);
    case StateClass::GoldenAntiMinus:
      return 1.0 / (1.0 + (9.0 - s5) / (5.0 - s5) * gdE + edge);
    case StateClass::GoldenSymPlus:
      return 1.0 / (1.0 + (13.0 + s5) / (5.0 + s5) * gdE + edge);
    case StateClass::GoldenSymMinus:
      return 1.0 / (1.0 + (13.0 - s5) / (5.0 - s5) * gdE + edge);
    case StateClass::Persistent4:
      return 1.0 / (1.0 + gdE + edge);
    case StateClass::Numeric4:
      return 1.0 / (1.0 + 0.6 * gdE + edge);
  }
  throw std::invalid_argument("unknown state class");
}

SpectralLines spectral_lines(int n, double gamma, double dmin, double dmax,
                             int d_points, double emax,
                             const SolveOptions& base_opt) {
  if (dmin <= 0 || dmax <= dmin) throw DomainError("invalid d-range");
  SpectralLines out;
  struct Branch {
    Parity sector;
    int nu;
    int id;
    double last_E;
    bool seen;
  };
  std::vector<Branch> branches;
  int next_id = 0;

  for (int i = 0; i < d_points; ++i) {
    const double d = dmin + (dmax - dmin) * i / std::max(1, d_points - 1);
    EmitterArrayParams params(n, 1.0, d, gamma);
    SolveOptions opt = base_opt;
    opt.emax = emax;
    SolveReport rep = solve_bic_all(params, opt);
    if (rep.states.empty() && i > 0 && !branches.empty()) {
      // branch loss: rescan once at doubled resolution
      opt.grid_points = 2 * std::max(base_opt.grid_points, 200);
      rep = solve_bic_all(params, opt);
    }
    for (auto& b : branches) b.seen = false;
    for (auto& st : rep.states) {
      Branch* best = nullptr;
      double bd = std::numeric_limits<double>::infinity();
      for (auto& b : branches) {
        if (b.sector != st.sector || b.nu != st.nu_nearest || b.seen) continue;
        const double dd = std::abs(b.last_E - st.E);
        if (dd < bd) {
          bd = dd;
          best = &b;
        }
      }
      const double match_tol = 0.25 * std::max(0.02, st.E - 1.0);
      int id;
      if (best && bd < match_tol) {
        best->last_E = st.E;
        best->seen = true;
        id = best->id;
      } else {
        branches.push_back({st.sector, st.nu_nearest, next_id, st.E, true});
        id = next_id++;
      }
      out.points.push_back({d, st.E, st.sector, st.nu_nearest, id});
    }
    for (auto& b : branches)
      if (!b.seen) out.gaps.push_back({d, b.id});
    branches.erase(std::remove_if(branches.begin(), branches.end(),
                                  [](const Branch& b) { return !b.seen; }),
                   branches.end());
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const SpectralPoint& a, const SpectralPoint& b) {
              if (a.sector != b.sector) return a.sector < b.sector;
              if (a.nu != b.nu) return a.nu < b.nu;
              if (a.branch != b.branch) return a.branch < b.branch;
              return a.d < b.d;
            });
  return out;
}

}  // namespace bic
