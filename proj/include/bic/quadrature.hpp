#ifndef BIC_QUADRATURE_HPP
#define BIC_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include "bic/types.hpp"

namespace bic {

/// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
namespace gk15 {
// Kronrod abscissae (positive half; node 0 last).
inline constexpr double xk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// Gauss-7 weights matching xk[1], xk[3], xk[5], xk[7].
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
}  // namespace gk15

template <typename T>
double norm_of(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(static_cast<double>(v));
  } else if constexpr (std::is_same_v<T, Complex>) {
    return std::abs(v);
  } else {
    return v.norm();  // Eigen vectors/matrices
  }
}

/// One GK15 panel; returns the Kronrod-Gauss error estimate.
template <typename F, typename V>
double gk15_panel(F&& f, double a, double b, V& integral) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  V fv[15];
  for (int i = 0; i < 7; ++i) fv[i] = f(c - h * gk15::xk[i]);
  fv[7] = f(c);
  for (int i = 0; i < 7; ++i) fv[8 + i] = f(c + h * gk15::xk[6 - i]);

  V resk = gk15::wk[7] * fv[7];
  V resg = gk15::wg[3] * fv[7];
  for (int i = 0; i < 7; ++i) resk = resk + gk15::wk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i)
    resg = resg + gk15::wg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  integral = h * resk;
  V diff = h * (resk - resg);
  return norm_of(diff);
}

struct QuadOptions {
  double abs_tol = 1e-12;
  int max_panels = 4000;
};

/// Adaptive Gauss-Kronrod over consecutive intervals of `pts` (supply kinks
/// and near-pole locations as breakpoints). Splits the worst panel until the
/// summed error estimate drops below abs_tol; throws AccuracyError carrying
/// the achieved estimate when the panel budget runs out.
template <typename V, typename F>
V integrate_adaptive_pts(F&& f, const std::vector<double>& pts,
                         const QuadOptions& opt = {}) {
  struct Panel {
    double a, b, err;
    V val;
  };
  std::vector<Panel> panels;
  panels.reserve(64);
  double total_err = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    Panel p;
    p.a = pts[i];
    p.b = pts[i + 1];
    p.err = gk15_panel(f, p.a, p.b, p.val);
    total_err += p.err;
    panels.push_back(p);
  }
  for (int iter = 0; iter < opt.max_panels; ++iter) {
    if (total_err <= opt.abs_tol || panels.empty()) break;
    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    const double mid = 0.5 * (panels[worst].a + panels[worst].b);
    if (mid <= panels[worst].a || mid >= panels[worst].b) break;
    Panel left, right;
    left.a = panels[worst].a;
    left.b = mid;
    right.a = mid;
    right.b = panels[worst].b;
    left.err = gk15_panel(f, left.a, left.b, left.val);
    right.err = gk15_panel(f, right.a, right.b, right.val);
    total_err += left.err + right.err - panels[worst].err;
    panels[worst] = left;
    panels.push_back(right);
  }
  if (total_err > opt.abs_tol * 64) {
    throw AccuracyError("adaptive quadrature did not converge", total_err,
                        opt.abs_tol);
  }
  V sum = panels[0].val;
  for (size_t i = 1; i < panels.size(); ++i) sum = sum + panels[i].val;
  return sum;
}

template <typename V, typename F>
V integrate_adaptive(F&& f, double a, double b, const QuadOptions& opt = {}) {
  return integrate_adaptive_pts<V>(f, std::vector<double>{a, b}, opt);
}

}  // namespace bic

#endif
