#include "arnold/quadrature.hpp"

#include <cmath>

namespace arnold {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  // Split into a few panels first so narrow features are not missed.
  constexpr int kPanels = 8;
  double total = 0.0;
  const double h = (b - a) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == kPanels) ? b : a + (i + 1) * h;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo);
    const double fmid = f(mid);
    const double fhi = f(hi);
    total += refine(f, {lo, mid, hi, flo, fmid, fhi, simpson(lo, hi, flo, fmid, fhi)}, tol / kPanels, max_depth);
  }
  return total;
}

}  // namespace arnold
