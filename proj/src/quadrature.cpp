#include "pacekit/quadrature.hpp"

#include <cmath>
#include <string>

#include "pacekit/errors.hpp"

namespace pacekit {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;

  double recurse(double a, double b, double fa, double fm, double fb, double whole,
                 double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth) {
      fail(ErrorCode::quadrature_non_convergence,
           "adaptive Simpson did not reach tolerance on [" + std::to_string(a) + ", " +
               std::to_string(b) + "]");
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& config) {
  require(std::isfinite(a) && std::isfinite(b), ErrorCode::invalid_argument,
          "integration limits must be finite");
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, config);

  // Seed with four panels so that integrands vanishing at the three classic
  // Simpson nodes are not mistaken for zero.
  const Simpson rule{f, config.max_depth};
  const int panels = 4;
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == panels) ? b : lo + width;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += rule.recurse(lo, hi, flo, fmid, fhi, whole, config.abs_tol / panels, 0);
  }
  return total;
}

}  // namespace pacekit
