#include "gfsim/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gfsim/error.hpp"

namespace gfsim {

namespace bq = boost::math::quadrature;

namespace {

void check(const QuadResult& r, QuadTolerance tol, const char* where) {
  if (!std::isfinite(r.value)) throw QuadratureError(std::string(where) + ": non-finite integral", r.error);
  // Estimates from both rules are conservative; allow a generous factor before failing.
  double allowed = 1e3 * std::max(tol.abs, tol.rel * std::abs(r.value));
  if (r.error > allowed) throw QuadratureError(std::string(where) + ": no convergence", r.error);
}

bq::tanh_sinh<double>& ts_integrator() {
  thread_local bq::tanh_sinh<double> ts(15);
  return ts;
}

}  // namespace

QuadResult integrate_singular_at_zero(const RealFn& f, double b, QuadTolerance tol) {
  QuadResult r;
  if (!(b > 0.0)) return r;
  double l1 = 0.0;
  std::size_t levels = 0;
  r.value = ts_integrator().integrate(f, 0.0, b, 1e-12, &r.error, &l1, &levels);
  check(r, tol, "tanh-sinh");
  return r;
}

QuadResult integrate_regular(const RealFn& f, double a, double b, QuadTolerance tol) {
  QuadResult r;
  if (!(b > a)) return r;
  r.value = bq::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13, &r.error);
  check(r, tol, "gauss-kronrod");
  return r;
}

QuadResult integrate_log_panels(const RealFn& f, double a, double b, QuadTolerance tol) {
  QuadResult r;
  if (!(b > a)) return r;
  double la = std::log(a), lb = std::log(b);
  int panels = std::max(1, static_cast<int>(std::ceil((lb - la) / std::log(4.0))));
  double h = (lb - la) / panels;
  auto g = [&](double v) {
    double u = std::exp(v);
    return f(u) * u;
  };
  for (int i = 0; i < panels; ++i) {
    double err = 0.0;
    double v0 = la + h * i;
    double v1 = (i + 1 == panels) ? lb : la + h * (i + 1);
    r.value += bq::gauss_kronrod<double, 31>::integrate(g, v0, v1, 10, 1e-13, &err);
    r.error += err;
  }
  check(r, tol, "log-panel gauss-kronrod");
  return r;
}

double decay_truncation(double decay) {
  if (!(decay > 0.0)) throw DivergenceError("no exponential decay at infinity");
  return 1.0 + 42.0 / decay;
}

QuadResult integrate_half_line(const RealFn& f, double upper, double decay,
                               const std::vector<double>& breaks, QuadTolerance tol) {
  double top = std::isfinite(upper) ? upper : decay_truncation(decay);
  std::vector<double> pts;
  for (double b : breaks)
    if (b > 0.0 && b < top) pts.push_back(b);
  double first = std::min(1.0, top);
  pts.push_back(first);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  QuadResult total;
  auto add = [&](QuadResult part) {
    total.value += part.value;
    total.error += part.error;
  };
  add(integrate_singular_at_zero(f, pts.front(), tol));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) add(integrate_log_panels(f, pts[i], pts[i + 1], tol));
  double lo = pts.back();
  if (top > lo) {
    // Exponentially decaying tail: unit panels near lo, widening geometrically.
    double a = lo, w = 1.0;
    while (a < top) {
      double b = std::min(top, a + w);
      add(integrate_regular(f, a, b, tol));
      a = b;
      w *= 2.0;
    }
  }
  return total;
}

double gauss_legendre(const RealFn& f, double a, double b) {
  return bq::gauss<double, 20>::integrate(f, a, b);
}

}  // namespace gfsim
