#pragma once

#include <functional>
#include <vector>

namespace gfsim {

struct QuadTolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

using RealFn = std::function<double(double)>;

/// Integral of f over [0, b] where f may carry an integrable singularity at 0.
QuadResult integrate_singular_at_zero(const RealFn& f, double b, QuadTolerance tol = {});

/// Integral over [a, b] of a function smooth on the closed interval.
QuadResult integrate_regular(const RealFn& f, double a, double b, QuadTolerance tol = {});

/// Integral over [a, b] with 0 < a < b using log-spaced panels; suited to power-like integrands.
QuadResult integrate_log_panels(const RealFn& f, double a, double b, QuadTolerance tol = {});

/// Integral over [0, upper] of a function that may be singular at 0 and decays
/// like exp(-decay * u) at infinity when upper is infinite. `breaks` are split
/// points inside (0, upper).
QuadResult integrate_half_line(const RealFn& f, double upper, double decay,
                               const std::vector<double>& breaks, QuadTolerance tol = {});

/// Truncation point beyond which exp(-decay * u) is below 1e-18 (relative).
double decay_truncation(double decay);

/// Fixed-order Gauss-Legendre rule on [a, b], no error estimate.
double gauss_legendre(const RealFn& f, double a, double b);

}  // namespace gfsim
