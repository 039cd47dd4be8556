#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "gfsim/jump_measure.hpp"

namespace gfsim {

struct LevyTriplet {
  double drift_b = 0.0;
  double gaussian_sigma2 = 0.0;
  JumpMeasureSpec jumps;

  LevyTriplet() : jumps(zero_measure()) {}
  /// Validates sigma2 >= 0 and the integrability of min(1, y^2) near 0 and of
  /// e^y on (1, inf) when the measure is compensated by 1 - e^y.
  LevyTriplet(double b, double sigma2, JumpMeasureSpec j);
};

struct GFParams {
  double alpha = 0.0;
  LevyTriplet triplet;
  double omega_minus = 0.0;
  double omega_plus = 0.0;
  double rho = 0.0;
};

/// Parameters of the stable-maps family, theta in (1, 3/2].
struct StableFamily {
  double theta;

  explicit StableFamily(double theta);
  double alpha() const { return 1.0 - theta; }
  double omega_minus() const { return theta + 0.5; }
  double omega_plus() const { return theta + 1.5; }
  double rho() const { return theta; }
  double kappa(double q) const;
  /// Canonical triplet with drift calibrated so that κ(ω₋) = 0.
  LevyTriplet triplet() const;
  GFParams params() const;
};

struct LogBoundExponents {
  double q_star = 0.0;
  double q0 = 0.0;
  double upper_exponent = 1.0;  // upper envelope holds with |log t|^{upper_exponent + δ}, δ > 0
};

/// ψ(q) = b q + σ² q²/2 + ∫ (e^{qy} - 1 + q h(y)) Λ(dy).
double psi_eval(const LevyTriplet& t, double q, double cutoff = 0.0);
/// ψ′(0) = b + ∫ (y + h(y)) Λ(dy), the mean of ξ(1).
double psi_mean(const LevyTriplet& t);
/// κ(q) = ψ(q) + ∫_{y<0} (1 - e^y)^q Λ(dy).
double kappa_eval(const LevyTriplet& t, double q, double cutoff = 0.0);
/// ∫_{y<0} (1 - e^y)^q Λ(dy), optionally restricted to |y| < below or |y| >= above.
double child_moment(const JumpMeasureSpec& m, double q, double above = 0.0,
                    double below = std::numeric_limits<double>::infinity());

double kappa_theta_closed(double theta, double q);
double kappa_theta_derivative(double theta, double q);

struct CramerRoots {
  std::optional<double> omega_minus;  // empty when the lower root lies outside the bracket
  std::optional<double> omega_plus;
  double minimizer = 0.0;
};

/// Roots of a convex function with a negative minimum inside [lo, hi].
CramerRoots find_roots(const std::function<double(double)>& kappa, std::pair<double, double> bracket,
                       double tol = 1e-12);

double calibrate_drift(const JumpMeasureSpec& jumps, double sigma2, double omega_minus);

/// Validates the Cramér and regular-variation constraints; throws DomainError.
void validate(const GFParams& p, double tol_root = 1e-6);

/// sup{p >= 0 : κ(q + p) < inf}, from the declared exponential decay of the
/// positive side (infinite when there are no positive jumps).
double kappa_domain_sup(const LevyTriplet& t, double q);

/// Bracket [lo, hi] for the exponential decay rate of the positive-side
/// density, found by probing the log-density slope far out in the tail.
std::pair<double, double> numeric_decay_bracket(const JumpMeasureSpec& m);

LogBoundExponents log_bound_exponents(const GFParams& p);
LogBoundExponents log_bound_exponents(const StableFamily& f);

/// κ(ω₊ + ω₋ + α) < inf, the hypothesis of the upper envelope.
bool upper_envelope_hypothesis(const GFParams& p);

}  // namespace gfsim
