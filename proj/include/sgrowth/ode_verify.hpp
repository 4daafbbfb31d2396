#pragma once

// Numerical checks that the closed-form curves solve the growth laws they
// are derived from: RK4 integration of the rate equations and residuals of
// the capital balance and the decay of inverse GDP.

#include <utility>

#include "sgrowth/core_types.hpp"

namespace sgrowth {

struct ResidualReport {
  double max_abs_residual = 0.0;
  double max_rel_residual = 0.0;
  std::pair<double, double> t_range{0.0, 0.0};
  int n_samples = 0;
  /// Largest relative mismatch of k' + k/G = mu_bar y + mu' G y (finite
  /// differences). Only filled by capital_balance_residual.
  double max_rel_support_identity = 0.0;
};

/// Integrates a' = a (1 - a/a_bar)/E with fixed-step RK4 from t_start to
/// t_end and samples the trajectory at every integer year in that range.
AnnualSeries integrate_evolution(double a_start, double t_start, double t_end, double step,
                                 const ModelConstants& c);

/// Integrates the coupled rate equations
///   a' = a (1 - a/a_bar)/E
///   y' = y [beta (1 - y/a) + (a'/a)(y/a)]
/// with a(t_start) from the evolution curve, sampled at integer years.
AnnualSeries integrate_national(double y_start, double t_start, double t_end, double step,
                                const RecoveryCurve& r, const ModelConstants& c);

/// Which exponential terms the GDP and capital curves keep.
enum class CurveTerms { Both, EvolutionOnly, RecoveryOnly };

/// Residual |mu (1 + G y'/y) - mu_bar| / mu_bar of the capital curve, with
/// mu = k/(G y), on a uniform grid of n_samples points. Derivatives of y are
/// analytic; the support identity is checked by central differences.
ResidualReport capital_balance_residual(const NationParams& n,
                                        std::pair<double, double> t_range, int n_samples,
                                        const ModelConstants& c,
                                        CurveTerms terms = CurveTerms::Both);

/// Checks that D(t) = 1/y - 1/a decays as D' = -beta D. The decay rate is
/// measured as the log-slope of D over +-0.5 yr; residuals are |rate - beta|
/// (absolute) and |rate - beta|/beta (relative).
ResidualReport incapacity_decay_residual(const RecoveryCurve& r,
                                         std::pair<double, double> t_range, int n_samples);

}  // namespace sgrowth
