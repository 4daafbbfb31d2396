#pragma once

// Parameter estimation from national time series: recovery rates from a
// point on the curve, least-squares S-function fits, and time shifts
// between GDP and capital that fix the evolution and generation constants.

#include <optional>
#include <stdexcept>

#include "sgrowth/core_types.hpp"

namespace sgrowth {

/// Estimation could not proceed: degenerate input, insufficient overlap, no
/// root in the search bracket.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Above this ratio y/a the rate inversion divides by (1 - y/a) < 0.05 and
/// amplifies noise more than 20-fold.
inline constexpr double kMaxConvergenceRatio = 0.95;

/// Recovery rate beta from one point (t, y) with slope ydot, using the
/// evolution a(t) as the envelope.
double beta_from_point(double y, double ydot, double t, const ModelConstants& c);

/// Smoothed value and slope at series index i from a least-squares quadratic
/// through the five points centred on i.
struct LocalSlope {
  double t = 0.0;
  double value = 0.0;
  double slope = 0.0;
};
LocalSlope local_slope(const AnnualSeries& s, std::size_t i);

enum class HalftimeMethod { HalfAmplitude, Inflection };

/// Halftime read off the data. HalfAmplitude: first crossing of
/// floor + amplitude/2 from below, interpolated linearly between the
/// bracketing years. Inflection: year of steepest local slope, refined by a
/// parabola through the neighbouring slopes. nullopt if not found.
std::optional<double> measure_halftime(const AnnualSeries& s, double amplitude, double floor = 0.0,
                                       HalftimeMethod method = HalftimeMethod::HalfAmplitude);

struct SCurveFitOptions {
  /// Fix the growth parameter (e.g. 1/E) instead of estimating it.
  std::optional<double> growth_param;
  double floor = 0.0;
  int max_iterations = 5000;
};

/// Least-squares fit of floor + amplitude/(1 + exp((halftime - t) g)).
/// Params: "amplitude", "halftime", "growth_param".
FitReport fit_scurve(const AnnualSeries& series, const SCurveFitOptions& opt = {});

SCurve scurve_from(const FitReport& fit, double floor = 0.0);

struct RecoveryFitOptions {
  int max_iterations = 5000;
};

/// Estimates (beta, tau) of a recovery curve with a_bar, T, E held at the
/// model constants. Starting values come from the series itself (rate
/// inversion at a smoothed mid-series point and the half-amplitude crossing
/// of the recovery component), then a multi-start simplex refines both.
/// Params: "beta", "tau", "beta_initial", "tau_initial".
FitReport fit_recovery(const AnnualSeries& series, const ModelConstants& c,
                       const RecoveryFitOptions& opt = {});

struct ShiftOptions {
  double resolution = 0.25;   ///< lag scan step [yr]
  double max_lag = 60.0;      ///< scan range is [-max_lag, max_lag]
  double min_overlap = 30.0;  ///< shortest admissible overlap [yr]
  /// Fit the best amplitude ratio at every lag instead of relying on the
  /// unit-maximum normalisation. For series that stop short of saturation.
  bool fit_scale = false;
};

/// Lag L (years) by which series_b trails series_a, i.e. b(t) ~ a(t - L),
/// minimising the mean squared difference of the amplitude-normalised series.
double measure_time_shift(const AnnualSeries& series_a, const AnnualSeries& series_b,
                          const ShiftOptions& opt = {});

struct LifetimeConstants {
  double E = 0.0;
  double G = 0.0;
};

/// Inverts the capital delays: G from the recovery shift, then E from the
/// evolution shift by bisection on [1, 500] years.
LifetimeConstants constants_from_shifts(double shift_evolution, double shift_recovery,
                                        double beta);

}  // namespace sgrowth
