#include "sgrowth/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "sgrowth/growth_model.hpp"
#include "sgrowth/nelder_mead.hpp"

namespace sgrowth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PolishResult {
  Eigen::VectorXd x;
  double rss = kInf;
  int iterations = 0;
  bool converged = false;
};

// Damped Gauss-Newton. `eval(x, r, J)` fills residuals r = model - data and
// their Jacobian; returns false if the model is not finite at x.
template <typename Eval>
PolishResult gauss_newton(Eval&& eval, Eigen::VectorXd x, int max_iterations = 100) {
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  PolishResult out;
  if (!eval(x, r, J)) return out;
  double rss = r.squaredNorm();
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) break;
    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd r_try;
    Eigen::MatrixXd J_try;
    for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
      const Eigen::VectorXd x_try = x + lambda * step;
      if (eval(x_try, r_try, J_try) && r_try.squaredNorm() <= rss * (1.0 + 1e-12)) {
        x = x_try;
        r = r_try;
        J = J_try;
        rss = r.squaredNorm();
        accepted = true;
        break;
      }
    }
    const bool tiny = ((lambda * step).array().abs() <=
                       1e-12 * (1.0 + x.array().abs()))
                          .all();
    if (!accepted || tiny) {
      out.converged = tiny || step.norm() == 0.0;
      break;
    }
  }
  out.x = x;
  out.rss = rss;
  out.iterations = it;
  return out;
}

struct Candidate {
  NelderMeadResult nm;
  Eigen::VectorXd params;  // natural parameters
};

// Lowest objective first, then lexicographic parameter order.
bool better(const Candidate& a, const Candidate& b) {
  if (a.nm.value != b.nm.value) return a.nm.value < b.nm.value;
  return std::lexicographical_compare(a.params.data(), a.params.data() + a.params.size(),
                                      b.params.data(), b.params.data() + b.params.size());
}

bool is_flat(const Eigen::ArrayXd& v) {
  const double scale = std::max(1.0, v.abs().maxCoeff());
  return v.maxCoeff() - v.minCoeff() <= 1e-12 * scale;
}

double interpolate(const std::vector<int>& years, const Eigen::ArrayXd& v, double t) {
  auto it = std::upper_bound(years.begin(), years.end(), t,
                             [](double x, int y) { return x < static_cast<double>(y); });
  if (it == years.begin()) return v(0);
  if (it == years.end()) return v(v.size() - 1);
  const auto hi = static_cast<Eigen::Index>(it - years.begin());
  const double t0 = years[static_cast<std::size_t>(hi - 1)];
  const double t1 = years[static_cast<std::size_t>(hi)];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * v(hi - 1) + w * v(hi);
}

// Logistic basis 1/(1 + exp(z)), finite for every z.
double logistic(double z) { return z > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(z)); }

}  // namespace

double beta_from_point(double y, double ydot, double t, const ModelConstants& c) {
  const double a = evolution(t, c);
  if (!(y > 0) || !(y < a)) {
    throw DomainError("beta_from_point: require 0 < y < a(t)");
  }
  const double ratio = y / a;
  if (ratio > kMaxConvergenceRatio) {
    throw EstimationError("beta_from_point: y/a = " + std::to_string(ratio) +
                          " exceeds 0.95, too close to convergence to resolve beta");
  }
  return (ydot / y - evolution_rate(a, c) * ratio) / (1.0 - ratio);
}

LocalSlope local_slope(const AnnualSeries& s, std::size_t i) {
  if (i < 2 || i + 2 >= s.size()) {
    throw DomainError("local_slope: index needs two neighbours on each side");
  }
  Eigen::Matrix<double, 5, 3> A;
  Eigen::Matrix<double, 5, 1> b;
  const double t0 = s.years()[i];
  for (int k = 0; k < 5; ++k) {
    const std::size_t j = i - 2 + static_cast<std::size_t>(k);
    const double dt = s.years()[j] - t0;
    A.row(k) << 1.0, dt, dt * dt;
    b(k) = s.values()(static_cast<Eigen::Index>(j));
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(b);
  return {t0, coef(0), coef(1)};
}

std::optional<double> measure_halftime(const AnnualSeries& s, double amplitude, double floor,
                                       HalftimeMethod method) {
  const auto& v = s.values();
  const auto& yr = s.years();
  if (method == HalftimeMethod::HalfAmplitude) {
    const double level = floor + 0.5 * amplitude;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double v0 = v(static_cast<Eigen::Index>(i));
      const double v1 = v(static_cast<Eigen::Index>(i + 1));
      if (v0 < level && v1 >= level) {
        return yr[i] + (level - v0) / (v1 - v0) * (yr[i + 1] - yr[i]);
      }
    }
    return std::nullopt;
  }

  if (s.size() < 5) return std::nullopt;
  std::vector<LocalSlope> slopes;
  for (std::size_t i = 2; i + 2 < s.size(); ++i) slopes.push_back(local_slope(s, i));
  const auto best = std::max_element(slopes.begin(), slopes.end(),
                                     [](const LocalSlope& a, const LocalSlope& b) {
                                       return a.slope < b.slope;
                                     });
  const auto k = static_cast<std::size_t>(best - slopes.begin());
  if (k == 0 || k + 1 == slopes.size()) return best->t;
  // Vertex of the parabola through the three slopes around the maximum.
  const double x0 = slopes[k - 1].t, x1 = slopes[k].t, x2 = slopes[k + 1].t;
  const double f0 = slopes[k - 1].slope, f1 = slopes[k].slope, f2 = slopes[k + 1].slope;
  const double num = (x1 - x0) * (x1 - x0) * (f1 - f2) - (x1 - x2) * (x1 - x2) * (f1 - f0);
  const double den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
  if (den == 0.0) return x1;
  return x1 - 0.5 * num / den;
}

FitReport fit_scurve(const AnnualSeries& series, const SCurveFitOptions& opt) {
  if (series.size() < 5) throw DomainError("fit_scurve: need at least 5 points");
  FitReport rep;
  rep.n_points = series.size();
  const Eigen::ArrayXd t = series.times();
  const Eigen::ArrayXd d = series.values() - opt.floor;
  if (is_flat(d)) {
    rep.message = "series is flat; no S-function halftime can be identified";
    return rep;
  }
  const double t_first = t(0);
  const double t_last = t(t.size() - 1);
  const double span = t_last - t_first;
  const bool fixed_g = opt.growth_param.has_value();
  if (fixed_g && !(*opt.growth_param > 0)) {
    throw DomainError("fit_scurve: fixed growth parameter must be positive");
  }

  // Amplitude enters linearly and is solved for in closed form.
  auto profiled = [&](double halftime, double g, double* amplitude) {
    const Eigen::ArrayXd f = ((halftime - t) * g).unaryExpr(&logistic);
    const double ff = f.square().sum();
    if (!(ff > 0)) return kInf;
    const double amp = (f * d).sum() / ff;
    if (amplitude) *amplitude = amp;
    return (amp * f - d).square().sum();
  };
  auto natural = [&](const Eigen::VectorXd& x) {
    return std::pair<double, double>{x(0), fixed_g ? *opt.growth_param : std::exp(x(1))};
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    const auto [h, g] = natural(x);
    return profiled(h, g, nullptr);
  };

  NelderMeadOptions nm_opt;
  nm_opt.max_iterations = opt.max_iterations;
  std::vector<Candidate> runs;
  const std::vector<double> h_grid{t_first + 0.25 * span, t_first + 0.5 * span,
                                   t_first + 0.75 * span};
  const std::vector<double> g_grid =
      fixed_g ? std::vector<double>{*opt.growth_param}
              : std::vector<double>{2.0 / span, 6.0 / span, 18.0 / span};
  for (double h0 : h_grid) {
    for (double g0 : g_grid) {
      Eigen::VectorXd x0(fixed_g ? 1 : 2), step(fixed_g ? 1 : 2);
      x0(0) = h0;
      step(0) = 0.1 * span;
      if (!fixed_g) {
        x0(1) = std::log(g0);
        step(1) = 0.5;
      }
      Candidate cand;
      cand.nm = nelder_mead(objective, x0, step, nm_opt);
      const auto [h, g] = natural(cand.nm.x);
      cand.params = Eigen::Vector2d(h, g);
      runs.push_back(std::move(cand));
    }
  }
  const auto best = *std::min_element(runs.begin(), runs.end(), better);
  double amplitude = 0.0;
  auto [halftime, g] = natural(best.nm.x);
  profiled(halftime, g, &amplitude);

  // Gauss-Newton polish on (amplitude, halftime[, g]).
  auto eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    const double amp = p(0), h = p(1), gg = fixed_g ? *opt.growth_param : p(2);
    if (!(gg > 0)) return false;
    const Eigen::Index n = t.size();
    r.resize(n);
    J.resize(n, p.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double f = logistic((h - t(i)) * gg);
      const double df = f * (1.0 - f);
      r(i) = amp * f - d(i);
      J(i, 0) = f;
      J(i, 1) = -amp * gg * df;
      if (!fixed_g) J(i, 2) = -amp * (h - t(i)) * df;
    }
    return r.allFinite() && J.allFinite();
  };
  Eigen::VectorXd p0(fixed_g ? 2 : 3);
  p0(0) = amplitude;
  p0(1) = halftime;
  if (!fixed_g) p0(2) = g;
  const auto polished = gauss_newton(eval, p0);
  if (!polished.x.size()) {
    rep.message = "fitted model is not finite";
    return rep;
  }

  amplitude = polished.x(0);
  halftime = polished.x(1);
  if (!fixed_g) g = polished.x(2);
  rep.params["amplitude"] = amplitude;
  rep.params["halftime"] = halftime;
  rep.params["growth_param"] = g;
  rep.rss = polished.rss;
  rep.iterations = best.nm.iterations + polished.iterations;

  const bool in_range = halftime > t_first - 2.0 * span && halftime < t_last + 2.0 * span;
  rep.converged = best.nm.converged && polished.converged && amplitude > 0 && g > 0 && in_range;
  if (!best.nm.converged) {
    rep.message = "simplex did not converge within the iteration cap";
  } else if (!polished.converged) {
    rep.message = "Gauss-Newton refinement did not converge";
  } else if (!(amplitude > 0 && g > 0)) {
    rep.message = "fit produced a non-positive amplitude or growth parameter";
  } else if (!in_range) {
    rep.message = "halftime runs away from the data; series does not span the inflection";
  }
  return rep;
}

SCurve scurve_from(const FitReport& fit, double floor) {
  return {fit.params.at("amplitude"), fit.params.at("halftime"), fit.params.at("growth_param"),
          floor};
}

FitReport fit_recovery(const AnnualSeries& series, const ModelConstants& c,
                       const RecoveryFitOptions& opt) {
  if (series.size() < 5) throw DomainError("fit_recovery: need at least 5 points");
  const Eigen::ArrayXd t = series.times();
  const Eigen::ArrayXd y = series.values();
  const Eigen::ArrayXd a = evolution(t, c);
  if ((y >= a).all()) {
    throw EstimationError(
        "fit_recovery: series lies entirely on or above the evolution envelope; "
        "the recovery model does not apply");
  }
  FitReport rep;
  rep.n_points = series.size();
  if (is_flat(y)) {
    rep.message = "series is flat; no recovery can be identified";
    return rep;
  }

  // Stage 1: starting values from the data.
  const std::size_t n = series.size();
  std::vector<std::size_t> candidates;
  for (std::size_t i = 2; i + 2 < n; ++i) candidates.push_back(i);
  const double middle = 0.5 * static_cast<double>(n - 1);
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t p, std::size_t q) {
    return std::abs(static_cast<double>(p) - middle) < std::abs(static_cast<double>(q) - middle);
  });
  double beta0 = 0.0;
  LocalSlope anchor;
  for (auto i : candidates) {
    const auto ls = local_slope(series, i);
    const double ai = evolution(ls.t, c);
    if (!(ls.value > 0.05 * ai && ls.value < kMaxConvergenceRatio * ai)) continue;
    const double b = beta_from_point(ls.value, ls.slope, ls.t, c);
    if (b > 0 && std::isfinite(b)) {
      beta0 = b;
      anchor = ls;
      break;
    }
  }
  if (!(beta0 > 0)) {
    beta0 = 2.0 / c.E;
    anchor = {t(static_cast<Eigen::Index>(n / 2)), y(static_cast<Eigen::Index>(n / 2)), 0.0};
  }

  std::vector<int> comp_years;
  std::vector<double> comp_values;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double inv = 1.0 / y(k) - 1.0 / a(k) + 1.0 / c.a_bar;
    if (y(k) > 0 && inv > 0) {
      comp_years.push_back(series.years()[i]);
      comp_values.push_back(1.0 / inv);
    }
  }
  std::optional<double> tau0;
  if (comp_years.size() >= 2) {
    const AnnualSeries component(
        comp_years,
        Eigen::Map<Eigen::ArrayXd>(comp_values.data(), static_cast<Eigen::Index>(comp_values.size())));
    tau0 = measure_halftime(component, c.a_bar);
  }
  if (!tau0) {
    const double a_anchor = evolution(anchor.t, c);
    const double gap = c.a_bar * (1.0 / anchor.value - 1.0 / a_anchor);
    tau0 = gap > 0 ? anchor.t + std::log(gap) / beta0 : anchor.t;
  }
  rep.params["beta_initial"] = beta0;
  rep.params["tau_initial"] = *tau0;

  // Stage 2: multi-start simplex on (log beta, tau), then Gauss-Newton.
  auto model = [&](double beta, double tau) {
    return RecoveryCurve::from(beta, tau, c);
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    const auto r = model(std::exp(x(0)), x(1));
    double rss = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double e = national_gdp(t(i), r) - y(i);
      rss += e * e;
    }
    return std::isfinite(rss) ? rss : kInf;
  };
  NelderMeadOptions nm_opt;
  nm_opt.max_iterations = opt.max_iterations;
  std::vector<Candidate> runs;
  for (double bf : {0.7, 1.0, 1.4}) {
    for (double dtau : {-10.0, 0.0, 10.0}) {
      Candidate cand;
      cand.nm = nelder_mead(objective, Eigen::Vector2d(std::log(beta0 * bf), *tau0 + dtau),
                            Eigen::Vector2d(0.2, 3.0), nm_opt);
      cand.params = Eigen::Vector2d(std::exp(cand.nm.x(0)), cand.nm.x(1));
      runs.push_back(std::move(cand));
    }
  }
  const auto best = *std::min_element(runs.begin(), runs.end(), better);

  auto eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    const double beta = p(0), tau = p(1);
    if (!(beta > 0)) return false;
    const Eigen::Index m = t.size();
    r.resize(m);
    J.resize(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double u = std::exp((c.T - t(i)) / c.E);
      const double v = std::exp(beta * (tau - t(i)));
      const double den = 1.0 + u + v;
      const double yi = c.a_bar / den;
      const double dy_dv = -yi / den;
      r(i) = yi - y(i);
      J(i, 0) = dy_dv * v * (tau - t(i));
      J(i, 1) = dy_dv * v * beta;
    }
    return r.allFinite() && J.allFinite();
  };
  const auto polished = gauss_newton(eval, best.params);
  if (!polished.x.size()) {
    rep.message = "fitted model is not finite";
    return rep;
  }
  rep.params["beta"] = polished.x(0);
  rep.params["tau"] = polished.x(1);
  rep.rss = polished.rss;
  rep.iterations = best.nm.iterations + polished.iterations;
  rep.converged = best.nm.converged && polished.converged && polished.x(0) > 0;
  if (!best.nm.converged) {
    rep.message = "simplex did not converge within the iteration cap";
  } else if (!polished.converged) {
    rep.message = "Gauss-Newton refinement did not converge";
  }
  return rep;
}

double measure_time_shift(const AnnualSeries& series_a, const AnnualSeries& series_b,
                          const ShiftOptions& opt) {
  if (series_a.size() < 2 || series_b.size() < 2) {
    throw EstimationError("measure_time_shift: series need at least two points");
  }
  if (is_flat(series_a.values()) || is_flat(series_b.values())) {
    throw EstimationError("measure_time_shift: a series is flat");
  }
  const double a_first = series_a.years().front(), a_last = series_a.years().back();
  const double b_first = series_b.years().front(), b_last = series_b.years().back();
  if (std::min(a_last, b_last) - std::max(a_first, b_first) < opt.min_overlap) {
    throw EstimationError("measure_time_shift: overlap shorter than " +
                          std::to_string(opt.min_overlap) + " years");
  }
  if (!(opt.resolution > 0) || !(opt.max_lag > 0)) {
    throw DomainError("measure_time_shift: resolution and max_lag must be positive");
  }

  const Eigen::ArrayXd va = series_a.values() / series_a.values().abs().maxCoeff();
  const Eigen::ArrayXd vb = series_b.values() / series_b.values().abs().maxCoeff();
  const Eigen::ArrayXd ta = series_a.times();

  auto mismatch = [&](double lag) {
    std::vector<double> xa, xb;
    double t_lo = kInf, t_hi = -kInf;
    for (Eigen::Index i = 0; i < ta.size(); ++i) {
      const double tb = ta(i) + lag;
      if (tb < b_first || tb > b_last) continue;
      xa.push_back(va(i));
      xb.push_back(interpolate(series_b.years(), vb, tb));
      t_lo = std::min(t_lo, ta(i));
      t_hi = std::max(t_hi, ta(i));
    }
    if (xa.empty() || t_hi - t_lo < opt.min_overlap) return kInf;
    const Eigen::Map<Eigen::ArrayXd> pa(xa.data(), static_cast<Eigen::Index>(xa.size()));
    const Eigen::Map<Eigen::ArrayXd> pb(xb.data(), static_cast<Eigen::Index>(xb.size()));
    const double scale = opt.fit_scale ? (pa * pb).sum() / pb.square().sum() : 1.0;
    return (pa - scale * pb).square().mean();
  };

  const auto steps = static_cast<int>(std::floor(opt.max_lag / opt.resolution + 1e-9));
  std::vector<double> lags, msd;
  for (int k = -steps; k <= steps; ++k) {
    lags.push_back(k * opt.resolution);
    msd.push_back(mismatch(lags.back()));
  }
  const auto best = static_cast<std::size_t>(std::min_element(msd.begin(), msd.end()) - msd.begin());
  if (!std::isfinite(msd[best])) {
    throw EstimationError("measure_time_shift: no lag leaves enough overlap");
  }
  double lag = lags[best];
  if (best > 0 && best + 1 < msd.size() && std::isfinite(msd[best - 1]) &&
      std::isfinite(msd[best + 1])) {
    const double curvature = msd[best - 1] - 2.0 * msd[best] + msd[best + 1];
    if (curvature > 0) {
      const double offset = 0.5 * (msd[best - 1] - msd[best + 1]) / curvature;
      lag += std::clamp(offset, -0.5, 0.5) * opt.resolution;
    }
  }
  return lag;
}

LifetimeConstants constants_from_shifts(double shift_evolution, double shift_recovery,
                                        double beta) {
  if (!(shift_evolution > 0) || !(shift_recovery > 0) || !(beta > 0)) {
    throw EstimationError("constants_from_shifts: shifts and beta must be positive");
  }
  const double G = std::expm1(beta * shift_recovery) / beta;
  auto excess = [&](double E) { return E * std::log1p(G / E) - shift_evolution; };
  double lo = 1.0, hi = 500.0;
  double f_lo = excess(lo);
  if (f_lo * excess(hi) > 0) {
    throw EstimationError("constants_from_shifts: no evolution constant in [1, 500] years "
                          "reproduces the evolution shift");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = excess(mid);
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), G};
}

}  // namespace sgrowth
