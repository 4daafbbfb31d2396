#include "sgrowth/ode_verify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "sgrowth/growth_model.hpp"
#include "sgrowth/rk4.hpp"

namespace sgrowth {

namespace {

template <typename State, typename Rhs>
AnnualSeries sample_annually(const Rhs& rhs, State x, double t_start, double t_end,
                             double step, Unit unit,
                             double (*project)(const State&)) {
  std::vector<int> years;
  std::vector<double> values;
  double t = t_start;
  const int first = static_cast<int>(std::ceil(t_start));
  const int last = static_cast<int>(std::floor(t_end));
  for (int year = first; year <= last; ++year) {
    x = rk4_advance(rhs, t, x, static_cast<double>(year), step);
    t = year;
    years.push_back(year);
    values.push_back(project(x));
  }
  return AnnualSeries(std::move(years),
                      Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                                       static_cast<Eigen::Index>(values.size())),
                      unit);
}

void check_interval(double t_start, double t_end, double step) {
  if (!(step > 0)) throw DomainError("integration step must be positive");
  if (!(t_end >= t_start)) throw DomainError("integration range is reversed");
}

void check_grid(std::pair<double, double> t_range, int n_samples) {
  if (n_samples < 10) throw DomainError("residual grid needs at least 10 samples");
  if (!(t_range.second > t_range.first)) throw DomainError("residual range is empty");
}

double grid_point(std::pair<double, double> t_range, int n_samples, int i) {
  return t_range.first +
         (t_range.second - t_range.first) * static_cast<double>(i) / (n_samples - 1);
}

// Exponents of the two S-function terms at time t; a dropped term is -inf.
struct Exponents {
  double lu;
  double lv;
};

Exponents exponents(double t, double halftime_T, double halftime_tau, const NationParams& n,
                    const ModelConstants& c, CurveTerms terms) {
  constexpr double kDropped = -std::numeric_limits<double>::infinity();
  const double lu = terms == CurveTerms::RecoveryOnly ? kDropped : (halftime_T - t) / c.E;
  const double lv =
      terms == CurveTerms::EvolutionOnly ? kDropped : n.beta * (halftime_tau - t);
  return {lu, lv};
}

}  // namespace

AnnualSeries integrate_evolution(double a_start, double t_start, double t_end, double step,
                                 const ModelConstants& c) {
  check_interval(t_start, t_end, step);
  if (!(a_start > 0) || a_start > c.a_bar) {
    throw DomainError("integrate_evolution: require 0 < a_start <= a_bar");
  }
  const double inv_amp = 1.0 / c.a_bar;
  const double inv_E = 1.0 / c.E;
  auto rhs = [=](double, double a) { return a * (1.0 - a * inv_amp) * inv_E; };
  return sample_annually<double>(rhs, a_start, t_start, t_end, step, Unit::CurrencyFlow,
                                 [](const double& a) { return a; });
}

AnnualSeries integrate_national(double y_start, double t_start, double t_end, double step,
                                const RecoveryCurve& r, const ModelConstants& c) {
  check_interval(t_start, t_end, step);
  const double a_start = evolution(t_start, c);
  if (!(y_start >= 0) || y_start > a_start) {
    throw DomainError("integrate_national: require 0 <= y_start <= evolution(t_start)");
  }
  const double inv_amp = 1.0 / c.a_bar;
  const double inv_E = 1.0 / c.E;
  const double beta = r.beta;
  auto rhs = [=](double, const Eigen::Vector2d& x) {
    const double a = x(0);
    const double y = x(1);
    const double evolution_rate = (1.0 - a * inv_amp) * inv_E;
    const double ratio = y / a;
    return Eigen::Vector2d(a * evolution_rate,
                           y * (beta * (1.0 - ratio) + evolution_rate * ratio));
  };
  return sample_annually<Eigen::Vector2d>(
      rhs, Eigen::Vector2d(a_start, y_start), t_start, t_end, step, Unit::CurrencyFlow,
      [](const Eigen::Vector2d& x) { return x(1); });
}

ResidualReport capital_balance_residual(const NationParams& n,
                                        std::pair<double, double> t_range, int n_samples,
                                        const ModelConstants& c, CurveTerms terms) {
  check_grid(t_range, n_samples);
  const double shift_T = delta_T(c);
  const double shift_tau = delta_tau(n.beta, c);

  auto gdp = [&](double t) {
    const auto [lu, lv] = exponents(t, c.T, n.tau, n, c, terms);
    return detail::s_function(c.a_bar, lu, lv);
  };
  auto capital_of = [&](double t) {
    const auto [lu, lv] = exponents(t, c.T + shift_T, n.tau + shift_tau, n, c, terms);
    return n.mu_bar * c.G * detail::s_function(c.a_bar, lu, lv);
  };
  auto mu_of = [&](double t) { return capital_of(t) / (c.G * gdp(t)); };

  constexpr double h = 1e-4;
  ResidualReport rep;
  rep.t_range = t_range;
  rep.n_samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const double t = grid_point(t_range, n_samples, i);
    const auto [lu, lv] = exponents(t, c.T, n.tau, n, c, terms);
    const double y = detail::s_function(c.a_bar, lu, lv);
    const double ydot = detail::s_function_derivative(c.a_bar, lu, 1.0 / c.E, lv, n.beta);
    const double mu = mu_of(t);
    const double res = std::abs(mu * (1.0 + c.G * ydot / y) - n.mu_bar);
    rep.max_abs_residual = std::max(rep.max_abs_residual, res);
    rep.max_rel_residual = std::max(rep.max_rel_residual, res / n.mu_bar);

    const double k = capital_of(t);
    const double kdot = (capital_of(t + h) - capital_of(t - h)) / (2.0 * h);
    const double mudot = (mu_of(t + h) - mu_of(t - h)) / (2.0 * h);
    const double lhs = kdot + k / c.G;
    const double rhs = n.mu_bar * y + mudot * c.G * y;
    rep.max_rel_support_identity =
        std::max(rep.max_rel_support_identity, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return rep;
}

ResidualReport incapacity_decay_residual(const RecoveryCurve& r,
                                         std::pair<double, double> t_range, int n_samples) {
  check_grid(t_range, n_samples);
  const ModelConstants c = [&] {
    ModelConstants k;
    k.a_bar = r.a_bar;
    k.T = r.T;
    k.E = r.E;
    return k;
  }();
  auto incapacity_gap = [&](double t) {
    return 1.0 / national_gdp(t, r) - 1.0 / evolution(t, c);
  };

  constexpr double half_base = 0.5;
  ResidualReport rep;
  rep.t_range = t_range;
  rep.n_samples = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const double t = grid_point(t_range, n_samples, i);
    const double rate =
        -(std::log(incapacity_gap(t + half_base)) - std::log(incapacity_gap(t - half_base))) /
        (2.0 * half_base);
    const double res = std::abs(rate - r.beta);
    rep.max_abs_residual = std::max(rep.max_abs_residual, res);
    rep.max_rel_residual = std::max(rep.max_rel_residual, res / r.beta);
  }
  return rep;
}

}  // namespace sgrowth
