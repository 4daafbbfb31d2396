#pragma once

// Closed-form relations of the growth theory: equilibrium and production,
// maintenance conditions, the S-function solutions for GDP, capital and life
// expectancy, their time shifts and growth rates.
//
// Every curve has a scalar overload templated on the floating-point type and
// an Eigen array overload that evaluates a whole grid of years at once.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <utility>

#include <Eigen/Core>

#include "sgrowth/core_types.hpp"

namespace sgrowth {

namespace detail {

// Largest exponent for which exp() is still finite in double precision.
inline constexpr double kExpLimit = 700.0;

/// log(1 + e^lu + e^lv) without overflow. lv may be -inf to drop the term.
template <std::floating_point S>
S log_one_plus_exps(S lu, S lv) {
  const S m = std::max({S(0), lu, lv});
  return m + std::log(std::exp(-m) + std::exp(lu - m) + std::exp(lv - m));
}

/// amplitude / (1 + e^lu + e^lv). Exact form while the exponentials are
/// finite, log-space beyond that.
template <std::floating_point S>
S s_function(S amplitude, S lu, S lv) {
  if (std::max(lu, lv) < S(kExpLimit)) {
    return amplitude / (S(1) + std::exp(lu) + std::exp(lv));
  }
  return amplitude * std::exp(-log_one_plus_exps(lu, lv));
}

/// Time derivative of amplitude / (1 + e^lu + e^lv) where d(lu)/dt = -rate_u
/// and d(lv)/dt = -rate_v.
template <std::floating_point S>
S s_function_derivative(S amplitude, S lu, S rate_u, S lv, S rate_v) {
  const S log_den = log_one_plus_exps(lu, lv);
  const S value = amplitude * std::exp(-log_den);
  return value * (rate_u * std::exp(lu - log_den) + rate_v * std::exp(lv - log_den));
}

template <std::floating_point S>
constexpr S minus_inf() {
  return -std::numeric_limits<S>::infinity();
}

template <typename Derived, typename F>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> map_years(
    const Eigen::ArrayBase<Derived>& t, F&& f) {
  return t.derived().unaryExpr(std::forward<F>(f)).eval();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Equilibrium between demand and supply
// ---------------------------------------------------------------------------

struct EquilibriumState {
  double w = 0.0;    ///< working time, fraction of eps_bar
  double s = 0.0;    ///< spare time, eps_bar - w
  double y = 0.0;    ///< GDP per capita
  double h_s = 0.0;  ///< human capacity actually required for demand
  double k_w = 0.0;  ///< physical capital employed in production
};

/// w = eps_bar h_s / (h_s + k_w - y0/eps_bar).
template <std::floating_point S>
S working_time(S h_s, S k_w, const ModelConstants& c) {
  const S den = h_s + k_w - S(c.y0 / c.eps_bar);
  if (!(h_s > 0) || !(den > 0) || k_w < S(c.y0 / c.eps_bar)) {
    throw DomainError("working_time: require h_s > 0 and k_w >= y0/eps_bar");
  }
  return S(c.eps_bar) * h_s / den;
}

/// Production function y = eps_bar h_s k_w / (h_s + k_w - y0/eps_bar).
template <std::floating_point S>
S production(S h_s, S k_w, const ModelConstants& c) {
  return working_time(h_s, k_w, c) * k_w;
}

/// Inverts working_time/production: the storables (h_s, k_w) that produce the
/// observed working time `w` and GDP `y`.
template <std::floating_point S>
std::pair<S, S> storables_from_observables(S w, S y, const ModelConstants& c) {
  const S eps = S(c.eps_bar);
  if (!(w > 0) || !(w < eps)) {
    throw DomainError("storables_from_observables: require 0 < w < eps_bar");
  }
  if (!(y > 0)) throw DomainError("storables_from_observables: require y > 0");
  const S k_w = y / w;
  const S h_s = (y - S(c.y0) * w / eps) / (eps - w);
  return {h_s, k_w};
}

inline EquilibriumState equilibrium(double h_s, double k_w, const ModelConstants& c) {
  EquilibriumState st;
  st.h_s = h_s;
  st.k_w = k_w;
  st.w = working_time(h_s, k_w, c);
  st.s = c.eps_bar - st.w;
  st.y = production(h_s, k_w, c);
  return st;
}

/// Largest relative violation of (eps_bar - w) h_s + y0 w / eps_bar = y = w k_w.
inline double equilibrium_residual(const EquilibriumState& st, const ModelConstants& c) {
  const double demand = (c.eps_bar - st.w) * st.h_s + c.y0 * st.w / c.eps_bar;
  const double supply = st.w * st.k_w;
  return std::max(std::abs(demand - st.y), std::abs(supply - st.y)) / std::abs(st.y);
}

// ---------------------------------------------------------------------------
// S-function solutions
// ---------------------------------------------------------------------------

template <std::floating_point S>
S scurve(S t, const SCurve& sc) {
  return S(sc.floor) + detail::s_function(S(sc.amplitude),
                                          (S(sc.halftime) - t) * S(sc.growth_param),
                                          detail::minus_inf<S>());
}

/// Industrial evolution a(t) = a_bar / (1 + exp((T - t)/E)).
template <std::floating_point S>
S evolution(S t, const ModelConstants& c) {
  return detail::s_function(S(c.a_bar), (S(c.T) - t) / S(c.E), detail::minus_inf<S>());
}

template <std::floating_point S>
S evolution_derivative(S t, const ModelConstants& c) {
  return detail::s_function_derivative(S(c.a_bar), (S(c.T) - t) / S(c.E), S(1) / S(c.E),
                                       detail::minus_inf<S>(), S(0));
}

/// National recovery y(t) = a_bar / (1 + exp((T - t)/E) + exp(beta (tau - t))).
template <std::floating_point S>
S national_gdp(S t, const RecoveryCurve& r) {
  return detail::s_function(S(r.a_bar), (S(r.T) - t) / S(r.E), S(r.beta) * (S(r.tau) - t));
}

/// Same curve evaluated as 1/y = 1/a(t) + exp(beta (tau - t)) / a_bar.
template <std::floating_point S>
S national_gdp_inverse_form(S t, const RecoveryCurve& r) {
  const S inv_a = (S(1) + std::exp((S(r.T) - t) / S(r.E))) / S(r.a_bar);
  const S inv_y = inv_a + std::exp(S(r.beta) * (S(r.tau) - t)) / S(r.a_bar);
  return S(1) / inv_y;
}

template <std::floating_point S>
S national_gdp_derivative(S t, const RecoveryCurve& r) {
  return detail::s_function_derivative(S(r.a_bar), (S(r.T) - t) / S(r.E), S(1) / S(r.E),
                                       S(r.beta) * (S(r.tau) - t), S(r.beta));
}

/// Delay of capital behind the evolution term: E ln(1 + G/E).
inline double delta_T(const ModelConstants& c) { return c.E * std::log1p(c.G / c.E); }

/// Delay of capital behind the recovery term: ln(1 + beta G) / beta.
inline double delta_tau(double beta, const ModelConstants& c) {
  if (!(beta > 0)) throw DomainError("delta_tau: require beta > 0");
  const double x = beta * c.G;
  if (beta < 1e-6) {
    // ln(1+x)/x = 1 - x/2 + x^2/3 - ...
    return c.G * (1.0 - x / 2.0 + x * x / 3.0);
  }
  return std::log1p(x) / beta;
}

/// The GDP curve shifted by the capital delays; k = mu_bar G y_k.
template <std::floating_point S>
S capital_gdp_equivalent(S t, const RecoveryCurve& r, const ModelConstants& c) {
  const S shift_T = S(delta_T(c));
  const S shift_tau = S(delta_tau(r.beta, c));
  return detail::s_function(S(r.a_bar), (S(r.T) + shift_T - t) / S(r.E),
                            S(r.beta) * (S(r.tau) + shift_tau - t));
}

/// Physical capital per capita k(t) = mu_bar G y_k(t).
template <std::floating_point S>
S capital(S t, const NationParams& n, const ModelConstants& c) {
  return S(n.mu_bar * c.G) * capital_gdp_equivalent(t, RecoveryCurve::from(n, c), c);
}

template <std::floating_point S>
S capital_derivative(S t, const NationParams& n, const ModelConstants& c) {
  const S shift_T = S(delta_T(c));
  const S shift_tau = S(delta_tau(n.beta, c));
  return S(n.mu_bar * c.G) *
         detail::s_function_derivative(S(c.a_bar), (S(c.T) + shift_T - t) / S(c.E),
                                       S(1) / S(c.E), S(n.beta) * (S(n.tau) + shift_tau - t),
                                       S(n.beta));
}

/// Capital of the pure evolution (no recovery term).
template <std::floating_point S>
S evolution_capital(S t, double mu_bar, const ModelConstants& c) {
  return S(mu_bar * c.G) *
         detail::s_function(S(c.a_bar), (S(c.T) + S(delta_T(c)) - t) / S(c.E),
                            detail::minus_inf<S>());
}

/// Unisex life expectancy L(t) = L0 + (L_bar - L0) / (1 + exp((T_L - t)/E)).
template <std::floating_point S>
S life_expectancy(S t, const ModelConstants& c) {
  return S(c.L0) + detail::s_function(S(c.L_bar - c.L0), (S(c.T_L) - t) / S(c.E),
                                      detail::minus_inf<S>());
}

template <std::floating_point S>
S life_expectancy_derivative(S t, const ModelConstants& c) {
  return detail::s_function_derivative(S(c.L_bar - c.L0), (S(c.T_L) - t) / S(c.E),
                                       S(1) / S(c.E), detail::minus_inf<S>(), S(0));
}

// ---------------------------------------------------------------------------
// Growth rates, support shares and maintenance
// ---------------------------------------------------------------------------

/// beta = (mu_bar/mu_e - 1)/G.
inline double beta_from_support(double mu_bar, double mu_e, const ModelConstants& c) {
  if (!(mu_e > 0 && mu_e < mu_bar)) {
    throw DomainError("beta_from_support: require 0 < mu_e < mu_bar");
  }
  return (mu_bar / mu_e - 1.0) / c.G;
}

/// Support share needed to recover at rate `beta` from entrance value `mu_e`.
inline double mu_bar_required(double beta, double mu_e, const ModelConstants& c) {
  if (!(mu_e > 0) || !(beta >= 0)) {
    throw DomainError("mu_bar_required: require mu_e > 0 and beta >= 0");
  }
  return mu_e * (1.0 + beta * c.G);
}

/// Growth rate of the evolution at level a: (1 - a/a_bar)/E.
template <std::floating_point S>
S evolution_rate(S a, const ModelConstants& c) {
  if (!(a > 0) || !(a < S(c.a_bar))) {
    throw DomainError("evolution_rate: require 0 < a < a_bar");
  }
  return (S(1) - a / S(c.a_bar)) / S(c.E);
}

/// National growth rate beta (1 - y/a) + (a'/a)(y/a).
template <std::floating_point S>
S national_rate(S y, S a, S beta, const ModelConstants& c) {
  if (!(y > 0) || y > a) throw DomainError("national_rate: require 0 < y <= a");
  const S ratio = y / a;
  return beta * (S(1) - ratio) + evolution_rate(a, c) * ratio;
}

/// Capital function mu = mu_bar / (1 + G y'/y).
inline double capital_function(const NationParams& n, double ydot_over_y,
                               const ModelConstants& c) {
  const double den = 1.0 + c.G * ydot_over_y;
  if (!(den > 0)) throw DomainError("capital_function: require 1 + G y'/y > 0");
  return n.mu_bar / den;
}

/// Capital function along the nation's own recovery curve at time t.
inline double capital_function_at(double t, const NationParams& n, const ModelConstants& c) {
  const auto r = RecoveryCurve::from(n, c);
  return capital_function(n, national_gdp_derivative(t, r) / national_gdp(t, r), c);
}

/// Capacity function nu = nu_bar / (1 + E a'/a).
inline double capacity_function(double adot_over_a, double nu_bar, const ModelConstants& c) {
  const double den = 1.0 + c.E * adot_over_a;
  if (!(den > 0)) throw DomainError("capacity_function: require 1 + E a'/a > 0");
  return nu_bar / den;
}

struct MaintainedStocks {
  double h = 0.0;  ///< human capacity
  double k = 0.0;  ///< physical capital
};

/// Stocks maintained by the shares nu and mu of GDP: h = nu E y, k = mu G y.
inline MaintainedStocks maintenance_stocks(double y, double mu, double nu,
                                           const ModelConstants& c) {
  if (!(y > 0) || !(mu > 0) || !(nu > 0)) {
    throw DomainError("maintenance_stocks: require y, mu, nu > 0");
  }
  return {nu * c.E * y, mu * c.G * y};
}

/// Part of human capacity needed for demand when working time is 1/(mu_w G):
/// h_s = y / (eps_bar (1 - 1/(mu_w eps_bar G))).
inline double required_capacity(double y, double mu_w, const ModelConstants& c) {
  const double mg = mu_w * c.eps_bar * c.G;
  if (!(mg > 1.0)) {
    throw DomainError("required_capacity: require mu_w eps_bar G > 1");
  }
  return y / (c.eps_bar * (1.0 - 1.0 / mg));
}

// ---------------------------------------------------------------------------
// Working time reconstructed from GDP and employed capital
// ---------------------------------------------------------------------------

/// w(t) = y/k_w including the agricultural level: total GDP y0 + a(t) and
/// employed capital y0/eps_bar + mu_w G y_k(t), with y_k the capital-delayed
/// evolution. Tends to eps_bar before industrialisation.
template <std::floating_point S>
S working_time_path(S t, double mu_w, const ModelConstants& c) {
  const S y = evolution(t, c);
  const S y_k = detail::s_function(S(c.a_bar), (S(c.T) + S(delta_T(c)) - t) / S(c.E),
                                   detail::minus_inf<S>());
  return (S(c.y0) + y) / (S(c.y0 / c.eps_bar) + S(mu_w * c.G) * y_k);
}

/// As above for a recovering nation (two-term GDP and capital curves).
template <std::floating_point S>
S working_time_path(S t, const NationParams& n, const ModelConstants& c) {
  const auto r = RecoveryCurve::from(n, c);
  const S y = national_gdp(t, r);
  const S y_k = capital_gdp_equivalent(t, r, c);
  return (S(c.y0) + y) / (S(c.y0 / c.eps_bar) + S(n.mu_w_or_default() * c.G) * y_k);
}

// ---------------------------------------------------------------------------
// Grid overloads
// ---------------------------------------------------------------------------

template <typename Derived>
auto evolution(const Eigen::ArrayBase<Derived>& t, const ModelConstants& c) {
  using S = typename Derived::Scalar;
  return detail::map_years(t, [c](S x) { return evolution(x, c); });
}

template <typename Derived>
auto national_gdp(const Eigen::ArrayBase<Derived>& t, const RecoveryCurve& r) {
  using S = typename Derived::Scalar;
  return detail::map_years(t, [r](S x) { return national_gdp(x, r); });
}

template <typename Derived>
auto capital(const Eigen::ArrayBase<Derived>& t, const NationParams& n,
             const ModelConstants& c) {
  using S = typename Derived::Scalar;
  return detail::map_years(t, [n, c](S x) { return capital(x, n, c); });
}

template <typename Derived>
auto life_expectancy(const Eigen::ArrayBase<Derived>& t, const ModelConstants& c) {
  using S = typename Derived::Scalar;
  return detail::map_years(t, [c](S x) { return life_expectancy(x, c); });
}

template <typename Derived>
auto scurve(const Eigen::ArrayBase<Derived>& t, const SCurve& sc) {
  using S = typename Derived::Scalar;
  return detail::map_years(t, [sc](S x) { return scurve(x, sc); });
}

}  // namespace sgrowth
