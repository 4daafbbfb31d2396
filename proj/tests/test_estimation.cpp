#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sgrowth/estimation.hpp"
#include "sgrowth/growth_model.hpp"

using namespace sgrowth;
using doctest::Approx;

namespace {

const ModelConstants kC = default_constants();

std::vector<int> year_grid(int first, int last, int step) {
  std::vector<int> y;
  for (int t = first; t <= last; t += step) y.push_back(t);
  return y;
}

template <typename F>
AnnualSeries sample(const std::vector<int>& years, F&& f) {
  Eigen::ArrayXd v(static_cast<Eigen::Index>(years.size()));
  for (std::size_t i = 0; i < years.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = f(static_cast<double>(years[i]));
  }
  return AnnualSeries(years, v);
}

double p90(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(0.9 * static_cast<double>(v.size())) - 1];
}

}  // namespace

TEST_CASE("beta from a point on the curve") {
  const auto r = RecoveryCurve::from(*find_nation("Germany"), kC);
  const double t = 1960.0;
  const double y = national_gdp(t, r);
  const double ydot = national_gdp_derivative(t, r);
  CHECK(beta_from_point(y, ydot, t, kC) == Approx(0.09).epsilon(1e-9));

  // Early phase: the envelope term is negligible.
  const double y_small = 1e-4 * evolution(1800.0, kC);
  CHECK(beta_from_point(y_small, 0.05 * y_small, 1800.0, kC) == Approx(0.05).epsilon(1e-3));

  const double a = evolution(2000.0, kC);
  CHECK_THROWS_AS(beta_from_point(0.96 * a, 100.0, 2000.0, kC), EstimationError);
  CHECK_THROWS_AS(beta_from_point(a, 100.0, 2000.0, kC), DomainError);
  CHECK_THROWS_AS(beta_from_point(0.0, 100.0, 2000.0, kC), DomainError);
}

TEST_CASE("local slope and halftime measurement") {
  const auto quad = sample(year_grid(1990, 2000, 1), [](double t) { return 3.0 + (t - 1990) * (t - 1990); });
  const auto ls = local_slope(quad, 5);
  CHECK(ls.t == 1995.0);
  CHECK(ls.value == Approx(28.0).epsilon(1e-12));
  CHECK(ls.slope == Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(local_slope(quad, 1), DomainError);

  const auto evo = sample(year_grid(1950, 2130, 1), [](double t) { return evolution(t, kC); });
  CHECK(measure_halftime(evo, kC.a_bar).value() == Approx(2040.0).epsilon(1e-9));
  CHECK(std::abs(measure_halftime(evo, kC.a_bar, 0.0, HalftimeMethod::Inflection).value() - 2040.0) < 0.1);
  CHECK_FALSE(measure_halftime(evo, 3.0 * kC.a_bar).has_value());

  // First crossing from below wins.
  const std::vector<int> yrs{2000, 2001, 2002, 2003, 2004};
  const AnnualSeries wiggle(yrs, Eigen::ArrayXd((Eigen::ArrayXd(5) << 0, 6, 4, 8, 10).finished()));
  CHECK(measure_halftime(wiggle, 10.0).value() == Approx(2000.0 + 5.0 / 6.0));
}

TEST_CASE("fit_scurve on noiseless data") {
  const auto years = year_grid(1850, 2100, 5);
  const auto s = sample(years, [](double t) { return evolution(t, kC); });

  const auto free_fit = fit_scurve(s);
  REQUIRE(free_fit.converged);
  CHECK(free_fit.params.at("amplitude") == Approx(75000.0).epsilon(1e-3));
  CHECK(free_fit.params.at("halftime") == Approx(2040.0).epsilon(1e-3));
  CHECK(free_fit.params.at("growth_param") == Approx(1.0 / 62.0).epsilon(1e-6));
  CHECK(free_fit.n_points == years.size());
  CHECK(free_fit.rss >= 0.0);

  SCurveFitOptions fixed;
  fixed.growth_param = 1.0 / kC.E;
  const auto fixed_fit = fit_scurve(s, fixed);
  REQUIRE(fixed_fit.converged);
  CHECK(fixed_fit.params.at("halftime") == Approx(2040.0).epsilon(1e-9));
  CHECK(fixed_fit.params.at("growth_param") == 1.0 / kC.E);

  // Life expectancy carries a floor.
  SCurveFitOptions floored;
  floored.floor = kC.L0;
  const auto life = fit_scurve(sample(year_grid(1850, 2100, 5), [](double t) { return life_expectancy(t, kC); }),
                               floored);
  REQUIRE(life.converged);
  CHECK(life.params.at("halftime") == Approx(1981.0).epsilon(1e-9));
  CHECK(life.params.at("amplitude") == Approx(88.0).epsilon(1e-9));
  const auto curve = scurve_from(life, kC.L0);
  CHECK(scurve(1981.0, curve) == Approx(74.0).epsilon(1e-9));
}

TEST_CASE("fit_scurve degenerate input") {
  const auto flat = sample(year_grid(1900, 2000, 5), [](double) { return 5000.0; });
  const auto rep = fit_scurve(flat);
  CHECK_FALSE(rep.converged);
  CHECK_FALSE(rep.message.empty());
  CHECK_THROWS_AS(fit_scurve(sample(year_grid(1900, 1915, 5), [](double t) { return t; })), DomainError);
  SCurveFitOptions bad;
  bad.growth_param = -1.0;
  CHECK_THROWS_AS(fit_scurve(sample(year_grid(1850, 2100, 5), [](double t) { return evolution(t, kC); }), bad),
                  DomainError);
}

TEST_CASE("fit_scurve is invariant under rescaling") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 1500.0);
  const auto s = sample(year_grid(1850, 2100, 5), [&](double t) { return evolution(t, kC) + noise(rng); });
  const auto base = fit_scurve(s);
  REQUIRE(base.converged);
  for (double k : {1e-3, 3.7, 1e4}) {
    CAPTURE(k);
    const auto scaled = fit_scurve(s.scaled(k));
    REQUIRE(scaled.converged);
    CHECK(scaled.params.at("halftime") == Approx(base.params.at("halftime")).epsilon(1e-9));
    CHECK(scaled.params.at("growth_param") == Approx(base.params.at("growth_param")).epsilon(1e-9));
    CHECK(scaled.params.at("amplitude") == Approx(k * base.params.at("amplitude")).epsilon(1e-9));
  }
}

TEST_CASE("fit_scurve under relative noise with annual data") {
  // sigma = 2% of each value, 1850-2100 annually, growth parameter 1/E.
  // Measured p90 halftime error 0.86 yr; Cramer-Rao bound 0.61 yr.
  const auto years = year_grid(1850, 2100, 1);
  SCurveFitOptions opt;
  opt.growth_param = 1.0 / kC.E;
  std::vector<double> err;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<unsigned>(seed));
    std::normal_distribution<double> noise(0.0, 0.02);
    const auto fit = fit_scurve(sample(years, [&](double t) { return evolution(t, kC) * (1.0 + noise(rng)); }), opt);
    REQUIRE(fit.converged);
    err.push_back(std::abs(fit.params.at("halftime") - 2040.0));
  }
  CHECK(p90(err) < 1.0);
}

TEST_CASE("fit_recovery on noiseless data") {
  const auto years = year_grid(1850, 2100, 5);
  const auto japan = RecoveryCurve::from(*find_nation("Japan"), kC);
  const auto rep = fit_recovery(sample(years, [&](double t) { return national_gdp(t, japan); }), kC);
  REQUIRE(rep.converged);
  CHECK(rep.params.at("beta") == Approx(0.09).epsilon(1e-6));
  CHECK(rep.params.at("tau") == Approx(1971.0).epsilon(1e-6));
  CHECK(rep.params.count("beta_initial") == 1);
  CHECK(rep.params.count("tau_initial") == 1);
  CHECK(std::abs(rep.params.at("tau_initial") - 1971.0) < 10.0);
}

TEST_CASE("property: fit_recovery round trip over random parameters") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> beta_dist(0.03, 0.12);
  std::uniform_real_distribution<double> tau_dist(1950.0, 2050.0);
  const auto years = year_grid(1850, 2100, 5);
  for (int i = 0; i < 40; ++i) {
    const double beta = beta_dist(rng);
    const double tau = tau_dist(rng);
    CAPTURE(beta);
    CAPTURE(tau);
    const auto r = RecoveryCurve::from(beta, tau, kC);
    const auto rep = fit_recovery(sample(years, [&](double t) { return national_gdp(t, r); }), kC);
    REQUIRE(rep.converged);
    CHECK(std::abs(rep.params.at("beta") - beta) < 1e-6 * beta);
    CHECK(std::abs(rep.params.at("tau") - tau) < 1e-6 * tau);
  }
}

TEST_CASE("fit_recovery under relative noise") {
  // Japan, sigma = 2% of each value at 5-yr spacing. Measured p90: beta 0.0034, tau 0.86 yr.
  const auto years = year_grid(1850, 2100, 5);
  const auto japan = RecoveryCurve::from(*find_nation("Japan"), kC);
  std::vector<double> eb, et;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<unsigned>(seed));
    std::normal_distribution<double> noise(0.0, 0.02);
    const auto rep =
        fit_recovery(sample(years, [&](double t) { return national_gdp(t, japan) * (1.0 + noise(rng)); }), kC);
    REQUIRE(rep.converged);
    eb.push_back(std::abs(rep.params.at("beta") - 0.09));
    et.push_back(std::abs(rep.params.at("tau") - 1971.0));
  }
  CHECK(p90(eb) < 0.005);
  CHECK(p90(et) < 1.0);
}

TEST_CASE("fit_recovery guards") {
  const auto years = year_grid(1900, 2000, 5);
  const auto above = sample(years, [](double t) { return 1.1 * evolution(t, kC); });
  CHECK_THROWS_AS(fit_recovery(above, kC), EstimationError);
  CHECK_THROWS_AS(fit_recovery(sample(year_grid(1900, 1915, 5), [](double) { return 1.0; }), kC), DomainError);
  const auto flat = fit_recovery(sample(years, [](double) { return 1000.0; }), kC);
  CHECK_FALSE(flat.converged);
  CHECK_FALSE(flat.message.empty());
}

TEST_CASE("time shift between evolution curves") {
  const auto years = year_grid(1700, 2500, 1);
  const auto b = sample(years, [](double t) { return evolution(t, kC); });
  const auto a = sample(years, [](double t) { return evolution(t + 21.0, kC); });
  CHECK(std::abs(measure_time_shift(a, b) - 21.0) < 0.25);
  CHECK(std::abs(measure_time_shift(b, a) + 21.0) < 0.25);
  CHECK(std::abs(measure_time_shift(b, b)) < 1e-12);

  // Capital against GDP on the evolution alone gives Delta T.
  const auto capital = sample(years, [](double t) { return evolution_capital(t, 0.2, kC); });
  CHECK(std::abs(measure_time_shift(b, capital) - delta_T(kC)) < 0.25);
}

TEST_CASE("time shift between recovery components") {
  const double beta = 0.09;
  const double shift = delta_tau(beta, kC);
  const auto years = year_grid(1850, 2150, 1);
  auto component = [&](double tau) {
    return sample(years, [=](double t) { return scurve(t, SCurve{kC.a_bar, tau, beta, 0.0}); });
  };
  const auto gdp = component(1970.0);
  const auto capital = component(1970.0 + shift);
  CHECK(std::abs(measure_time_shift(gdp, capital) - 13.1) < 0.25);
  CHECK(std::abs(measure_time_shift(gdp, capital) + measure_time_shift(capital, gdp)) < 0.25);
}

TEST_CASE("property: time shift is antisymmetric") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lag_dist(-40.0, 40.0);
  std::uniform_real_distribution<double> g_dist(0.02, 0.12);
  const auto years = year_grid(1800, 2300, 1);
  for (int i = 0; i < 20; ++i) {
    const double lag = lag_dist(rng);
    const double g = g_dist(rng);
    const auto a = sample(years, [=](double t) { return scurve(t, SCurve{1.0, 2050.0, g, 0.0}); });
    const auto b = sample(years, [=](double t) { return scurve(t, SCurve{1.0, 2050.0 + lag, g, 0.0}); });
    const double ab = measure_time_shift(a, b);
    CHECK(std::abs(ab - lag) < 0.25);
    CHECK(std::abs(ab + measure_time_shift(b, a)) < 0.25);
  }
}

TEST_CASE("time shift with a fitted scale on truncated series") {
  // Both series stop before saturation, so unit-maximum normalisation is biased.
  const auto years = year_grid(1900, 2030, 1);
  const auto gdp = sample(years, [](double t) { return evolution(t, kC); });
  const auto capital = sample(years, [](double t) { return evolution_capital(t, 0.2, kC); });
  ShiftOptions opt;
  opt.fit_scale = true;
  CHECK(std::abs(measure_time_shift(gdp, capital, opt) - delta_T(kC)) < 0.25);
}

TEST_CASE("time shift errors") {
  const auto a = sample(year_grid(1900, 1950, 1), [](double t) { return evolution(t, kC); });
  const auto late = sample(year_grid(1930, 2000, 1), [](double t) { return evolution(t, kC); });
  CHECK_THROWS_AS(measure_time_shift(a, late), EstimationError);
  const auto flat = sample(year_grid(1900, 1950, 1), [](double) { return 3.0; });
  CHECK_THROWS_AS(measure_time_shift(a, flat), EstimationError);
  ShiftOptions bad;
  bad.resolution = 0.0;
  CHECK_THROWS_AS(measure_time_shift(a, a, bad), DomainError);
}

TEST_CASE("constants from shifts") {
  const auto lc = constants_from_shifts(21.01, 13.10, 0.09);
  CHECK(std::abs(lc.G - 25.0) < 0.1);
  CHECK(std::abs(lc.E - 62.0) < 0.5);

  // Exact inverse of the forward delays.
  const auto exact = constants_from_shifts(delta_T(kC), delta_tau(0.09, kC), 0.09);
  CHECK(exact.G == Approx(25.0).epsilon(1e-12));
  CHECK(exact.E == Approx(62.0).epsilon(1e-9));

  CHECK_THROWS_AS(constants_from_shifts(0.0, 13.1, 0.09), EstimationError);
  CHECK_THROWS_AS(constants_from_shifts(21.0, 13.1, 0.0), EstimationError);
  // Delta T cannot exceed G.
  CHECK_THROWS_AS(constants_from_shifts(30.0, 13.1, 0.09), EstimationError);
}
