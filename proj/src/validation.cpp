#include "sgrowth/validation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sgrowth/estimation.hpp"
#include "sgrowth/growth_model.hpp"

namespace sgrowth {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Check within(std::string name, double expected, double computed, double tol) {
  const bool ok = std::abs(computed - expected) <= tol;
  return {std::move(name), expected, computed, ok ? CheckStatus::Pass : CheckStatus::Fail,
          "|diff| <= " + fmt("%g", tol)};
}

Check below(std::string name, double bound, double computed) {
  return {std::move(name), bound, computed, computed < bound ? CheckStatus::Pass : CheckStatus::Fail,
          "computed < expected"};
}

// PASS strictly inside pass_tol, WARN up to warn_tol, FAIL beyond.
Check band(std::string name, double expected, double computed, double pass_tol, double warn_tol) {
  const double d = std::abs(computed - expected);
  CheckStatus s = CheckStatus::Fail;
  if (d < pass_tol - 1e-9) {
    s = CheckStatus::Pass;
  } else if (d <= warn_tol + 1e-9) {
    s = CheckStatus::Warn;
  }
  return {std::move(name), expected, computed, s,
          "PASS |diff| < " + fmt("%g", pass_tol) + ", WARN <= " + fmt("%g", warn_tol)};
}

// Reconstructed working time may not reach 96 h/wk exactly, only approach it.
constexpr double kHoursTolerance = 1.0;

}  // namespace

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Warn: return "WARN";
    case CheckStatus::Fail: return "FAIL";
  }
  return "FAIL";
}

std::vector<Check> run_validation(const ModelConstants& c) {
  std::vector<Check> out;
  const auto ref = default_constants();

  out.push_back(within("evolution constant E [yr]", ref.E, c.E, 0.0));
  out.push_back(within("generation constant G [yr]", ref.G, c.G, 0.0));
  out.push_back(within("maximum working time eps_bar", ref.eps_bar, c.eps_bar, 0.0));
  out.push_back(within("agricultural GDP y0 [US$]", ref.y0, c.y0, 0.0));
  out.push_back(within("final amplitude a_bar [US$]", ref.a_bar, c.a_bar, 0.0));
  out.push_back(within("evolution halftime T", ref.T, c.T, 0.0));
  out.push_back(within("life expectancy floor L0 [yr]", ref.L0, c.L0, 0.0));
  out.push_back(within("maximum life expectancy L_bar [yr]", ref.L_bar, c.L_bar, 0.0));
  out.push_back(within("life expectancy halftime T_L", ref.T_L, c.T_L, 0.0));
  out.push_back(within("halftime shift T - T_L [yr]", 59.0, c.T - c.T_L, 0.5));
  out.push_back(within("halftime shift vs L_bar/2 [yr]", c.L_bar / 2.0, c.T - c.T_L, 0.5));

  const double dT = delta_T(c);
  out.push_back(within("capital delay of the evolution [yr]", 21.0, dT, 0.1));
  out.push_back(within("exp(shift/E) = 1 + G/E", 1.0 + c.G / c.E, std::exp(dT / c.E),
                       1e-14 * (1.0 + c.G / c.E)));

  for (const auto& n : reference_nations()) {
    out.push_back(band("support-share beta, " + n.name, n.beta, beta_from_support(n.mu_bar, n.mu_e, c),
                       kRatePass, kRateWarn));
  }
  const auto china = *find_nation("China");
  out.push_back(band("China saturated mu_bar G eps_bar", 8.0, china.mu_bar * c.G * c.eps_bar, 1e-9,
                     0.5));

  // Equilibrium and production.
  out.push_back(within("initial working time w0", c.eps_bar, working_time(c.y0, c.y0, c), 1e-15));
  out.push_back(below("GDP below eps_bar h_s for k_w = 1e12", c.eps_bar * 25000.0,
                      production(25000.0, 1e12, c)));
  const double mu0 = 1.0 / (c.eps_bar * c.G);
  out.push_back(within("agricultural capital k0/y0", 1.0,
                       maintenance_stocks(c.y0, mu0, 1.0, c).k / c.y0, 1e-12));

  // Human capacity.
  const double nu0 = 1.0 / (c.eps_bar * c.E);
  out.push_back(within("capacity share at start, nu_bar = 2 nu0", nu0,
                       capacity_function(1.0 / c.E, 2.0 * nu0, c), 1e-15));
  const double nu_plot = 4.0 * nu0;
  const double h_start = maintenance_stocks(c.y0, mu0, capacity_function(1.0 / c.E, nu_plot, c), c).h;
  const double h_top = maintenance_stocks(c.a_bar, mu0, capacity_function(0.0, nu_plot, c), c).h;
  out.push_back(within("capacity lower bound 2 y0/eps_bar", 2.0 * c.y0 / c.eps_bar, h_start,
                       1e-9 * c.y0));
  out.push_back(within("capacity upper bound 4 a_bar/eps_bar", 4.0 * c.a_bar / c.eps_bar, h_top,
                       1e-9 * c.a_bar));
  const double mu_w = 0.15;
  const double factor = required_capacity(1.0, mu_w, c);
  out.push_back(below("required capacity h_s/y, mu_w = 0.15", 1.4 / c.eps_bar, factor));
  out.push_back(within("required share h_s/h", 1.0 / 3.0, factor * c.a_bar / h_top, 0.01));

  // Life expectancy.
  out.push_back(within("life expectancy at T_L [yr]", (c.L0 + c.L_bar) / 2.0,
                       life_expectancy(c.T_L, c), 1e-12));

  // Working time around 1800 (UK and Germany).
  out.push_back(within("working time in 1800, Germany [h/wk]", kHoursPerWeekAtFullTime,
                       kHoursPerWeekAtFullTime * working_time_path(1800.0, *find_nation("Germany"), c),
                       kHoursTolerance));

  // Shifts measured from the curves and inverted back to the constants.
  std::vector<int> years;
  for (int t = 1700; t <= 2500; ++t) years.push_back(t);
  Eigen::ArrayXd gdp(static_cast<Eigen::Index>(years.size()));
  Eigen::ArrayXd cap(gdp.size());
  for (std::size_t i = 0; i < years.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    gdp(k) = evolution(static_cast<double>(years[i]), c);
    cap(k) = evolution_capital(static_cast<double>(years[i]), 0.25, c);
  }
  // E is ill-conditioned in the shift (dE/dshift ~ 20), so the GDP is scaled
  // to the capital amplitude by least squares rather than by its maximum.
  ShiftOptions shift_opt;
  shift_opt.fit_scale = true;
  const double measured =
      measure_time_shift(AnnualSeries(years, gdp), AnnualSeries(years, cap), shift_opt);
  out.push_back(within("measured evolution shift [yr]", 21.0, measured, 0.25));
  const auto lc = constants_from_shifts(measured, delta_tau(0.09, c), 0.09);
  out.push_back(within("E from measured shifts [yr]", ref.E, lc.E, 0.5));
  out.push_back(within("G from measured shifts [yr]", ref.G, lc.G, 0.1));

  const auto de = *find_nation("Germany");
  out.push_back(within("Germany capital asymptote [US$]", de.mu_bar * c.G * c.a_bar,
                       capital(1e5, de, c), 1e-9 * c.a_bar));
  return out;
}

ValidationSummary summarize(const std::vector<Check>& checks) {
  ValidationSummary s;
  for (const auto& ch : checks) {
    switch (ch.status) {
      case CheckStatus::Pass: ++s.pass; break;
      case CheckStatus::Warn: ++s.warn; break;
      case CheckStatus::Fail: ++s.fail; break;
    }
  }
  return s;
}

void print_validation(std::ostream& out, const std::vector<Check>& checks) {
  char line[256];
  std::snprintf(line, sizeof line, "%-42s %14s %14s  %-6s %s\n", "check", "expected", "computed", "status", "rule");
  out << line;
  for (const auto& ch : checks) {
    std::snprintf(line, sizeof line, "%-42s %14.6g %14.6g  %-6s %s\n", ch.name.c_str(), ch.expected,
                  ch.computed, std::string(to_string(ch.status)).c_str(), ch.rule.c_str());
    out << line;
  }
  const auto s = summarize(checks);
  out << checks.size() << " checks: " << s.pass << " PASS, " << s.warn << " WARN, " << s.fail
      << " FAIL\n";
}

}  // namespace sgrowth
