#include "sgrowth/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "sgrowth/dataio.hpp"
#include "sgrowth/estimation.hpp"
#include "sgrowth/growth_model.hpp"
#include "sgrowth/svg_plot.hpp"
#include "sgrowth/validation.hpp"

namespace sgrowth::cli {

namespace {

// Thrown for bad parameter combinations detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::vector<std::string> constants;
};

ModelConstants constants_from(const CommonArgs& a, std::ostream& err) {
  ModelConstants c = default_constants();
  for (const auto& kv : a.constants) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--constants expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string text = kv.substr(eq + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw UsageError("--constants: '" + text + "' is not a number");
    }
    try {
      c.set(key, v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  for (const auto& v : c.violations()) err << "warning: " << v << '\n';
  return c;
}

struct NationArgs {
  std::string nation;
  CLI::Option* nation_opt = nullptr;
  double beta = 0.0, tau = 0.0, mu_bar = 0.0, mu_e = 0.0, mu_w = 0.15;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* mu_bar_opt = nullptr;
  CLI::Option* mu_e_opt = nullptr;
  CLI::Option* mu_w_opt = nullptr;

  void attach(CLI::App* app) {
    nation_opt = app->add_option("--nation", nation, "reference nation (USA, Germany, Japan, Korea, China)");
    beta_opt = app->add_option("--beta", beta, "recovery rate [1/yr]");
    tau_opt = app->add_option("--tau", tau, "recovery halftime [calendar yr]");
    mu_bar_opt = app->add_option("--mu-bar", mu_bar, "gross fixed capital share");
    mu_e_opt = app->add_option("--mu-e", mu_e, "entrance value of the capital function");
    mu_w_opt = app->add_option("--mu-w", mu_w, "employed-capital share (default 0.15)");
  }

  // Only --mu-bar given: capital of the evolution without a recovery term.
  [[nodiscard]] bool evolution_only() const {
    return mu_bar_opt->count() && !nation_opt->count() && !beta_opt->count() && !tau_opt->count() &&
           !mu_e_opt->count();
  }

  [[nodiscard]] bool any() const {
    return nation_opt->count() || beta_opt->count() || tau_opt->count() || mu_bar_opt->count() ||
           mu_e_opt->count();
  }

  // Preset first, then explicit overrides. mu_bar follows from beta and mu_e
  // when only those are given.
  NationParams resolve(const ModelConstants& c, bool need_capital, std::ostream& err) const {
    NationParams n;
    n.name = "custom";
    if (nation_opt->count()) {
      const auto preset = find_nation(nation);
      if (!preset) throw UsageError("unknown nation '" + nation + "'");
      n = *preset;
    } else if (!beta_opt->count() || !tau_opt->count()) {
      throw UsageError("give --nation or both --beta and --tau");
    }
    if (beta_opt->count()) n.beta = beta;
    if (tau_opt->count()) n.tau = tau;
    if (mu_e_opt->count()) n.mu_e = mu_e;
    if (mu_bar_opt->count()) {
      n.mu_bar = mu_bar;
    } else if (!nation_opt->count() && mu_e_opt->count()) {
      n.mu_bar = mu_bar_required(n.beta, n.mu_e, c);
    }
    if (mu_w_opt->count()) n.mu_w = mu_w;
    if (!(n.beta > 0)) throw UsageError("--beta must be positive");
    if (need_capital && !(n.mu_bar > 0)) {
      throw UsageError("capital needs --mu-bar (or --mu-e with --beta)");
    }
    for (const auto& w : n.warnings(c)) err << "warning: " << w << '\n';
    return n;
  }
};

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty()) return fallback;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  return file;
}

void finish_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return;
  file.flush();
  if (!file) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string curve;
  double from = 1800.0, to = 2100.0, step = 1.0;
  bool hours = false;
  std::string output;
  NationArgs nation;
};

int cmd_eval(const EvalArgs& a, const CommonArgs& common, std::ostream& out, std::ostream& err) {
  const ModelConstants c = constants_from(common, err);
  if (!(a.step > 0)) throw UsageError("--step must be positive");
  if (a.to < a.from) throw UsageError("--to must not precede --from");

  std::function<double(double)> f;
  Unit unit = Unit::CurrencyFlow;
  if (a.curve == "evolution") {
    f = [c](double t) { return evolution(t, c); };
  } else if (a.curve == "national") {
    const auto r = RecoveryCurve::from(a.nation.resolve(c, false, err), c);
    f = [r](double t) { return national_gdp(t, r); };
  } else if (a.curve == "capital") {
    if (a.nation.evolution_only()) {
      const double mu_bar = a.nation.mu_bar;
      f = [mu_bar, c](double t) { return evolution_capital(t, mu_bar, c); };
    } else {
      const auto n = a.nation.resolve(c, true, err);
      f = [n, c](double t) { return capital(t, n, c); };
    }
    unit = Unit::CurrencyStock;
  } else if (a.curve == "life") {
    f = [c](double t) { return life_expectancy(t, c); };
    unit = Unit::Years;
  } else {
    const double scale = a.hours ? kHoursPerWeekAtFullTime : 1.0;
    if (a.nation.any()) {
      const auto n = a.nation.resolve(c, false, err);
      f = [n, c, scale](double t) { return scale * working_time_path(t, n, c); };
    } else {
      const double mu_w = a.nation.mu_w;
      f = [mu_w, c, scale](double t) { return scale * working_time_path(t, mu_w, c); };
    }
    unit = Unit::DimensionlessFraction;
  }

  std::ofstream file;
  std::ostream& o = open_output(a.output, file, out);
  o << "year,value,unit=" << to_string(unit) << '\n';
  const auto n = static_cast<long>(std::floor((a.to - a.from) / a.step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double t = a.from + static_cast<double>(i) * a.step;
    o << format_number(t) << ',' << format_number(f(t)) << '\n';
  }
  finish_output(a.output, file);
  return kOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string mode;
  std::string input;
  double growth_param = 0.0;
  CLI::Option* growth_opt = nullptr;
  double floor = 0.0;
  std::string output;
};

void print_report(std::ostream& o, const FitReport& rep) {
  for (const auto& [k, v] : rep.params) o << k << " = " << format_number(v) << '\n';
  o << "rss = " << format_number(rep.rss) << '\n'
    << "n_points = " << rep.n_points << '\n'
    << "iterations = " << rep.iterations << '\n'
    << "converged = " << (rep.converged ? "true" : "false") << '\n';
  if (!rep.message.empty()) o << "message = " << rep.message << '\n';
}

int cmd_fit(const FitArgs& a, const CommonArgs& common, std::ostream& out, std::ostream& err) {
  const ModelConstants c = constants_from(common, err);
  const auto series = read_csv(a.input);
  FitReport rep;
  std::function<double(double)> fitted;
  if (a.mode == "scurve") {
    SCurveFitOptions opt;
    if (a.growth_opt->count()) opt.growth_param = a.growth_param;
    opt.floor = a.floor;
    rep = fit_scurve(series, opt);
    if (rep.converged) {
      const auto sc = scurve_from(rep, a.floor);
      fitted = [sc](double t) { return scurve(t, sc); };
    }
  } else {
    rep = fit_recovery(series, c);
    if (rep.converged) {
      const auto r = RecoveryCurve::from(rep.params.at("beta"), rep.params.at("tau"), c);
      fitted = [r](double t) { return national_gdp(t, r); };
    }
  }
  print_report(out, rep);
  if (!a.output.empty() && fitted) {
    Eigen::ArrayXd v(static_cast<Eigen::Index>(series.size()));
    for (std::size_t i = 0; i < series.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = fitted(static_cast<double>(series.years()[i]));
    }
    write_csv(a.output, AnnualSeries(series.years(), v, series.unit()));
  }
  if (!rep.converged) {
    err << "fit did not converge" << (rep.message.empty() ? "" : ": " + rep.message) << '\n';
    return kFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// shift

struct ShiftArgs {
  std::string input_a, input_b;
  ShiftOptions opt;
  bool infer = false;
  double beta = 0.0;
  CLI::Option* beta_opt = nullptr;
  double recovery_shift = 0.0;
  CLI::Option* recovery_shift_opt = nullptr;
  std::vector<std::string> recovery_pair;
};

int cmd_shift(const ShiftArgs& a, std::ostream& out) {
  const double shift = measure_time_shift(read_csv(a.input_a), read_csv(a.input_b), a.opt);
  out << "shift = " << format_number(shift) << " yr\n";
  if (!a.infer) return kOk;

  if (!a.beta_opt->count()) throw UsageError("--infer-constants needs --beta");
  double recovery = 0.0;
  if (!a.recovery_pair.empty()) {
    recovery = measure_time_shift(read_csv(a.recovery_pair[0]), read_csv(a.recovery_pair[1]), a.opt);
    out << "recovery_shift = " << format_number(recovery) << " yr\n";
  } else if (a.recovery_shift_opt->count()) {
    recovery = a.recovery_shift;
  } else {
    throw UsageError("--infer-constants needs --recovery-pair or --recovery-shift");
  }
  const auto lc = constants_from_shifts(shift, recovery, a.beta);
  out << "E = " << format_number(lc.E) << " yr\n"
      << "G = " << format_number(lc.G) << " yr\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// plot

struct PlotArgs {
  std::string figure;
  std::vector<std::string> data;
  std::string nation = "Germany";
  int from = 0, to = 0;
  CLI::Option* from_opt = nullptr;
  CLI::Option* to_opt = nullptr;
  std::string output;
};

// Axis and display scale of a data overlay, by figure and unit.
std::pair<plot::Axis, double> overlay_placement(const std::string& figure, Unit u) {
  const bool money = u == Unit::CurrencyFlow || u == Unit::CurrencyStock;
  if (figure == "fig1") {
    if (money) return {plot::Axis::Right, 1e-3};
    return {plot::Axis::Left, u == Unit::DimensionlessFraction ? kHoursPerWeekAtFullTime : 1.0};
  }
  if (figure == "fig3") return {plot::Axis::Left, money ? 1e-3 : 1.0};
  if (figure == "fig4") return {money ? plot::Axis::Right : plot::Axis::Left, money ? 1e-3 : 1.0};
  return {plot::Axis::Left, 1.0};
}

int cmd_plot(const PlotArgs& a, const CommonArgs& common, std::ostream& out, std::ostream& err) {
  const ModelConstants c = constants_from(common, err);
  const auto preset = find_nation(a.nation);
  if (!preset) throw UsageError("unknown nation '" + a.nation + "'");
  auto range = [&](plot::Years def) {
    plot::Years y{a.from_opt->count() ? a.from : def.first, a.to_opt->count() ? a.to : def.second};
    if (y.second <= y.first) throw UsageError("--to must follow --from");
    return y;
  };

  plot::Figure fig;
  if (a.figure == "fig1") {
    fig = plot::working_time_figure(*preset, c, range({1800, 2100}));
  } else if (a.figure == "fig3") {
    fig = plot::time_shift_figure(*preset, c, range({1850, 2100}));
  } else if (a.figure == "fig4") {
    std::vector<NationParams> shown;
    for (const char* name : {"USA", "Germany", "Japan", "Korea"}) shown.push_back(*find_nation(name));
    fig = plot::recoveries_figure(shown, c, range({1850, 2100}));
  } else {
    if (a.data.empty()) throw UsageError("plot custom needs at least one --data file");
    fig.title = "Annual series";
    fig.x_label = "year";
  }

  std::optional<Unit> first_unit;
  for (const auto& path : a.data) {
    const auto s = read_csv(path);
    const std::string label = std::filesystem::path(path).stem().string();
    if (a.figure == "custom") {
      if (!first_unit) {
        first_unit = s.unit();
        fig.left_label = std::string(to_string(s.unit()));
      }
      const bool right = s.unit() != *first_unit;
      if (right) fig.right_label = std::string(to_string(s.unit()));
      fig.series.push_back(plot::data_series(s, label, right ? plot::Axis::Right : plot::Axis::Left));
    } else {
      const auto [axis, scale] = overlay_placement(a.figure, s.unit());
      fig.series.push_back(plot::data_series(s, label, axis, scale));
    }
  }

  if (a.output.empty()) {
    out << plot::render_svg(fig);
  } else {
    plot::write_svg(a.output, fig);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physical growth model: curves, fits, time shifts, validation and plots", "sgrowth"};
  app.require_subcommand(1);
  CommonArgs common;
  auto add_constants = [&](CLI::App* sub) {
    sub->add_option("--constants", common.constants, "override a model constant, key=value")
        ->type_name("KEY=VALUE");
  };

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "evaluate a model curve on a year grid, CSV output");
  eval->add_option("curve", ea.curve, "curve")
      ->required()
      ->check(CLI::IsMember({"evolution", "national", "capital", "life", "working-time"}));
  eval->add_option("--from", ea.from, "first year")->capture_default_str();
  eval->add_option("--to", ea.to, "last year")->capture_default_str();
  eval->add_option("--step", ea.step, "step in years")->capture_default_str();
  eval->add_flag("--hours", ea.hours, "working time in hours per week instead of a fraction");
  eval->add_option("--output,-o", ea.output, "CSV file (default stdout)");
  ea.nation.attach(eval);
  add_constants(eval);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit an S-curve or a national recovery to a CSV series");
  fit->add_option("mode", fa.mode, "scurve or recovery")
      ->required()
      ->check(CLI::IsMember({"scurve", "recovery"}));
  fit->add_option("input", fa.input, "CSV series")->required();
  fa.growth_opt = fit->add_option("--growth-param", fa.growth_param, "fix the S-curve growth parameter [1/yr]");
  fit->add_option("--floor", fa.floor, "S-curve floor (e.g. 30 for life expectancy)");
  fit->add_option("--output,-o", fa.output, "write the fitted curve at the input years");
  add_constants(fit);

  ShiftArgs sa;
  auto* shift = app.add_subcommand("shift", "measure the lag by which series B trails series A");
  shift->add_option("input_a", sa.input_a, "CSV series A")->required();
  shift->add_option("input_b", sa.input_b, "CSV series B")->required();
  shift->add_option("--resolution", sa.opt.resolution, "lag scan step [yr]")->capture_default_str();
  shift->add_option("--max-lag", sa.opt.max_lag, "largest lag scanned [yr]")->capture_default_str();
  shift->add_option("--min-overlap", sa.opt.min_overlap, "shortest overlap [yr]")->capture_default_str();
  shift->add_flag("--fit-scale", sa.opt.fit_scale, "fit the amplitude ratio at every lag");
  shift->add_flag("--infer-constants", sa.infer, "infer E and G from this and a recovery shift");
  sa.beta_opt = shift->add_option("--beta", sa.beta, "recovery rate of the nation [1/yr]");
  sa.recovery_shift_opt = shift->add_option("--recovery-shift", sa.recovery_shift, "recovery shift [yr]");
  shift->add_option("--recovery-pair", sa.recovery_pair, "GDP and capital CSV of a recovery")
      ->expected(2);

  auto* validate = app.add_subcommand("validate", "check the model against its reference values");
  add_constants(validate);

  PlotArgs pa;
  auto* plotcmd = app.add_subcommand("plot", "write an SVG figure");
  plotcmd->add_option("figure", pa.figure, "fig1, fig3, fig4 or custom")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig3", "fig4", "custom"}));
  plotcmd->add_option("--data", pa.data, "CSV series drawn as markers");
  plotcmd->add_option("--nation", pa.nation, "nation for fig1 and fig3")->capture_default_str();
  pa.from_opt = plotcmd->add_option("--from", pa.from, "first year");
  pa.to_opt = plotcmd->add_option("--to", pa.to, "last year");
  plotcmd->add_option("--output,-o", pa.output, "SVG file (default stdout)");
  add_constants(plotcmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*eval) return cmd_eval(ea, common, out, err);
    if (*fit) return cmd_fit(fa, common, out, err);
    if (*shift) return cmd_shift(sa, out);
    if (*plotcmd) return cmd_plot(pa, common, out, err);
    const auto checks = run_validation(constants_from(common, err));
    print_validation(out, checks);
    return summarize(checks).fail == 0 ? kOk : kFailure;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const EstimationError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"sgrowth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sgrowth::cli
