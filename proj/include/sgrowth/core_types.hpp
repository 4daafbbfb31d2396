#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sgrowth {

/// Raised when an operation is evaluated outside the region where its
/// formula is defined (zero denominators, rates of the wrong sign, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Universal constants of the growth theory.
///
/// Working time is a fraction of the annual maximum `eps_bar` (96 hours per
/// week), so `eps_bar` is 1.0 and every working time lies in (0, 1].
/// Monetary amounts are US$ of 1991 per capita.
struct ModelConstants {
  double E = 62.0;          ///< evolution constant, lifetime of human capacity [yr]
  double G = 25.0;          ///< generation constant, lifetime of physical capital [yr]
  double eps_bar = 1.0;     ///< maximum annual working time
  double y0 = 900.0;        ///< agricultural GDP per capita [US$ p.a.]
  double a_bar = 75000.0;   ///< asymptotic GDP per capita [US$ p.a.]
  double T = 2040.0;        ///< halftime of the industrial evolution [calendar yr]
  double L0 = 30.0;         ///< pre-industrial life expectancy [yr]
  double L_bar = 118.0;     ///< maximum unisex life expectancy [yr]
  double T_L = 1981.0;      ///< halftime of the life-expectancy curve [calendar yr]

  /// Human-readable list of violated invariants; empty when valid.
  [[nodiscard]] std::vector<std::string> violations() const;

  /// Sets a field by its short name ("E", "a_bar", ...). Throws
  /// std::invalid_argument on an unknown key.
  void set(std::string_view key, double value);
};

ModelConstants default_constants();

/// Hours per week represented by a working time of 1.0.
inline constexpr double kHoursPerWeekAtFullTime = 96.0;

/// Per-nation recovery parameters.
struct NationParams {
  std::string name;
  double tau = 0.0;      ///< halftime of the national recovery [calendar yr]
  double mu_bar = 0.0;   ///< gross fixed capital share
  double mu_e = 0.0;     ///< entrance value of the capital function
  double beta = 0.0;     ///< initial growth rate of recovery [1/yr]
  std::optional<double> nu_bar;  ///< gross fixed capacity share; default 4/(eps_bar E)
  std::optional<double> mu_w;    ///< employed-capital share; default 0.15

  [[nodiscard]] double nu_bar_or_default(const ModelConstants& c) const;
  [[nodiscard]] double mu_w_or_default() const { return mu_w.value_or(0.15); }

  /// Hard invariant violations (shares ordering, positive rate, halftime range).
  [[nodiscard]] std::vector<std::string> violations() const;

  /// Soft modelling warnings, currently beta <= 1/E. Not enforced.
  [[nodiscard]] std::vector<std::string> warnings(const ModelConstants& c) const;
};

/// The five reference nations: USA, Germany, Japan, Korea, China.
const std::vector<NationParams>& reference_nations();

/// Case-insensitive lookup in reference_nations(); nullopt if unknown.
std::optional<NationParams> find_nation(std::string_view name);

enum class Unit { CurrencyFlow, CurrencyStock, Years, DimensionlessFraction };

std::string_view to_string(Unit u);
/// Parses "currency-flow", "currency-stock", "years", "dimensionless-fraction".
std::optional<Unit> parse_unit(std::string_view tag);

/// A time-indexed sequence of values at integer calendar years.
///
/// Years are strictly increasing and values finite; the constructor checks
/// both and throws std::invalid_argument otherwise.
class AnnualSeries {
 public:
  AnnualSeries() = default;
  AnnualSeries(std::vector<int> years, Eigen::ArrayXd values,
               Unit unit = Unit::CurrencyFlow);

  [[nodiscard]] const std::vector<int>& years() const { return years_; }
  [[nodiscard]] const Eigen::ArrayXd& values() const { return values_; }
  [[nodiscard]] Unit unit() const { return unit_; }
  [[nodiscard]] std::size_t size() const { return years_.size(); }
  [[nodiscard]] bool empty() const { return years_.empty(); }

  /// Years as doubles, convenient for vectorised curve evaluation.
  [[nodiscard]] Eigen::ArrayXd times() const;

  /// Value at `year`, or nullopt when the year is absent.
  [[nodiscard]] std::optional<double> at(int year) const;

  [[nodiscard]] AnnualSeries scaled(double factor) const;
  [[nodiscard]] AnnualSeries with_unit(Unit u) const;

  friend bool operator==(const AnnualSeries& a, const AnnualSeries& b);

 private:
  std::vector<int> years_;
  Eigen::ArrayXd values_;
  Unit unit_ = Unit::CurrencyFlow;
};

/// Simple S-function: floor + amplitude / (1 + exp((halftime - t) * growth_param)).
struct SCurve {
  double amplitude = 0.0;
  double halftime = 0.0;
  double growth_param = 0.0;
  double floor = 0.0;
};

/// Two-term recovery S-function of a nation converging into the evolution.
struct RecoveryCurve {
  double a_bar = 0.0;
  double T = 0.0;
  double E = 0.0;
  double beta = 0.0;
  double tau = 0.0;

  static RecoveryCurve from(const NationParams& n, const ModelConstants& c) {
    return {c.a_bar, c.T, c.E, n.beta, n.tau};
  }
  static RecoveryCurve from(double beta, double tau, const ModelConstants& c) {
    return {c.a_bar, c.T, c.E, beta, tau};
  }
  /// True when beta > 1/E, i.e. the recovery outruns the envelope.
  [[nodiscard]] bool converges_from_below() const { return beta * E > 1.0; }
};

struct FitReport {
  std::map<std::string, double> params;
  double rss = 0.0;
  std::size_t n_points = 0;
  bool converged = false;
  int iterations = 0;
  std::string message;
};

}  // namespace sgrowth
