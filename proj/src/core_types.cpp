#include "sgrowth/core_types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace sgrowth {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

ModelConstants default_constants() { return ModelConstants{}; }

std::vector<std::string> ModelConstants::violations() const {
  std::vector<std::string> out;
  if (!(E > G && G > 0.0)) out.emplace_back("require E > G > 0");
  if (eps_bar != 1.0) out.emplace_back("eps_bar must be exactly 1.0");
  if (!(a_bar > y0 && y0 > 0.0)) out.emplace_back("require a_bar > y0 > 0");
  if (!(T_L < T)) out.emplace_back("require T_L < T");
  if (std::abs((T - T_L) - L_bar / 2.0) > 0.5) {
    out.emplace_back("require T - T_L = L_bar / 2 within 0.5 yr");
  }
  if (!(L_bar > L0 && L0 >= 0.0)) out.emplace_back("require L_bar > L0 >= 0");
  return out;
}

void ModelConstants::set(std::string_view key, double value) {
  if (key == "E") E = value;
  else if (key == "G") G = value;
  else if (key == "eps_bar") eps_bar = value;
  else if (key == "y0") y0 = value;
  else if (key == "a_bar") a_bar = value;
  else if (key == "T") T = value;
  else if (key == "L0") L0 = value;
  else if (key == "L_bar") L_bar = value;
  else if (key == "T_L") T_L = value;
  else throw std::invalid_argument("unknown constant '" + std::string(key) + "'");
}

double NationParams::nu_bar_or_default(const ModelConstants& c) const {
  return nu_bar.value_or(4.0 / (c.eps_bar * c.E));
}

std::vector<std::string> NationParams::violations() const {
  std::vector<std::string> out;
  if (!(0.0 < mu_e && mu_e < mu_bar && mu_bar < 1.0)) {
    out.emplace_back(name + ": require 0 < mu_e < mu_bar < 1");
  }
  if (!(beta > 0.0)) out.emplace_back(name + ": require beta > 0");
  if (!(tau >= 1800.0 && tau <= 2100.0)) {
    out.emplace_back(name + ": tau outside [1800, 2100]");
  }
  return out;
}

std::vector<std::string> NationParams::warnings(const ModelConstants& c) const {
  std::vector<std::string> out;
  if (beta * c.E <= 1.0) {
    std::ostringstream os;
    os << name << ": beta = " << beta << " does not exceed 1/E = " << 1.0 / c.E
       << "; the recovery cannot converge into the evolution from below";
    out.push_back(os.str());
  }
  return out;
}

const std::vector<NationParams>& reference_nations() {
  static const std::vector<NationParams> rows = {
      {"USA", 1965.0, 0.18, 0.08, 0.05, std::nullopt, std::nullopt},
      {"Germany", 1970.0, 0.25, 0.08, 0.09, std::nullopt, std::nullopt},
      {"Japan", 1971.0, 0.26, 0.08, 0.09, std::nullopt, std::nullopt},
      {"Korea", 2010.0, 0.27, 0.09, 0.08, std::nullopt, std::nullopt},
      {"China", 2040.0, 0.34, 0.11, 0.10, std::nullopt, std::nullopt},
  };
  return rows;
}

std::optional<NationParams> find_nation(std::string_view name) {
  const auto key = lower(name);
  for (const auto& n : reference_nations()) {
    if (lower(n.name) == key) return n;
  }
  return std::nullopt;
}

std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::CurrencyFlow: return "currency-flow";
    case Unit::CurrencyStock: return "currency-stock";
    case Unit::Years: return "years";
    case Unit::DimensionlessFraction: return "dimensionless-fraction";
  }
  return "currency-flow";
}

std::optional<Unit> parse_unit(std::string_view tag) {
  for (Unit u : {Unit::CurrencyFlow, Unit::CurrencyStock, Unit::Years,
                 Unit::DimensionlessFraction}) {
    if (to_string(u) == tag) return u;
  }
  return std::nullopt;
}

AnnualSeries::AnnualSeries(std::vector<int> years, Eigen::ArrayXd values, Unit unit)
    : years_(std::move(years)), values_(std::move(values)), unit_(unit) {
  if (static_cast<Eigen::Index>(years_.size()) != values_.size()) {
    throw std::invalid_argument("AnnualSeries: years and values differ in length");
  }
  for (std::size_t i = 1; i < years_.size(); ++i) {
    if (years_[i] == years_[i - 1]) {
      throw std::invalid_argument("AnnualSeries: duplicate year " +
                                  std::to_string(years_[i]));
    }
    if (years_[i] < years_[i - 1]) {
      throw std::invalid_argument("AnnualSeries: years not increasing at " +
                                  std::to_string(years_[i]));
    }
  }
  if (!values_.isFinite().all()) {
    throw std::invalid_argument("AnnualSeries: non-finite value");
  }
}

Eigen::ArrayXd AnnualSeries::times() const {
  Eigen::ArrayXd t(static_cast<Eigen::Index>(years_.size()));
  for (std::size_t i = 0; i < years_.size(); ++i) t(static_cast<Eigen::Index>(i)) = years_[i];
  return t;
}

std::optional<double> AnnualSeries::at(int year) const {
  auto it = std::lower_bound(years_.begin(), years_.end(), year);
  if (it == years_.end() || *it != year) return std::nullopt;
  return values_(it - years_.begin());
}

AnnualSeries AnnualSeries::scaled(double factor) const {
  return AnnualSeries(years_, values_ * factor, unit_);
}

AnnualSeries AnnualSeries::with_unit(Unit u) const { return AnnualSeries(years_, values_, u); }

bool operator==(const AnnualSeries& a, const AnnualSeries& b) {
  return a.unit_ == b.unit_ && a.years_ == b.years_ &&
         a.values_.size() == b.values_.size() && (a.values_ == b.values_).all();
}

}  // namespace sgrowth
