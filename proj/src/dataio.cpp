#include "sgrowth/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace sgrowth {

namespace {

constexpr std::string_view kHeader = "year,value";
constexpr std::string_view kUnitPrefix = ",unit=";

template <typename T>
bool parse_whole(std::string_view text, T& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

AnnualSeries from_vectors(std::vector<int> years, const std::vector<double>& values, Unit u) {
  return AnnualSeries(std::move(years),
                      Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                                       static_cast<Eigen::Index>(values.size())),
                      u);
}

// Positive value of `ref` at `year`, or throws naming the missing piece.
double positive_at(const AnnualSeries& ref, int year, const char* what) {
  const auto v = ref.at(year);
  if (!v) {
    throw DomainError(std::string(what) + " does not cover year " + std::to_string(year));
  }
  if (!(*v > 0)) {
    throw DomainError(std::string(what) + " is not positive in year " + std::to_string(year));
  }
  return *v;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
      line_(line) {}

AnnualSeries parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line()) throw ParseError(source, 0, "empty file, expected header 'year,value'");
  std::string_view header = line;
  if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  if (header.substr(0, kHeader.size()) != kHeader) {
    throw ParseError(source, line_no, "header must start with 'year,value'");
  }
  header.remove_prefix(kHeader.size());
  Unit unit = Unit::CurrencyFlow;
  if (!header.empty()) {
    if (header.substr(0, kUnitPrefix.size()) != kUnitPrefix) {
      throw ParseError(source, line_no, "unexpected header text '" + std::string(header) + "'");
    }
    header.remove_prefix(kUnitPrefix.size());
    const auto u = parse_unit(header);
    if (!u) throw ParseError(source, line_no, "unknown unit '" + std::string(header) + "'");
    unit = *u;
  }

  std::vector<int> years;
  std::vector<double> values;
  std::size_t blank_at = 0;
  while (next_line()) {
    if (line.empty()) {
      if (!blank_at) blank_at = line_no;
      continue;
    }
    if (blank_at) throw ParseError(source, blank_at, "blank line inside the data");
    const std::string_view rec = line;
    const auto comma = rec.find(',');
    if (comma == std::string_view::npos || rec.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(source, line_no, "expected two fields 'year,value'");
    }
    int year = 0;
    double value = 0.0;
    if (!parse_whole(rec.substr(0, comma), year)) {
      throw ParseError(source, line_no, "invalid year '" + std::string(rec.substr(0, comma)) + "'");
    }
    if (!parse_whole(rec.substr(comma + 1), value) || !std::isfinite(value)) {
      throw ParseError(source, line_no,
                       "invalid value '" + std::string(rec.substr(comma + 1)) + "'");
    }
    if (!years.empty() && year == years.back()) {
      throw ParseError(source, line_no, "duplicate year " + std::to_string(year));
    }
    if (!years.empty() && year < years.back()) {
      throw ParseError(source, line_no,
                       "year " + std::to_string(year) + " follows " + std::to_string(years.back()) +
                           "; years must increase");
    }
    years.push_back(year);
    values.push_back(value);
  }
  if (in.bad()) throw IoError(source + ": read failed");
  return from_vectors(std::move(years), values, unit);
}

AnnualSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

void format_csv(std::ostream& out, const AnnualSeries& s) {
  out << kHeader << kUnitPrefix << to_string(s.unit()) << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.years()[i] << ',' << format_number(s.values()(static_cast<Eigen::Index>(i))) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const AnnualSeries& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  format_csv(out, s);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

AnnualSeries five_year_average(const AnnualSeries& s) {
  if (s.size() < 5) {
    throw DomainError("five_year_average: need at least 5 annual points, got " +
                      std::to_string(s.size()));
  }
  const auto& yr = s.years();
  const auto& v = s.values();
  std::vector<int> years;
  std::vector<double> values;
  for (std::size_t i = 2; i + 2 < s.size(); ++i) {
    if (yr[i + 2] - yr[i - 2] != 4) continue;
    years.push_back(yr[i]);
    values.push_back(v.segment(static_cast<Eigen::Index>(i - 2), 5).mean());
  }
  if (years.empty()) {
    throw DomainError("five_year_average: no run of 5 consecutive years");
  }
  return from_vectors(std::move(years), values, s.unit());
}

AnnualSeries deflate(const AnnualSeries& s, const AnnualSeries& deflator, int base_year) {
  const double base = positive_at(deflator, base_year, "deflator");
  Eigen::ArrayXd out(s.values().size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out(k) = s.values()(k) * base / positive_at(deflator, s.years()[i], "deflator");
  }
  return AnnualSeries(s.years(), out, s.unit());
}

AnnualSeries per_capita(const AnnualSeries& s, const AnnualSeries& population) {
  Eigen::ArrayXd out(s.values().size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out(k) = s.values()(k) / positive_at(population, s.years()[i], "population");
  }
  return AnnualSeries(s.years(), out, s.unit());
}

}  // namespace sgrowth
