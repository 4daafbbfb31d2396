#pragma once

// Annual series ingestion: the CSV format, five-year averaging, deflation
// and per-capita conversion.
//
// CSV layout (UTF-8, LF or CRLF):
//
//   year,value[,unit=<tag>]
//   1970,14733
//   1971,15120.5
//
// Years are integers, values plain decimals (scientific notation is read
// so that written files round-trip). A missing unit tag means currency-flow.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sgrowth/core_types.hpp"

namespace sgrowth {

/// Malformed CSV content. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AnnualSeries parse_csv(std::istream& in, const std::string& source = "<stream>");
AnnualSeries read_csv(const std::filesystem::path& path);

/// Writes the header with the unit tag and one record per year, values in
/// the shortest form that reads back to the same double.
void format_csv(std::ostream& out, const AnnualSeries& s);
void write_csv(const std::filesystem::path& path, const AnnualSeries& s);

/// Shortest decimal text that round-trips to `v`.
std::string format_number(double v);

/// Centred five-year moving average, one point per complete window of
/// consecutive years, dated at the window centre. Windows with a missing
/// year are skipped. Throws DomainError if no complete window exists.
AnnualSeries five_year_average(const AnnualSeries& s);

/// value(t) * deflator(base_year) / deflator(t). The deflator must cover
/// every series year and the base year with positive values.
AnnualSeries deflate(const AnnualSeries& s, const AnnualSeries& deflator, int base_year);

/// Pointwise division by population; every series year must be covered by
/// a positive population.
AnnualSeries per_capita(const AnnualSeries& s, const AnnualSeries& population);

}  // namespace sgrowth
