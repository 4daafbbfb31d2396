#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "sgrowth/cli.hpp"
#include "sgrowth/dataio.hpp"
#include "sgrowth/growth_model.hpp"

using namespace sgrowth;
namespace fs = std::filesystem;
using doctest::Approx;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("sgrowth_cli_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::size_t lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Value after "key = " in a report.
double field(const std::string& report, const std::string& key) {
  const auto pos = report.find(key + " = ");
  REQUIRE_MESSAGE(pos != std::string::npos, key);
  return std::stod(report.substr(pos + key.size() + 3));
}

}  // namespace

TEST_CASE("eval evolution") {
  const auto r = run({"eval", "evolution"});
  REQUIRE(r.code == cli::kOk);
  CHECK(lines(r.out) == 302);
  CHECK(r.out.rfind("year,value,unit=currency-flow\n", 0) == 0);
  CHECK(r.out.find("\n2040,37500\n") != std::string::npos);
}

TEST_CASE("eval national and capital") {
  const auto g = run({"eval", "national", "--nation", "Germany", "--from", "1970", "--to", "1970"});
  REQUIRE(g.code == cli::kOk);
  CHECK(g.out.find("1970,14727.07156931") != std::string::npos);

  const auto k = run({"eval", "capital", "--nation", "germany", "--from", "2000", "--to", "5000", "--step", "100"});
  REQUIRE(k.code == cli::kOk);
  CHECK(k.out.find("\n5000,468750\n") != std::string::npos);

  const auto w = run({"eval", "working-time", "--nation", "Germany", "--hours", "--from", "1800", "--to", "1800"});
  REQUIRE(w.code == cli::kOk);
  std::istringstream in(w.out);
  const auto s = parse_csv(in, "stdout");
  CHECK(s.values()(0) == Approx(96.0).epsilon(0.01));
}

TEST_CASE("eval usage errors") {
  CHECK(run({"eval", "nonsense"}).code == cli::kUsage);
  CHECK(run({"eval", "national"}).code == cli::kUsage);
  CHECK(run({"eval", "evolution", "--step", "0"}).code == cli::kUsage);
  CHECK(run({"eval", "evolution", "--from", "2000", "--to", "1900"}).code == cli::kUsage);
  CHECK(run({"eval", "national", "--nation", "Atlantis"}).code == cli::kUsage);
  CHECK(run({"eval", "evolution", "--constants", "E=abc"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("constants override") {
  const auto r = run({"eval", "evolution", "--from", "2000", "--to", "2000", "--constants", "T=2000"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("\n2000,37500\n") != std::string::npos);
}

TEST_CASE("io errors") {
  CHECK(run({"fit", "scurve", "/nonexistent/file.csv"}).code == cli::kIo);
  CHECK(run({"eval", "evolution", "-o", "/nonexistent/dir/x.csv"}).code == cli::kIo);
  TempDir tmp;
  std::ofstream(tmp.file("bad.csv")) << "year,value\n1990,1\n1990,2\n";
  const auto r = run({"fit", "scurve", tmp.file("bad.csv")});
  CHECK(r.code == cli::kIo);
  CHECK(r.err.find(":3") != std::string::npos);
}

TEST_CASE("fit recovery round trip") {
  TempDir tmp;
  REQUIRE(run({"eval", "national", "--nation", "Japan", "--from", "1850", "--to", "2100", "--step", "5", "-o",
               tmp.file("japan.csv")})
              .code == cli::kOk);
  const auto r = run({"fit", "recovery", tmp.file("japan.csv"), "-o", tmp.file("fitted.csv")});
  REQUIRE(r.code == cli::kOk);
  CHECK(field(r.out, "beta") == Approx(0.09).epsilon(1e-6));
  CHECK(field(r.out, "tau") == Approx(1971.0).epsilon(1e-8));
  CHECK(r.out.find("converged = true") != std::string::npos);
  const auto fitted = read_csv(tmp.file("fitted.csv"));
  const auto data = read_csv(tmp.file("japan.csv"));
  CHECK(((fitted.values() - data.values()).abs() / data.values()).maxCoeff() < 1e-6);
}

TEST_CASE("fit scurve") {
  TempDir tmp;
  REQUIRE(run({"eval", "life", "--from", "1900", "--to", "2100", "-o", tmp.file("life.csv")}).code == cli::kOk);
  const auto r = run({"fit", "scurve", tmp.file("life.csv"), "--floor", "30"});
  REQUIRE(r.code == cli::kOk);
  CHECK(field(r.out, "amplitude") == Approx(88.0).epsilon(1e-6));
  CHECK(field(r.out, "halftime") == Approx(1981.0).epsilon(1e-8));
}

TEST_CASE("fit above the envelope fails") {
  TempDir tmp;
  std::ofstream(tmp.file("high.csv")) << "year,value\n1950,60000\n1960,61000\n1970,62000\n1980,63000\n1990,64000\n2000,65000\n";
  const auto r = run({"fit", "recovery", tmp.file("high.csv")});
  CHECK(r.code == cli::kFailure);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("shift examples") {
  TempDir tmp;
  auto ev = [&](std::vector<std::string> args, const std::string& name) {
    args.insert(args.begin(), "eval");
    for (const char* a : {"--from", "1700", "--to", "2500", "-o"}) args.push_back(a);
    args.push_back(tmp.file(name));
    REQUIRE(run(args).code == cli::kOk);
  };
  ev({"evolution"}, "a.csv");
  ev({"evolution", "--constants", "T=2061"}, "a21.csv");
  ev({"capital", "--mu-bar", "0.25"}, "ka.csv");
  // Recovery components of Japan: GDP and the capital that trails it.
  const auto c = default_constants();
  std::vector<int> years;
  for (int t = 1850; t <= 2150; ++t) years.push_back(t);
  auto component = [&](double tau, const std::string& name) {
    Eigen::ArrayXd v(static_cast<Eigen::Index>(years.size()));
    for (std::size_t i = 0; i < years.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = scurve(static_cast<double>(years[i]), SCurve{c.a_bar, tau, 0.09, 0.0});
    }
    write_csv(tmp.file(name), AnnualSeries(years, v));
  };
  component(1971.0, "y.csv");
  component(1971.0 + delta_tau(0.09, c), "k.csv");

  const auto pure = run({"shift", tmp.file("a.csv"), tmp.file("a21.csv")});
  REQUIRE(pure.code == cli::kOk);
  CHECK(field(pure.out, "shift") == Approx(21.0).epsilon(0.25 / 21.0));

  const auto rec = run({"shift", tmp.file("y.csv"), tmp.file("k.csv")});
  REQUIRE(rec.code == cli::kOk);
  CHECK(std::abs(field(rec.out, "shift") - 13.1) <= 0.25);

  const auto inferred = run({"shift", tmp.file("a.csv"), tmp.file("ka.csv"), "--fit-scale", "--infer-constants",
                             "--beta", "0.09", "--recovery-pair", tmp.file("y.csv"), tmp.file("k.csv")});
  REQUIRE(inferred.code == cli::kOk);
  CHECK(std::abs(field(inferred.out, "shift") - 21.0) <= 0.25);
  CHECK(std::abs(field(inferred.out, "G") - 25.0) <= 0.1);
  CHECK(std::abs(field(inferred.out, "E") - 62.0) <= 0.5);

  CHECK(run({"shift", tmp.file("a.csv"), tmp.file("ka.csv"), "--infer-constants"}).code == cli::kUsage);
  CHECK(run({"shift", tmp.file("a.csv"), tmp.file("ka.csv"), "--infer-constants", "--beta", "0.09"}).code ==
        cli::kUsage);
}

TEST_CASE("validate") {
  const auto r = run({"validate"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find(" 0 FAIL") != std::string::npos);
  CHECK(run({"validate", "--constants", "G=30"}).code == cli::kFailure);
}

TEST_CASE("plot") {
  const auto a = run({"plot", "fig4"});
  REQUIRE(a.code == cli::kOk);
  std::size_t curves = 0;
  for (auto p = a.out.find("<polyline"); p != std::string::npos; p = a.out.find("<polyline", p + 1)) ++curves;
  CHECK(curves == 6);
  CHECK(run({"plot", "fig4"}).out == a.out);

  TempDir tmp;
  REQUIRE(run({"plot", "fig1", "--nation", "Japan", "-o", tmp.file("fig1.svg")}).code == cli::kOk);
  CHECK(fs::file_size(tmp.file("fig1.svg")) > 1000);
  const auto custom = run({"plot", "custom", "--data", SGROWTH_TEST_DATA "/nominal_gdp.csv", "--data",
                           SGROWTH_TEST_DATA "/population.csv"});
  REQUIRE(custom.code == cli::kOk);
  CHECK(custom.out.find("(right)") != std::string::npos);
  CHECK(run({"plot", "fig9"}).code == cli::kUsage);
  CHECK(run({"plot", "custom"}).code == cli::kUsage);
}
