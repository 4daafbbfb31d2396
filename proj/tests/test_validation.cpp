#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "sgrowth/validation.hpp"

using namespace sgrowth;
using doctest::Approx;

namespace {

const Check& find(const std::vector<Check>& checks, const std::string& name) {
  const auto it = std::find_if(checks.begin(), checks.end(), [&](const Check& c) { return c.name == name; });
  REQUIRE_MESSAGE(it != checks.end(), name);
  return *it;
}

}  // namespace

TEST_CASE("clean run has no failures") {
  const auto checks = run_validation(default_constants());
  const auto s = summarize(checks);
  CHECK(s.fail == 0);
  CHECK(s.warn == 3);
  CHECK(s.pass + s.warn + s.fail == static_cast<int>(checks.size()));
  for (const auto& ch : checks) {
    CAPTURE(ch.name);
    CHECK(ch.status != CheckStatus::Fail);
    CHECK_FALSE(ch.rule.empty());
  }
}

TEST_CASE("reference values") {
  const auto checks = run_validation(default_constants());
  const auto& shift = find(checks, "capital delay of the evolution [yr]");
  CHECK(shift.expected == 21.0);
  CHECK(shift.computed == Approx(21.0039714837885141).epsilon(1e-14));
  CHECK(shift.status == CheckStatus::Pass);

  const auto& japan = find(checks, "support-share beta, Japan");
  CHECK(japan.expected == 0.09);
  CHECK(japan.computed == Approx(0.09).epsilon(1e-12));
  CHECK(japan.status == CheckStatus::Pass);
  CHECK(find(checks, "support-share beta, USA").status == CheckStatus::Pass);
  CHECK(find(checks, "support-share beta, Korea").status == CheckStatus::Pass);

  const auto& china = find(checks, "support-share beta, China");
  CHECK(china.computed == Approx(0.0836363636).epsilon(1e-9));
  CHECK(china.status == CheckStatus::Warn);
  const auto& germany = find(checks, "support-share beta, Germany");
  CHECK(germany.computed == Approx(0.085).epsilon(1e-12));
  CHECK(germany.status == CheckStatus::Warn);

  const auto& coeff = find(checks, "China saturated mu_bar G eps_bar");
  CHECK(coeff.computed == Approx(8.5).epsilon(1e-14));
  CHECK(coeff.status == CheckStatus::Warn);

  CHECK(find(checks, "required capacity h_s/y, mu_w = 0.15").computed == Approx(15.0 / 11.0).epsilon(1e-14));
  CHECK(find(checks, "required share h_s/h").computed == Approx(0.340909090909).epsilon(1e-10));
  CHECK(find(checks, "halftime shift T - T_L [yr]").computed == 59.0);
}

TEST_CASE("overridden constants fail the reference checks") {
  auto c = default_constants();
  c.G = 30.0;
  const auto checks = run_validation(c);
  CHECK(summarize(checks).fail > 0);
  CHECK(find(checks, "generation constant G [yr]").status == CheckStatus::Fail);
}

TEST_CASE("printed table") {
  std::ostringstream out;
  print_validation(out, run_validation(default_constants()));
  const std::string text = out.str();
  CHECK(text.rfind("check", 0) == 0);
  CHECK(text.find("WARN") != std::string::npos);
  CHECK(text.find("0 FAIL\n") != std::string::npos);
}
