#include <doctest.h>

#include <cmath>

#include "quasisparse/fraction_penalty.hpp"
#include "quasisparse/validation.hpp"

using namespace quasisparse;

TEST_SUITE("validation") {

TEST_CASE("grid oracle pins the frozen prox values") {
  const auto g1 = reference::grid_search_prox(1.0, 0.25, 2.0, 1e-4);
  CHECK(std::abs(g1.argmin - 1.9859803841985486) <= 2e-4);
  const auto g2 = reference::grid_search_prox(3.0, 0.5, 1.2, 1e-4);
  CHECK(std::abs(g2.argmin - 1.1627697711566327) <= 2e-4);
  // Inside the threshold the oracle lands on zero.
  const auto g3 = reference::grid_search_prox(1.0, 0.25, 0.1, 1e-4);
  CHECK(g3.argmin == 0.0);
  // Sign reflection.
  const auto g4 = reference::grid_search_prox(1.0, 0.25, -2.0, 1e-4);
  CHECK(g4.argmin == -g1.argmin);
}

TEST_CASE("oracle objective is the direct formula") {
  CHECK(reference::objective(2.0, 0.5, 0.25, 1.0) ==
        doctest::Approx(0.5625 + 0.5 / 3.0).epsilon(1e-15));
}

TEST_CASE("the full validation suite passes against the real prox") {
  ValidationOptions opts;
  opts.samples = 150;  // keep the unit-test run quick; acceptance uses 1000+
  const ValidationReport report = run_validation(opts);
  CHECK(report.passed);
  REQUIRE(report.checks.size() == 5);
  for (const CheckResult& c : report.checks) {
    INFO(c.name);
    CHECK(c.passed);
    CHECK(c.samples > 0);
    CHECK(c.failures.empty());
  }
}

TEST_CASE("an injected sign fault is caught by the oracle check") {
  ValidationOptions opts;
  opts.samples = 150;
  opts.prox_override = [](const PenaltyParams& p, double gamma) {
    return -prox_scalar(p, gamma);  // deliberately wrong
  };
  const ValidationReport report = run_validation(opts);
  CHECK(!report.passed);
  bool prox_check_failed = false;
  for (const CheckResult& c : report.checks) {
    if (c.name == "prox_matches_grid_oracle") {
      prox_check_failed = !c.passed;
      CHECK(!c.failures.empty());
    }
  }
  CHECK(prox_check_failed);
}

TEST_CASE("report serialization mentions every check") {
  ValidationOptions opts;
  opts.samples = 30;
  const std::string text = validation_report_to_json(run_validation(opts));
  CHECK(text.find("prox_matches_grid_oracle") != std::string::npos);
  CHECK(text.find("threshold_regime_continuity") != std::string::npos);
  CHECK(text.find("supercritical_threshold_not_larger") != std::string::npos);
  CHECK(text.find("arccos_argument_in_domain") != std::string::npos);
  CHECK(text.find("operator_adjoint_identity") != std::string::npos);
  CHECK(text.find("\"passed\": true") != std::string::npos);
}

}  // TEST_SUITE
