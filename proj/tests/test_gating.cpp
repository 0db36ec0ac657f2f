#include <doctest.h>

#include "movdet/errors.hpp"
#include "movdet/gating.hpp"
#include "test_support.hpp"

using namespace movdet;
using movdet::test::Gen;
using movdet::test::kPi;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

const LabMode kUnit(1.0);

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("sinc") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-9) == 1.0);
  CHECK(sinc(kPi) < 1e-16);
  CHECK(sinc(1.0) == doctest::Approx(std::sin(1.0)));
  CHECK(sinc(-2.0) == sinc(2.0));
  // Series branch joins the direct formula smoothly.
  CHECK(std::abs(sinc(0.99999e-4) - std::sin(1.00001e-4) / 1.00001e-4) < 1e-12);
}

TEST_CASE("gate_average_closed examples") {
  CHECK(gate_average_closed(0.0, GateWindow::rectangular(7.0)) == Complex(1.0, 0.0));
  CHECK(std::abs(gate_average_closed(2.0 * kPi, GateWindow::rectangular(1.0))) < 1e-15);
  const Complex z = gate_average_closed(1.5, GateWindow::rectangular(1.0));
  // mpmath: sinc(0.75) = 0.90885168003111222231
  CHECK(std::abs(z) == doctest::Approx(0.90885168003111222231).epsilon(1e-15));
  CHECK(std::arg(z) == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK_THROWS_AS(GateWindow::rectangular(0.0), Error);
}

TEST_CASE("gate_average_numeric examples and guards") {
  CHECK(std::abs(gate_average_numeric(0.0, GateWindow::rectangular(1.0), 64) - 1.0) < 1e-12);
  const auto w = GateWindow::rectangular(1.0);
  CHECK(std::abs(gate_average_numeric(1.5, w, 4096) - gate_average_closed(1.5, w)) < 1e-10);
  CHECK(std::abs(gate_average_numeric(2.0 * kPi, w, 4096)) < 1e-10);
  CHECK(code_of([&] { gate_average_numeric(1.0, w, 8); }) == ErrorCode::TooFewSteps);
  CHECK(code_of([&] { gate_average_numeric(1.0, w, 17); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("closed form matches Simpson over a 50x50 grid") {
  // Phase range up to 300 (4096-step Simpson error grows as (phase/steps)^4).
  for (double phase_max : {100.0, 300.0}) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double t = 0.05 + 20.0 * j / 49.0;
        const double dw = phase_max * i / 49.0 / t;
        const auto w = GateWindow::rectangular(t);
        const Complex closed = gate_average_closed(dw, w);
        worst = std::max(worst, std::abs(closed - gate_average_numeric(dw, w, 4096)));
        CHECK(std::abs(closed) <= 1.0);
        if (i > 0) CHECK(std::abs(closed) < 1.0);
      }
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("observed visibility") {
  const DetectorMotion rest(0.0);
  const auto a0 = analyzer(detection_amplitudes(rest, kUnit, SusceptibilitySpec::broadband(1.0)));
  CHECK(observed_visibility(a0, rest, kUnit, GateWindow::rectangular(1e6)) == a0.visibility);

  const DetectorMotion m(0.025);
  const auto spec = branch_tuned_lorentzian(m, kUnit, 1.0, 0.1, Branch::Plus);
  const QubitAnalyzer a = analyzer(detection_amplitudes(m, kUnit, spec));
  const double unit_phase_t = 1.0 / (m.gamma() * m.beta());
  // mpmath: 0.80574030511593253208
  CHECK(observed_visibility(a, m, kUnit, GateWindow::rectangular(unit_phase_t)) ==
        doctest::Approx(0.80574030511593253208).epsilon(1e-12));
  CHECK(observed_visibility(a, m, kUnit, GateWindow::rectangular(kPi * unit_phase_t)) < 1e-12);

  QubitAnalyzer wrong = a;
  wrong.delta_omega *= 1.0 + 1e-6;
  CHECK(code_of([&] { observed_visibility(wrong, m, kUnit, GateWindow::rectangular(1.0)); }) ==
        ErrorCode::InconsistentBeat);
}

TEST_CASE("observed visibility factorizes through gamma beta omega T") {
  Gen g(11);
  for (int i = 0; i < 100; ++i) {
    const DetectorMotion m(g.uniform(1e-3, 0.95) * (g.uniform(0, 1) < 0.5 ? -1 : 1));
    const LabMode mode(g.log_uniform(0.1, 10.0));
    const auto spec = SusceptibilitySpec::lorentzian(g.nonzero_complex(), g.log_uniform(0.1, 10.0),
                                                     g.log_uniform(0.01, 5.0));
    const QubitAnalyzer a = analyzer(detection_amplitudes(m, mode, spec));
    const double x = g.uniform(0.0, 20.0);
    const double t = x / std::abs(m.gamma() * m.beta() * mode.omega());
    const double ratio = observed_visibility(a, m, mode, GateWindow::rectangular(t)) / a.visibility;
    CHECK(std::abs(ratio - std::abs(std::sin(x) / x)) < 1e-12);
  }
}

TEST_CASE("unsharpness check") {
  const auto ideal = unsharpness_check(0.6, -0.8);
  CHECK(ideal.lhs == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ideal.satisfied);
  const auto zero = unsharpness_check(0.0, 0.33333);
  CHECK(zero.lhs == doctest::Approx(0.1111088889));
  CHECK(zero.satisfied);
  const auto bad = unsharpness_check(0.9, 0.9);
  CHECK(bad.lhs == doctest::Approx(1.62));
  CHECK_FALSE(bad.satisfied);
}

TEST_CASE("visibility map landmarks") {
  const auto tiny = visibility_map({0.0}, {0.0}, 10.0, kUnit);
  REQUIRE(tiny.v_obs.size() == 1);
  CHECK(tiny.v_obs[0] == 1.0);

  const auto small = visibility_map({1e-9}, {1e-9}, 10.0, kUnit);
  CHECK(small.v_obs[0] == doctest::Approx(1.0).epsilon(1e-9));

  const auto onset = visibility_map({0.25}, {0.0, 1e-8}, 10.0, kUnit);
  // mpmath: 0.95753783512794430484
  CHECK(onset.at(0, 0) == doctest::Approx(0.95753783512794430484).epsilon(1e-13));
  CHECK(onset.at(0, 1) == doctest::Approx(0.95753783512794430484).epsilon(1e-13));

  // gamma beta omega T = pi puts the cell on the first sinc zero.
  const double gamma = lorentz_gamma(0.05);
  const auto zero = visibility_map({0.5}, {kPi / gamma}, 10.0, kUnit);
  CHECK(zero.v_obs[0] < 1e-12);

  // beta Q = 0 column uses the beta -> 0 limit.
  const auto limit = visibility_map({0.0}, {1.0}, 10.0, kUnit);
  CHECK(limit.v_obs[0] == doctest::Approx(std::sin(1.0)));
}

TEST_CASE("visibility map validation") {
  CHECK(code_of([] { visibility_map({0.1}, {0.1}, 0.0, kUnit); }) == ErrorCode::NonPositiveQ);
  CHECK(code_of([] { visibility_map({0.2, 0.1}, {0.1}, 1.0, kUnit); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { visibility_map({}, {0.1}, 1.0, kUnit); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { visibility_map({0.5, 2.0}, {0.1}, 2.0, kUnit); }) ==
        ErrorCode::VelocityOutOfRange);
}

TEST_CASE("visibility map invariants in the high-Q regime") {
  const auto bq = linspace(0.0, 5.0, 128);
  const auto bwt = linspace(0.0, 6.0, 128);
  const auto grid = visibility_map(bq, bwt, 1e4, kUnit, 4);
  for (std::size_t i = 0; i < bq.size(); ++i) {
    for (std::size_t j = 0; j < bwt.size(); ++j) {
      const double v = grid.at(i, j);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      REQUIRE(unsharpness_check(v, grid.bias[i * bwt.size() + j]).lhs <= 1.0 + 1e-12);
      if (i > 0 && bwt[j] < 1.0) REQUIRE(v <= grid.at(i - 1, j) + 1e-12);
    }
  }
  const auto serial = visibility_map(bq, bwt, 1e4, kUnit, 1);
  CHECK(serial.v_obs == grid.v_obs);
}

TEST_CASE("low-Q map has the Lorentz-prefactor dip near beta Q = 0") {
  // For small beta the broadband factor (1+b)/(1-b) beats the dispersive
  // suppression, so r rises above 1 before falling. The visibility dip is
  // about 1/(128 Q^4).
  const double q = 10.0;
  const auto bq = linspace(0.0, 0.05, 201);
  const auto grid = visibility_map(bq, {0.0}, q, kUnit);
  double lowest = 1.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < bq.size(); ++i) {
    if (grid.at(i, 0) < lowest) {
      lowest = grid.at(i, 0);
      at = i;
    }
    if (bq[i] > 0.02) break;
  }
  CHECK(1.0 - lowest == doctest::Approx(1.0 / (128.0 * q * q * q * q)).epsilon(0.05));
  CHECK(bq[at] > 0.0);
  // The high-Q map does not show it at the 1e-12 level.
  const auto high = visibility_map(bq, {0.0}, 1e4, kUnit);
  for (std::size_t i = 1; i < bq.size(); ++i) CHECK(high.at(i, 0) <= high.at(i - 1, 0) + 1e-12);
}
