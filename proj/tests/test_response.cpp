#include <doctest.h>

#include <sstream>

#include "movdet/errors.hpp"
#include "movdet/povm.hpp"
#include "movdet/response.hpp"
#include "test_support.hpp"

using namespace movdet;
using movdet::test::Gen;
using movdet::test::rel_err;

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

}  // namespace

TEST_CASE("Lorentzian evaluation examples") {
  const auto s = SusceptibilitySpec::lorentzian(1.0, 1.0, 0.1);
  const Complex peak = s.evaluate(1.0);
  CHECK(peak.real() == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(peak.imag() == 0.0);
  CHECK(std::norm(s.evaluate(1.05)) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(std::norm(s.evaluate(0.95)) == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("Broadband is flat") {
  const auto s = SusceptibilitySpec::broadband({2.0, 0.0});
  for (double w : {1e-3, 0.7, 1.0, 42.0}) CHECK(s.evaluate(w) == Complex(2.0, 0.0));
  CHECK(code_of([&] { s.evaluate(0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Lorentzian construction guards") {
  CHECK(code_of([] { SusceptibilitySpec::lorentzian(1.0, 1.0, 0.0); }) ==
        ErrorCode::NonPositiveWidth);
  CHECK(code_of([] { SusceptibilitySpec::lorentzian(1.0, -1.0, 0.1); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("Lorentzian peak location and FWHM") {
  Gen g(3);
  for (int trial = 0; trial < 20; ++trial) {
    const double w0 = g.log_uniform(0.1, 10.0);
    const double kappa = g.log_uniform(1e-3, 1.0) * w0;
    const auto s = SusceptibilitySpec::lorentzian(g.nonzero_complex(), w0, kappa);
    const double peak = std::norm(s.evaluate(w0));
    for (int k = 0; k <= 10000; ++k) {
      const double w = w0 - 5 * kappa + k * (10 * kappa / 10000);
      if (w <= 0.0) continue;
      REQUIRE(std::norm(s.evaluate(w)) <= peak);
    }
    auto crossing = [&](double in, double out) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (in + out);
        (std::norm(s.evaluate(mid)) > 0.5 * peak ? in : out) = mid;
      }
      return 0.5 * (in + out);
    };
    const double lo = std::max(w0 - 5 * kappa, 1e-12);
    const double fwhm = crossing(w0, w0 + 5 * kappa) - crossing(w0, lo);
    CHECK(rel_err(fwhm, kappa) < 1e-9);
  }
}

TEST_CASE("Tabulated interpolation and extrapolation refusal") {
  const auto s = SusceptibilitySpec::tabulated({0.5, 1.0, 2.0}, {{1, 2}, {3, -1}, {-1, 4}});
  CHECK(s.evaluate(0.5) == Complex(1, 2));
  CHECK(s.evaluate(1.0) == Complex(3, -1));
  CHECK(s.evaluate(2.0) == Complex(-1, 4));
  const Complex mid = s.evaluate(1.5);
  CHECK(mid.real() == doctest::Approx(1.0));
  CHECK(mid.imag() == doctest::Approx(1.5));
  const Complex q = s.evaluate(0.625);
  CHECK(q.real() == doctest::Approx(1.5));
  CHECK(q.imag() == doctest::Approx(1.25));
  CHECK(code_of([&] { s.evaluate(0.49); }) == ErrorCode::FrequencyOutOfTable);
  CHECK(code_of([&] { s.evaluate(2.01); }) == ErrorCode::FrequencyOutOfTable);

  CHECK(code_of([] { SusceptibilitySpec::tabulated({1.0}, {{1, 0}}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { SusceptibilitySpec::tabulated({1.0, 1.0}, {{1, 0}, {2, 0}}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { SusceptibilitySpec::tabulated({1.0, 2.0}, {{1, 0}}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("q_factor") {
  CHECK(q_factor(LabMode(1.0), 0.1) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(q_factor(LabMode(1.0), 1.0) == 1.0);
  CHECK(q_factor(LabMode(5.0), 0.05) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(code_of([] { q_factor(LabMode(1.0), 0.0); }) == ErrorCode::NonPositiveWidth);
}

TEST_CASE("branch_tuned_lorentzian snapshots the branch frequency") {
  const LabMode mode(1.0);
  auto omega0 = [](const SusceptibilitySpec& s) { return std::get<Lorentzian>(s.variant()).omega0; };
  // mpmath: Omega_+(0.025) = 0.97530483039669292475, Omega_-(0.025) = 1.0253204627247284593
  CHECK(rel_err(omega0(branch_tuned_lorentzian(DetectorMotion(0.025), mode, 1.0, 0.1, Branch::Plus)),
                0.97530483039669292475) < 1e-15);
  CHECK(omega0(branch_tuned_lorentzian(DetectorMotion(0.0), mode, 1.0, 0.1, Branch::Plus)) == 1.0);
  CHECK(rel_err(omega0(branch_tuned_lorentzian(DetectorMotion(0.025), mode, 1.0, 0.1, Branch::Minus)),
                1.0253204627247284593) < 1e-15);
  CHECK(code_of([&] {
          branch_tuned_lorentzian(DetectorMotion(0.1), mode, 1.0, -1.0, Branch::Plus);
        }) == ErrorCode::NonPositiveWidth);
}

TEST_CASE("susceptibility CSV") {
  std::istringstream good("omega,chi_re,chi_im\n0.5,1,0\n1.5,0,-2\n");
  const auto s = read_susceptibility_csv(good);
  CHECK(s.kind() == "tabulated");
  CHECK(s.evaluate(1.0) == Complex(0.5, -1.0));

  std::ostringstream out;
  write_susceptibility_csv(out, std::get<Tabulated>(s.variant()));
  std::istringstream again(out.str());
  CHECK(read_susceptibility_csv(again).describe() == s.describe());

  std::istringstream bad_header("w,re,im\n1,0,0\n2,0,0\n");
  CHECK(code_of([&] { read_susceptibility_csv(bad_header); }) == ErrorCode::Io);
  std::istringstream bad_row("omega,chi_re,chi_im\n1,0\n2,0,0\n");
  CHECK(code_of([&] { read_susceptibility_csv(bad_row); }) == ErrorCode::Io);
  std::istringstream decreasing("omega,chi_re,chi_im\n2,0,0\n1,0,0\n");
  CHECK(code_of([&] { read_susceptibility_csv(decreasing); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { load_susceptibility_csv("/nonexistent/table.csv"); }) == ErrorCode::Io);
}

TEST_CASE("chi0 gauge invariance end to end") {
  Gen g(4);
  for (int i = 0; i < 500; ++i) {
    const DetectorMotion m(g.uniform(-0.95, 0.95));
    const LabMode mode(g.log_uniform(0.1, 10.0));
    const auto base = SusceptibilitySpec::lorentzian(g.nonzero_complex(),
                                                     g.log_uniform(0.05, 30.0),
                                                     g.log_uniform(1e-3, 5.0));
    const Complex c = g.nonzero_complex();
    const auto a = detection_amplitudes(m, mode, base);
    const auto b = detection_amplitudes(m, mode, base.scaled(c));
    CHECK(std::abs(visibility(a) - visibility(b)) < 1e-12);
    CHECK(std::abs(bias(a) - bias(b)) < 1e-12);
    const double tau = g.uniform(0.0, 10.0);
    const auto na = bloch_effect(a, tau);
    const auto nb = bloch_effect(b, tau);
    // Only the common phase of g+, g- changes, so n is identical.
    for (int k = 0; k < 3; ++k) CHECK(std::abs(na.n[k] - nb.n[k]) < 1e-12);
    CHECK(rel_err(nb.trace_weight, std::norm(c) * na.trace_weight) < 1e-12);
  }
}
