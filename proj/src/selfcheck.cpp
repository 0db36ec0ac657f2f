#include "movdet/selfcheck.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "movdet/clicksim.hpp"
#include "movdet/errors.hpp"
#include "movdet/gating.hpp"
#include "movdet/parallel.hpp"
#include "movdet/povm.hpp"
#include "movdet/rng.hpp"

namespace movdet {
namespace {

constexpr double kPi = std::numbers::pi;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  Complex nonzero_complex() { return std::polar(log_uniform(0.1, 10.0), uniform(-kPi, kPi)); }

 private:
  Philox4x64 rng_;
};

// Tracks the worst deviation and the parameters that produced it.
struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& w) {
    if (!(v <= value)) {
      value = v;
      where = w;
    }
  }
};

CheckResult bounded(std::string module, std::string name, const Worst& w, double tol) {
  const bool ok = w.value <= tol;
  return {std::move(module), std::move(name), ok,
          fmt::format("max deviation {:.3e} (tol {:.0e}){}", w.value, tol,
                      ok ? "" : " at " + w.where)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<CheckResult> kinematics_checks() {
  Draw d(101);
  Worst split, product, swap, interval;
  for (int i = 0; i < 500; ++i) {
    const double beta = d.uniform(-0.99, 0.99);
    const double omega = d.log_uniform(0.01, 100.0);
    const DetectorMotion m(beta);
    const LabMode mode(omega);
    const std::string at = fmt::format("beta={:.17g} omega={:.17g}", beta, omega);
    const DopplerPair f = doppler_frequencies(m, mode);
    split.update(rel(doppler_splitting(m, mode), f.minus - f.plus), at);
    product.update(rel(f.plus * f.minus, omega * omega), at);
    const DopplerPair r = doppler_frequencies(m.reversed(), mode);
    swap.update(std::max(rel(r.plus, f.minus), rel(r.minus, f.plus)), at);
    const double tau = d.uniform(-100.0, 100.0);
    const LabEvent e = worldline(m, tau);
    interval.update(rel((e.t - e.x) * (e.t + e.x), tau * tau), at);
  }
  return {bounded("kinematics", "splitting equals branch difference", split, 1e-14),
          bounded("kinematics", "branch product equals omega^2", product, 1e-12),
          bounded("kinematics", "velocity reversal swaps branches", swap, 1e-14),
          bounded("kinematics", "worldline proper-time invariance", interval, 1e-12)};
}

std::vector<CheckResult> response_checks() {
  const auto spec = SusceptibilitySpec::lorentzian({1.0, 0.5}, 2.0, 0.3);
  const auto& lz = std::get<Lorentzian>(spec.variant());
  const double peak = std::norm(spec.evaluate(lz.omega0));
  bool peak_ok = true;
  for (int k = 0; k <= 10000; ++k) {
    const double w = lz.omega0 - 5 * lz.kappa + k * (10 * lz.kappa / 10000);
    if (std::norm(spec.evaluate(w)) > peak) peak_ok = false;
  }
  auto crossing = [&](double inside, double outside) {
    for (int it = 0; it < 200; ++it) {
      const double midpoint = 0.5 * (inside + outside);
      (std::norm(spec.evaluate(midpoint)) > 0.5 * peak ? inside : outside) = midpoint;
    }
    return 0.5 * (inside + outside);
  };
  const double fwhm = crossing(lz.omega0, lz.omega0 + 5 * lz.kappa) -
                      crossing(lz.omega0, lz.omega0 - 5 * lz.kappa);

  const auto table = SusceptibilitySpec::tabulated({0.5, 1.0, 1.5}, {{1, 2}, {3, -1}, {0, 0}});
  const bool node_ok = table.evaluate(1.0) == Complex(3, -1);
  const Complex between = table.evaluate(0.75);

  Draw d(202);
  Worst gauge;
  for (int i = 0; i < 200; ++i) {
    const DetectorMotion m(d.uniform(-0.9, 0.9));
    const LabMode mode(1.0);
    const auto base = SusceptibilitySpec::lorentzian(d.nonzero_complex(), d.uniform(0.2, 3.0),
                                                     d.log_uniform(0.01, 2.0));
    const Complex c = d.nonzero_complex();
    const auto a = detection_amplitudes(m, mode, base);
    const auto b = detection_amplitudes(m, mode, base.scaled(c));
    gauge.update(std::max(std::abs(visibility(a) - visibility(b)), std::abs(bias(a) - bias(b))),
                 base.describe());
  }
  return {
      {"response", "Lorentzian |chi|^2 peaks at omega0", peak_ok, "10^4-point scan over +-5 kappa"},
      {"response", "Lorentzian FWHM equals kappa", rel(fwhm, lz.kappa) < 1e-9,
       fmt::format("fwhm {:.17g} vs kappa {:.17g}", fwhm, lz.kappa)},
      {"response", "tabulated node and midpoint interpolation",
       node_ok && between == Complex(2, 0.5), "nodes exact, linear between"},
      bounded("response", "chi0 rescaling leaves V and B unchanged", gauge, 1e-12)};
}

std::vector<CheckResult> povm_checks() {
  Draw d(303);
  Worst comp, broad, ratio, bloch, three_term, reversal;
  for (int i = 0; i < 300; ++i) {
    const double beta = d.uniform(-0.95, 0.95);
    const double omega = d.log_uniform(0.1, 10.0);
    const DetectorMotion m(beta);
    const LabMode mode(omega, d.uniform(0.5, 2.0));
    const double kappa = d.log_uniform(1e-3, 10.0);
    const double omega0 = d.log_uniform(0.05, 20.0);
    const std::string at = fmt::format("beta={:.17g} omega={:.17g} omega0={:.17g} kappa={:.17g}",
                                       beta, omega, omega0, kappa);
    const auto lz = detection_amplitudes(
        m, mode, SusceptibilitySpec::lorentzian(d.nonzero_complex(), omega0, kappa));
    const double v = visibility(lz), b = bias(lz);
    comp.update(std::abs(v * v + b * b - 1.0), at);

    const auto bb = detection_amplitudes(m, mode, SusceptibilitySpec::broadband(d.nonzero_complex()));
    const VisibilityBias cf = broadband_closed_form(beta);
    broad.update(std::max(std::abs(visibility(bb) - cf.visibility), std::abs(bias(bb) - cf.bias)),
                 at);
    const VisibilityBias rev = broadband_closed_form(-beta);
    reversal.update(std::abs(rev.bias + cf.bias), at);

    const double r = amplitude_ratio_general(m, mode, omega0, kappa);
    const RatioVisibility rv = vb_from_ratio(r);
    const double sign_ok = (b > 0) == (r < 1) ? 0.0 : 1.0;
    ratio.update(std::max({std::abs(rv.visibility - v), std::abs(rv.bias_abs - std::abs(b)),
                           sign_ok}),
                 at);

    const PhotonState s(d.nonzero_complex(), d.nonzero_complex());
    const double tau = d.uniform(-50.0, 50.0);
    const BlochEffect e = bloch_effect(lz, tau);
    const auto mv = s.bloch_vector();
    const double via_bloch = e.trace_weight * (1.0 + e.n[0] * mv[0] + e.n[1] * mv[1] + e.n[2] * mv[2]);
    const double rate = click_rate(lz, s, tau);
    bloch.update(std::abs(via_bloch - rate) / e.trace_weight, at);

    const double phi = d.uniform(-kPi, kPi);
    const Complex gp = lz.g_plus(), gm = lz.g_minus();
    const double fs = lz.field_scale();
    const double literal =
        0.5 * fs * fs *
        (std::norm(gp) + std::norm(gm) +
         2.0 * (std::conj(gp) * gm * std::polar(1.0, -(lz.delta_omega() * tau - phi))).real());
    three_term.update(std::abs(click_rate(lz, PhotonState::equal_superposition(phi), tau) - literal) /
                    e.trace_weight,
                at);
  }

  // Fringe contrast over one beat period at fixed phi.
  const auto amps = detection_amplitudes(DetectorMotion(0.3), LabMode(1.0),
                                         SusceptibilitySpec::lorentzian(1.0, 0.8, 0.5));
  const auto state = PhotonState::equal_superposition(0.7);
  double hi = 0.0, lo = 1e300;
  constexpr int kScan = 20000;
  const double period = 2 * kPi / amps.delta_omega();
  for (int k = 0; k < kScan; ++k) {
    const double rate = click_rate(amps, state, period * k / kScan);
    hi = std::max(hi, rate);
    lo = std::min(lo, rate);
  }
  const double contrast = (hi - lo) / (hi + lo);

  return {bounded("povm", "complementarity V^2 + B^2 = 1", comp, 1e-12),
          bounded("povm", "broadband pipeline equals closed form", broad, 1e-12),
          bounded("povm", "velocity reversal flips broadband bias", reversal, 1e-15),
          bounded("povm", "ratio path equals full Lorentzian pipeline", ratio, 1e-12),
          bounded("povm", "click rate equals w (1 + n.m)", bloch, 1e-12),
          bounded("povm", "equal superposition reproduces three-term rate", three_term, 1e-12),
          {"povm", "fringe contrast equals visibility", std::abs(contrast - visibility(amps)) < 1e-7,
           fmt::format("contrast {:.12f} vs V {:.12f} ({} samples)", contrast, visibility(amps),
                       kScan)}};
}

std::vector<CheckResult> gating_checks(unsigned threads) {
  Worst quad, modulus, factor;
  const auto zero = gate_average_closed(0.0, GateWindow::rectangular(3.0));
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double t = 0.1 + 9.9 * j / 19.0;
      const double dw = (100.0 * i / 19.0) / t;
      const auto w = GateWindow::rectangular(t);
      const std::string at = fmt::format("dOmega={:.17g} T={:.17g}", dw, t);
      quad.update(std::abs(gate_average_closed(dw, w) - gate_average_numeric(dw, w, 4096)), at);
      modulus.update(std::abs(gate_average_closed(dw, w)) - 1.0, at);
    }
  }
  Draw d(404);
  for (int i = 0; i < 100; ++i) {
    const DetectorMotion m(d.uniform(0.001, 0.9));
    const LabMode mode(d.log_uniform(0.1, 10.0));
    const auto amps = detection_amplitudes(m, mode, SusceptibilitySpec::broadband(1.0));
    const QubitAnalyzer a = analyzer(amps);
    const double x = d.uniform(0.0, 10.0);
    const double t = x / (m.gamma() * m.beta() * mode.omega());
    const double ratio = observed_visibility(a, m, mode, GateWindow::rectangular(t)) / a.visibility;
    factor.update(std::abs(ratio - std::abs(sinc(x))),
                  fmt::format("beta={:.17g} gamma beta omega T={:.17g}", m.beta(), x));
  }

  std::vector<double> bq(48), bwt(48);
  for (int k = 0; k < 48; ++k) {
    bq[k] = 5.0 * k / 47.0;
    bwt[k] = 6.0 * k / 47.0;
  }
  const auto grid = visibility_map(bq, bwt, 1e4, LabMode(1.0), threads);
  Worst unsharp, mono;
  for (std::size_t i = 0; i < bq.size(); ++i) {
    for (std::size_t j = 0; j < bwt.size(); ++j) {
      const auto u = unsharpness_check(grid.at(i, j), grid.bias[i * bwt.size() + j]);
      unsharp.update(u.lhs - 1.0, fmt::format("beta_q={:.17g} beta_omega_t={:.17g}", bq[i], bwt[j]));
      if (i > 0 && bwt[j] < 1.0) {
        mono.update(grid.at(i, j) - grid.at(i - 1, j),
                    fmt::format("beta_q={:.17g} beta_omega_t={:.17g}", bq[i], bwt[j]));
      }
    }
  }
  return {{"gating", "gate average is 1 at zero beat", zero == Complex(1.0, 0.0),
           fmt::format("{:.17g}{:+.17g}i", zero.real(), zero.imag())},
          bounded("gating", "closed form equals Simpson quadrature", quad, 1e-9),
          bounded("gating", "gate modulus at most 1", modulus, 0.0),
          bounded("gating", "V_obs / V depends only on gamma beta omega T", factor, 1e-12),
          bounded("gating", "map satisfies V_obs^2 + B^2 <= 1", unsharp, 1e-12),
          bounded("gating", "map nonincreasing in beta Q below beta omega T = 1", mono, 1e-12)};
}

std::vector<CheckResult> clicksim_checks(unsigned threads) {
  std::vector<CheckResult> out;
  const DetectorMotion m(0.6);
  const LabMode mode(1.0);
  const auto spec = SusceptibilitySpec::broadband(1.0);
  const auto state = PhotonState::equal_superposition(0.4);
  const auto a = simulate_clicks(m, mode, spec, state, 5.0, 200.0, 42);
  const auto b = simulate_clicks(m, mode, spec, state, 5.0, 200.0, 42);
  out.push_back({"clicksim", "identical seed gives identical record",
                 a.event_times == b.event_times && a.params_fingerprint == b.params_fingerprint,
                 fmt::format("{} events", a.size())});

  // Mean count against the quadrature of the rate.
  const auto amps = detection_amplitudes(m, mode, spec);
  const double t_total = 50.0;
  const double lambda0 = 4.0;
  double integral = 0.0;
  constexpr int kSteps = 20000;
  for (int k = 0; k <= kSteps; ++k) {
    const double w = (k == 0 || k == kSteps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    integral += w * click_rate(amps, state, t_total * k / kSteps);
  }
  integral *= t_total / kSteps / 3.0;
  const double expected = lambda0 * integral;
  constexpr int kSeeds = 20;
  std::vector<double> counts(kSeeds);
  parallel_for(kSeeds, threads, [&](std::size_t s) {
    counts[s] = static_cast<double>(
        simulate_clicks(m, mode, spec, state, lambda0, t_total, substream_seed(7, s)).size());
  });
  double mean = 0.0;
  for (double c : counts) mean += c / kSeeds;
  const double sigma = std::sqrt(expected / kSeeds);
  out.push_back({"clicksim", "thinning reproduces integrated rate",
                 std::abs(mean - expected) < 4.0 * sigma,
                 fmt::format("mean {:.3f} vs {:.3f} (sigma {:.3f})", mean, expected, sigma)});

  // Round trip at reduced scale.
  const auto rec = simulate_clicks(m, mode, spec, PhotonState::equal_superposition(0.0), 20.0,
                                   500.0, 11);
  std::vector<double> grid;
  for (int k = 0; k <= 800; ++k) grid.push_back(1.0 + k * 0.00125);
  try {
    const auto beat = estimate_beat(rec, grid, threads);
    const double target = doppler_splitting(m, mode);
    out.push_back({"clicksim", "beat estimate matches splitting",
                   std::abs(beat.value - target) < 4.0 * beat.std_error,
                   fmt::format("{:.8f} +- {:.2e} vs {:.8f}", beat.value, beat.std_error, target)});
    const auto vis = estimate_visibility(rec, target);
    out.push_back({"clicksim", "phase-binned visibility matches V",
                   std::abs(vis.value - visibility(amps)) < 4.0 * vis.std_error,
                   fmt::format("{:.5f} +- {:.1e} vs {:.5f}", vis.value, vis.std_error,
                               visibility(amps))});
  } catch (const Error& e) {
    out.push_back({"clicksim", "round trip estimators", false, e.what()});
  }
  const auto rp = simulate_clicks(m, mode, spec, PhotonState::plus(), 20.0, 500.0, 12);
  const auto rm = simulate_clicks(m, mode, spec, PhotonState::minus(), 20.0, 500.0, 13);
  const auto bhat = estimate_bias(rp, rm);
  out.push_back({"clicksim", "count-imbalance bias matches B",
                 std::abs(bhat.value - bias(amps)) < 4.0 * bhat.std_error,
                 fmt::format("{:.5f} +- {:.1e} vs {:.5f}", bhat.value, bhat.std_error, bias(amps))});
  return out;
}

}  // namespace

std::vector<CheckResult> run_selfcheck(unsigned threads) {
  std::vector<CheckResult> all;
  auto add = [&](std::vector<CheckResult> part) {
    all.insert(all.end(), part.begin(), part.end());
  };
  add(kinematics_checks());
  add(response_checks());
  add(povm_checks());
  add(gating_checks(threads));
  add(clicksim_checks(threads));
  return all;
}

}  // namespace movdet
