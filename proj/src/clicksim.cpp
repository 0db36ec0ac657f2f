#include "movdet/clicksim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "movdet/errors.hpp"
#include "movdet/parallel.hpp"
#include "movdet/rng.hpp"

namespace movdet {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMinEvents = 100;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Inverse of a symmetric positive-definite 3x3 matrix via cofactors.
Mat3 invert(const Mat3& m) {
  Mat3 c{};
  c[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  c[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  c[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  c[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  c[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  c[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  c[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  c[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  c[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double det = m[0][0] * c[0][0] + m[0][1] * c[1][0] + m[0][2] * c[2][0];
  if (!(std::abs(det) > 0.0)) fail(ErrorCode::InvalidArgument, "singular fit design");
  for (auto& row : c)
    for (auto& v : row) v /= det;
  return c;
}

struct CosineFit {
  Vec3 coef;  // offset, cosine, sine
  Mat3 cov;
};

// Poisson-weighted least squares of counts against rows of `design`,
// reweighted with the fitted means (IRLS).
CosineFit fit_counts(const std::vector<Vec3>& design, const std::vector<double>& counts) {
  const std::size_t n = counts.size();
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) weight[k] = 1.0 / std::max(counts[k], 1.0);

  CosineFit fit{};
  for (int iter = 0; iter < 4; ++iter) {
    Mat3 normal{};
    Vec3 rhs{};
    for (std::size_t k = 0; k < n; ++k) {
      for (int a = 0; a < 3; ++a) {
        rhs[a] += weight[k] * design[k][a] * counts[k];
        for (int b = 0; b < 3; ++b) normal[a][b] += weight[k] * design[k][a] * design[k][b];
      }
    }
    fit.cov = invert(normal);
    for (int a = 0; a < 3; ++a) {
      fit.coef[a] = 0.0;
      for (int b = 0; b < 3; ++b) fit.coef[a] += fit.cov[a][b] * rhs[b];
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double mu = fit.coef[0] * design[k][0] + fit.coef[1] * design[k][1] +
                        fit.coef[2] * design[k][2];
      weight[k] = 1.0 / std::max(mu, 1.0);
    }
  }
  return fit;
}

EstimateWithError contrast_of(const CosineFit& fit, std::size_t n_events) {
  const double a = fit.coef[0];
  const double b = fit.coef[1];
  const double c = fit.coef[2];
  if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "fitted mean count is not positive");
  const double h = std::hypot(b, c);
  const double v = h / a;
  Vec3 grad{-h / (a * a), 0.0, 0.0};
  if (h > 0.0) {
    grad[1] = b / (h * a);
    grad[2] = c / (h * a);
  }
  double var = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var += grad[i] * fit.cov[i][j] * grad[j];
  return {v, std::sqrt(std::max(var, 0.0)), n_events};
}

bool is_uniform(const std::vector<double>& grid) {
  if (grid.size() < 3) return false;
  const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (std::abs(grid[k] - grid[k - 1] - step) > 1e-9 * std::abs(step)) return false;
  }
  return true;
}

// Derivatives of sin(x)/x; series near zero.
double sinc_d1(double x) {
  if (std::abs(x) < 1e-3) return -x / 3.0 + x * x * x / 30.0;
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

double sinc_d2(double x) {
  if (std::abs(x) < 1e-3) return -1.0 / 3.0 + x * x / 10.0;
  return -std::sin(x) / x - 2.0 * std::cos(x) / (x * x) + 2.0 * std::sin(x) / (x * x * x);
}

// Power of the mean-removed Fourier sum sum_j exp(i W u_j) - N sinc(W T/2),
// u = tau - T/2. Dropping the expected DC term keeps its sidelobes from
// pulling the peak when the record spans only a few beat periods.
double power_at(const std::vector<double>& times, double t_total, double freq) {
  const double mid = 0.5 * t_total;
  double re = 0.0, im = 0.0;
  for (double t : times) {
    re += std::cos(freq * (t - mid));
    im += std::sin(freq * (t - mid));
  }
  re -= static_cast<double>(times.size()) * sinc(freq * mid);
  return re * re + im * im;
}

}  // namespace

std::string RecordParams::canonical(bool with_state, bool with_seed) const {
  std::string out = fmt::format("beta={:.17g};omega={:.17g};field_scale={:.17g};spec={};", beta,
                                omega, field_scale, spec);
  if (with_state) {
    out += fmt::format("alpha_plus={:.17g}{:+.17g}i;alpha_minus={:.17g}{:+.17g}i;",
                       alpha_plus.real(), alpha_plus.imag(), alpha_minus.real(),
                       alpha_minus.imag());
  }
  out += fmt::format("lambda0={:.17g};t_total={:.17g};", lambda0, t_total);
  if (with_seed) out += fmt::format("seed={};", seed);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CountRecord simulate_clicks(const DetectorMotion& motion, const LabMode& mode,
                            const SusceptibilitySpec& spec, const PhotonState& state,
                            double lambda0, double t_total, std::uint64_t seed) {
  if (!std::isfinite(lambda0) || lambda0 <= 0.0) {
    fail(ErrorCode::InvalidArgument, "lambda0 must be positive");
  }
  if (!std::isfinite(t_total) || t_total <= 0.0) {
    fail(ErrorCode::InvalidArgument, "record length must be positive");
  }
  const DetectionAmplitudes amps = detection_amplitudes(motion, mode, spec);
  const double e = amps.field_scale();
  const double envelope = std::abs(amps.g_plus()) * std::abs(state.alpha_plus()) +
                          std::abs(amps.g_minus()) * std::abs(state.alpha_minus());
  const double ceiling = lambda0 * e * e * envelope * envelope;
  if (!(ceiling > 0.0) || !std::isfinite(ceiling)) {
    fail(ErrorCode::DegenerateRate, "click-rate ceiling is zero");
  }

  CountRecord record;
  record.t_total = t_total;
  record.rate_scale = lambda0;
  record.seed = seed;
  record.delta_omega = amps.delta_omega();
  record.params = {motion.beta(), mode.omega(),       mode.field_scale(), spec.describe(),
                   state.alpha_plus(), state.alpha_minus(), lambda0, t_total, seed};
  record.params_fingerprint = fnv1a64(record.params.canonical());

  Philox4x64 rng(seed);
  double tau = 0.0;
  for (;;) {
    tau -= std::log1p(-rng.uniform()) / ceiling;
    if (tau > t_total) break;
    const double u = rng.uniform();
    if (u * ceiling < lambda0 * click_rate(amps, state, tau)) {
      if (record.event_times.empty() || tau > record.event_times.back()) {
        record.event_times.push_back(tau);
      }
    }
  }
  return record;
}

std::vector<double> periodogram(const CountRecord& record, const std::vector<double>& freq_grid,
                                unsigned threads) {
  const auto& times = record.event_times;
  std::vector<double> power(freq_grid.size(), 0.0);
  if (!is_uniform(freq_grid)) {
    parallel_for(freq_grid.size(), threads,
                 [&](std::size_t k) { power[k] = power_at(times, record.t_total, freq_grid[k]); });
    return power;
  }

  // Uniform grid: advance exp(i W u) by a per-event rotation, re-anchoring
  // every kAnchor points to bound rounding drift.
  constexpr std::size_t kAnchor = 64;
  const double step = (freq_grid.back() - freq_grid.front()) /
                      static_cast<double>(freq_grid.size() - 1);
  const std::size_t chunks = (freq_grid.size() + kAnchor - 1) / kAnchor;
  const double mid = 0.5 * record.t_total;
  const double n = static_cast<double>(times.size());
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kAnchor;
    const std::size_t end = std::min(freq_grid.size(), begin + kAnchor);
    std::vector<Complex> sums(end - begin);
    for (double t : times) {
      const double u = t - mid;
      Complex z = std::polar(1.0, freq_grid[begin] * u);
      const Complex rot = std::polar(1.0, step * u);
      for (std::size_t k = begin; k < end; ++k) {
        sums[k - begin] += z;
        z *= rot;
      }
    }
    for (std::size_t k = begin; k < end; ++k) {
      power[k] = std::norm(sums[k - begin] - n * sinc(freq_grid[k] * mid));
    }
  });
  return power;
}

EstimateWithError estimate_beat(const CountRecord& record, const std::vector<double>& freq_grid,
                                unsigned threads) {
  const auto& times = record.event_times;
  if (times.size() < kMinEvents) {
    fail(ErrorCode::TooFewEvents,
         fmt::format("beat estimation needs >= {} events, record has {}", kMinEvents,
                     times.size()));
  }
  if (freq_grid.size() < 3) fail(ErrorCode::InvalidArgument, "frequency grid needs >= 3 points");
  for (std::size_t k = 0; k < freq_grid.size(); ++k) {
    if (!(freq_grid[k] > 0.0) || (k > 0 && !(freq_grid[k] > freq_grid[k - 1]))) {
      fail(ErrorCode::InvalidArgument, "frequency grid must be positive and increasing");
    }
  }

  const std::vector<double> power = periodogram(record, freq_grid, threads);
  const auto peak = static_cast<std::size_t>(
      std::max_element(power.begin(), power.end()) - power.begin());
  if (peak == 0 || peak + 1 == freq_grid.size()) {
    fail(ErrorCode::BeatOutOfGrid,
         fmt::format("periodogram maximum at grid edge {:.17g}", freq_grid[peak]));
  }

  // Golden-section maximization on the bracketing grid interval.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = freq_grid[peak - 1];
  double hi = freq_grid[peak + 1];
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double p1 = power_at(times, record.t_total, x1);
  double p2 = power_at(times, record.t_total, x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
    if (p1 < p2) {
      lo = x1;
      x1 = x2;
      p1 = p2;
      x2 = lo + inv_phi * (hi - lo);
      p2 = power_at(times, record.t_total, x2);
    } else {
      hi = x2;
      x2 = x1;
      p2 = p1;
      x1 = hi - inv_phi * (hi - lo);
      p1 = power_at(times, record.t_total, x1);
    }
  }
  const double freq = 0.5 * (lo + hi);

  // Sandwich variance. Per event the criterion is Re[(exp(i W u) - s(W)) e^{-i th}]
  // with s(W) = sinc(W T/2); at the maximum its th- and W-derivatives sum to
  // zero. Their Jacobian in (W, th) is the peak curvature; the Poisson
  // variance of each sum is estimated by summing squares.
  const double mid = 0.5 * record.t_total;
  const double n = static_cast<double>(times.size());
  const double sc = sinc(freq * mid);
  const double sc1 = mid * sinc_d1(freq * mid);
  const double sc2 = mid * mid * sinc_d2(freq * mid);
  double re = -n * sc, im = 0.0;
  for (double t : times) {
    re += std::cos(freq * (t - mid));
    im += std::sin(freq * (t - mid));
  }
  const double theta = std::atan2(im, re);
  const double st = std::sin(theta), ct = std::cos(theta);
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  double b11 = 0, b12 = 0, b22 = 0;
  for (double t : times) {
    const double u = t - mid;
    const double s = std::sin(freq * u - theta);
    const double c = std::cos(freq * u - theta);
    const double psi1 = s - sc * st;
    const double psi2 = u * s + sc1 * ct;
    j11 += u * c - sc1 * st;
    j12 += -c - sc * ct;
    j21 += u * u * c + sc2 * ct;
    j22 += -u * c - sc1 * st;
    b11 += psi1 * psi1;
    b12 += psi1 * psi2;
    b22 += psi2 * psi2;
  }
  const double det = j11 * j22 - j12 * j21;
  // Row of J^{-1} belonging to W.
  const double i11 = j22 / det;
  const double i12 = -j12 / det;
  const double var = i11 * i11 * b11 + 2.0 * i11 * i12 * b12 + i12 * i12 * b22;
  return {freq, std::sqrt(std::max(var, 0.0)), times.size()};
}

EstimateWithError estimate_visibility(const CountRecord& record, double delta_omega, int bins) {
  if (record.size() < kMinEvents) {
    fail(ErrorCode::TooFewEvents,
         fmt::format("visibility estimation needs >= {} events, record has {}", kMinEvents,
                     record.size()));
  }
  if (!std::isfinite(delta_omega) || delta_omega <= 0.0) {
    fail(ErrorCode::NonPositiveBeat, "visibility needs a positive beat frequency");
  }
  if (bins < 4) fail(ErrorCode::InvalidArgument, "need at least 4 phase bins");

  const double width = kTwoPi / bins;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double t : record.event_times) {
    const double phase = std::fmod(delta_omega * t, kTwoPi);
    const int k = std::min(bins - 1, static_cast<int>(phase / width));
    counts[static_cast<std::size_t>(k)] += 1.0;
  }

  // Exposure of each bin: `full` whole beat periods plus a partial period
  // covering phases [0, rest).
  const double total_phase = delta_omega * record.t_total;
  const double full = std::floor(total_phase / kTwoPi);
  const double rest = total_phase - full * kTwoPi;
  std::vector<Vec3> design(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    const double a = k * width;
    const double b = (k + 1) * width;
    auto integrals = [](double lo, double hi) -> Vec3 {
      return {hi - lo, std::sin(hi) - std::sin(lo), std::cos(lo) - std::cos(hi)};
    };
    Vec3 row = integrals(a, b);
    for (auto& v : row) v *= full;
    if (rest > a) {
      const Vec3 part = integrals(a, std::min(b, rest));
      for (int i = 0; i < 3; ++i) row[i] += part[i];
    }
    for (auto& v : row) v /= delta_omega;
    design[static_cast<std::size_t>(k)] = row;
  }
  return contrast_of(fit_counts(design, counts), record.size());
}

EstimateWithError estimate_bias(const CountRecord& record_plus, const CountRecord& record_minus) {
  const RecordParams& p = record_plus.params;
  const RecordParams& m = record_minus.params;
  if (p.canonical(false, false) != m.canonical(false, false)) {
    fail(ErrorCode::MismatchedParams, "bias records differ in more than the photon state");
  }
  constexpr double kTol = 1e-12;
  if (std::abs(p.alpha_minus) > kTol || std::abs(m.alpha_plus) > kTol) {
    fail(ErrorCode::MismatchedParams, "bias records must use the |+> and |-> states");
  }
  const double np = static_cast<double>(record_plus.size());
  const double nm = static_cast<double>(record_minus.size());
  const double n = np + nm;
  if (n == 0.0) fail(ErrorCode::TooFewEvents, "bias estimation needs at least one event");
  const double b = (np - nm) / n;
  return {b, std::sqrt(std::max(0.0, (1.0 - b * b) / n)),
          record_plus.size() + record_minus.size()};
}

PhaseSweep simulate_phase_sweep(const DetectorMotion& motion, const LabMode& mode,
                                const SusceptibilitySpec& spec, const GateWindow& window,
                                double lambda0, std::uint64_t seed, int n_phi,
                                unsigned threads) {
  if (n_phi < 3) fail(ErrorCode::InvalidArgument, "phase sweep needs at least 3 phases");
  PhaseSweep sweep;
  sweep.phis.resize(static_cast<std::size_t>(n_phi));
  sweep.records.resize(static_cast<std::size_t>(n_phi));
  for (int k = 0; k < n_phi; ++k) sweep.phis[static_cast<std::size_t>(k)] = kTwoPi * k / n_phi;
  parallel_for(sweep.phis.size(), threads, [&](std::size_t k) {
    sweep.records[k] =
        simulate_clicks(motion, mode, spec, PhotonState::equal_superposition(sweep.phis[k]),
                        lambda0, window.duration(), substream_seed(seed, k));
  });
  return sweep;
}

EstimateWithError estimate_swept_visibility(const PhaseSweep& sweep) {
  std::size_t total = 0;
  std::vector<Vec3> design;
  std::vector<double> counts;
  for (std::size_t k = 0; k < sweep.records.size(); ++k) {
    total += sweep.records[k].size();
    design.push_back({1.0, std::cos(sweep.phis[k]), std::sin(sweep.phis[k])});
    counts.push_back(static_cast<double>(sweep.records[k].size()));
  }
  if (total < kMinEvents) {
    fail(ErrorCode::TooFewEvents,
         fmt::format("phase sweep needs >= {} events, has {}", kMinEvents, total));
  }
  return contrast_of(fit_counts(design, counts), total);
}

}  // namespace movdet
