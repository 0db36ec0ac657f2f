#include "movdet/gating.hpp"

#include <fmt/format.h>

#include <cmath>

#include "movdet/errors.hpp"
#include "movdet/parallel.hpp"

namespace movdet {
namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) fail(ErrorCode::InvalidArgument, fmt::format("{} axis is empty", name));
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i]) || axis[i] < 0.0) {
      fail(ErrorCode::InvalidArgument, fmt::format("{} axis values must be >= 0", name));
    }
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      fail(ErrorCode::InvalidArgument, fmt::format("{} axis must be increasing", name));
    }
  }
}

}  // namespace

GateWindow GateWindow::rectangular(double duration) {
  if (!std::isfinite(duration) || duration <= 0.0) {
    fail(ErrorCode::InvalidArgument, "gate duration must be positive");
  }
  return GateWindow(Shape::Rectangular, duration);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    // Taylor series; truncation error < x^6/5040 < 2e-27.
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

Complex gate_average_closed(double delta_omega, const GateWindow& window) {
  switch (window.shape()) {
    case GateWindow::Shape::Rectangular: {
      const double half = 0.5 * delta_omega * window.duration();
      return std::polar(sinc(half), -half);
    }
  }
  return {};
}

Complex gate_average_numeric(double delta_omega, const GateWindow& window, int steps) {
  if (steps < 16) fail(ErrorCode::TooFewSteps, "Simpson quadrature needs at least 16 steps");
  if (steps % 2 != 0) fail(ErrorCode::InvalidArgument, "Simpson step count must be even");
  const double t = window.duration();
  const double h = t / steps;
  auto f = [&](int k) -> Complex {
    switch (window.shape()) {
      case GateWindow::Shape::Rectangular:
        return std::polar(1.0, -delta_omega * (h * k));
    }
    return {};
  };
  Complex odd{}, even{};
  for (int k = 1; k < steps; k += 2) odd += f(k);
  for (int k = 2; k < steps; k += 2) even += f(k);
  const Complex integral = (h / 3.0) * (f(0) + f(steps) + 4.0 * odd + 2.0 * even);
  return integral / t;
}

double observed_visibility(const QubitAnalyzer& analyzer, const DetectorMotion& motion,
                           const LabMode& mode, const GateWindow& window) {
  const double split = doppler_splitting(motion, mode);
  const double scale = std::max(std::abs(split), std::abs(analyzer.delta_omega));
  if (std::abs(analyzer.delta_omega - split) > 1e-9 * scale) {
    fail(ErrorCode::InconsistentBeat,
         fmt::format("analyzer beat {:.17g} does not match splitting {:.17g}",
                     analyzer.delta_omega, split));
  }
  return analyzer.visibility * std::abs(gate_average_closed(split, window));
}

UnsharpnessResult unsharpness_check(double v_obs, double bias) {
  const double lhs = v_obs * v_obs + bias * bias;
  return {lhs, lhs <= 1.0 + 1e-12};
}

VisibilityMapGrid visibility_map(const std::vector<double>& beta_q_axis,
                                 const std::vector<double>& beta_omega_t_axis, double q,
                                 const LabMode& mode, unsigned threads) {
  if (!std::isfinite(q) || q <= 0.0) fail(ErrorCode::NonPositiveQ, "Q must be positive");
  check_axis(beta_q_axis, "beta_q");
  check_axis(beta_omega_t_axis, "beta_omega_t");

  // Validate every derived velocity before any cell work starts.
  for (double bq : beta_q_axis) {
    if (bq / q >= 1.0 - kVelocityGuard) {
      fail(ErrorCode::VelocityOutOfRange,
           fmt::format("beta_q = {:.17g} with Q = {:.17g} implies beta >= 1", bq, q));
    }
  }

  VisibilityMapGrid grid;
  grid.beta_q = beta_q_axis;
  grid.beta_omega_t = beta_omega_t_axis;
  grid.q = q;
  grid.omega = mode.omega();
  const std::size_t ncol = beta_omega_t_axis.size();
  grid.v_obs.assign(beta_q_axis.size() * ncol, 0.0);
  grid.bias.assign(beta_q_axis.size() * ncol, 0.0);

  const double kappa = mode.omega() / q;
  parallel_for(beta_q_axis.size(), threads, [&](std::size_t i) {
    const DetectorMotion motion(beta_q_axis[i] / q);
    const double r = amplitude_ratio_branch_tuned(motion, mode, kappa);
    const RatioVisibility vb = vb_from_ratio(r);
    const double signed_bias = r < 1.0 ? vb.bias_abs : -vb.bias_abs;
    const QubitAnalyzer ideal{vb.visibility, signed_bias, 0.0,
                              doppler_splitting(motion, mode)};
    const double beta_omega = motion.beta() * mode.omega();
    for (std::size_t j = 0; j < ncol; ++j) {
      const double bwt = beta_omega_t_axis[j];
      double v = vb.visibility;
      if (bwt > 0.0) {
        if (beta_omega > 0.0) {
          v = observed_visibility(ideal, motion, mode, GateWindow::rectangular(bwt / beta_omega));
        } else {
          v *= std::abs(sinc(bwt));
        }
      }
      grid.v_obs[i * ncol + j] = v;
      grid.bias[i * ncol + j] = signed_bias;
    }
  });
  return grid;
}

}  // namespace movdet
