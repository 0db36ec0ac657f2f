#include "movdet/povm.hpp"

#include <cmath>

#include "movdet/errors.hpp"

namespace movdet {
namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// |g+|^2 and |g-|^2 rescaled by the larger modulus so that tiny or huge
// susceptibilities do not under/overflow. Ratios are unaffected.
struct Weights {
  double plus;
  double minus;
};

Weights scaled_weights(const DetectionAmplitudes& amps) {
  const double ap = std::abs(amps.g_plus());
  const double am = std::abs(amps.g_minus());
  const double s = std::max(ap, am);
  const double p = ap / s;
  const double m = am / s;
  return {p * p, m * m};
}

}  // namespace

DetectionAmplitudes::DetectionAmplitudes(Complex g_plus, Complex g_minus, double delta_omega,
                                         double field_scale)
    : g_plus_(g_plus), g_minus_(g_minus), delta_omega_(delta_omega), field_scale_(field_scale) {
  if (!finite(g_plus) || !finite(g_minus) || !std::isfinite(delta_omega)) {
    fail(ErrorCode::InvalidArgument, "detection amplitudes must be finite");
  }
  if (!std::isfinite(field_scale) || field_scale < 0.0) {
    fail(ErrorCode::InvalidArgument, "field scale must be nonnegative");
  }
  if (g_plus == Complex{} && g_minus == Complex{}) {
    fail(ErrorCode::NullEffect, "both detection amplitudes vanish");
  }
}

PhotonState::PhotonState(Complex alpha_plus, Complex alpha_minus) {
  const double norm = std::hypot(std::abs(alpha_plus), std::abs(alpha_minus));
  if (!std::isfinite(norm) || norm == 0.0) {
    fail(ErrorCode::InvalidArgument, "photon state amplitudes must be finite and nonzero");
  }
  alpha_plus_ = alpha_plus / norm;
  alpha_minus_ = alpha_minus / norm;
}

PhotonState PhotonState::equal_superposition(double phi) {
  const double h = 1.0 / std::sqrt(2.0);
  return {h, std::polar(h, phi)};
}

std::array<double, 3> PhotonState::bloch_vector() const {
  const Complex c = std::conj(alpha_plus_) * alpha_minus_;
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(alpha_plus_) - std::norm(alpha_minus_)};
}

DetectionAmplitudes detection_amplitudes(const DetectorMotion& motion, const LabMode& mode,
                                         const SusceptibilitySpec& spec) {
  const DopplerPair f = doppler_frequencies(motion, mode);
  const double g = motion.gamma();
  const double b = motion.beta();
  const Complex g_plus = g * (1.0 - b) * spec.evaluate(f.plus);
  const Complex g_minus = g * (1.0 + b) * spec.evaluate(f.minus);
  return DetectionAmplitudes(g_plus, g_minus, f.minus - f.plus, mode.field_scale());
}

double click_rate(const DetectionAmplitudes& amps, const PhotonState& state, double tau) {
  const Complex beat = std::polar(1.0, -amps.delta_omega() * tau);
  const Complex a = amps.g_plus() * state.alpha_plus() + amps.g_minus() * state.alpha_minus() * beat;
  const double e = amps.field_scale();
  return e * e * std::norm(a);
}

double visibility(const DetectionAmplitudes& amps) {
  const Weights w = scaled_weights(amps);
  return 2.0 * std::sqrt(w.plus * w.minus) / (w.plus + w.minus);
}

double bias(const DetectionAmplitudes& amps) {
  const Weights w = scaled_weights(amps);
  return (w.plus - w.minus) / (w.plus + w.minus);
}

QubitAnalyzer analyzer(const DetectionAmplitudes& amps) {
  return {visibility(amps), bias(amps), std::arg(std::conj(amps.g_plus()) * amps.g_minus()),
          amps.delta_omega()};
}

BlochEffect bloch_effect(const DetectionAmplitudes& amps, double tau) {
  const QubitAnalyzer a = analyzer(amps);
  const double theta = a.azimuth(tau);
  const double e = amps.field_scale();
  const double weight =
      0.5 * e * e * (std::norm(amps.g_plus()) + std::norm(amps.g_minus()));
  return {{a.visibility * std::cos(theta), a.visibility * std::sin(theta), a.bias}, weight};
}

VisibilityBias broadband_closed_form(double beta) {
  lorentz_gamma(beta);  // range check only
  const double d = 1.0 + beta * beta;
  return {(1.0 - beta) * (1.0 + beta) / d, -2.0 * beta / d};
}

double amplitude_ratio_general(const DetectorMotion& motion, const LabMode& mode, double omega0,
                               double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    fail(ErrorCode::NonPositiveWidth, "linewidth kappa must be positive");
  }
  const DopplerPair f = doppler_frequencies(motion, mode);
  const double b = motion.beta();
  const double half = 0.5 * kappa;
  const double dp = f.plus - omega0;
  const double dm = f.minus - omega0;
  return (1.0 + b) / (1.0 - b) * std::sqrt((half * half + dp * dp) / (half * half + dm * dm));
}

double amplitude_ratio_branch_tuned(const DetectorMotion& motion, const LabMode& mode,
                                    double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    fail(ErrorCode::NonPositiveWidth, "linewidth kappa must be positive");
  }
  const double b = motion.beta();
  const double x = 4.0 * motion.gamma() * b * mode.omega() / kappa;
  return (1.0 + b) / (1.0 - b) / std::sqrt(1.0 + x * x);
}

RatioVisibility vb_from_ratio(double r) {
  if (!std::isfinite(r) || r <= 0.0) {
    fail(ErrorCode::NonPositiveRatio, "amplitude ratio must be positive");
  }
  const double d = 1.0 + r * r;
  return {2.0 * r / d, std::abs((1.0 - r) * (1.0 + r)) / d};
}

double crossover_beta(double q) {
  if (!std::isfinite(q) || q <= 0.0) fail(ErrorCode::NonPositiveQ, "Q must be positive");
  return 1.0 / (4.0 * q);
}

}  // namespace movdet
