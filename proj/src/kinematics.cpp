#include "movdet/kinematics.hpp"

#include <cmath>
#include <string>

#include "movdet/errors.hpp"

namespace movdet {

double lorentz_gamma(double beta) {
  if (!std::isfinite(beta) || std::abs(beta) >= 1.0 - kVelocityGuard) {
    fail(ErrorCode::VelocityOutOfRange,
         "|beta| must be below 1 - 1e-9, got " + std::to_string(beta));
  }
  // (1 - b)(1 + b) keeps relative accuracy close to |beta| = 1.
  return 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
}

DetectorMotion::DetectorMotion(double beta) : beta_(beta), gamma_(lorentz_gamma(beta)) {}

LabMode::LabMode(double omega, double field_scale) : omega_(omega), field_scale_(field_scale) {
  if (!std::isfinite(omega) || omega <= 0.0) {
    fail(ErrorCode::InvalidArgument, "mode frequency must be positive");
  }
  if (!std::isfinite(field_scale) || field_scale < 0.0) {
    fail(ErrorCode::InvalidArgument, "field scale must be nonnegative");
  }
}

LabEvent worldline(const DetectorMotion& motion, double tau) {
  if (!std::isfinite(tau)) {
    fail(ErrorCode::InvalidArgument, "proper time must be finite");
  }
  const double t = motion.gamma() * tau;
  return {t, motion.beta() * t};
}

DopplerPair doppler_frequencies(const DetectorMotion& motion, const LabMode& mode) {
  const double g = motion.gamma();
  const double b = motion.beta();
  return {g * (1.0 - b) * mode.omega(), g * (1.0 + b) * mode.omega()};
}

double doppler_splitting(const DetectorMotion& motion, const LabMode& mode) {
  const DopplerPair f = doppler_frequencies(motion, mode);
  return f.minus - f.plus;
}

}  // namespace movdet
