#pragma once

// Uniform collinear detector motion in natural units (c = 1).

namespace movdet {

/// Velocities with |beta| >= 1 - kVelocityGuard are rejected. Keeps
/// gamma below ~2.2e4.
inline constexpr double kVelocityGuard = 1e-9;

/// Lorentz factor (1 - beta^2)^(-1/2). Throws VelocityOutOfRange.
double lorentz_gamma(double beta);

/// Signed velocity fraction beta = v/c with its cached Lorentz factor.
/// Positive beta is motion along +x.
class DetectorMotion {
 public:
  explicit DetectorMotion(double beta);

  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }

  DetectorMotion reversed() const { return DetectorMotion(-beta_); }

 private:
  double beta_;
  double gamma_;
};

/// One laboratory plane-wave mode: angular frequency omega (k = omega)
/// and the field amplitude scale.
class LabMode {
 public:
  explicit LabMode(double omega, double field_scale = 1.0);

  double omega() const noexcept { return omega_; }
  double field_scale() const noexcept { return field_scale_; }

 private:
  double omega_;
  double field_scale_;
};

struct LabEvent {
  double t;
  double x;
};

/// Laboratory coordinates of the detector at proper time tau.
LabEvent worldline(const DetectorMotion& motion, double tau);

/// Detector-frame frequencies of the +x (plus) and -x (minus) propagating
/// modes.
struct DopplerPair {
  double plus;
  double minus;
};

DopplerPair doppler_frequencies(const DetectorMotion& motion, const LabMode& mode);

/// Beat frequency Omega_minus - Omega_plus (= 2 gamma beta omega). Signed.
double doppler_splitting(const DetectorMotion& motion, const LabMode& mode);

}  // namespace movdet
