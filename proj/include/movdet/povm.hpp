#pragma once

#include <array>
#include <complex>

#include "movdet/kinematics.hpp"
#include "movdet/response.hpp"

namespace movdet {

/// Velocity-dependent detection amplitudes g+ and g- for the two
/// propagation modes, g(+/-) = gamma (1 -/+ beta) chi(Omega_+/-).
/// At least one amplitude is nonzero.
class DetectionAmplitudes {
 public:
  DetectionAmplitudes(Complex g_plus, Complex g_minus, double delta_omega,
                      double field_scale = 1.0);

  Complex g_plus() const noexcept { return g_plus_; }
  Complex g_minus() const noexcept { return g_minus_; }
  double delta_omega() const noexcept { return delta_omega_; }
  double field_scale() const noexcept { return field_scale_; }

 private:
  Complex g_plus_;
  Complex g_minus_;
  double delta_omega_;
  double field_scale_;
};

/// Normalized one-photon state alpha+ |+> + alpha- |->.
class PhotonState {
 public:
  /// Normalizes the input; throws InvalidArgument for the zero vector.
  PhotonState(Complex alpha_plus, Complex alpha_minus);

  /// (|+> + e^{i phi} |->) / sqrt(2)
  static PhotonState equal_superposition(double phi);
  static PhotonState plus() { return {1.0, 0.0}; }
  static PhotonState minus() { return {0.0, 1.0}; }

  Complex alpha_plus() const noexcept { return alpha_plus_; }
  Complex alpha_minus() const noexcept { return alpha_minus_; }

  /// m = (2 Re(a+* a-), 2 Im(a+* a-), |a+|^2 - |a-|^2)
  std::array<double, 3> bloch_vector() const;

 private:
  Complex alpha_plus_;
  Complex alpha_minus_;
};

/// Normalized click effect seen as a qubit analyzer.
struct QubitAnalyzer {
  double visibility;
  double bias;
  double phase_offset;  ///< arg(g+* g-)
  double delta_omega;

  /// Azimuth of the analyzer axis at proper time tau.
  double azimuth(double tau) const { return delta_omega * tau - phase_offset; }
};

struct BlochEffect {
  std::array<double, 3> n;
  double trace_weight;
};

struct VisibilityBias {
  double visibility;
  double bias;
};

struct RatioVisibility {
  double visibility;
  double bias_abs;
};

DetectionAmplitudes detection_amplitudes(const DetectorMotion& motion, const LabMode& mode,
                                         const SusceptibilitySpec& spec);

/// field_scale^2 |g+ a+ + g- a- e^{-i dOmega tau}|^2 (global phase dropped,
/// proportionality constant 1).
double click_rate(const DetectionAmplitudes& amps, const PhotonState& state, double tau);

double visibility(const DetectionAmplitudes& amps);
double bias(const DetectionAmplitudes& amps);
QubitAnalyzer analyzer(const DetectionAmplitudes& amps);

/// Unit Bloch vector n and weight w with click_rate = w (1 + n . m).
BlochEffect bloch_effect(const DetectionAmplitudes& amps, double tau);

/// Visibility and bias of a flat response: ((1-b^2)/(1+b^2), -2b/(1+b^2)).
VisibilityBias broadband_closed_form(double beta);

/// |g-|/|g+| for a Lorentzian resonance at omega0 with width kappa.
double amplitude_ratio_general(const DetectorMotion& motion, const LabMode& mode, double omega0,
                               double kappa);

/// |g-|/|g+| with the resonance on the plus branch.
double amplitude_ratio_branch_tuned(const DetectorMotion& motion, const LabMode& mode,
                                    double kappa);

RatioVisibility vb_from_ratio(double r);

/// Onset velocity 1/(4Q). Returned as-is even when >= 1.
double crossover_beta(double q);

}  // namespace movdet
