#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "movdet/kinematics.hpp"

namespace movdet {

using Complex = std::complex<double>;

/// Frequency-independent response.
struct Broadband {
  Complex chi0;
};

/// chi(W) = chi0 / (kappa/2 - i (W - omega0)). kappa is the FWHM of |chi|^2.
struct Lorentzian {
  Complex chi0;
  double omega0;
  double kappa;
};

/// Measured response sampled on a strictly increasing grid. Evaluation
/// interpolates real and imaginary parts linearly and never extrapolates.
struct Tabulated {
  std::vector<double> grid;
  std::vector<Complex> values;
};

/// Rest-frame detector susceptibility. Immutable once built; the factories
/// validate their arguments.
class SusceptibilitySpec {
 public:
  using Variant = std::variant<Broadband, Lorentzian, Tabulated>;

  static SusceptibilitySpec broadband(Complex chi0);
  static SusceptibilitySpec lorentzian(Complex chi0, double omega0, double kappa);
  static SusceptibilitySpec tabulated(std::vector<double> grid, std::vector<Complex> values);

  Complex evaluate(double omega) const;

  /// Same shape with every chi value multiplied by c.
  SusceptibilitySpec scaled(Complex c) const;

  const Variant& variant() const noexcept { return shape_; }
  std::string kind() const;

  /// Canonical text form used for fingerprints and metadata.
  std::string describe() const;

 private:
  explicit SusceptibilitySpec(Variant shape) : shape_(std::move(shape)) {}

  Variant shape_;
};

inline Complex evaluate(const SusceptibilitySpec& spec, double omega) {
  return spec.evaluate(omega);
}

/// Q = omega / kappa using the laboratory mode frequency.
double q_factor(const LabMode& mode, double kappa);

enum class Branch { Plus, Minus };

/// Lorentzian with its resonance placed on one Doppler branch for the given
/// velocity. The tuning is a snapshot; it does not follow later velocities.
SusceptibilitySpec branch_tuned_lorentzian(const DetectorMotion& motion, const LabMode& mode,
                                           Complex chi0, double kappa, Branch branch);

/// Reads `omega,chi_re,chi_im` CSV (header required, increasing omega).
SusceptibilitySpec read_susceptibility_csv(std::istream& in);
SusceptibilitySpec load_susceptibility_csv(const std::string& path);
void write_susceptibility_csv(std::ostream& out, const Tabulated& table);

}  // namespace movdet
