#pragma once

#include <complex>
#include <vector>

#include "movdet/kinematics.hpp"
#include "movdet/povm.hpp"

namespace movdet {

/// Proper-time integration window of the count record. Only the normalized
/// rectangular gate exists today; gate_average dispatches on shape().
class GateWindow {
 public:
  enum class Shape { Rectangular };

  static GateWindow rectangular(double duration);

  Shape shape() const noexcept { return shape_; }
  double duration() const noexcept { return duration_; }

 private:
  GateWindow(Shape shape, double duration) : shape_(shape), duration_(duration) {}

  Shape shape_;
  double duration_;
};

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// (1/T) int_0^T exp(-i dOmega tau) dtau = exp(-i dOmega T/2) sinc(dOmega T/2).
Complex gate_average_closed(double delta_omega, const GateWindow& window);

/// Composite Simpson evaluation of the same average. `steps` is the number
/// of subintervals (even, >= 16). With 4096 steps the error against the
/// closed form stays below 1e-9 for |dOmega| T up to ~300 and grows as
/// (|dOmega| T / steps)^4 beyond that.
Complex gate_average_numeric(double delta_omega, const GateWindow& window, int steps);

/// Gated fringe contrast V |sinc(dOmega T / 2)|. The analyzer's beat must
/// match the (motion, mode) splitting to 1e-9 relative.
double observed_visibility(const QubitAnalyzer& analyzer, const DetectorMotion& motion,
                           const LabMode& mode, const GateWindow& window);

struct UnsharpnessResult {
  double lhs;
  bool satisfied;
};

/// V_obs^2 + B^2 and whether it stays <= 1 (with 1e-12 slack).
UnsharpnessResult unsharpness_check(double v_obs, double bias);

/// Observed visibility over (beta Q, beta omega T). Row-major: index
/// i * beta_omega_t.size() + j holds beta_q[i], beta_omega_t[j].
struct VisibilityMapGrid {
  std::vector<double> beta_q;
  std::vector<double> beta_omega_t;
  std::vector<double> v_obs;
  std::vector<double> bias;  ///< ungated signed bias per cell
  double q = 0.0;
  double omega = 1.0;

  double at(std::size_t i, std::size_t j) const { return v_obs[i * beta_omega_t.size() + j]; }
};

/// Branch-tuned Lorentzian (omega0 = Omega_+, kappa = omega/Q) at
/// beta = betaQ/Q, gated for T = betaOmegaT/(beta omega). Cells with
/// betaQ = 0 take the beta -> 0 limit |sinc(betaOmegaT)|; cells with
/// betaOmegaT = 0 are ungated. Output is independent of `threads`.
VisibilityMapGrid visibility_map(const std::vector<double>& beta_q_axis,
                                 const std::vector<double>& beta_omega_t_axis, double q,
                                 const LabMode& mode, unsigned threads = 1);

}  // namespace movdet
