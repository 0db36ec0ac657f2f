#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "movdet/gating.hpp"
#include "movdet/povm.hpp"

namespace movdet {

/// Everything that determines a record, in canonical form.
struct RecordParams {
  double beta = 0.0;
  double omega = 1.0;
  double field_scale = 1.0;
  std::string spec;  ///< SusceptibilitySpec::describe()
  Complex alpha_plus;
  Complex alpha_minus;
  double lambda0 = 1.0;
  double t_total = 1.0;
  std::uint64_t seed = 0;

  /// Canonical string; `with_state` / `with_seed` drop those fields.
  std::string canonical(bool with_state = true, bool with_seed = true) const;
};

/// Synthetic detection events on [0, t_total].
struct CountRecord {
  std::vector<double> event_times;  ///< strictly increasing
  double t_total = 0.0;
  double rate_scale = 0.0;  ///< lambda0
  std::uint64_t params_fingerprint = 0;
  std::uint64_t seed = 0;
  RecordParams params;
  double delta_omega = 0.0;  ///< beat of the generating effect

  std::size_t size() const noexcept { return event_times.size(); }
};

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_events = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Inhomogeneous Poisson record with intensity lambda0 * click_rate, drawn by
/// thinning against the exact ceiling lambda0 E^2 (|g+||a+| + |g-||a-|)^2.
/// Bitwise reproducible for a given seed.
CountRecord simulate_clicks(const DetectorMotion& motion, const LabMode& mode,
                            const SusceptibilitySpec& spec, const PhotonState& state,
                            double lambda0, double t_total, std::uint64_t seed);

/// Event-time periodogram |sum_j exp(i W tau_j)|^2 at each frequency.
std::vector<double> periodogram(const CountRecord& record, const std::vector<double>& freq_grid,
                                unsigned threads = 1);

/// Beat frequency from the periodogram maximum on `freq_grid`, refined by
/// golden-section search between the neighbouring grid points. The grid
/// spacing should be below pi / t_total so the main lobe is resolved. The
/// standard error is a sandwich estimate built from the peak curvature
/// and Poisson fluctuation of the score.
EstimateWithError estimate_beat(const CountRecord& record, const std::vector<double>& freq_grid,
                                unsigned threads = 1);

/// Fringe visibility from events binned by beat phase (delta_omega tau mod
/// 2 pi). Bin expectations are integrated exactly over each bin's phase
/// range and exposure time, so neither the bin width nor a partial last
/// period biases the fit.
EstimateWithError estimate_visibility(const CountRecord& record, double delta_omega,
                                      int bins = 16);

/// (N+ - N-)/(N+ + N-) from records generated with |+> and |->.
EstimateWithError estimate_bias(const CountRecord& record_plus, const CountRecord& record_minus);

/// Windowed-count records: one gate of length T per relative phase phi_k =
/// 2 pi k / n_phi, each starting at tau = 0.
struct PhaseSweep {
  std::vector<double> phis;
  std::vector<CountRecord> records;
};

PhaseSweep simulate_phase_sweep(const DetectorMotion& motion, const LabMode& mode,
                                const SusceptibilitySpec& spec, const GateWindow& window,
                                double lambda0, std::uint64_t seed, int n_phi = 12,
                                unsigned threads = 1);

/// Contrast of total counts versus phi from a cosine fit; targets the gated
/// visibility V |sinc(dOmega T/2)|.
EstimateWithError estimate_swept_visibility(const PhaseSweep& sweep);

}  // namespace movdet
