#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "movdet/clicksim.hpp"
#include "movdet/gating.hpp"

namespace movdet {

/// Rate prefactor convention written into every sidecar.
inline constexpr const char* kRateConvention =
    "rate = field_scale^2 * |g+ a+ exp(-i W+ tau) + g- a- exp(-i W- tau)|^2 (prefactor 1)";

/// `beta_q,beta_omega_t,v_obs`, row-major over beta_q then beta_omega_t,
/// 17 significant digits.
void write_map_csv(std::ostream& out, const VisibilityMapGrid& grid);
nlohmann::ordered_json map_metadata(const VisibilityMapGrid& grid);

/// `tau` column, one event per row.
void write_record_csv(std::ostream& out, const CountRecord& record);
nlohmann::ordered_json record_metadata(const CountRecord& record);

/// `tau` CSV back into event times; generation parameters are not restored.
CountRecord read_record_csv(std::istream& in, double t_total);

/// Sidecar path for a CSV output: `x.csv` -> `x.json`, otherwise appends `.json`.
std::string sidecar_path(const std::string& csv_path);

/// Writes `text` to `path`; throws Error(Io) on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace movdet
