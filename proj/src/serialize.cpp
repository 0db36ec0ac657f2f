#include "movdet/serialize.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>

#include "movdet/errors.hpp"
#include "movdet/rng.hpp"

namespace movdet {

void write_map_csv(std::ostream& out, const VisibilityMapGrid& grid) {
  out << "beta_q,beta_omega_t,v_obs\n";
  const std::size_t ncol = grid.beta_omega_t.size();
  for (std::size_t i = 0; i < grid.beta_q.size(); ++i) {
    for (std::size_t j = 0; j < ncol; ++j) {
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", grid.beta_q[i], grid.beta_omega_t[j],
                         grid.v_obs[i * ncol + j]);
    }
  }
}

nlohmann::ordered_json map_metadata(const VisibilityMapGrid& grid) {
  nlohmann::ordered_json meta;
  meta["kind"] = "visibility_map";
  meta["software"] = "movdet";
  meta["version"] = MOVDET_VERSION;
  meta["q"] = grid.q;
  meta["omega"] = grid.omega;
  meta["kappa"] = grid.omega / grid.q;
  meta["rows"] = grid.beta_q.size() * grid.beta_omega_t.size();
  meta["beta_q_axis"] = {{"min", grid.beta_q.front()},
                         {"max", grid.beta_q.back()},
                         {"n", grid.beta_q.size()}};
  meta["beta_omega_t_axis"] = {{"min", grid.beta_omega_t.front()},
                               {"max", grid.beta_omega_t.back()},
                               {"n", grid.beta_omega_t.size()}};
  meta["conventions"] = {
      {"units", "natural, c = 1"},
      {"q_definition", "Q = omega / kappa"},
      {"tuning", "Lorentzian resonance omega0 = Omega_plus at beta = beta_q / Q"},
      {"gate", "rectangular, T = beta_omega_t / (beta omega)"},
      {"beta_q_zero_limit", "v_obs = |sinc(beta_omega_t)|"},
      {"row_order", "row-major over beta_q then beta_omega_t"},
      {"rate", kRateConvention},
  };
  return meta;
}

void write_record_csv(std::ostream& out, const CountRecord& record) {
  out << "tau\n";
  for (double t : record.event_times) out << fmt::format("{:.17g}\n", t);
}

nlohmann::ordered_json record_metadata(const CountRecord& record) {
  const RecordParams& p = record.params;
  nlohmann::ordered_json meta;
  meta["kind"] = "count_record";
  meta["software"] = "movdet";
  meta["version"] = MOVDET_VERSION;
  meta["beta"] = p.beta;
  meta["omega"] = p.omega;
  meta["field_scale"] = p.field_scale;
  meta["susceptibility"] = p.spec;
  meta["alpha_plus"] = {p.alpha_plus.real(), p.alpha_plus.imag()};
  meta["alpha_minus"] = {p.alpha_minus.real(), p.alpha_minus.imag()};
  meta["lambda0"] = p.lambda0;
  meta["t_total"] = p.t_total;
  meta["delta_omega"] = record.delta_omega;
  meta["seed"] = record.seed;
  meta["rng"] = std::string(Philox4x64::kAlgorithm);
  meta["sampler"] = "thinning against lambda0 E^2 (|g+||a+| + |g-||a-|)^2";
  meta["fingerprint"] = fmt::format("{:016x}", record.params_fingerprint);
  meta["n_events"] = record.size();
  meta["rate_convention"] = kRateConvention;
  return meta;
}

CountRecord read_record_csv(std::istream& in, double t_total) {
  std::string line;
  if (!std::getline(in, line) || (line != "tau" && line != "tau\r")) {
    fail(ErrorCode::Io, "record CSV must start with header 'tau'");
  }
  CountRecord record;
  record.t_total = t_total;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    try {
      record.event_times.push_back(std::stod(line));
    } catch (const std::exception&) {
      fail(ErrorCode::Io, "malformed record row '" + line + "'");
    }
  }
  return record;
}

std::string sidecar_path(const std::string& csv_path) {
  constexpr std::string_view ext = ".csv";
  if (csv_path.size() > ext.size() &&
      csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0) {
    return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
  }
  return csv_path + ".json";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  out << text;
  if (!out) fail(ErrorCode::Io, "write to " + path + " failed");
}

}  // namespace movdet
