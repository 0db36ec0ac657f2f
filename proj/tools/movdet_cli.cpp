// movdet: command-line front end for the moving-detector photodetection model.
//
//   movdet povm      --beta 0.5 --omega 1 --chi broadband
//   movdet map       --q 10 --grid-bq 0:2:64 --grid-bwt 0:6:64 --out map.csv
//   movdet clicks    --beta 0.6 --lambda0 50 --t-total 200 --seed 1 --out run
//   movdet selfcheck
//
// Every flag may also come from a JSON file given with --config; keys are the
// long flag names without dashes. Flags on the command line win.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "movdet/clicksim.hpp"
#include "movdet/errors.hpp"
#include "movdet/gating.hpp"
#include "movdet/parallel.hpp"
#include "movdet/povm.hpp"
#include "movdet/rng.hpp"
#include "movdet/selfcheck.hpp"
#include "movdet/serialize.hpp"

namespace {

using namespace movdet;
using json = nlohmann::ordered_json;

enum Exit : int { kOk = 0, kValidation = 2, kInvariant = 3, kIo = 4 };

constexpr double kPi = 3.14159265358979323846;

struct Options {
  double beta = 0.0;
  double omega = 1.0;
  double field_scale = 1.0;
  std::string chi = "broadband";
  double chi0_re = 1.0;
  double chi0_im = 0.0;
  std::optional<double> omega0;
  std::optional<double> kappa;
  std::string tune = "none";
  double phi = 0.0;
  std::optional<double> gate_t;
  std::optional<double> q;
  std::string grid_bq;
  std::string grid_bwt;
  std::string beat_grid;
  double lambda0 = 1.0;
  double t_total = 1000.0;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 1;
};

// Human-facing numbers: 6 significant digits.
std::string h(double x) { return fmt::format("{:.6g}", x); }

std::vector<double> parse_axis(const std::string& text, const char* flag) {
  double lo = 0, hi = 0;
  long n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 ||
      !in.eof() || (n > 1 && !(hi > lo))) {
    fail(ErrorCode::InvalidArgument,
         fmt::format("{} expects MIN:MAX:N with N >= 1 and MAX > MIN, got '{}'", flag, text));
  }
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    axis[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
  }
  return axis;
}

struct Model {
  DetectorMotion motion;
  LabMode mode;
  SusceptibilitySpec spec;
};

Model build_model(const Options& o) {
  DetectorMotion motion(o.beta);
  LabMode mode(o.omega, o.field_scale);
  const Complex chi0(o.chi0_re, o.chi0_im);
  if (o.chi == "broadband") {
    return {motion, mode, SusceptibilitySpec::broadband(chi0)};
  }
  if (o.chi == "lorentzian") {
    if (!o.kappa) fail(ErrorCode::InvalidArgument, "--chi lorentzian requires --kappa");
    if (o.tune == "plus" || o.tune == "minus") {
      if (o.omega0) fail(ErrorCode::InvalidArgument, "--omega0 conflicts with --tune plus|minus");
      return {motion, mode,
              branch_tuned_lorentzian(motion, mode, chi0, *o.kappa,
                                      o.tune == "plus" ? Branch::Plus : Branch::Minus)};
    }
    if (!o.omega0) {
      fail(ErrorCode::InvalidArgument, "--chi lorentzian needs --omega0 or --tune plus|minus");
    }
    return {motion, mode, SusceptibilitySpec::lorentzian(chi0, *o.omega0, *o.kappa)};
  }
  if (o.chi.rfind("table:", 0) == 0) {
    return {motion, mode, load_susceptibility_csv(o.chi.substr(6))};
  }
  fail(ErrorCode::InvalidArgument, "--chi must be broadband, lorentzian or table:PATH");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

int cmd_povm(const Options& o) {
  const Model m = build_model(o);
  std::optional<GateWindow> gate;
  if (o.gate_t) gate = GateWindow::rectangular(*o.gate_t);

  const DetectionAmplitudes amps = detection_amplitudes(m.motion, m.mode, m.spec);
  const QubitAnalyzer a = analyzer(amps);
  const BlochEffect e = bloch_effect(amps, 0.0);
  const double r = std::abs(amps.g_minus()) / std::abs(amps.g_plus());
  const VisibilityBias broad = broadband_closed_form(o.beta);
  const DopplerPair f = doppler_frequencies(m.motion, m.mode);

  json report;
  report["beta"] = o.beta;
  report["gamma"] = m.motion.gamma();
  report["omega"] = o.omega;
  report["susceptibility"] = m.spec.describe();
  report["omega_plus"] = f.plus;
  report["omega_minus"] = f.minus;
  report["delta_omega"] = amps.delta_omega();
  report["g_plus"] = complex_json(amps.g_plus());
  report["g_minus"] = complex_json(amps.g_minus());
  report["ratio"] = r;
  report["visibility"] = a.visibility;
  report["bias"] = a.bias;
  report["phase_offset"] = a.phase_offset;
  report["bloch_n_tau0"] = {e.n[0], e.n[1], e.n[2]};
  report["trace_weight"] = e.trace_weight;
  report["broadband_visibility"] = broad.visibility;
  report["broadband_bias"] = broad.bias;

  std::cout << "detector      beta " << h(o.beta) << "  gamma " << h(m.motion.gamma())
            << "  omega " << h(o.omega) << "\n"
            << "response      " << m.spec.kind() << "\n"
            << "branches      W+ " << h(f.plus) << "  W- " << h(f.minus) << "  dW "
            << h(amps.delta_omega()) << "\n"
            << "g+            " << h(amps.g_plus().real()) << " " << h(amps.g_plus().imag())
            << "i\n"
            << "g-            " << h(amps.g_minus().real()) << " " << h(amps.g_minus().imag())
            << "i\n"
            << "r = |g-|/|g+| " << h(r) << "\n"
            << "V             " << h(a.visibility) << "\n"
            << "B             " << h(a.bias) << "\n"
            << "phase offset  " << h(a.phase_offset) << " rad\n"
            << "Bloch n(0)    (" << h(e.n[0]) << ", " << h(e.n[1]) << ", " << h(e.n[2]) << ")\n"
            << "broadband     V " << h(broad.visibility) << "  B " << h(broad.bias) << "\n";

  if (const auto* lz = std::get_if<Lorentzian>(&m.spec.variant())) {
    const double q = q_factor(m.mode, lz->kappa);
    const double rg = amplitude_ratio_general(m.motion, m.mode, lz->omega0, lz->kappa);
    report["q"] = q;
    report["crossover_beta"] = crossover_beta(q);
    report["ratio_lorentzian_formula"] = rg;
    std::cout << "Q = omega/kappa " << h(q) << "  crossover beta 1/(4Q) " << h(crossover_beta(q))
              << "\n"
              << "r (Lorentzian ratio formula) " << h(rg) << "\n";
  }
  if (gate) {
    const double v_obs = observed_visibility(a, m.motion, m.mode, *gate);
    const UnsharpnessResult u = unsharpness_check(v_obs, a.bias);
    report["gate_T"] = gate->duration();
    report["v_obs"] = v_obs;
    report["unsharpness_lhs"] = u.lhs;
    std::cout << "gated V_obs   " << h(v_obs) << "  (T = " << h(gate->duration())
              << ")  V_obs^2 + B^2 = " << h(u.lhs) << (u.satisfied ? "" : "  VIOLATED") << "\n";
  }
  report["rate_convention"] = kRateConvention;
  if (!o.out.empty()) write_text_file(o.out, report.dump(2) + "\n");
  return kOk;
}

int cmd_map(const Options& o) {
  if (!o.q) fail(ErrorCode::InvalidArgument, "map requires --q");
  if (o.grid_bq.empty() || o.grid_bwt.empty()) {
    fail(ErrorCode::InvalidArgument, "map requires --grid-bq and --grid-bwt");
  }
  const auto bq = parse_axis(o.grid_bq, "--grid-bq");
  const auto bwt = parse_axis(o.grid_bwt, "--grid-bwt");
  const LabMode mode(o.omega);
  const VisibilityMapGrid grid = visibility_map(bq, bwt, *o.q, mode, o.threads);

  std::ostringstream csv;
  write_map_csv(csv, grid);
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(o.out, csv.str());
    write_text_file(sidecar_path(o.out), map_metadata(grid).dump(2) + "\n");
    std::cerr << "wrote " << grid.v_obs.size() << " cells to " << o.out << "\n";
  }
  return kOk;
}

void write_record(const std::string& stem, const CountRecord& rec) {
  std::ostringstream csv;
  write_record_csv(csv, rec);
  write_text_file(stem + ".csv", csv.str());
  write_text_file(stem + ".json", record_metadata(rec).dump(2) + "\n");
}

json estimate_json(const EstimateWithError& e, double target) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"n_events", e.n_events},
          {"target", target}};
}

void print_estimate(const char* label, const EstimateWithError& e, double target) {
  std::cout << fmt::format("{:<18} {:>12} +- {:<10} target {:>10}  ({} events)\n", label,
                           h(e.value), h(e.std_error), h(target), e.n_events);
}

int cmd_clicks(const Options& o) {
  const Model m = build_model(o);
  if (!(o.lambda0 > 0.0)) fail(ErrorCode::InvalidArgument, "--lambda0 must be positive");
  if (!(o.t_total > 0.0)) fail(ErrorCode::InvalidArgument, "--t-total must be positive");
  std::optional<GateWindow> gate;
  if (o.gate_t) gate = GateWindow::rectangular(*o.gate_t);
  std::vector<double> beat_grid;
  if (!o.beat_grid.empty()) beat_grid = parse_axis(o.beat_grid, "--beat-grid");

  const DetectionAmplitudes amps = detection_amplitudes(m.motion, m.mode, m.spec);
  const QubitAnalyzer target = analyzer(amps);

  // Superposition, |+>, |-> on independent substreams.
  const std::vector<PhotonState> states{PhotonState::equal_superposition(o.phi),
                                        PhotonState::plus(), PhotonState::minus()};
  std::vector<CountRecord> records(states.size());
  parallel_for(states.size(), o.threads, [&](std::size_t k) {
    records[k] = simulate_clicks(m.motion, m.mode, m.spec, states[k], o.lambda0, o.t_total,
                                 substream_seed(o.seed, k));
  });
  const CountRecord& main = records[0];

  json report;
  report["seed"] = o.seed;
  report["rng"] = std::string(Philox4x64::kAlgorithm);
  report["n_events"] = {main.size(), records[1].size(), records[2].size()};
  json estimates = json::object();
  json notices = json::array();
  auto skipped = [&](const char* what, const Error& e) {
    const std::string msg = fmt::format("{} skipped: {}", what, e.what());
    std::cout << msg << "\n";
    notices.push_back(msg);
  };

  std::cout << "record            " << main.size() << " events on [0, " << h(o.t_total)
            << "], seed " << o.seed << "\n";
  if (main.size() == 0) std::cout << "record is empty; record-based estimators are skipped\n";

  const double beat_target = std::abs(amps.delta_omega());
  if (beat_grid.empty() && beat_target > 0.0) {
    // Auto grid: spacing pi/(4T) from ten DC lobe widths to 2 gamma (1+|beta|) omega.
    const double step = kPi / (4.0 * o.t_total);
    const double lo = 20.0 * kPi / o.t_total;
    const double hi = 2.0 * m.motion.gamma() * (1.0 + std::abs(o.beta)) * o.omega;
    const auto n = static_cast<long>((hi - lo) / step) + 1;
    if (n >= 3 && n <= 200000) {
      for (long k = 0; k < n; ++k) beat_grid.push_back(lo + step * k);
    } else {
      const std::string msg =
          fmt::format("beat estimate skipped: automatic grid would need {} points; pass --beat-grid", n);
      std::cout << msg << "\n";
      notices.push_back(msg);
    }
  }
  if (!beat_grid.empty()) {
    try {
      const auto e = estimate_beat(main, beat_grid, o.threads);
      print_estimate("beat dW", e, beat_target);
      estimates["beat"] = estimate_json(e, beat_target);
    } catch (const Error& e) {
      skipped("beat estimate", e);
    }
  }
  try {
    const auto e = estimate_visibility(main, beat_target);
    print_estimate("visibility V", e, target.visibility);
    estimates["visibility"] = estimate_json(e, target.visibility);
  } catch (const Error& e) {
    skipped("visibility estimate", e);
  }
  try {
    const auto e = estimate_bias(records[1], records[2]);
    print_estimate("bias B", e, target.bias);
    estimates["bias"] = estimate_json(e, target.bias);
  } catch (const Error& e) {
    skipped("bias estimate", e);
  }
  if (gate) {
    const double v_obs = observed_visibility(target, m.motion, m.mode, *gate);
    const PhaseSweep sweep = simulate_phase_sweep(m.motion, m.mode, m.spec, *gate, o.lambda0,
                                                  substream_seed(o.seed, 0x100), 12, o.threads);
    json counts = json::array();
    for (const auto& r : sweep.records) counts.push_back(r.size());
    report["phase_sweep_counts"] = counts;
    try {
      const auto e = estimate_swept_visibility(sweep);
      print_estimate("gated V_obs", e, v_obs);
      estimates["gated_visibility"] = estimate_json(e, v_obs);
    } catch (const Error& e) {
      skipped("gated visibility estimate", e);
    }
  }
  report["estimates"] = estimates;
  report["notices"] = notices;

  if (!o.out.empty()) {
    write_record(o.out, main);
    write_record(o.out + "_plus", records[1]);
    write_record(o.out + "_minus", records[2]);
    write_text_file(o.out + "_report.json", report.dump(2) + "\n");
  }
  return kOk;
}

int cmd_selfcheck(const Options& o) {
  const auto results = run_selfcheck(o.threads);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::cout << fmt::format("[{}] {:<11} {:<48} {}\n", r.passed ? "PASS" : "FAIL", r.module,
                             r.name, r.detail);
    if (!r.passed) ++failed;
  }
  std::cout << fmt::format("{} of {} checks passed\n", results.size() - failed, results.size());
  return failed ? kInvariant : kOk;
}

// Turns the JSON config into leading "--key value" tokens so that later
// command-line flags override them.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) fail(ErrorCode::InvalidArgument, "config must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    tokens.push_back("--" + key);
    if (value.is_string()) {
      tokens.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      tokens.push_back(value.dump());
    } else if (value.is_number()) {
      tokens.push_back(fmt::format("{:.17g}", value.get<double>()));
    } else {
      fail(ErrorCode::InvalidArgument, "config value for '" + key + "' must be a string or number");
    }
  }
  return tokens;
}

void add_model_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--beta", o.beta, "Detector velocity v/c, |beta| < 1 - 1e-9")->capture_default_str();
  cmd.add_option("--omega", o.omega, "Laboratory mode angular frequency (> 0)")->capture_default_str();
  cmd.add_option("--field-scale", o.field_scale, "Mode field amplitude scale E (>= 0)")
      ->capture_default_str();
  cmd.add_option("--chi", o.chi, "Susceptibility: broadband | lorentzian | table:PATH")
      ->capture_default_str();
  cmd.add_option("--chi0-re", o.chi0_re, "Real part of chi0")->capture_default_str();
  cmd.add_option("--chi0-im", o.chi0_im, "Imaginary part of chi0")->capture_default_str();
  cmd.add_option("--omega0", o.omega0, "Lorentzian resonance (when --tune none)");
  cmd.add_option("--kappa", o.kappa, "Lorentzian FWHM of |chi|^2 (> 0)");
  cmd.add_option("--tune", o.tune, "Place the resonance on a Doppler branch: plus | minus | none")
      ->check(CLI::IsMember({"plus", "minus", "none"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Moving-detector single-photon photodetection model"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with flag values (flags override it)");
  app.add_option("--threads", o.threads, "Worker threads; output does not depend on it")
      ->capture_default_str();

  auto* povm = app.add_subcommand("povm", "Detection amplitudes, visibility, bias, Bloch analyzer");
  add_model_flags(*povm, o);
  povm->add_option("--gate-T", o.gate_t, "Rectangular gate length for V_obs");
  povm->add_option("--out", o.out, "Write the report as JSON");

  auto* map = app.add_subcommand("map", "Observed-visibility map over (beta Q, beta omega T)");
  map->add_option("--q", o.q, "Quality factor omega/kappa (> 0)");
  map->add_option("--omega", o.omega, "Laboratory mode frequency")->capture_default_str();
  map->add_option("--grid-bq", o.grid_bq, "beta Q axis MIN:MAX:N");
  map->add_option("--grid-bwt", o.grid_bwt, "beta omega T axis MIN:MAX:N");
  map->add_option("--out", o.out, "CSV path (sidecar JSON written next to it); stdout if absent");

  auto* clicks = app.add_subcommand("clicks", "Simulate click records and estimate V, B, beat");
  add_model_flags(*clicks, o);
  clicks->add_option("--phi", o.phi, "Relative phase of the superposition state")
      ->capture_default_str();
  clicks->add_option("--lambda0", o.lambda0, "Events per unit proper time per unit rate")
      ->capture_default_str();
  clicks->add_option("--t-total", o.t_total, "Record length in proper time")->capture_default_str();
  clicks->add_option("--seed", o.seed, "64-bit RNG seed")->capture_default_str();
  clicks->add_option("--gate-T", o.gate_t, "Also run the 12-phase windowed-count sweep with this gate");
  clicks->add_option("--beat-grid", o.beat_grid,
                     "Periodogram grid MIN:MAX:N (default: spacing pi/(4 T) from 20 pi/T to "
                     "2 gamma (1+|beta|) omega)");
  clicks->add_option("--out", o.out, "Output stem: STEM.csv/.json, STEM_plus, STEM_minus, STEM_report.json");

  app.add_subcommand("selfcheck", "Run the invariant suite at reduced scale");

  for (auto* sub : {povm, map, clicks}) {
    sub->add_option("--threads", o.threads, "Worker threads; output does not depend on it");
    sub->add_option("--config", config_path, "JSON file with flag values (flags override it)");
  }

  try {
    // Find --config first so its values can be placed before the real flags.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> merged;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
      }
    }
    // Config tokens go right after the subcommand name.
    std::size_t split = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "povm" || args[i] == "map" || args[i] == "clicks" ||
          args[i] == "selfcheck") {
        split = i + 1;
        break;
      }
    }
    merged.insert(merged.end(), args.begin(), args.begin() + static_cast<long>(split));
    if (!config_path.empty()) {
      for (auto& t : config_tokens(config_path)) merged.push_back(std::move(t));
    }
    merged.insert(merged.end(), args.begin() + static_cast<long>(split), args.end());
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kIo : kValidation;
  }

  try {
    if (povm->parsed()) return cmd_povm(o);
    if (map->parsed()) return cmd_map(o);
    if (clicks->parsed()) return cmd_clicks(o);
    return cmd_selfcheck(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kIo : kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}
