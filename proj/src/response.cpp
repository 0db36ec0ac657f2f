#include "movdet/response.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "movdet/errors.hpp"

namespace movdet {
namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Complex interpolate(const Tabulated& t, double omega) {
  const auto& g = t.grid;
  if (!(omega >= g.front() && omega <= g.back())) {
    fail(ErrorCode::FrequencyOutOfTable,
         fmt::format("frequency {:.17g} outside table [{:.17g}, {:.17g}]", omega, g.front(),
                     g.back()));
  }
  const auto hi = std::lower_bound(g.begin(), g.end(), omega);
  const auto k = static_cast<std::size_t>(hi - g.begin());
  if (*hi == omega) return t.values[k];
  const double w = (omega - g[k - 1]) / (g[k] - g[k - 1]);
  const Complex& a = t.values[k - 1];
  const Complex& b = t.values[k];
  return {a.real() + w * (b.real() - a.real()), a.imag() + w * (b.imag() - a.imag())};
}

}  // namespace

SusceptibilitySpec SusceptibilitySpec::broadband(Complex chi0) {
  if (!finite(chi0)) fail(ErrorCode::InvalidArgument, "chi0 must be finite");
  return SusceptibilitySpec(Broadband{chi0});
}

SusceptibilitySpec SusceptibilitySpec::lorentzian(Complex chi0, double omega0, double kappa) {
  if (!finite(chi0)) fail(ErrorCode::InvalidArgument, "chi0 must be finite");
  if (!std::isfinite(omega0) || omega0 <= 0.0) {
    fail(ErrorCode::InvalidArgument, "resonance frequency must be positive");
  }
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    fail(ErrorCode::NonPositiveWidth, "linewidth kappa must be positive");
  }
  return SusceptibilitySpec(Lorentzian{chi0, omega0, kappa});
}

SusceptibilitySpec SusceptibilitySpec::tabulated(std::vector<double> grid,
                                                 std::vector<Complex> values) {
  if (grid.size() < 2) fail(ErrorCode::InvalidArgument, "table needs at least 2 points");
  if (grid.size() != values.size()) {
    fail(ErrorCode::InvalidArgument, "table grid and values differ in length");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !finite(values[i])) {
      fail(ErrorCode::InvalidArgument, "table entries must be finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      fail(ErrorCode::InvalidArgument, "table grid must be strictly increasing");
    }
  }
  return SusceptibilitySpec(Tabulated{std::move(grid), std::move(values)});
}

Complex SusceptibilitySpec::evaluate(double omega) const {
  if (!std::isfinite(omega) || omega <= 0.0) {
    fail(ErrorCode::InvalidArgument, "susceptibility frequency must be positive");
  }
  struct Visitor {
    double w;
    Complex operator()(const Broadband& s) const { return s.chi0; }
    Complex operator()(const Lorentzian& s) const {
      return s.chi0 / Complex(0.5 * s.kappa, -(w - s.omega0));
    }
    Complex operator()(const Tabulated& s) const { return interpolate(s, w); }
  };
  return std::visit(Visitor{omega}, shape_);
}

SusceptibilitySpec SusceptibilitySpec::scaled(Complex c) const {
  struct Visitor {
    Complex c;
    Variant operator()(Broadband s) const { return Broadband{c * s.chi0}; }
    Variant operator()(Lorentzian s) const { return Lorentzian{c * s.chi0, s.omega0, s.kappa}; }
    Variant operator()(Tabulated s) const {
      for (auto& v : s.values) v *= c;
      return s;
    }
  };
  return SusceptibilitySpec(std::visit(Visitor{c}, shape_));
}

std::string SusceptibilitySpec::kind() const {
  switch (shape_.index()) {
    case 0: return "broadband";
    case 1: return "lorentzian";
    default: return "tabulated";
  }
}

std::string SusceptibilitySpec::describe() const {
  struct Visitor {
    std::string operator()(const Broadband& s) const {
      return fmt::format("broadband(chi0={:.17g}{:+.17g}i)", s.chi0.real(), s.chi0.imag());
    }
    std::string operator()(const Lorentzian& s) const {
      return fmt::format("lorentzian(chi0={:.17g}{:+.17g}i,omega0={:.17g},kappa={:.17g})",
                         s.chi0.real(), s.chi0.imag(), s.omega0, s.kappa);
    }
    std::string operator()(const Tabulated& s) const {
      std::string out = "tabulated(";
      for (std::size_t i = 0; i < s.grid.size(); ++i) {
        out += fmt::format("{}{:.17g}:{:.17g}{:+.17g}i", i ? ";" : "", s.grid[i],
                           s.values[i].real(), s.values[i].imag());
      }
      return out + ")";
    }
  };
  return std::visit(Visitor{}, shape_);
}

double q_factor(const LabMode& mode, double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    fail(ErrorCode::NonPositiveWidth, "linewidth kappa must be positive");
  }
  return mode.omega() / kappa;
}

SusceptibilitySpec branch_tuned_lorentzian(const DetectorMotion& motion, const LabMode& mode,
                                           Complex chi0, double kappa, Branch branch) {
  const DopplerPair f = doppler_frequencies(motion, mode);
  return SusceptibilitySpec::lorentzian(chi0, branch == Branch::Plus ? f.plus : f.minus, kappa);
}

SusceptibilitySpec read_susceptibility_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Io, "empty susceptibility table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "omega,chi_re,chi_im") {
    fail(ErrorCode::Io, "expected header 'omega,chi_re,chi_im', got '" + line + "'");
  }
  std::vector<double> grid;
  std::vector<Complex> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    double w = 0, re = 0, im = 0;
    char c1 = 0, c2 = 0;
    if (!(fields >> w >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',') {
      fail(ErrorCode::Io, fmt::format("malformed table row {}: '{}'", row, line));
    }
    grid.push_back(w);
    values.emplace_back(re, im);
  }
  return SusceptibilitySpec::tabulated(std::move(grid), std::move(values));
}

SusceptibilitySpec load_susceptibility_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open susceptibility table " + path);
  return read_susceptibility_csv(in);
}

void write_susceptibility_csv(std::ostream& out, const Tabulated& table) {
  out << "omega,chi_re,chi_im\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", table.grid[i], table.values[i].real(),
                       table.values[i].imag());
  }
}

}  // namespace movdet
