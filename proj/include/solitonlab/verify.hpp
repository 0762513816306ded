#pragma once

#include <functional>
#include <string>
#include <vector>

#include "solitonlab/config.hpp"

namespace solitonlab {

struct VerifyCheck {
  std::string name;
  double value = 0.0;      // measured residual or indicator
  double tolerance = 0.0;  // pass when value <= tolerance
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool passed() const;
  std::size_t failures() const;
};

using ProfileFunction = std::function<double(const ModelConstants&, double c, double x)>;

struct VerifyOptions {
  // Replaces Q_c in the soliton equation check; used as a negative control.
  ProfileFunction soliton_override;
};

// Max over the grid of |Q_c'' - c Q_c + Q_c^m| with a spectral second derivative.
double soliton_equation_residual(const ModelConstants& k, double c, const ProfileFunction& q);

VerifyReport run_verify(const Scenario& s, const VerifyOptions& opt = {});

}  // namespace solitonlab
