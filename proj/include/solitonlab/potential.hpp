#pragma once

#include <string>
#include <vector>

#include "solitonlab/model.hpp"

namespace solitonlab {

enum class PotentialFamily { tanh_step, erf_step, rational_step, smoothstep, constant };

std::string to_string(PotentialFamily f);
PotentialFamily parse_potential_family(const std::string& name);

// Value and first three derivatives of a function of the slow variable r.
struct Jet3 {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

// Monotone step a(r) from a_minus (r -> -inf) to a_plus (r -> +inf).
// smoothstep has compactly supported a' and constant has a' = 0; both serve
// as negative controls for the hypothesis checker and constant also for
// reference runs with a uniform medium.
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::tanh_step;
  double a_minus = 1.0;
  double a_plus = 2.0;
  double steepness = 1.0;

  Jet3 eval(double r) const;
  double a(double r) const { return eval(r).v; }
  // Derivatives of a(r)^q through third order.
  Jet3 eval_power(double r, double q) const;
  // a_eps(x) = a(eps x) and its x-derivatives.
  Jet3 eval_scaled(double eps, double x) const;

  bool operator==(const PotentialSpec&) const = default;
};

PotentialSpec default_potential(double steepness = 1.0);

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct HypothesisReport {
  bool passed = false;
  std::vector<HypothesisCheck> checks;
  // Empirical constant in |(a^{1/m})'''| <= K (a^{1/m})'.
  double third_derivative_ratio = 0.0;
};

// Samples r in [-sample_range, sample_range]; unbounded constants are detected
// by comparing the sup over the full range with the sup over half of it.
HypothesisReport verify_hypotheses(const PotentialSpec& spec, int m, double sample_range = 40.0,
                                   std::size_t samples = 40001);

}  // namespace solitonlab
