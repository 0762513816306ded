#include "solitonlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace solitonlab {

std::string to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::tanh_step: return "tanh";
    case PotentialFamily::erf_step: return "erf";
    case PotentialFamily::rational_step: return "rational";
    case PotentialFamily::smoothstep: return "smoothstep";
    case PotentialFamily::constant: return "constant";
  }
  return "unknown";
}

PotentialFamily parse_potential_family(const std::string& name) {
  if (name == "tanh") return PotentialFamily::tanh_step;
  if (name == "erf") return PotentialFamily::erf_step;
  if (name == "rational") return PotentialFamily::rational_step;
  if (name == "smoothstep") return PotentialFamily::smoothstep;
  if (name == "constant") return PotentialFamily::constant;
  throw Error("unknown potential family '" + name + "' (expected tanh, erf, rational, smoothstep or constant)");
}

PotentialSpec default_potential(double steepness) {
  PotentialSpec s;
  s.steepness = steepness;
  return s;
}

namespace {

// Unit step profile S(z) rising from -1 to 1, with derivatives in z.
Jet3 unit_step(PotentialFamily f, double z) {
  Jet3 j;
  switch (f) {
    case PotentialFamily::tanh_step: {
      const double t = std::tanh(z);
      const double e = std::exp(-2.0 * std::abs(z));
      const double s2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
      j.v = t;
      j.d1 = s2;
      j.d2 = -2.0 * t * s2;
      j.d3 = -2.0 * s2 * (1.0 - 3.0 * t * t);
      break;
    }
    case PotentialFamily::erf_step: {
      const double g = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-z * z);
      j.v = std::erf(z);
      j.d1 = g;
      j.d2 = -2.0 * z * g;
      j.d3 = (4.0 * z * z - 2.0) * g;
      break;
    }
    case PotentialFamily::rational_step: {
      const double w = 1.0 + z * z;
      const double r = std::sqrt(w);
      j.v = z / r;
      j.d1 = 1.0 / (w * r);
      j.d2 = -3.0 * z / (w * w * r);
      j.d3 = (12.0 * z * z - 3.0) / (w * w * w * r);
      break;
    }
    case PotentialFamily::smoothstep: {
      // Septic smoothstep on [-1, 1], C^3 at the ends.
      if (z <= -1.0) {
        j.v = -1.0;
      } else if (z >= 1.0) {
        j.v = 1.0;
      } else {
        const double u = 0.5 * (z + 1.0);
        const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
        const double P = -20.0 * u4 * u3 + 70.0 * u3 * u3 - 84.0 * u4 * u + 35.0 * u4;
        const double P1 = -140.0 * u3 * u3 + 420.0 * u4 * u - 420.0 * u4 + 140.0 * u3;
        const double P2 = -840.0 * u4 * u + 2100.0 * u4 - 1680.0 * u3 + 420.0 * u2;
        const double P3 = -4200.0 * u4 + 8400.0 * u3 - 5040.0 * u2 + 840.0 * u;
        j.v = 2.0 * P - 1.0;
        j.d1 = P1;
        j.d2 = 0.5 * P2;
        j.d3 = 0.25 * P3;
      }
      break;
    }
    case PotentialFamily::constant: j.v = 1.0; break;
  }
  return j;
}

// 1 - |S(z)| without cancellation in the tails.
double gap_to_end(PotentialFamily f, double z) {
  const double a = std::abs(z);
  switch (f) {
    case PotentialFamily::tanh_step: {
      const double e = std::exp(-2.0 * a);
      return 2.0 * e / (1.0 + e);
    }
    case PotentialFamily::erf_step: return std::erfc(a);
    case PotentialFamily::rational_step: {
      const double r = std::sqrt(1.0 + a * a);
      return 1.0 / (r * (r + a));
    }
    case PotentialFamily::smoothstep: return 1.0 - std::abs(unit_step(f, z).v);
    case PotentialFamily::constant: return 0.0;
  }
  return 0.0;
}

}  // namespace

Jet3 PotentialSpec::eval(double r) const {
  const double mid = 0.5 * (a_plus + a_minus);
  const double half = 0.5 * (a_plus - a_minus);
  if (family == PotentialFamily::constant) return Jet3{a_plus, 0.0, 0.0, 0.0};
  const double g = steepness;
  const Jet3 s = unit_step(family, g * r);
  return Jet3{mid + half * s.v, half * g * s.d1, half * g * g * s.d2, half * g * g * g * s.d3};
}

Jet3 PotentialSpec::eval_power(double r, double q) const {
  const Jet3 a = eval(r);
  const double A = a.v;
  const double p0 = std::pow(A, q);
  const double p1 = q * p0 / A;
  const double p2 = q * (q - 1.0) * p0 / (A * A);
  const double p3 = q * (q - 1.0) * (q - 2.0) * p0 / (A * A * A);
  return Jet3{p0, p1 * a.d1, p2 * a.d1 * a.d1 + p1 * a.d2,
              p3 * a.d1 * a.d1 * a.d1 + 3.0 * p2 * a.d1 * a.d2 + p1 * a.d3};
}

Jet3 PotentialSpec::eval_scaled(double eps, double x) const {
  const Jet3 a = eval(eps * x);
  return Jet3{a.v, eps * a.d1, eps * eps * a.d2, eps * eps * eps * a.d3};
}

HypothesisReport verify_hypotheses(const PotentialSpec& spec, int m, double sample_range, std::size_t samples) {
  HypothesisReport rep;
  const double q = 1.0 / m;
  const double lo = spec.a_minus, hi = spec.a_plus;
  bool bounds_ok = true, mono_ok = true;
  double worst_bound = 0.0, min_slope = INFINITY;
  double tail_full = 0.0, tail_half = 0.0, ratio_full = 0.0, ratio_half = 0.0;
  const double gam = std::max(spec.steepness, 1e-12);
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = -sample_range + 2.0 * sample_range * static_cast<double>(i) / static_cast<double>(samples - 1);
    const Jet3 a = spec.eval(r);
    // a' > 0 makes the bounds strict, so only closed bounds are sampled here.
    if (!(a.v >= 1.0 && a.v <= 2.0)) {
      bounds_ok = false;
      worst_bound = std::max(worst_bound, std::max(1.0 - a.v, a.v - 2.0));
    }
    min_slope = std::min(min_slope, a.d1);
    if (!(a.d1 > 0.0)) mono_ok = false;
    // Exponential approach to the end states: |a - a_end| e^{gamma |r|}.
    const double tail = (spec.family == PotentialFamily::constant ? std::abs(hi - lo)
                                                                 : 0.5 * std::abs(hi - lo) * gap_to_end(spec.family, gam * r)) *
                        std::exp(gam * std::abs(r));
    tail_full = std::max(tail_full, tail);
    if (std::abs(r) <= 0.5 * sample_range) tail_half = std::max(tail_half, tail);
    const Jet3 b = spec.eval_power(r, q);
    double ratio;
    if (b.d1 > 0.0) {
      ratio = std::abs(b.d3) / b.d1;
    } else {
      ratio = (b.d3 == 0.0 && b.d1 == 0.0) ? 0.0 : INFINITY;
    }
    if (!std::isfinite(ratio) && b.d1 == 0.0) ratio = INFINITY;
    ratio_full = std::max(ratio_full, ratio);
    if (std::abs(r) <= 0.5 * sample_range) ratio_half = std::max(ratio_half, ratio);
  }

  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };
  rep.checks.push_back({"range_1_lt_a_lt_2", bounds_ok, worst_bound,
                        bounds_ok ? "1 < a < 2 at all samples" : "a leaves (1,2) by " + fmt(worst_bound)});
  rep.checks.push_back({"a_prime_positive", mono_ok, min_slope, "min a' = " + fmt(min_slope)});
  const bool end_ok = std::abs(spec.a(-sample_range) - lo) < 1e-6 && std::abs(hi - spec.a(sample_range)) < 1e-6 &&
                      std::abs(lo - 1.0) < 1e-12 && std::abs(hi - 2.0) < 1e-12;
  rep.checks.push_back({"limits_1_and_2", end_ok, spec.a(sample_range),
                        "a(-R) = " + fmt(spec.a(-sample_range)) + ", a(R) = " + fmt(spec.a(sample_range))});
  const bool tail_ok = std::isfinite(tail_full) && tail_full <= 1.5 * std::max(tail_half, 1e-300) + 1e-12;
  rep.checks.push_back({"exponential_tails", tail_ok, tail_full,
                        "sup |a - a_end| e^{gamma|r|}: " + fmt(tail_half) + " (half range), " + fmt(tail_full) +
                            " (full range)"});
  const bool ratio_ok = mono_ok && std::isfinite(ratio_full) && ratio_full <= 1.5 * ratio_half + 1e-12;
  rep.third_derivative_ratio = ratio_full;
  rep.checks.push_back({"third_derivative_ratio", ratio_ok, ratio_full,
                        "sup |(a^{1/m})'''| / (a^{1/m})': " + fmt(ratio_half) + " (half range), " + fmt(ratio_full) +
                            " (full range)"});
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const auto& c) { return c.passed; });
  return rep;
}

}  // namespace solitonlab
