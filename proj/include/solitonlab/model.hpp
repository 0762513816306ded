#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace solitonlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exponent-dependent constants of the generalized KdV model.
struct ModelConstants {
  int m = 3;
  double lambda = 0.0;
  double lambda0 = 0.25;
  double p = 2.0 / 3.0;
  double theta = 0.25;

  // Throws Error when m is not 2, 3 or 4 or lambda is negative.
  static ModelConstants create(int m, double lambda);

  bool in_theory() const { return lambda >= 0.0 && lambda <= lambda0; }
};

// Uniform periodic grid: nodes x_i = x_min + i*h, i = 0..n-1, period x_max - x_min.
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n = 8;

  static Grid1D create(double x_min, double x_max, std::size_t n);
  static Grid1D centered(double half_width, std::size_t n) { return create(-half_width, half_width, n); }

  double length() const { return x_max - x_min; }
  double h() const { return length() / static_cast<double>(n); }
  double node(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }
  std::vector<double> nodes() const;
};

}  // namespace solitonlab
