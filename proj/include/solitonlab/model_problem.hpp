#pragma once

#include <span>
#include <vector>

#include "solitonlab/model.hpp"
#include "solitonlab/spectral.hpp"

namespace solitonlab {

enum class ModelProblemMethod { fourier, finite_difference };

// Solution of (L_0 A)' = F with A(+inf) = 0, written as A = beta (phi - 1) + A1
// where A1 decays on both sides and is orthogonal to Q'. Then A(-inf) = -2 beta.
struct ModelProblemSolution {
  ModelConstants constants;
  ModelProblemMethod method = ModelProblemMethod::fourier;
  Grid1D grid;
  double beta = 0.0;          // (1/2) int F
  double orthogonality = 0.0; // int F Q, zero for a solvable problem
  double multiplier = 0.0;    // Lagrange multiplier of the Q' constraint
  double kernel_projection = 0.0;  // int A1 Q'
  double residual_l2 = 0.0;   // || (L_0 A)' - F ||_{L^2}
  std::vector<double> A1;
  std::vector<double> A;
  TrigInterpolant A1_interp;

  // A at an arbitrary point; outside the grid the far-field limits are used.
  double eval(double s) const;
  void eval_localized(std::span<const double> s, std::span<double> out) const;
};

// Throws Error when |int F Q| exceeds orth_tol * ||F|| ||Q|| or when the bordered system is singular.
ModelProblemSolution solve_model_problem(const ModelConstants& k, std::span<const double> F, const Grid1D& grid,
                                         ModelProblemMethod method = ModelProblemMethod::fourier,
                                         double orth_tol = 1e-8);

// Right-hand sides of the two correction problems, sampled on a grid:
//   F_tilde = p LQ - Q/(m-1) + (y Q^m)',   F_hat = Q/(m-1) - 4/(5-m) LQ.
std::vector<double> sample_F_tilde(const ModelConstants& k, const Grid1D& grid);
std::vector<double> sample_F_hat(const ModelConstants& k, const Grid1D& grid);

}  // namespace solitonlab
