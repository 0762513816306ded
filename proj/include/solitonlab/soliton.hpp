#pragma once

#include <span>
#include <vector>

#include "solitonlab/model.hpp"

namespace solitonlab {

// Closed-form soliton Q solving Q'' - Q + Q^m = 0 and its scaled family
// Q_c(x) = c^{1/(m-1)} Q(sqrt(c) x).
double eval_Q(const ModelConstants& k, double x);
double eval_dQ(const ModelConstants& k, double x);
double eval_Qc(const ModelConstants& k, double c, double x);
double eval_dQc(const ModelConstants& k, double c, double x);
double eval_d2Qc(const ModelConstants& k, double c, double x);
// Generator of scaling: dQ_c/dc = (1/c)(Q_c/(m-1) + x Q_c'/2).
double eval_LambdaQc(const ModelConstants& k, double c, double x);
// phi = -Q'/Q = tanh((m-1)x/2) and phi_c(x) = sqrt(c) phi(sqrt(c) x).
double eval_phi(const ModelConstants& k, double x);
double eval_dphi(const ModelConstants& k, double x);
double eval_d2phi(const ModelConstants& k, double x);
double eval_phic(const ModelConstants& k, double c, double x);
// Particular solution with L_0 V0 = m Q^{m-1}.
double eval_V0(const ModelConstants& k, double x);
// Integral of Q^2 over [0, x], by adaptive Gauss-Kronrod quadrature.
double integral_Q2(const ModelConstants& k, double x);

// Exact integrals of Q over the line, from the Beta function.
double exact_integral_Q(int m);
double exact_integral_Q2(int m);

struct SolitonProfile {
  ModelConstants constants;
  double c = 1.0;
  Grid1D grid;
  std::vector<double> x, Q, dQ, d2Q, LambdaQ, phi, V0;

  static SolitonProfile sample(const ModelConstants& k, double c, const Grid1D& grid);
};

// L w = -w'' + c w - m Q_c^{m-1} w, with a spectral second derivative.
std::vector<double> apply_L(const SolitonProfile& prof, std::span<const double> w);
// B[w,w] = integral of w_x^2 + c w^2 - m Q_c^{m-1} w^2.
double quadratic_form(const SolitonProfile& prof, std::span<const double> w);

// Unique root c >= 1 of c^{l0}(c - l/l0)^{1-l0} = 2^p (1 - l/l0)^{1-l0}.
double solve_c_infinity(int m, double lambda);
double c_infinity_residual(int m, double lambda, double c);

struct SolitonIntegrals {
  double c = 1.0;
  double int_Q = 0.0, int_Q2 = 0.0, int_Qmp1 = 0.0, int_dQ2 = 0.0, int_LQ_Q = 0.0;
  double mass = 0.0;    // (1/2) int Q_c^2
  double energy = 0.0;  // E_1[Q_c] = (1/2) int Q_c'^2 + lambda/2 int Q_c^2 - int Q_c^{m+1}/(m+1)
  // Predictions from the scaling laws and the Pohozaev identity.
  double pred_int_Q = 0.0, pred_int_Q2 = 0.0, pred_int_Qmp1 = 0.0, pred_int_dQ2 = 0.0, pred_int_LQ_Q = 0.0;
  double pred_energy = 0.0;
  double max_rel_error = 0.0;
};

// Quadrature on a grid of half-width at least 40/sqrt(c).
SolitonIntegrals soliton_identities(const ModelConstants& k, double c);

// Smallest eigenvalue of B restricted to the orthogonal complement of span{Q_c, Q_c'}.
double coercivity_constant(const ModelConstants& k, double c, std::size_t n);

}  // namespace solitonlab
