#pragma once

#include <span>
#include <vector>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/model_problem.hpp"
#include "solitonlab/potential.hpp"
#include "solitonlab/spectral.hpp"

namespace solitonlab {

// Unit-speed correction profiles A_tilde and A_hat and their far-field constants.
struct CorrectionProfiles {
  ModelConstants constants;
  ModelProblemSolution tilde;
  ModelProblemSolution hat;

  double beta_tilde() const { return tilde.beta; }
  double beta_hat() const { return hat.beta; }
};

CorrectionProfiles build_correction_profiles(const ModelConstants& k, const Grid1D& grid = Grid1D::centered(40.0, 1024),
                                             ModelProblemMethod method = ModelProblemMethod::fourier);

// Closed forms of the far-field constants.
double beta_tilde_exact(int m);
double beta_hat_exact(int m);

// Time-dependent amplitudes of A_c = b (phi_c - sqrt c) + h A_hat_c-part + ...:
//   h = a'/a_t^m, b = h c^{1/(m-1)-1} (beta_tilde + lambda beta_hat / c),
//   scale = h c^{1/(m-1)-1/2}, with a_t = a^{1/(m-1)} evaluated at eps rho.
struct ShelfAmplitudes {
  double h = 0.0;
  double b = 0.0;
  double scale = 0.0;
  double plateau = 0.0;  // limit of A_c as y -> -inf, equal to -2 b sqrt(c)
};

ShelfAmplitudes shelf_amplitudes(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps, double c,
                                 double rho);

// A_c(y) = scale [A_tilde + lambda A_hat / c](sqrt(c) y).
void assemble_Ac(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps, double c, double rho,
                 std::span<const double> y, std::span<double> out);
// Only the non-decaying part b (phi_c - sqrt c).
void assemble_Ac_shelf(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps, double c, double rho,
                       std::span<const double> y, std::span<double> out);

// Smooth cutoff: 0 for s <= -1, 1 for s >= 1, 0 <= eta' <= 1.
double cutoff_eta(double s);
double cutoff_deta(double s);
// A_sharp = eta(eps y + 2) A_c, in place.
void cutoff_Asharp(std::span<const double> y, double eps, std::span<double> field);

struct ResidualSample {
  double t = 0.0;
  double l2 = 0.0;
  double h2 = 0.0;
  double dev_from_eF1_l2 = 0.0;  // || S - eps F_1 ||, meaningful for the uncorrected ansatz
};

// Approximate solution u(t, x) = Q_c(y)/a_t(eps rho) + eps A_sharp(t, y), y = x - rho(t),
// sampled on a periodic y grid that holds the whole cutoff region.
class ApproximateSolution {
 public:
  ApproximateSolution(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps,
                      double t_end_multiple = 1.0, double target_h = 0.05);

  const Grid1D& ygrid() const { return ygrid_; }
  const std::vector<double>& y() const { return y_; }
  const AdiabaticTrajectory& trajectory() const { return traj_; }
  double T() const { return T_; }
  double epsilon() const { return eps_; }

  std::vector<double> soliton_part(double t) const;
  std::vector<double> correction_part(double t) const;  // A_sharp
  std::vector<double> field(double t, bool with_correction = true) const;

  // S[u] = u_t + (u_xx - lambda u + a(eps x) u^m)_x evaluated in the moving frame.
  std::vector<double> residual_field(double t, bool with_correction = true);
  ResidualSample residual(double t, bool with_correction = true);
  std::vector<double> F1_field(double t) const;

  // H^1 distances to the pure solitons at -T_eps and T_eps.
  std::pair<double, double> endpoint_errors();

 private:
  std::vector<double> Ac_at(double t) const;

  CorrectionProfiles prof_;
  PotentialSpec spec_;
  ModelConstants k_;
  double eps_;
  double T_;
  AdiabaticTrajectory traj_;
  Grid1D ygrid_;
  std::vector<double> y_;
  PeriodicSpectral sp_;
};

}  // namespace solitonlab
