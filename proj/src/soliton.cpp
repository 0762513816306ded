#include "solitonlab/soliton.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "solitonlab/kernels.hpp"
#include "solitonlab/spectral.hpp"

namespace solitonlab {

namespace {

// sech(z) without overflow for large |z|.
double sech(double z) {
  const double e = std::exp(-std::abs(z));
  return 2.0 * e / (1.0 + e * e);
}

double ipow(double u, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= u;
  return r;
}

}  // namespace

double eval_Q(const ModelConstants& k, double x) {
  const double m = k.m;
  const double s = sech(0.5 * (m - 1.0) * x);
  return std::pow(0.5 * (m + 1.0) * s * s, 1.0 / (m - 1.0));
}

double eval_phi(const ModelConstants& k, double x) { return std::tanh(0.5 * (k.m - 1.0) * x); }

double eval_dphi(const ModelConstants& k, double x) {
  const double a = 0.5 * (k.m - 1.0);
  const double s = sech(a * x);
  return a * s * s;
}

double eval_d2phi(const ModelConstants& k, double x) {
  const double a = 0.5 * (k.m - 1.0);
  const double s = sech(a * x);
  return -2.0 * a * a * s * s * std::tanh(a * x);
}

double eval_dQ(const ModelConstants& k, double x) { return -eval_phi(k, x) * eval_Q(k, x); }

double eval_Qc(const ModelConstants& k, double c, double x) {
  return std::pow(c, 1.0 / (k.m - 1.0)) * eval_Q(k, std::sqrt(c) * x);
}

double eval_dQc(const ModelConstants& k, double c, double x) {
  return std::pow(c, 1.0 / (k.m - 1.0) + 0.5) * eval_dQ(k, std::sqrt(c) * x);
}

double eval_d2Qc(const ModelConstants& k, double c, double x) {
  const double q = eval_Q(k, std::sqrt(c) * x);
  return std::pow(c, 1.0 / (k.m - 1.0) + 1.0) * (q - ipow(q, k.m));
}

double eval_LambdaQc(const ModelConstants& k, double c, double x) {
  return (eval_Qc(k, c, x) / (k.m - 1.0) + 0.5 * x * eval_dQc(k, c, x)) / c;
}

double eval_phic(const ModelConstants& k, double c, double x) {
  return std::sqrt(c) * eval_phi(k, std::sqrt(c) * x);
}

double integral_Q2(const ModelConstants& k, double x) {
  if (x == 0.0) return 0.0;
  auto f = [&](double s) {
    const double q = eval_Q(k, s);
    return q * q;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, x, 8, 1e-13);
}

double eval_V0(const ModelConstants& k, double x) {
  switch (k.m) {
    case 2: return -2.0 * eval_LambdaQc(k, 1.0, x);
    case 3: {
      const double q = eval_Q(k, x);
      return -q * q;
    }
    default: {
      const double q = eval_Q(k, x);
      return (eval_dQ(k, x) * integral_Q2(k, x) - 2.0 * q * q * q) / 3.0;
    }
  }
}

double exact_integral_Q(int m) {
  const double a = 1.0 / (m - 1.0);
  return std::pow(0.5 * (m + 1.0), a) * (2.0 / (m - 1.0)) * std::beta(a, 0.5);
}

double exact_integral_Q2(int m) {
  const double a = 2.0 / (m - 1.0);
  return std::pow(0.5 * (m + 1.0), a) * (2.0 / (m - 1.0)) * std::beta(a, 0.5);
}

SolitonProfile SolitonProfile::sample(const ModelConstants& k, double c, const Grid1D& grid) {
  if (!(c > 0.0)) throw Error("soliton speed c must be positive");
  SolitonProfile p;
  p.constants = k;
  p.c = c;
  p.grid = grid;
  p.x = grid.nodes();
  const std::size_t n = grid.n;
  p.Q.resize(n);
  p.dQ.resize(n);
  p.d2Q.resize(n);
  p.LambdaQ.resize(n);
  p.phi.resize(n);
  p.V0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = p.x[i];
    p.Q[i] = eval_Qc(k, c, x);
    p.dQ[i] = eval_dQc(k, c, x);
    p.d2Q[i] = eval_d2Qc(k, c, x);
    p.LambdaQ[i] = eval_LambdaQc(k, c, x);
    p.phi[i] = eval_phic(k, c, x);
    p.V0[i] = eval_V0(k, x);
  }
  return p;
}

std::vector<double> apply_L(const SolitonProfile& prof, std::span<const double> w) {
  PeriodicSpectral sp(prof.grid);
  auto out = sp.derivative(w, 2);
  const int m = prof.constants.m;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = -out[i] + prof.c * w[i] - m * ipow(prof.Q[i], m - 1) * w[i];
  return out;
}

double quadratic_form(const SolitonProfile& prof, std::span<const double> w) {
  PeriodicSpectral sp(prof.grid);
  const auto wx = sp.derivative(w, 1);
  const int m = prof.constants.m;
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    s += wx[i] * wx[i] + (prof.c - m * ipow(prof.Q[i], m - 1)) * w[i] * w[i];
  return s * prof.grid.h();
}

double c_infinity_residual(int m, double lambda, double c) {
  const ModelConstants k = ModelConstants::create(m, 0.0);
  const double l0 = k.lambda0;
  return std::pow(c, l0) * std::pow(c - lambda / l0, 1.0 - l0) -
         std::pow(2.0, k.p) * std::pow(1.0 - lambda / l0, 1.0 - l0);
}

double solve_c_infinity(int m, double lambda) {
  const ModelConstants k = ModelConstants::create(m, lambda);
  const double l0 = k.lambda0;
  if (lambda > l0) throw Error("c_infinity is only defined for 0 <= lambda <= lambda0");
  if (lambda == l0) return 1.0;
  double lo = 1.0, hi = std::pow(2.0, 4.0 / (5.0 - m));
  double glo = c_infinity_residual(m, lambda, lo);
  if (glo > 0.0 || c_infinity_residual(m, lambda, hi) < 0.0) throw Error("c_infinity root is not bracketed");
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double g = c_infinity_residual(m, lambda, mid);
    if ((g < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
    }
  }
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const double dg = std::pow(c, l0 - 1.0) * std::pow(c - lambda / l0, -l0) * (c - lambda);
    c -= c_infinity_residual(m, lambda, c) / dg;
  }
  return c;
}

SolitonIntegrals soliton_identities(const ModelConstants& k, double c) {
  if (!(c > 0.0)) throw Error("soliton speed c must be positive");
  const double hw = std::max(45.0, 45.0 / std::sqrt(c));
  const Grid1D g = Grid1D::centered(hw, 16384);
  const int m = k.m;
  const double h = g.h();
  SolitonIntegrals r;
  r.c = c;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.node(i);
    const double q = eval_Qc(k, c, x);
    const double dq = eval_dQc(k, c, x);
    r.int_Q += q;
    r.int_Q2 += q * q;
    r.int_Qmp1 += ipow(q, m + 1);
    r.int_dQ2 += dq * dq;
    r.int_LQ_Q += eval_LambdaQc(k, c, x) * q;
  }
  r.int_Q *= h;
  r.int_Q2 *= h;
  r.int_Qmp1 *= h;
  r.int_dQ2 *= h;
  r.int_LQ_Q *= h;
  r.mass = 0.5 * r.int_Q2;
  r.energy = 0.5 * r.int_dQ2 + 0.5 * k.lambda * r.int_Q2 - r.int_Qmp1 / (m + 1.0);

  const double IQ = exact_integral_Q(m), IQ2 = exact_integral_Q2(m);
  const double th = k.theta;
  r.pred_int_Q = std::pow(c, th - 0.25) * IQ;
  r.pred_int_Q2 = std::pow(c, 2.0 * th) * IQ2;
  r.pred_int_Qmp1 = 2.0 * (m + 1.0) / (m + 3.0) * std::pow(c, 2.0 * th + 1.0) * IQ2;
  r.pred_int_dQ2 = (m - 1.0) / (m + 3.0) * std::pow(c, 2.0 * th + 1.0) * IQ2;
  r.pred_int_LQ_Q = th * std::pow(c, 2.0 * th - 1.0) * IQ2;
  r.pred_energy = (k.lambda - k.lambda0 * c) * std::pow(c, 2.0 * th) * 0.5 * IQ2;

  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  r.max_rel_error = std::max({rel(r.int_Q, r.pred_int_Q), rel(r.int_Q2, r.pred_int_Q2),
                              rel(r.int_Qmp1, r.pred_int_Qmp1), rel(r.int_dQ2, r.pred_int_dQ2),
                              rel(r.int_LQ_Q, r.pred_int_LQ_Q), rel(r.energy, r.pred_energy)});
  return r;
}

double coercivity_constant(const ModelConstants& k, double c, std::size_t n) {
  const double hw = std::max(30.0, 30.0 / std::sqrt(c));
  const Grid1D g = Grid1D::centered(hw, n);
  const auto prof = SolitonProfile::sample(k, c, g);
  PeriodicSpectral sp(g);
  // Spectral first-derivative matrix, built column by column.
  Eigen::MatrixXd D(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = sp.derivative(e, 1);
    for (std::size_t i = 0; i < n; ++i) D(i, j) = col[i];
  }
  Eigen::MatrixXd B = D.transpose() * D;
  for (std::size_t i = 0; i < n; ++i) B(i, i) += c - k.m * ipow(prof.Q[i], k.m - 1);
  B *= g.h();
  Eigen::MatrixXd V(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    V(i, 0) = prof.Q[i];
    V(i, 1) = prof.dQ[i];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
  const Eigen::MatrixXd Qfull = qr.householderQ();
  const Eigen::MatrixXd Z = Qfull.rightCols(n - 2);
  const Eigen::MatrixXd Bz = Z.transpose() * B * Z / g.h();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bz, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace solitonlab
