#include "solitonlab/model_problem.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <cmath>

#include "solitonlab/soliton.hpp"

namespace solitonlab {

namespace {

double ipow(double u, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= u;
  return r;
}

// Derivative of L_0 (phi - 1), in closed form.
double dL0_phi_minus_one(const ModelConstants& k, double y) {
  const int m = k.m;
  const double a = 0.5 * (m - 1.0);
  const double t = std::tanh(a * y);
  const double e = std::exp(-2.0 * std::abs(a * y));
  const double s2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
  const double phi1 = a * s2;
  const double phi3 = -2.0 * a * a * a * s2 * (s2 - 2.0 * t * t);
  const double q = eval_Q(k, y), dq = eval_dQ(k, y);
  return -phi3 - m * (m - 1.0) * ipow(q, m - 2) * dq * (t - 1.0) + (1.0 - m * ipow(q, m - 1)) * phi1;
}

}  // namespace

class LiftedOperator;

}  // namespace solitonlab

namespace Eigen::internal {
template <>
struct traits<solitonlab::LiftedOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace solitonlab {

// L_0 + qhat qhat^T applied through spectral differentiation.
class LiftedOperator : public Eigen::EigenBase<LiftedOperator> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  LiftedOperator(PeriodicSpectral& sp, const std::vector<double>& pot, const std::vector<double>& qhat)
      : sp_(&sp), pot_(&pot), qhat_(&qhat) {}
  Eigen::Index rows() const { return static_cast<Eigen::Index>(pot_->size()); }
  Eigen::Index cols() const { return rows(); }

  template <typename Rhs>
  Eigen::Product<LiftedOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<LiftedOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const std::size_t n = pot_->size();
    const auto d2 = sp_->derivative(std::span<const double>(x.data(), n), 2);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += (*qhat_)[i] * x(static_cast<Eigen::Index>(i));
    y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      y(static_cast<Eigen::Index>(i)) = -d2[i] + (*pot_)[i] * x(static_cast<Eigen::Index>(i)) + dot * (*qhat_)[i];
  }

 private:
  PeriodicSpectral* sp_;
  const std::vector<double>* pot_;
  const std::vector<double>* qhat_;
};

// Inverse of 1 - d^2/dy^2, diagonal in Fourier space.
class FourierPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  void setup(PeriodicSpectral& sp) { sp_ = &sp; }
  template <typename M>
  FourierPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  FourierPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  FourierPreconditioner& compute(const M&) { return *this; }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

  template <typename Rhs>
  Eigen::VectorXd solve(const Eigen::MatrixBase<Rhs>& b) const {
    const std::size_t n = sp_->size();
    const Eigen::VectorXd bb = b;
    std::vector<cplx> bhat(sp_->modes());
    sp_->forward(std::span<const double>(bb.data(), n), bhat);
    const auto& k = sp_->wavenumbers();
    for (std::size_t j = 0; j < bhat.size(); ++j) bhat[j] /= 1.0 + k[j] * k[j];
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    sp_->inverse(bhat, std::span<double>(x.data(), n));
    return x;
  }

 private:
  PeriodicSpectral* sp_ = nullptr;
};

}  // namespace solitonlab

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<solitonlab::LiftedOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<solitonlab::LiftedOperator, Rhs,
                                generic_product_impl<solitonlab::LiftedOperator, Rhs>> {
  using Scalar = typename Product<solitonlab::LiftedOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const solitonlab::LiftedOperator& lhs, const Rhs& rhs, const Scalar& alpha) {
    Eigen::VectorXd y;
    lhs.apply(rhs, y);
    dst.noalias() += alpha * y;
  }
};
}  // namespace Eigen::internal

namespace solitonlab {

double ModelProblemSolution::eval(double s) const {
  if (s < grid.x_min) return -2.0 * beta;
  if (s > grid.x_max) return 0.0;
  return beta * (eval_phi(constants, s) - 1.0) + A1_interp(s);
}

void ModelProblemSolution::eval_localized(std::span<const double> s, std::span<double> out) const {
  A1_interp.evaluate(s, out);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] < grid.x_min || s[i] > grid.x_max) out[i] = 0.0;
}

ModelProblemSolution solve_model_problem(const ModelConstants& k, std::span<const double> F, const Grid1D& grid,
                                         ModelProblemMethod method, double orth_tol) {
  const std::size_t n = grid.n;
  if (F.size() != n) throw Error("model problem: F has the wrong length");
  const double h = grid.h();
  const int m = k.m;
  const auto prof = SolitonProfile::sample(k, 1.0, grid);
  PeriodicSpectral sp(grid);

  ModelProblemSolution sol;
  sol.constants = k;
  sol.method = method;
  sol.grid = grid;
  double fq = 0.0, ff = 0.0, qq = 0.0, fsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fq += F[i] * prof.Q[i];
    ff += F[i] * F[i];
    qq += prof.Q[i] * prof.Q[i];
    fsum += F[i];
  }
  sol.orthogonality = fq * h;
  sol.beta = 0.5 * fsum * h;
  const double scale = std::sqrt(ff * h) * std::sqrt(qq * h);
  if (std::abs(sol.orthogonality) > orth_tol * std::max(scale, 1e-300))
    throw Error("model problem is not solvable: int F Q = " + std::to_string(sol.orthogonality));
  const double beta = sol.beta;

  std::vector<double> dphi(n), d2phi(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = eval_phi(k, prof.x[i]);
    dphi[i] = eval_dphi(k, prof.x[i]);
    d2phi[i] = eval_d2phi(k, prof.x[i]);
  }
  // H1 = int_{-inf}^y (F - beta phi'), which vanishes at both ends.
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = F[i] - beta * dphi[i];
  std::vector<double> H1(n);
  if (method == ModelProblemMethod::fourier) {
    H1 = sp.antiderivative(g);
    const double shift = H1[0];
    for (auto& v : H1) v -= shift;
  } else {
    H1[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) H1[i] = H1[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
  }
  std::vector<double> G(n), pot(n);
  for (std::size_t i = 0; i < n; ++i) {
    pot[i] = 1.0 - m * ipow(prof.Q[i], m - 1);
    G[i] = H1[i] + beta * (d2phi[i] + m * ipow(prof.Q[i], m - 1) * (phi[i] - 1.0));
  }

  sol.A1.assign(n, 0.0);
  if (method == ModelProblemMethod::fourier) {
    // The kernel direction Q' is lifted by a rank-one term and removed from the right-hand side,
    // which makes the operator invertible; the multiplier is the removed component.
    std::vector<double> qhat(prof.dQ.begin(), prof.dQ.end());
    double qn = 0.0;
    for (double v : qhat) qn += v * v;
    qn = std::sqrt(qn);
    for (auto& v : qhat) v /= qn;
    Eigen::Map<const Eigen::VectorXd> qv(qhat.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(G.data(), static_cast<Eigen::Index>(n));
    const double gq = qv.dot(rhs);
    rhs -= gq * qv;
    sol.multiplier = gq / qn;

    LiftedOperator op(sp, pot, qhat);
    Eigen::BiCGSTAB<LiftedOperator, FourierPreconditioner> solver;
    solver.preconditioner().setup(sp);
    solver.setTolerance(1e-14);
    solver.setMaxIterations(2000);
    solver.compute(op);
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success && !(solver.error() < 1e-11))
      throw Error("model problem: bordered solve did not converge");
    for (std::size_t i = 0; i < n; ++i) sol.A1[i] = x(static_cast<Eigen::Index>(i));
  } else {
    // Second-order stencil on interior nodes with A1 = 0 at both ends, bordered by Q'.
    const std::size_t ni = n - 1;
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(5 * ni);
    const double ih2 = 1.0 / (h * h);
    for (std::size_t r = 0; r < ni; ++r) {
      const std::size_t i = r + 1;
      trips.emplace_back(r, r, 2.0 * ih2 + pot[i]);
      if (r > 0) trips.emplace_back(r, r - 1, -ih2);
      if (r + 1 < ni) trips.emplace_back(r, r + 1, -ih2);
      trips.emplace_back(r, ni, prof.dQ[i]);
      trips.emplace_back(ni, r, prof.dQ[i]);
    }
    Eigen::SparseMatrix<double> K(ni + 1, ni + 1);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) throw Error("model problem: singular bordered system");
    Eigen::VectorXd rhs(ni + 1);
    for (std::size_t r = 0; r < ni; ++r) rhs(r) = G[r + 1];
    rhs(ni) = 0.0;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw Error("model problem: bordered solve failed");
    for (std::size_t r = 0; r < ni; ++r) sol.A1[r + 1] = x(r);
    sol.multiplier = x(ni);
  }

  sol.A.resize(n);
  double kp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sol.A[i] = beta * (phi[i] - 1.0) + sol.A1[i];
    kp += sol.A1[i] * prof.dQ[i];
  }
  sol.kernel_projection = kp * h;
  sol.A1_interp = TrigInterpolant(grid, sol.A1);

  // Independent residual: spectral calculus on A1 plus the closed-form far-field part.
  auto LA1 = sp.derivative(sol.A1, 2);
  for (std::size_t i = 0; i < n; ++i) LA1[i] = -LA1[i] + pot[i] * sol.A1[i];
  const auto dLA1 = sp.derivative(LA1, 1);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = dLA1[i] + beta * dL0_phi_minus_one(k, prof.x[i]) - F[i];
    res += r * r;
  }
  sol.residual_l2 = std::sqrt(res * h);
  return sol;
}

std::vector<double> sample_F_tilde(const ModelConstants& k, const Grid1D& grid) {
  const int m = k.m;
  std::vector<double> F(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y = grid.node(i);
    const double q = eval_Q(k, y), dq = eval_dQ(k, y);
    F[i] = k.p * eval_LambdaQc(k, 1.0, y) - q / (m - 1.0) + ipow(q, m) + m * y * ipow(q, m - 1) * dq;
  }
  return F;
}

std::vector<double> sample_F_hat(const ModelConstants& k, const Grid1D& grid) {
  const int m = k.m;
  std::vector<double> F(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y = grid.node(i);
    F[i] = eval_Q(k, y) / (m - 1.0) - 4.0 / (5.0 - m) * eval_LambdaQc(k, 1.0, y);
  }
  return F;
}

}  // namespace solitonlab
