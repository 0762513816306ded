#include "solitonlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/kernels.hpp"
#include "solitonlab/soliton.hpp"

namespace solitonlab {

namespace {

constexpr int kContourPoints = 32;

struct KernelSet {
  decltype(&kernels::omp::power_product) power_product;
  decltype(&kernels::omp::stage) stage;
  decltype(&kernels::omp::stage_c) stage_c;
  decltype(&kernels::omp::combine) combine;
  decltype(&kernels::omp::multiply) multiply;
  decltype(&kernels::omp::spectral_energy) spectral_energy;
  decltype(&kernels::omp::sum) sum;
  decltype(&kernels::omp::dot) dot;
  decltype(&kernels::omp::dot3) dot3;
};

KernelSet kernel_set(Exec e) {
  if (e == Exec::serial)
    return {kernels::serial::power_product, kernels::serial::stage, kernels::serial::stage_c,
            kernels::serial::combine, kernels::serial::multiply, kernels::serial::spectral_energy,
            kernels::serial::sum, kernels::serial::dot, kernels::serial::dot3};
  return {kernels::omp::power_product, kernels::omp::stage, kernels::omp::stage_c, kernels::omp::combine,
          kernels::omp::multiply, kernels::omp::spectral_energy, kernels::omp::sum, kernels::omp::dot,
          kernels::omp::dot3};
}

}  // namespace

double default_time_step(const Grid1D& grid) {
  const double r = grid.h() / 0.05;
  return std::min(5e-3 * r * r * r, 1e-2);
}

SimState soliton_state(const SimConfig& cfg, double c, double x0, double amplitude, double t) {
  SimState s;
  s.t = t;
  s.u.resize(cfg.grid.n);
  for (std::size_t i = 0; i < cfg.grid.n; ++i) s.u[i] = amplitude * eval_Qc(cfg.constants, c, cfg.grid.node(i) - x0);
  return s;
}

SimState initialize_soliton(const SimConfig& cfg) {
  const double T = interaction_time(cfg.constants.lambda, cfg.epsilon);
  const double x0 = -(1.0 - cfg.constants.lambda) * T;
  if (x0 - cfg.grid.x_min < 30.0 || cfg.grid.x_max - x0 < 30.0)
    throw Error("initial soliton at x = " + std::to_string(x0) + " lies within 30 of the domain edge");
  return soliton_state(cfg, 1.0, x0, 1.0, -T);
}

struct Simulator::Impl {
  SimConfig cfg;
  KernelSet ks;
  PeriodicSpectral sp;
  std::size_t n, nm;
  std::vector<double> k, mask;
  std::vector<double> a, a_slow_d1, b_slow_d1, b_slow_d3, b, inv_a;
  std::vector<cplx> E, E2, Qc, f1, f2, f3, deriv_symbol;
  std::vector<cplx> v, Nv, va, Na, vb, Nb, vc, Nc, work;
  std::vector<double> ureal, nl;

  Impl(const SimConfig& c, double dt) : cfg(c), ks(kernel_set(c.exec)), sp(c.grid), n(c.grid.n), nm(n / 2 + 1) {
    k = sp.wavenumbers();
    mask.assign(nm, 1.0);
    if (cfg.dealias)
      for (std::size_t j = 0; j < nm; ++j)
        if (3 * j > n) mask[j] = 0.0;
    mask[n / 2] = 0.0;
    const int m = cfg.constants.m;
    a.resize(n);
    a_slow_d1.resize(n);
    b.resize(n);
    b_slow_d1.resize(n);
    b_slow_d3.resize(n);
    inv_a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = cfg.epsilon * cfg.grid.node(i);
      const Jet3 aj = cfg.potential.eval(r);
      const Jet3 bj = cfg.potential.eval_power(r, 1.0 / m);
      a[i] = aj.v;
      a_slow_d1[i] = aj.d1;
      inv_a[i] = 1.0 / aj.v;
      b[i] = bj.v;
      b_slow_d1[i] = bj.d1;
      b_slow_d3[i] = bj.d3;
    }
    E.resize(nm);
    E2.resize(nm);
    Qc.resize(nm);
    f1.resize(nm);
    f2.resize(nm);
    f3.resize(nm);
    deriv_symbol.resize(nm);
    const double lam = cfg.constants.lambda;
    for (std::size_t j = 0; j < nm; ++j) {
      const cplx L(0.0, k[j] * k[j] * k[j] + lam * k[j]);
      const cplx z = dt * L;
      E[j] = std::exp(z);
      E2[j] = std::exp(0.5 * z);
      cplx q = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      for (int p = 1; p <= kContourPoints; ++p) {
        const double ang = std::numbers::pi * (p - 0.5) / kContourPoints * 2.0;
        const cplx r = z + std::polar(1.0, ang);
        const cplx er = std::exp(r);
        const cplx r3 = r * r * r;
        q += (std::exp(0.5 * r) - 1.0) / r;
        a1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
        a2 += (2.0 + r + er * (r - 2.0)) / r3;
        a3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
      }
      const double inv = 1.0 / kContourPoints;
      Qc[j] = dt * q * inv;
      f1[j] = dt * a1 * inv;
      f2[j] = dt * a2 * inv;
      f3[j] = dt * a3 * inv;
      deriv_symbol[j] = cplx(0.0, -k[j] * mask[j]);
    }
    for (auto* vec : {&v, &Nv, &va, &Na, &vb, &Nb, &vc, &Nc, &work}) vec->assign(nm, 0.0);
    ureal.resize(n);
    nl.resize(n);
  }

  // N(v) = -i k F[a u^m] with the dealiasing mask applied.
  void nonlinear(const std::vector<cplx>& in, std::vector<cplx>& out) {
    sp.inverse(in, ureal);
    ks.power_product(a, ureal, cfg.constants.m, nl);
    sp.forward(nl, out);
    ks.multiply(deriv_symbol, out);
  }

  void step() {
    nonlinear(v, Nv);
    ks.stage(E2, Qc, v, Nv, va);
    nonlinear(va, Na);
    ks.stage(E2, Qc, v, Na, vb);
    nonlinear(vb, Nb);
    ks.stage_c(E2, Qc, va, Nb, Nv, vc);
    nonlinear(vc, Nc);
    ks.combine(E, f1, f2, f3, Nv, Na, Nb, Nc, v);
  }
};

Simulator::Simulator(const SimConfig& cfg, double dt) : impl_(std::make_unique<Impl>(cfg, dt)), dt_(dt) {
  x_ = cfg.grid.nodes();
}

Simulator::~Simulator() = default;

void Simulator::set_state(const SimState& s) {
  if (s.u.size() != impl_->n) throw Error("state size does not match the grid");
  t_ = s.t;
  impl_->sp.forward(s.u, impl_->v);
  for (std::size_t j = 0; j < impl_->nm; ++j)
    if (impl_->mask[j] == 0.0 && j != 0) impl_->v[j] = 0.0;
}

SimState Simulator::state() {
  SimState s;
  s.t = t_;
  s.u.resize(impl_->n);
  impl_->sp.inverse(impl_->v, s.u);
  return s;
}

void Simulator::step() {
  impl_->step();
  t_ += dt_;
}

double Simulator::spectral_mass() const {
  return 0.5 * impl_->cfg.grid.h() * impl_->ks.spectral_energy(impl_->v, impl_->n);
}

InvariantRecord Simulator::invariants() {
  auto& I = *impl_;
  const int m = I.cfg.constants.m;
  const double h = I.cfg.grid.h();
  const double eps = I.cfg.epsilon;
  const double lam = I.cfg.constants.lambda;
  std::vector<double> u(I.n), ux(I.n);
  I.sp.inverse(I.v, u);
  for (std::size_t j = 0; j < I.nm; ++j) I.work[j] = I.v[j] * cplx(0.0, I.k[j]);
  I.work[I.n / 2] = 0.0;
  I.sp.inverse(I.work, ux);
  std::vector<double> u2(I.n), ump1(I.n);
  for (std::size_t i = 0; i < I.n; ++i) {
    u2[i] = u[i] * u[i];
    ump1[i] = std::pow(u[i], m + 1);
  }
  InvariantRecord r;
  r.t = t_;
  const double int_u2 = h * I.ks.sum(u2);
  const double int_ux2 = h * I.ks.dot(ux, ux);
  r.M = 0.5 * int_u2;
  r.Mhat = 0.5 * h * I.ks.dot(I.b, u2);
  r.Ea = 0.5 * int_ux2 + 0.5 * lam * int_u2 - h * I.ks.dot(I.a, ump1) / (m + 1.0);
  r.L1 = h * I.ks.sum(u);
  r.Mscript = h * I.ks.dot(I.inv_a, u2);
  r.dM_rhs = -eps / (m + 1.0) * h * I.ks.dot(I.a_slow_d1, ump1);
  std::vector<double> ux2(I.n), wt(I.n);
  for (std::size_t i = 0; i < I.n; ++i) {
    ux2[i] = ux[i] * ux[i];
    wt[i] = lam * I.b_slow_d1[i] - eps * eps * I.b_slow_d3[i];
  }
  r.dMhat_rhs = -1.5 * eps * h * I.ks.dot(I.b_slow_d1, ux2) - 0.5 * eps * h * I.ks.dot(wt, u2);
  const std::size_t edge = std::max<std::size_t>(1, I.n / 100);
  double bmax = 0.0;
  for (std::size_t i = 0; i < edge; ++i) bmax = std::max({bmax, std::abs(u[i]), std::abs(u[I.n - 1 - i])});
  r.boundary_max = bmax;
  std::size_t jmax = 0;
  for (std::size_t j = 0; j < I.nm; ++j)
    if (I.mask[j] != 0.0) jmax = j;
  double top = 0.0, tail = 0.0;
  for (std::size_t j = 0; j <= jmax; ++j) {
    const double av = std::abs(I.v[j]);
    top = std::max(top, av);
    if (10 * j >= 9 * jmax) tail = std::max(tail, av);
  }
  r.spectral_tail = top > 0.0 ? tail / top : 0.0;
  return r;
}

InvariantRecord compute_invariants(const SimConfig& cfg, const SimState& s) {
  Simulator sim(cfg, 1e-3);
  sim.set_state(s);
  return sim.invariants();
}

RunResult run(const SimConfig& cfg, const SimState& initial, const SnapshotSink& sink) {
  if (!(cfg.t_end > cfg.t_start)) throw Error("simulation end time must exceed the start time");
  if (!(cfg.record_every > 0.0)) throw Error("record interval must be positive");
  const double span = cfg.t_end - cfg.t_start;
  const auto n_records = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(span / cfg.record_every)));
  const double rec = span / static_cast<double>(n_records);
  const double dt_max = cfg.dt > 0.0 ? cfg.dt : default_time_step(cfg.grid);
  const auto per_record = static_cast<std::size_t>(std::ceil(rec / dt_max - 1e-9));
  const double dt = rec / static_cast<double>(per_record);
  std::size_t snap_stride = 0;
  if (cfg.snapshot_every > 0.0)
    snap_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.snapshot_every / rec)));

  Simulator sim(cfg, dt);
  SimState s0 = initial;
  s0.t = cfg.t_start;
  sim.set_state(s0);

  RunResult res;
  RunDiagnostics& d = res.diagnostics;
  d.dt = dt;
  auto record = [&](std::size_t idx) {
    InvariantRecord r = sim.invariants();
    r.t = cfg.t_start + rec * static_cast<double>(idx);
    res.records.push_back(r);
    d.max_boundary = std::max(d.max_boundary, r.boundary_max);
    d.max_spectral_tail = std::max(d.max_spectral_tail, r.spectral_tail);
    if (snap_stride != 0 && idx % snap_stride == 0 && r.t >= cfg.snapshot_from - 1e-9 && sink) {
      SimState st = sim.state();
      st.t = r.t;
      sink(st);
    }
  };
  record(0);
  double mass = sim.spectral_mass();
  for (std::size_t ri = 1; ri <= n_records; ++ri) {
    for (std::size_t k = 0; k < per_record; ++k) {
      sim.step();
      ++d.steps;
      const double m_new = sim.spectral_mass();
      if (!std::isfinite(m_new)) throw Error("simulation diverged at t = " + std::to_string(sim.time()));
      d.max_mass_increase = std::max(d.max_mass_increase, m_new - mass);
      mass = m_new;
    }
    record(ri);
  }
  res.final_state = sim.state();
  res.final_state.t = cfg.t_end;

  const double e0 = res.records.front().Ea, l0 = res.records.front().L1;
  for (const auto& r : res.records) {
    d.energy_drift = std::max(d.energy_drift, std::abs(r.Ea - e0) / std::max(std::abs(e0), 1e-300));
    d.l1_drift = std::max(d.l1_drift, std::abs(r.L1 - l0));
  }
  if (d.max_boundary > 1e-10)
    d.warnings.push_back("field at the domain edge reached " + std::to_string(d.max_boundary) + " (limit 1e-10)");
  if (d.max_spectral_tail > 1e-10)
    d.warnings.push_back("spectral tail ratio reached " + std::to_string(d.max_spectral_tail) +
                         " (resolution guard 1e-10)");
  return res;
}

MassDerivativeReport mass_derivative_check(const std::vector<InvariantRecord>& records) {
  MassDerivativeReport rep;
  double scale = 0.0, scale_hat = 0.0;
  for (const auto& r : records) {
    scale = std::max(scale, std::abs(r.dM_rhs));
    scale_hat = std::max(scale_hat, std::abs(r.dMhat_rhs));
  }
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double dt = records[i + 1].t - records[i - 1].t;
    const double fd = (records[i + 1].M - records[i - 1].M) / dt;
    const double fdh = (records[i + 1].Mhat - records[i - 1].Mhat) / dt;
    rep.max_abs_mismatch = std::max(rep.max_abs_mismatch, std::abs(fd - records[i].dM_rhs));
    rep.max_abs_mismatch_hat = std::max(rep.max_abs_mismatch_hat, std::abs(fdh - records[i].dMhat_rhs));
    ++rep.samples;
  }
  rep.max_rel_mismatch = rep.max_abs_mismatch / std::max(scale, 1e-300);
  rep.max_rel_mismatch_hat = rep.max_abs_mismatch_hat / std::max(scale_hat, 1e-300);
  return rep;
}

}  // namespace solitonlab
