#pragma once

// Incremental time stepping. Each load increment minimizes
//   J(u, p) = 1/2 a((u,p),(u,p)) - <l, (u,p)> + sum_j w_j D_inc(p_j - p_prev_j, gamma_prev_j)
// over free displacements and admissible plastic coordinates. Every
// accelerated proximal gradient iteration in p is paired with an exact CG
// minimization in u, so the p-iteration descends the reduced functional
// min_u J(u, p). The prox is exact and node-separable.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gradplast/discretization.hpp"
#include "gradplast/linalg.hpp"
#include "gradplast/models.hpp"
#include "gradplast/prox.hpp"

namespace gradplast {

struct SolverConfig {
  std::vector<double> dt_schedule;  ///< per-step time increments; empty means 1 per step
  double tol_outer = 1e-10;         ///< relative energy decrease
  double tol_cg = 1e-10;            ///< relative residual
  double tol_fista = 1e-9;          ///< relative fixed-point residual
  int max_outer = 20000;
  int max_cg = 5000;
  int max_fista = 20000;
  double lipschitz_safety = 1.1;
  int power_iterations = 30;
  int vi_probes = 100;              ///< random probes for the VI residual column; 0 disables
  std::uint64_t seed = 2024;

  void validate() const {
    if (!(tol_outer > 0.0) || !(tol_cg > 0.0) || !(tol_fista > 0.0))
      throw ValidationError("solver tolerances must be > 0");
    if (max_outer < 1 || max_cg < 1 || max_fista < 1) throw ValidationError("iteration caps must be >= 1");
    if (!(lipschitz_safety >= 1.0)) throw ValidationError("lipschitz_safety must be >= 1");
    for (double dt : dt_schedule)
      if (!(dt > 0.0)) throw ValidationError("dt_schedule entries must be > 0");
  }

  double dt(std::size_t step) const {
    if (dt_schedule.empty()) return 1.0;
    return step < dt_schedule.size() ? dt_schedule[step] : dt_schedule.back();
  }

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct KktReport {
  double max_inactive_excess = 0.0;  ///< max(0, |Σ| - radius) on nodes with no flow
  double max_active_gap = 0.0;       ///< | |Σ| - radius | on flowing nodes
  double max_active_angle = 0.0;     ///< angle between δp and Σ on flowing nodes [rad]
  double min_multiplier = 0.0;       ///< min_j |δp_j| / dt
  int active_nodes = 0;
  int nodes = 0;
};

struct StepReport {
  EnergySplit energy;
  double dissipation_increment = 0.0;  ///< sum_j w_j <Σ_E,j, δp_j>
  double dissipated_energy = 0.0;      ///< sum_j w_j sigma_y |δp_j|
  double vi_residual = std::numeric_limits<double>::quiet_NaN();
  KktReport kkt;
  double kkt_max_violation = 0.0;      ///< max KKT gap / sigma_y
  double active_node_fraction = 0.0;
  double max_dev_sigma_e = 0.0;
  double mean_gamma = 0.0;
  double max_abs_shear = 0.0;  ///< max |sigma_ab| over Gauss points, (a, b) from shear_component
  double mean_shear = 0.0;
  int outer_iterations = 0;
  int cg_iterations = 0;
  int restarts = 0;
  double lipschitz = 0.0;
};

namespace detail {

/// Nonsmooth part sum_j w_j D_inc(x_j - p_prev_j, gamma_prev_j).
inline double nonsmooth_value(const Discretization& d, const Vec& x, const Vec& pprev, const ScalarField& gprev) {
  const auto& sp = d.pspace();
  const auto& w = d.full().lumped;
  double s = 0.0;
  for (int v = 0; v < sp.node_count(); ++v) {
    const int n = sp.dim(v);
    if (n == 0) continue;
    const double m = (x.segment(sp.offset(v), n) - pprev.segment(sp.offset(v), n)).norm();
    s += w[v] * incremental_dissipation(d.variant(), m, gprev[v]);
  }
  return s;
}

inline Vec prox_nodes(const Discretization& d, const Vec& z, const Vec& pprev, const ScalarField& gprev,
                      double tau) {
  const auto& sp = d.pspace();
  Vec x = pprev;
  for (int v = 0; v < sp.node_count(); ++v) {
    const int n = sp.dim(v);
    if (n == 0) continue;
    const auto dz = z.segment(sp.offset(v), n) - pprev.segment(sp.offset(v), n);
    const double zn = dz.norm();
    if (zn == 0.0) continue;
    const double m = prox_magnitude(d.variant(), zn, tau, gprev[v]);
    if (m > 0.0) x.segment(sp.offset(v), n) += (m / zn) * dz;
  }
  return x;
}

inline double wnorm(const Vec& x, const Vec& w) { return std::sqrt(x.cwiseProduct(x).dot(w)); }

struct ProxGradStats {
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  double residual = 0.0;
  double lipschitz = 0.0;
};

/// Monotone accelerated proximal gradient with adaptive restart on
/// F(x) = smooth(x) + sum_j w_j D_inc(x_j - p_prev_j). The smooth part must be
/// quadratic so that its gradient is affine; smooth(x, value, grad) evaluates it.
template <typename Smooth>
ProxGradStats accelerated_prox_gradient(Smooth&& smooth, const Discretization& d, const Vec& pprev,
                                        const ScalarField& gprev, Vec& x, double L, double tol_fixed,
                                        double tol_obj, int max_iter) {
  ProxGradStats st;
  const Vec& w = d.blocks().w;
  double vx = 0.0;
  Vec gx;
  smooth(x, vx, gx);
  double Fx = vx + nonsmooth_value(d, x, pprev, gprev);
  Vec x_old = x, g_old = gx;
  double t = 1.0;
  const Vec inv_w = w.cwiseInverse();
  for (int it = 1; it <= max_iter; ++it) {
    st.iterations = it;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    const Vec y = x + beta * (x - x_old);
    const Vec gy = gx + beta * (gx - g_old);
    const Vec z = y - (1.0 / L) * gy.cwiseProduct(inv_w);
    Vec xn = prox_nodes(d, z, pprev, gprev, 1.0 / L);
    double vn = 0.0;
    Vec gn;
    smooth(xn, vn, gn);
    const double Fn = vn + nonsmooth_value(d, xn, pprev, gprev);
    const double fscale = std::abs(Fx) + std::abs(vx) + 1e-300;
    if (Fn > Fx + 1e-13 * fscale) {
      ++st.restarts;
      if (beta == 0.0 && Fn > Fx + 1e-10 * fscale) L *= 2.0;
      t = 1.0;
      x_old = x;
      g_old = gx;
      continue;
    }
    const double scale = std::max({wnorm(xn - pprev, w), wnorm(xn, w), wnorm(pprev, w), 1e-300});
    st.residual = wnorm(xn - y, w) / scale;
    const bool restart = (y - xn).cwiseProduct(w).dot(xn - x) > 0.0;
    const double dF = Fx - Fn;
    x_old = x;
    g_old = gx;
    x = std::move(xn);
    gx = std::move(gn);
    vx = vn;
    Fx = Fn;
    t = restart ? 1.0 : t_next;
    if (st.residual <= tol_fixed && dF <= tol_obj * fscale) {
      st.converged = true;
      break;
    }
  }
  st.lipschitz = L;
  return st;
}

}  // namespace detail

/// Lipschitz bound of the p-gradient in the lumped metric: largest eigenvalue
/// of W^{-1} A_pp by power iteration, times the safety factor.
inline double lipschitz_estimate(const Discretization& d, const SolverConfig& cfg) {
  const double lam = power_iteration_max(d.App(), d.blocks().w, cfg.power_iterations);
  return std::max(lam, 1e-300) * cfg.lipschitz_safety;
}

struct USolve {
  Vec u;
  CgResult cg;
};

/// Displacement minimizer for fixed plastic coordinates.
inline USolve solve_u(const Discretization& d, const Vec& pc, const Load& load, const Vec& u_guess,
                      const SolverConfig& cfg) {
  USolve r;
  r.u = u_guess.size() == d.nu() ? u_guess : Vec::Zero(d.nu());
  if (d.nu() == 0) {
    r.cg.converged = true;
    return r;
  }
  const Vec b = -(d.blocks().Kup * pc + load.amplitude * d.lift_u() - d.body_load(load.body_force));
  const SpMat& K = d.blocks().Kuu;
  r.cg = pcg([&](const Vec& v) -> Vec { return K * v; }, d.Kuu_diag(), b, r.u, cfg.tol_cg, cfg.max_cg);
  if (!r.cg.converged)
    throw NoConvergence("solve_u: CG stopped at relative residual " + std::to_string(r.cg.relative_residual));
  return r;
}

struct PSolve {
  Vec p;
  detail::ProxGradStats stats;
};

/// Plastic minimizer for fixed displacement: accelerated proximal gradient on
/// 1/2 p^T A p + p^T c + sum_j w_j D_inc(p_j - p_prev_j).
inline PSolve solve_p(const Discretization& d, const Vec& uf, const Load& load, const Vec& pprev,
                      const ScalarField& gprev, const SolverConfig& cfg) {
  PSolve r;
  r.p = pprev;
  if (d.np() == 0) {
    r.stats.converged = true;
    return r;
  }
  const Vec c = d.KupT() * uf + load.amplitude * d.lift_p();
  auto smooth = [&](const Vec& x, double& val, Vec& g) {
    const Vec Ax = d.App() * x;
    val = 0.5 * x.dot(Ax) + x.dot(c);
    g = Ax + c;
  };
  r.stats = detail::accelerated_prox_gradient(smooth, d, pprev, gprev, r.p, lipschitz_estimate(d, cfg),
                                              cfg.tol_fista, cfg.tol_outer, cfg.max_fista);
  if (!r.stats.converged)
    throw NoConvergence("solve_p: fixed-point residual " + std::to_string(r.stats.residual));
  return r;
}

/// Minimizes the full (u, p) energy of the elastic micromorphic model by one
/// preconditioned CG solve on the coupled system.
inline std::pair<Vec, Vec> solve_monolithic(const Discretization& d, const Load& load, const SolverConfig& cfg,
                                            CgResult* info = nullptr) {
  const int nu = d.nu(), np = d.np();
  Vec b(nu + np);
  b.head(nu) = -(load.amplitude * d.lift_u() - d.body_load(load.body_force));
  b.tail(np) = -(load.amplitude * d.lift_p());
  Vec diag(nu + np);
  diag.head(nu) = d.Kuu_diag();
  diag.tail(np) = d.App().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    if (!(diag[i] > 0.0)) diag[i] = 1.0;
  auto apply = [&](const Vec& x) -> Vec {
    Vec y(nu + np);
    y.head(nu) = d.blocks().Kuu * x.head(nu) + d.blocks().Kup * x.tail(np);
    y.tail(np) = d.KupT() * x.head(nu) + d.App() * x.tail(np);
    return y;
  };
  Vec x = Vec::Zero(nu + np);
  const CgResult res = pcg(apply, diag, b, x, cfg.tol_cg, std::max(cfg.max_cg, 20 * (nu + np)));
  if (info) *info = res;
  if (!res.converged)
    throw NoConvergence("monolithic solve: CG stopped at relative residual " +
                        std::to_string(res.relative_residual));
  return {x.head(nu), x.tail(np)};
}

/// Nodal complementarity check on the projected Eshelby stress -g_j / w_j.
inline KktReport kkt_check(const Discretization& d, const Vec& pc, const Vec& pprev, const ScalarField& gprev,
                           const Vec& grad_p, double dt = 1.0) {
  KktReport k;
  const auto& sp = d.pspace();
  const auto& prm = d.variant().params;
  const auto& w = d.full().lumped;
  k.min_multiplier = std::numeric_limits<double>::infinity();
  for (int v = 0; v < sp.node_count(); ++v) {
    const int n = sp.dim(v);
    if (n == 0) continue;
    ++k.nodes;
    const Vec sig = -grad_p.segment(sp.offset(v), n) / w[v];
    const Vec dp = pc.segment(sp.offset(v), n) - pprev.segment(sp.offset(v), n);
    const double m = dp.norm();
    k.min_multiplier = std::min(k.min_multiplier, m / dt);
    double radius = prm.sigma_y;
    if (d.variant().isotropic()) radius += prm.mu * prm.k2 * (gprev[v] + m);
    const double s = sig.norm();
    if (m <= 1e-12) {
      k.max_inactive_excess = std::max(k.max_inactive_excess, s - radius);
    } else {
      ++k.active_nodes;
      k.max_active_gap = std::max(k.max_active_gap, std::abs(s - radius));
      const Vec e = dp / m;
      const double along = sig.dot(e);
      const double across = (sig - along * e).norm();
      k.max_active_angle = std::max(k.max_active_angle, std::atan2(across, along));
    }
  }
  if (k.nodes == 0) k.min_multiplier = 0.0;
  k.max_inactive_excess = std::max(0.0, k.max_inactive_excess);
  return k;
}

struct VIResult {
  double min_value = 0.0;   ///< most negative probe value (0 if none negative)
  double scale = 0.0;       ///< energy scale used for normalization
  double normalized() const { return min_value / scale; }
};

/// Evaluates the discrete variational inequality
///   a(w_n, z - w_n) - <l, z - w_n> + j(z) - j(w_n) >= 0
/// at random admissible probes z = w_n + d (both signs), plus the probes along
/// the negative gradient and back to the previous state.
inline VIResult vi_residual(const Discretization& d, const SimState& state_n, const SimState& state_prev,
                            const Load& load, int probes, std::uint64_t seed = 7) {
  const Vec uf = d.u_free(state_n.u);
  const Vec pc = d.pspace().to_coords(state_n.p);
  const Vec pprev = d.pspace().to_coords(state_prev.p);
  const Vec uprev = d.u_free(state_prev.u);
  const ScalarField& gprev = state_prev.gamma;
  const Vec gu = d.grad_u(uf, pc, load);
  const Vec gp = d.grad_p(uf, pc, load);
  const double j0 = detail::nonsmooth_value(d, pc, pprev, gprev);

  const EnergySplit e = total_energy(d.grid(), d.variant(), state_n, load.body_force);
  VIResult r;
  r.scale = std::abs(e.elastic) + std::abs(e.defect) + std::abs(e.hardening) + std::abs(e.load) + j0;
  if (!(r.scale > 0.0)) r.scale = 1.0;

  auto value = [&](const Vec& du, const Vec& dp) {
    return gu.dot(du) + gp.dot(dp) + detail::nonsmooth_value(d, pc + dp, pprev, gprev) - j0;
  };
  auto consider = [&](double v) { r.min_value = std::min(r.min_value, v); };

  const double su = std::max({(uf - uprev).norm(), 1e-3 * uf.norm(), 1e-12});
  const double spn = std::max({(pc - pprev).norm(), 1e-3 * pc.norm(), 1e-12});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Vec du(uf.size()), dp(pc.size());
  for (int k = 0; k < probes; ++k) {
    for (Eigen::Index i = 0; i < du.size(); ++i) du[i] = N(rng);
    for (Eigen::Index i = 0; i < dp.size(); ++i) dp[i] = N(rng);
    if (du.size()) du *= su / du.norm();
    if (dp.size()) dp *= spn / dp.norm();
    consider(value(du, dp));
    consider(value(-du, -dp));
  }
  // structured probes
  const double gnorm = std::sqrt(gu.squaredNorm() + gp.squaredNorm());
  if (gnorm > 0.0) {
    const double s = std::sqrt(su * su + spn * spn) / gnorm;
    consider(value(-s * gu, -s * gp));
  }
  consider(value(uprev - uf, pprev - pc));
  consider(value(uf - uprev, pc - pprev));
  return r;
}

/// Off-diagonal component driven by the boundary loading: the largest entry
/// of sym H, (0, 1) when H has no shear part.
inline std::pair<int, int> shear_component(const BoundaryConfig& bc) {
  const Mat3 s = sym(bc.displacement_gradient);
  std::pair<int, int> best{0, 1};
  double m = 0.0;
  for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
    if (std::abs(s(a, b)) > m) {
      m = std::abs(s(a, b));
      best = {a, b};
    }
  return best;
}

inline void fill_field_diagnostics(const Discretization& d, const SimState& s, const Load& load, StepReport& rep) {
  rep.energy = total_energy(d.grid(), d.variant(), s, load.body_force);
  const auto sig = cauchy_stress(d.grid(), d.variant(), s.u, s.p);
  const auto [a, b] = shear_component(d.boundary());
  double sum = 0.0;
  rep.max_abs_shear = 0.0;
  for (const auto& m : sig) {
    rep.max_abs_shear = std::max(rep.max_abs_shear, std::abs(m(a, b)));
    sum += m(a, b);
  }
  rep.mean_shear = sig.empty() ? 0.0 : sum / static_cast<double>(sig.size());
  const TensorField SE = eshelby_stress(d, s, load);
  rep.max_dev_sigma_e = 0.0;
  for (const auto& m : SE)
    rep.max_dev_sigma_e =
        std::max(rep.max_dev_sigma_e, norm(d.variant().irrotational() ? dev(sym(m)) : dev(m)));
  double g = 0.0;
  for (double x : s.gamma) g += x;
  rep.mean_gamma = s.gamma.empty() ? 0.0 : g / static_cast<double>(s.gamma.size());
}

/// One load increment from state_prev to the level described by `load`.
inline std::pair<SimState, StepReport> time_step(const Discretization& d, const SimState& state_prev,
                                                 const Load& load, const SolverConfig& cfg, double dt = 1.0) {
  if (!std::isfinite(load.amplitude) || !std::isfinite(load.body_force[0]) ||
      !std::isfinite(load.body_force[1]) || !std::isfinite(load.body_force[2]))
    throw InfeasibleBC("load data must be finite");
  const auto& sp = d.pspace();
  StepReport rep;
  SimState out;
  out.t = state_prev.t + dt;
  const Vec pprev = sp.to_coords(state_prev.p);
  ScalarField gprev = state_prev.gamma;
  if (gprev.size() != static_cast<std::size_t>(d.grid().node_count())) gprev.assign(d.grid().node_count(), 0.0);

  Vec uf, pc;
  if (!d.variant().has_flow_law()) {
    CgResult info;
    std::tie(uf, pc) = solve_monolithic(d, load, cfg, &info);
    rep.cg_iterations = info.iterations;
    rep.outer_iterations = 1;
    out.gamma = gprev;
  } else {
    Vec u = d.u_free(state_prev.u);
    int cg_total = 0;
    auto reduced = [&](const Vec& x, double& val, Vec& g) {
      USolve us = solve_u(d, x, load, u, cfg);
      cg_total += us.cg.iterations;
      u = std::move(us.u);
      val = d.smooth_energy(u, x, load);
      g = d.grad_p(u, x, load);
    };
    pc = pprev;
    const double L = lipschitz_estimate(d, cfg);
    if (d.np() > 0) {
      const auto st = detail::accelerated_prox_gradient(reduced, d, pprev, gprev, pc, L, cfg.tol_fista,
                                                        cfg.tol_outer, cfg.max_outer);
      rep.outer_iterations = st.iterations;
      rep.restarts = st.restarts;
      rep.lipschitz = st.lipschitz;
      if (!st.converged)
        throw NoConvergence("time_step: fixed-point residual " + std::to_string(st.residual) + " after " +
                            std::to_string(st.iterations) + " iterations");
    } else {
      double v;
      Vec g;
      reduced(pc, v, g);
    }
    // final displacement consistent with the returned plastic field
    USolve us = solve_u(d, pc, load, u, cfg);
    cg_total += us.cg.iterations;
    uf = std::move(us.u);
    rep.cg_iterations = cg_total;

    const Vec gp = d.grad_p(uf, pc, load);
    rep.kkt = kkt_check(d, pc, pprev, gprev, gp, dt);
    const double sy = d.variant().params.sigma_y;
    rep.kkt_max_violation = std::isfinite(sy) ? std::max(rep.kkt.max_inactive_excess, rep.kkt.max_active_gap) / sy : 0.0;
    rep.dissipation_increment = -gp.dot(pc - pprev);
    out.gamma = gprev;
    int active = 0;
    for (int v = 0; v < sp.node_count(); ++v) {
      const int n = sp.dim(v);
      if (n == 0) continue;
      const double m = (pc.segment(sp.offset(v), n) - pprev.segment(sp.offset(v), n)).norm();
      out.gamma[v] += m;
      if (m > 1e-12) {
        ++active;
        rep.dissipated_energy += d.full().lumped[v] * sy * m;
      }
    }
    rep.active_node_fraction = static_cast<double>(active) / d.grid().node_count();
  }
  out.u = d.u_field(uf, load.amplitude);
  out.p = sp.from_coords(pc);
  fill_field_diagnostics(d, out, load, rep);
  if (cfg.vi_probes > 0 && d.variant().has_flow_law())
    rep.vi_residual = vi_residual(d, out, state_prev, load, cfg.vi_probes, cfg.seed).normalized();
  return {std::move(out), rep};
}

/// Runs a load program from `initial`, one time_step per load; dt from the
/// config schedule.
inline std::vector<std::pair<SimState, StepReport>> run_program(const Discretization& d, const SimState& initial,
                                                                const std::vector<Load>& loads,
                                                                const SolverConfig& cfg) {
  std::vector<std::pair<SimState, StepReport>> out;
  out.reserve(loads.size());
  SimState cur = initial;
  for (std::size_t k = 0; k < loads.size(); ++k) {
    auto step = time_step(d, cur, loads[k], cfg, cfg.dt(k));
    cur = step.first;
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace gradplast
