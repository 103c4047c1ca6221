#include "nlsync/sync.hpp"

#include <algorithm>
#include <cmath>

#include "nlsync/ode_sim.hpp"

namespace nlsync {

State3 control_phi(const State3& u, const State3& v, const Params& p) {
  const State3 e = v - u;
  return State3{{-10.0 * v[1] * e[2] + 5.0 * u[1] * e[2],
                 -15.0 * u[2] * e[0],
                 -(p.alpha + p.k) * e[2]}};
}

State3 error_rhs(const State3& u, const State3& v, const Params& p) {
  const State3 e = v - u;
  const State3 phi = control_phi(u, v, p);
  return State3{{-p.a * e[0] + e[1] + 10.0 * v[1] * v[2] - 10.0 * u[1] * u[2] + phi[0],
                 -e[0] - 0.4 * e[1] + 5.0 * v[0] * v[2] - 5.0 * u[0] * u[2] + phi[1],
                 p.alpha * e[2] - 5.0 * v[0] * v[1] + 5.0 * u[0] * u[1] + phi[2]}};
}

Matrix3 error_matrix(const State3& u, const State3& v, const Params& p) {
  return Matrix3{{-p.a, 1.0 + 10.0 * u[2], 5.0 * u[1],
                  -1.0 - 10.0 * u[2], -0.4, 5.0 * v[0],
                  -5.0 * u[1], -5.0 * v[0], -p.k}};
}

Matrix3 mode_matrix(std::size_t i, const State3& u, const Grid1D& grid, const Params& p) {
  const double lambda = neumann_eigenvalue(i, grid);
  return Matrix3{{-p.d1 * lambda - p.a, 1.0 + 10.0 * u[2], 5.0 * u[1],
                  -1.0 - 10.0 * u[2], -p.d2 * lambda - 0.4, 5.0 * u[0],
                  -5.0 * u[1], -5.0 * u[0], -p.d3 * lambda - p.k}};
}

ConditionReport check_condition_313(double u3_sup, const Grid1D& grid, const Params& p) {
  const auto numerator = [](double u3) { return 0.52 + 100.0 * u3 * u3 + 20.0 * u3; };
  const double s = std::abs(u3_sup);
  // Convex in u3, so the max over [-s, s] sits at an endpoint.
  const double num = std::max(numerator(s), numerator(-s));

  ConditionReport r;
  r.lhs = num / (1.6 + 2.0 * p.k);
  r.rhs = p.d3 * neumann_eigenvalue(1, grid);
  r.satisfied = r.lhs < r.rhs;
  r.k_min = std::max(0.0, (num / r.rhs - 1.6) / 2.0);
  return r;
}

double lyapunov_functional(const Field3& e) {
  const std::size_t n = e.grid.n;
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    const State3 s = e.at(i);
    density[i] = 0.5 * dot(s, s);
  }
  return trapezoid_integral(density, e.grid);
}

LyapunovDecomposition lyapunov_decomposition(const Field3& u, const Field3& e, const Params& p) {
  if (u.grid != e.grid) throw std::invalid_argument("fields must share a grid");
  const Grid1D& g = e.grid;
  const double dx = g.dx();
  const std::array<double, 3> d{p.d1, p.d2, p.d3};
  const std::array<double, 3> decay{p.a, 0.4, p.k};

  LyapunovDecomposition out;
  std::vector<double> sq(g.n);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& c = e.c[j];
    double grad = 0.0;
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
      const double diff = c[i + 1] - c[i];
      grad += diff * diff;
    }
    out.i_term -= d[j] * grad / dx;

    for (std::size_t i = 0; i < g.n; ++i) sq[i] = c[i] * c[i];
    out.j_term -= decay[j] * trapezoid_integral(sq, g);
  }
  return out;
}

Field3 error_field(const Field3& master, const Field3& slave) {
  if (master.grid != slave.grid) throw std::invalid_argument("fields must share a grid");
  Field3 e(master.grid);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < master.grid.n; ++i) e.c[j][i] = slave.c[j][i] - master.c[j][i];
  return e;
}

double sup_norm(const Field3& f) {
  double m = 0.0;
  for (const auto& comp : f.c)
    for (double x : comp) m = std::max(m, std::abs(x));
  return m;
}

std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t count) {
  std::vector<std::size_t> out;
  if (count == 0) return out;
  count = std::min(count, steps + 1);
  if (count == 1) return {0};
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Integer rounding of k * steps / (count - 1).
    out.push_back((2 * k * steps + (count - 1)) / (2 * (count - 1)));
  }
  return out;
}

namespace {

void record(SyncTrace& tr, double t, const Field3& master, const Field3& slave, const Params& p,
            const ConditionReport& cond) {
  const Field3 e = error_field(master, slave);
  const LyapunovDecomposition dec = lyapunov_decomposition(master, e, p);
  tr.t.push_back(t);
  tr.err_sup.push_back(sup_norm(e));
  tr.V.push_back(lyapunov_functional(e));
  tr.I_term.push_back(dec.i_term);
  tr.J_term.push_back(dec.j_term);
  tr.cond313_lhs.push_back(cond.lhs);
  tr.cond313_rhs.push_back(cond.rhs);
}

void update_sup(std::array<double, 3>& sup, const Field3& f) {
  for (std::size_t j = 0; j < 3; ++j)
    for (double x : f.c[j]) sup[j] = std::max(sup[j], std::abs(x));
}

}  // namespace

SyncResult run_master_slave(const Field3& master_ic, const Field3& slave_ic, const Params& p,
                            const StepperConfig& cfg, double t_end, bool controls_on,
                            const SyncOptions& opts) {
  p.validate();
  if (master_ic.grid != slave_ic.grid) throw std::invalid_argument("initial fields must share a grid");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!master_ic.is_finite() || !slave_ic.is_finite())
    throw std::invalid_argument("initial fields must be finite");

  const Grid1D grid = master_ic.grid;
  const std::size_t steps = step_count(cfg.dt, t_end);
  const std::array<double, 3> d{p.d1, p.d2, p.d3};
  ImexStepper master_stepper(grid, d, cfg);
  ImexStepper slave_stepper(grid, d, cfg);

  SyncResult res;
  res.master = master_ic;
  res.slave = slave_ic;
  update_sup(res.master_sup, res.master);

  const Reaction master_reaction = pointwise([p](const State3& u) { return reaction_rhs(u, p); });
  // Evaluated against the master before the master is advanced.
  const Reaction slave_reaction = [&res, &p, controls_on](const Field3& v, Field3& out) {
    for (std::size_t i = 0; i < v.grid.n; ++i) {
      const State3 vi = v.at(i);
      State3 r = reaction_rhs(vi, p);
      if (controls_on) r += control_phi(res.master.at(i), vi, p);
      out.set(i, r);
    }
  };

  const std::vector<std::size_t> snaps = snapshot_steps(steps, opts.snapshot_count);
  std::size_t next_snap = 0;
  const auto maybe_snapshot = [&](std::size_t step) {
    while (next_snap < snaps.size() && snaps[next_snap] == step) {
      if (opts.on_snapshot)
        opts.on_snapshot(next_snap, static_cast<double>(step) * cfg.dt, res.master, res.slave);
      ++next_snap;
      ++res.snapshots_written;
    }
  };

  record(res.trace, 0.0, res.master, res.slave, p, check_condition_313(res.master_sup[2], grid, p));
  maybe_snapshot(0);

  try {
    for (std::size_t step = 1; step <= steps; ++step) {
      slave_stepper.step(res.slave, slave_reaction);
      master_stepper.step(res.master, master_reaction);
      update_sup(res.master_sup, res.master);
      const double t = static_cast<double>(step) * cfg.dt;
      record(res.trace, t, res.master, res.slave, p,
             check_condition_313(res.master_sup[2], grid, p));
      maybe_snapshot(step);
    }
    res.completed = true;
  } catch (const DivergenceError& err) {
    res.failure_time = err.time();
    res.failure_message = err.what();
  }
  return res;
}

}  // namespace nlsync
