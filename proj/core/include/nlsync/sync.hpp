#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsync/linalg3.hpp"
#include "nlsync/model.hpp"
#include "nlsync/pde.hpp"

namespace nlsync {

/// Nonlinear controller added to the slave. With e = v - u:
///   phi1 = -10 v2 e3 + 5 u2 e3,  phi2 = -15 u3 e1,  phi3 = -(alpha + k) e3.
State3 control_phi(const State3& u, const State3& v, const Params& p);

/// Reaction part of the controlled error dynamics.
State3 error_rhs(const State3& u, const State3& v, const Params& p);

/// Matrix A(u, v) with error_rhs(u, v) = A(u, v) (v - u). Its off-diagonal
/// part is skew-symmetric.
Matrix3 error_matrix(const State3& u, const State3& v, const Params& p);

/// Linearization restricted to the i-th Neumann mode:
/// A with u1 in the (2,3)/(3,2) slots, minus diag(d1, d2, d3) * lambda_i.
Matrix3 mode_matrix(std::size_t i, const State3& u, const Grid1D& grid, const Params& p);

struct ConditionReport {
  double lhs = 0.0;    ///< max over |u3| <= u3_sup of (0.52 + 100 u3^2 + 20 u3) / (1.6 + 2k)
  double rhs = 0.0;    ///< d3 * lambda_1
  bool satisfied = false;
  double k_min = 0.0;  ///< smallest gain at which lhs == rhs (0 if any k >= 0 works)
};

ConditionReport check_condition_313(double u3_sup, const Grid1D& grid, const Params& p);

/// V = 1/2 * integral of (e1^2 + e2^2 + e3^2), trapezoid rule.
double lyapunov_functional(const Field3& e);

struct LyapunovDecomposition {
  double i_term = 0.0;  ///< -sum_j d_j * integral |grad e_j|^2 (forward differences)
  double j_term = 0.0;  ///< -a int e1^2 - 0.4 int e2^2 - k int e3^2
};

/// The two pieces of dV/dt. `u` is the master field; it must share the
/// grid of `e`.
LyapunovDecomposition lyapunov_decomposition(const Field3& u, const Field3& e, const Params& p);

/// Pointwise v - u.
Field3 error_field(const Field3& master, const Field3& slave);

/// Sup norm over every sample of every component.
double sup_norm(const Field3& f);

struct SyncTrace {
  std::vector<double> t;
  std::vector<double> err_sup;
  std::vector<double> V;
  std::vector<double> I_term;
  std::vector<double> J_term;
  std::vector<double> cond313_lhs;
  std::vector<double> cond313_rhs;

  std::size_t size() const { return t.size(); }
};

using SnapshotSink =
    std::function<void(std::size_t index, double t, const Field3& master, const Field3& slave)>;

struct SyncOptions {
  std::size_t snapshot_count = 200;
  SnapshotSink on_snapshot;
};

struct SyncResult {
  SyncTrace trace;
  Field3 master;
  Field3 slave;
  bool completed = false;
  std::optional<double> failure_time;
  std::string failure_message;
  std::array<double, 3> master_sup{};  ///< running sup |u_j| over grid and time
  std::size_t snapshots_written = 0;

  bool synchronized(double tolerance = 1e-3) const {
    return completed && !trace.err_sup.empty() && trace.err_sup.back() < tolerance;
  }
};

/// Step indices at which `count` evenly spaced snapshots are taken out of
/// `steps` steps (step 0 and the last step included).
std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t count);

/// Co-evolves master and slave with the IMEX stepper and records the trace
/// after every step. A non-finite field ends the run early; the trace up
/// to the failure is kept and `failure_time` is set.
SyncResult run_master_slave(const Field3& master_ic, const Field3& slave_ic, const Params& p,
                            const StepperConfig& cfg, double t_end, bool controls_on,
                            const SyncOptions& opts = {});

}  // namespace nlsync
