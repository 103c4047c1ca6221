#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlsync/model.hpp"

namespace nlsync {

/// Raised when an integrator produces a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step, double time)
      : std::runtime_error(what), step_(step), time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// An autonomous vector field on R^3 with its Jacobian.
struct VectorField {
  std::function<State3(const State3&)> rhs;
  std::function<Matrix3(const State3&)> jacobian;
};

VectorField newton_leipnik_field(const Params& p);

/// Number of fixed steps of size dt that fit in [0, t_end], tolerant to
/// rounding in t_end / dt.
std::size_t step_count(double dt, double t_end);

State3 rk4_step(const VectorField& field, const State3& u, double dt);
State3 euler_step(const State3& u, const Params& p, double dt);

struct OdeRun {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<State3> states;
};

/// Classical RK4 with fixed step; every step is recorded and t[i] = i * dt.
OdeRun integrate_ode(const State3& u0, const Params& p, double dt, double t_end);
OdeRun integrate_ode(const State3& u0, const VectorField& field, double dt, double t_end);

struct LyapunovOptions {
  double transient = 100.0;         ///< discarded before averaging
  double reortho_interval = 1.0;    ///< time between Gram-Schmidt passes
};

struct LyapunovSpectrum {
  std::array<double, 3> exponents{};  ///< descending
  double horizon = 0.0;               ///< total integration time
};

/// Benettin estimate: the state is carried together with three tangent
/// vectors driven by the Jacobian, re-orthonormalized by modified
/// Gram-Schmidt every `reortho_interval`, and the log stretch factors after
/// the transient are averaged.
LyapunovSpectrum lyapunov_spectrum(const State3& u0, const VectorField& field, double dt,
                                   double t_end, const LyapunovOptions& opts = {});
LyapunovSpectrum lyapunov_spectrum(const State3& u0, const Params& p, double dt, double t_end,
                                   const LyapunovOptions& opts = {});

/// Volume of an infinitesimal parallelepiped with corner u0 and edges
/// edge * e_j advected by the flow, sampled at every step.
std::vector<std::pair<double, double>> ensemble_volume(const State3& u0, const Params& p,
                                                       double edge, double dt, double t_end);

/// Least-squares slope of log(volume) against t over [t_from, t_to].
double log_slope(const std::vector<std::pair<double, double>>& samples, double t_from,
                 double t_to);

}  // namespace nlsync
