#include "nlsync/ode_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace nlsync {

VectorField newton_leipnik_field(const Params& p) {
  return VectorField{[p](const State3& u) { return reaction_rhs(u, p); },
                     [p](const State3& u) { return jacobian(u, p); }};
}

std::size_t step_count(double dt, double t_end) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  return static_cast<std::size_t>(std::floor(t_end / dt + 1e-6));
}

State3 rk4_step(const VectorField& field, const State3& u, double dt) {
  const State3 k1 = field.rhs(u);
  const State3 k2 = field.rhs(u + (0.5 * dt) * k1);
  const State3 k3 = field.rhs(u + (0.5 * dt) * k2);
  const State3 k4 = field.rhs(u + dt * k3);
  return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

State3 euler_step(const State3& u, const Params& p, double dt) {
  return u + dt * reaction_rhs(u, p);
}

namespace {

[[noreturn]] void diverged(std::size_t step, double dt) {
  throw DivergenceError("trajectory diverged (non-finite state) at step " + std::to_string(step),
                        step, static_cast<double>(step) * dt);
}

}  // namespace

OdeRun integrate_ode(const State3& u0, const VectorField& field, double dt, double t_end) {
  const std::size_t n = step_count(dt, t_end);
  if (n == 0) throw std::invalid_argument("t_end must be >= dt");
  if (!is_finite(u0)) throw std::invalid_argument("initial state must be finite");

  OdeRun run;
  run.dt = dt;
  run.t.reserve(n + 1);
  run.states.reserve(n + 1);
  run.t.push_back(0.0);
  run.states.push_back(u0);
  State3 u = u0;
  for (std::size_t i = 1; i <= n; ++i) {
    u = rk4_step(field, u, dt);
    if (!is_finite(u)) diverged(i, dt);
    run.t.push_back(static_cast<double>(i) * dt);
    run.states.push_back(u);
  }
  return run;
}

OdeRun integrate_ode(const State3& u0, const Params& p, double dt, double t_end) {
  return integrate_ode(u0, newton_leipnik_field(p), dt, t_end);
}

namespace {

// State plus tangent frame, integrated jointly.
struct Tangent {
  State3 u;
  Matrix3 frame;  // columns are the tangent vectors
};

Tangent rk4_tangent(const VectorField& f, const Tangent& y, double h) {
  const auto deriv = [&](const State3& u, const Matrix3& q) {
    return Tangent{f.rhs(u), f.jacobian(u) * q};
  };
  const Tangent k1 = deriv(y.u, y.frame);
  const Tangent k2 = deriv(y.u + (0.5 * h) * k1.u, y.frame + (0.5 * h) * k1.frame);
  const Tangent k3 = deriv(y.u + (0.5 * h) * k2.u, y.frame + (0.5 * h) * k2.frame);
  const Tangent k4 = deriv(y.u + h * k3.u, y.frame + h * k3.frame);
  return Tangent{y.u + (h / 6.0) * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
                 y.frame + (h / 6.0) * (k1.frame + 2.0 * k2.frame + 2.0 * k3.frame + k4.frame)};
}

// Modified Gram-Schmidt in place; returns the stretch factors.
std::array<double, 3> orthonormalize(Matrix3& frame) {
  std::array<Vec3, 3> q{frame.column(0), frame.column(1), frame.column(2)};
  std::array<double, 3> r{};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < j; ++i) q[j] -= dot(q[i], q[j]) * q[i];
    r[j] = norm2(q[j]);
    q[j] *= 1.0 / r[j];
  }
  frame = Matrix3::from_columns(q[0], q[1], q[2]);
  return r;
}

}  // namespace

LyapunovSpectrum lyapunov_spectrum(const State3& u0, const VectorField& field, double dt,
                                   double t_end, const LyapunovOptions& opts) {
  const std::size_t total = step_count(dt, t_end);
  const std::size_t transient = step_count(dt, opts.transient);
  if (total <= transient) throw std::invalid_argument("t_end must exceed the transient");
  if (!(opts.reortho_interval > 0.0)) throw std::invalid_argument("reortho_interval must be > 0");
  const std::size_t every =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.reortho_interval / dt)));

  Tangent y{u0, Matrix3::identity()};
  std::array<double, 3> log_sum{};
  std::size_t since = 0;
  for (std::size_t i = 1; i <= total; ++i) {
    y = rk4_tangent(field, y, dt);
    if (!is_finite(y.u) || !is_finite(y.frame)) diverged(i, dt);
    ++since;
    const bool boundary = since == every || i == transient || i == total;
    if (!boundary) continue;
    const auto r = orthonormalize(y.frame);
    if (i > transient) {
      for (std::size_t j = 0; j < 3; ++j) log_sum[j] += std::log(r[j]);
    }
    since = 0;
  }

  const double window = static_cast<double>(total - transient) * dt;
  LyapunovSpectrum spec;
  spec.horizon = static_cast<double>(total) * dt;
  for (std::size_t j = 0; j < 3; ++j) spec.exponents[j] = log_sum[j] / window;
  std::sort(spec.exponents.begin(), spec.exponents.end(), std::greater<>());
  return spec;
}

LyapunovSpectrum lyapunov_spectrum(const State3& u0, const Params& p, double dt, double t_end,
                                   const LyapunovOptions& opts) {
  return lyapunov_spectrum(u0, newton_leipnik_field(p), dt, t_end, opts);
}

std::vector<std::pair<double, double>> ensemble_volume(const State3& u0, const Params& p,
                                                       double edge, double dt, double t_end) {
  if (!(edge > 0.0)) throw std::invalid_argument("edge must be > 0");
  const std::size_t n = step_count(dt, t_end);
  const VectorField field = newton_leipnik_field(p);

  std::array<State3, 4> corners{u0, u0, u0, u0};
  for (std::size_t j = 0; j < 3; ++j) corners[j + 1][j] += edge;

  const auto volume = [&] {
    return std::abs(det3(Matrix3::from_columns(corners[1] - corners[0], corners[2] - corners[0],
                                               corners[3] - corners[0])));
  };

  std::vector<std::pair<double, double>> out;
  out.reserve(n + 1);
  out.emplace_back(0.0, volume());
  for (std::size_t i = 1; i <= n; ++i) {
    for (auto& c : corners) {
      c = rk4_step(field, c, dt);
      if (!is_finite(c)) diverged(i, dt);
    }
    out.emplace_back(static_cast<double>(i) * dt, volume());
  }
  return out;
}

double log_slope(const std::vector<std::pair<double, double>>& samples, double t_from,
                 double t_to) {
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (const auto& [t, v] : samples) {
    if (t < t_from || t > t_to || !(v > 0.0)) continue;
    const double y = std::log(v);
    n += 1.0;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = n * stt - st * st;
  if (n < 2.0 || denom == 0.0) throw std::invalid_argument("log_slope needs two distinct samples");
  return (n * sty - st * sy) / denom;
}

}  // namespace nlsync
