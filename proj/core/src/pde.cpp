#include "nlsync/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlsync/ode_sim.hpp"

namespace nlsync {

void Grid1D::validate() const {
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid length must be > 0");
  if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
}

Field3::Field3(const Grid1D& g) : grid(g) {
  for (auto& comp : c) comp.assign(g.n, 0.0);
}

bool Field3::is_finite() const {
  return std::all_of(c.begin(), c.end(), [](const auto& comp) {
    return std::all_of(comp.begin(), comp.end(), [](double x) { return std::isfinite(x); });
  });
}

double CosineProfile::operator()(double x) const {
  return base * (1.0 + amplitude * std::cos(omega * x));
}

Field3 make_field(const Grid1D& grid, const std::array<CosineProfile, 3>& profile) {
  Field3 f(grid);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < grid.n; ++i) f.c[j][i] = profile[j](grid.x(i));
  return f;
}

Field3 constant_field(const Grid1D& grid, const State3& value) {
  Field3 f(grid);
  for (std::size_t j = 0; j < 3; ++j) std::fill(f.c[j].begin(), f.c[j].end(), value[j]);
  return f;
}

double trapezoid_integral(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != grid.n) throw std::invalid_argument("field size does not match grid");
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * grid.dx();
}

std::vector<double> laplacian_apply(std::span<const double> f, const Grid1D& grid) {
  grid.validate();
  if (f.size() != grid.n) throw std::invalid_argument("field size does not match grid");
  const std::size_t n = grid.n;
  const double inv = 1.0 / (grid.dx() * grid.dx());
  std::vector<double> out(n);
  out[0] = 2.0 * (f[1] - f[0]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
  out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv;
  return out;
}

double neumann_eigenvalue(std::size_t i, const Grid1D& grid) {
  const double w = static_cast<double>(i) * std::numbers::pi / grid.length;
  return w * w;
}

Reaction pointwise(std::function<State3(const State3&)> f) {
  return [f = std::move(f)](const Field3& state, Field3& out) {
    for (std::size_t i = 0; i < state.grid.n; ++i) out.set(i, f(state.at(i)));
  };
}

ImexStepper::ImexStepper(const Grid1D& grid, const std::array<double, 3>& diffusion,
                         const StepperConfig& cfg)
    : grid_(grid), cfg_(cfg), reaction_(grid) {
  grid_.validate();
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw std::invalid_argument("dt must be > 0");
  const std::size_t n = grid_.n;
  const double inv_dx2 = 1.0 / (grid_.dx() * grid_.dx());
  const double theta = cfg_.theta();
  for (std::size_t j = 0; j < 3; ++j) {
    if (!(diffusion[j] >= 0.0)) throw std::invalid_argument("diffusion must be >= 0");
    Factor& f = factors_[j];
    f.r = theta * cfg.dt * diffusion[j] * inv_dx2;
    f.explicit_r = (1.0 - theta) * cfg.dt * diffusion[j] * inv_dx2;

    // Rows of I - r * L_h: the Neumann rows carry a doubled off-diagonal.
    std::vector<double> lower(n, -f.r), diag(n, 1.0 + 2.0 * f.r), upper(n, -f.r);
    lower[0] = 0.0;
    upper[0] = -2.0 * f.r;
    lower[n - 1] = -2.0 * f.r;
    upper[n - 1] = 0.0;

    f.lower = lower;
    f.upper.assign(n, 0.0);
    f.inv_pivot.assign(n, 0.0);
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pivot = diag[i] - lower[i] * prev_upper;
      f.inv_pivot[i] = 1.0 / pivot;
      f.upper[i] = upper[i] * f.inv_pivot[i];
      prev_upper = f.upper[i];
    }
  }
}

void ImexStepper::solve(const Factor& f, std::vector<double>& rhs) const {
  const std::size_t n = rhs.size();
  rhs[0] *= f.inv_pivot[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - f.lower[i] * rhs[i - 1]) * f.inv_pivot[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= f.upper[i] * rhs[i + 1];
}

void ImexStepper::step(Field3& state, const Reaction& reaction) {
  if (state.grid != grid_) throw std::invalid_argument("field grid does not match stepper grid");
  reaction(state, reaction_);
  ++steps_;
  const std::size_t n = grid_.n;
  const double dt = cfg_.dt;
  for (std::size_t j = 0; j < 3; ++j) {
    const Factor& f = factors_[j];
    std::vector<double>& u = state.c[j];
    const std::vector<double>& react = reaction_.c[j];
    std::vector<double> rhs(n);
    const double er = f.explicit_r;
    rhs[0] = u[0] + dt * react[0] + er * 2.0 * (u[1] - u[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      rhs[i] = u[i] + dt * react[i] + er * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    rhs[n - 1] = u[n - 1] + dt * react[n - 1] + er * 2.0 * (u[n - 2] - u[n - 1]);
    solve(f, rhs);
    if (!std::all_of(rhs.begin(), rhs.end(), [](double x) { return std::isfinite(x); })) {
      throw DivergenceError("component c" + std::to_string(j + 1) +
                                " became non-finite at step " + std::to_string(steps_),
                            steps_, static_cast<double>(steps_) * dt);
    }
    u = std::move(rhs);
  }
}

Field3 imex_step(const Field3& state, const Reaction& reaction, const std::array<double, 3>& d,
                 const StepperConfig& cfg) {
  ImexStepper stepper(state.grid, d, cfg);
  Field3 next = state;
  stepper.step(next, reaction);
  return next;
}

}  // namespace nlsync
