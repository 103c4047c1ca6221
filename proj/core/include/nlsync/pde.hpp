#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nlsync/model.hpp"

namespace nlsync {

/// Node-centered uniform grid on [0, length], boundary nodes included.
struct Grid1D {
  double length = 10.0;
  std::size_t n = 201;

  /// Throws std::invalid_argument unless length > 0 and n >= 3.
  void validate() const;
  double dx() const { return length / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

/// Three scalar fields sampled on one grid.
struct Field3 {
  Grid1D grid;
  std::array<std::vector<double>, 3> c;

  Field3() = default;
  explicit Field3(const Grid1D& g);

  State3 at(std::size_t i) const { return State3{{c[0][i], c[1][i], c[2][i]}}; }
  void set(std::size_t i, const State3& s) {
    c[0][i] = s[0];
    c[1][i] = s[1];
    c[2][i] = s[2];
  }
  bool is_finite() const;
};

/// base * (1 + amplitude * cos(omega * x)).
struct CosineProfile {
  double base = 0.0;
  double omega = 0.0;
  double amplitude = 0.3;

  double operator()(double x) const;
};

Field3 make_field(const Grid1D& grid, const std::array<CosineProfile, 3>& profile);
Field3 constant_field(const Grid1D& grid, const State3& value);

/// Trapezoid rule over the grid.
double trapezoid_integral(std::span<const double> f, const Grid1D& grid);

/// Second-order Neumann Laplacian with mirror ghost nodes.
std::vector<double> laplacian_apply(std::span<const double> f, const Grid1D& grid);

/// Continuous Neumann eigenvalue (i pi / L)^2 of -d^2/dx^2 on [0, L].
double neumann_eigenvalue(std::size_t i, const Grid1D& grid);

enum class DiffusionScheme { BackwardEuler, CrankNicolson };

struct StepperConfig {
  double dt = 1e-3;
  DiffusionScheme scheme = DiffusionScheme::CrankNicolson;

  double theta() const { return scheme == DiffusionScheme::BackwardEuler ? 1.0 : 0.5; }
};

/// Fills `out` with the reaction term evaluated on `state`.
using Reaction = std::function<void(const Field3& state, Field3& out)>;

/// Lifts a pointwise reaction to a field reaction.
Reaction pointwise(std::function<State3(const State3&)> f);

/// IMEX stepper: explicit reaction, theta-method diffusion. The three
/// tridiagonal factorizations are computed once.
class ImexStepper {
 public:
  ImexStepper(const Grid1D& grid, const std::array<double, 3>& diffusion, const StepperConfig& cfg);

  /// Advances `state` by one step. Throws DivergenceError naming the
  /// component and step if a sample becomes non-finite.
  void step(Field3& state, const Reaction& reaction);

  std::size_t steps_taken() const { return steps_; }
  const StepperConfig& config() const { return cfg_; }

 private:
  struct Factor {
    double r = 0.0;                // theta * dt * d / dx^2
    double explicit_r = 0.0;       // (1 - theta) * dt * d / dx^2
    std::vector<double> upper;     // modified super-diagonal
    std::vector<double> inv_pivot; // 1 / modified diagonal
    std::vector<double> lower;
  };

  void solve(const Factor& f, std::vector<double>& rhs) const;

  Grid1D grid_;
  StepperConfig cfg_;
  std::array<Factor, 3> factors_;
  Field3 reaction_;
  std::size_t steps_ = 0;
};

/// One-shot convenience wrapper around ImexStepper.
Field3 imex_step(const Field3& state, const Reaction& reaction, const std::array<double, 3>& d,
                 const StepperConfig& cfg);

}  // namespace nlsync
