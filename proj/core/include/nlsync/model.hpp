#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nlsync/linalg3.hpp"

namespace nlsync {

/// Model and control constants.
///
/// The first equation is du1/dt = -a u1 + u2 + 10 u2 u3; the canonical
/// chaotic regime is a = 0.4, alpha = 0.175.
struct Params {
  double a = 0.4;
  double alpha = 0.175;
  double k = 5.0;  ///< synchronization gain, >= 0
  double d1 = 0.1;
  double d2 = 0.1;
  double d3 = 0.1;

  /// Throws std::invalid_argument on non-finite values, k < 0 or d_j <= 0.
  void validate() const;
};

/// One point (u1, u2, u3) of phase space.
using State3 = Vec3;

State3 reaction_rhs(const State3& u, const Params& p);
Matrix3 jacobian(const State3& u, const Params& p);

/// Divergence of the vector field, alpha - a - 0.4. State independent.
double divergence(const Params& p);
bool dissipative(const Params& p);

/// Phase-space volume v0 * exp(divergence * t) carried by the flow.
double volume_decay(double t, double v0, const Params& p);

struct EquilibriumReport {
  State3 point;
  Complex3 eigenvalues;
  bool stable = false;  ///< every eigenvalue has negative real part
  double residual = 0.0;
};

struct EquilibriumSearch {
  double box = 1.0;               ///< seeds cover [-box, box]^3
  std::size_t seeds_per_axis = 21;
  std::size_t max_iterations = 50;
  double residual_tol = 1e-12;
  double dedup_distance = 1e-6;
  double singular_det = 1e-14;
};

/// Newton's method from a uniform seed grid; converged roots are
/// deduplicated, classified by their Jacobian spectrum and sorted
/// lexicographically. An empty result is a valid answer.
std::vector<EquilibriumReport> find_equilibria(const Params& p,
                                               const EquilibriumSearch& search = {});

}  // namespace nlsync
