#include "nlsync/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace nlsync {

void Params::validate() const {
  const auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(a) || !finite(alpha) || !finite(k) || !finite(d1) || !finite(d2) || !finite(d3))
    throw std::invalid_argument("parameters must be finite");
  if (k < 0.0) throw std::invalid_argument("k must be >= 0, got " + std::to_string(k));
  if (d1 <= 0.0 || d2 <= 0.0 || d3 <= 0.0)
    throw std::invalid_argument("diffusion coefficients must be strictly positive");
}

State3 reaction_rhs(const State3& u, const Params& p) {
  return State3{{-p.a * u[0] + u[1] + 10.0 * u[1] * u[2],
                 -u[0] - 0.4 * u[1] + 5.0 * u[0] * u[2],
                 p.alpha * u[2] - 5.0 * u[0] * u[1]}};
}

Matrix3 jacobian(const State3& u, const Params& p) {
  return Matrix3{{-p.a, 1.0 + 10.0 * u[2], 10.0 * u[1],
                  -1.0 + 5.0 * u[2], -0.4, 5.0 * u[0],
                  -5.0 * u[1], -5.0 * u[0], p.alpha}};
}

double divergence(const Params& p) { return p.alpha - p.a - 0.4; }

bool dissipative(const Params& p) { return divergence(p) < 0.0; }

double volume_decay(double t, double v0, const Params& p) {
  return v0 * std::exp(divergence(p) * t);
}

namespace {

// Solves J dx = rhs by Cramer's rule; the caller has already rejected
// near-singular J.
Vec3 solve3(const Matrix3& j, const Vec3& rhs, double det) {
  Vec3 x;
  for (std::size_t c = 0; c < 3; ++c) {
    Matrix3 replaced = j;
    for (std::size_t r = 0; r < 3; ++r) replaced(r, c) = rhs[r];
    x[c] = det3(replaced) / det;
  }
  return x;
}

std::optional<State3> newton_from(State3 u, const Params& p, const EquilibriumSearch& s) {
  State3 f = reaction_rhs(u, p);
  for (std::size_t it = 0; it <= s.max_iterations; ++it) {
    if (norm_inf(f) < s.residual_tol) return u;
    if (it == s.max_iterations) break;
    const Matrix3 j = jacobian(u, p);
    const double det = det3(j);
    if (std::abs(det) < s.singular_det) return std::nullopt;
    u -= solve3(j, f, det);
    if (!is_finite(u)) return std::nullopt;
    f = reaction_rhs(u, p);
  }
  return std::nullopt;
}

bool lexicographic(const State3& a, const State3& b) {
  return std::lexicographical_compare(a.v.begin(), a.v.end(), b.v.begin(), b.v.end());
}

}  // namespace

std::vector<EquilibriumReport> find_equilibria(const Params& p, const EquilibriumSearch& s) {
  const std::size_t m = s.seeds_per_axis;
  const auto coord = [&](std::size_t i) {
    return m == 1 ? 0.0 : -s.box + 2.0 * s.box * static_cast<double>(i) / static_cast<double>(m - 1);
  };

  struct Root {
    State3 point;
    double residual;
  };
  std::vector<Root> roots;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t l = 0; l < m; ++l) {
        const auto found = newton_from(State3{{coord(i), coord(j), coord(l)}}, p, s);
        if (!found) continue;
        const double residual = norm_inf(reaction_rhs(*found, p));
        auto same = std::find_if(roots.begin(), roots.end(), [&](const Root& r) {
          return norm2(r.point - *found) < s.dedup_distance;
        });
        if (same == roots.end()) {
          roots.push_back({*found, residual});
        } else if (residual < same->residual) {
          // Keep the best representative of each cluster.
          *same = {*found, residual};
        }
      }
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const Root& a, const Root& b) { return lexicographic(a.point, b.point); });

  std::vector<EquilibriumReport> out;
  out.reserve(roots.size());
  for (const auto& r : roots) {
    EquilibriumReport rep;
    rep.point = r.point;
    rep.residual = r.residual;
    rep.eigenvalues = eigenvalues3(jacobian(r.point, p));
    rep.stable = std::all_of(rep.eigenvalues.begin(), rep.eigenvalues.end(),
                             [](const auto& z) { return z.real() < 0.0; });
    out.push_back(rep);
  }
  return out;
}

}  // namespace nlsync
