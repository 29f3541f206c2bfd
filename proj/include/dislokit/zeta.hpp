#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dislokit/lattice.hpp"
#include "dislokit/springs.hpp"
#include "dislokit/summation.hpp"

namespace dislokit {

/// Parameters of the truncated Epstein-Hurwitz zeta function
///   zeta_{rho,N}(s, z0) = sum_{A_{rho,N}} 1/((l1 + x0)^2 + (l2 + y0)^2)^{s/2},
/// where the annulus A_{rho,N} lives on the unit lattice and is centered at
/// (-x0, -y0), so each summand is the inverse distance from the region
/// center raised to s.
struct ZetaParams {
  double s = 2.0;
  PlanePoint z0;
  double rho = 0.0;
  double n_outer = 0.0;
};

inline void validate(const ZetaParams& p) {
  if (!(p.s > 0.0) || !std::isfinite(p.s))
    throw ConfigError("zeta exponent s must be positive and finite");
  if (!is_finite(p.z0)) throw ConfigError("zeta offset must be finite");
  if (!(p.rho > 0.0) || !(p.n_outer > p.rho) || !std::isfinite(p.n_outer))
    throw ConfigError("zeta region needs 0 < rho < n_outer");
}

inline double truncated_zeta(const ZetaParams& p, int threads = 1) {
  validate(p);
  const auto members =
      annulus_members({{-p.z0.x, -p.z0.y}, p.rho, p.n_outer, 1.0});
  if (members.empty()) return 0.0;
  return deterministic_sum(
      members.size(),
      [&](std::size_t i) {
        const double dx = static_cast<double>(members[i].l1) + p.z0.x;
        const double dy = static_cast<double>(members[i].l2) + p.z0.y;
        return detail::inv_pow_rr(dx * dx + dy * dy, p.s);
      },
      threads);
}

/// Energy entry point with the index conversion baked in:
///   E = (k_d a^2 / 8 pi^2) * zeta_{rho,N}(2, -z0/a)
/// for a single dislocation at z0. Shares the summand and member order with
/// leading_order_energy, so the two agree bit for bit.
inline double zeta_energy_approx(PlanePoint z0, double a, double k_d,
                                 double rho, double n_outer, int threads = 1) {
  if (!(a > 0.0)) throw ConfigError("lattice constant must be positive");
  const ZetaParams p{2.0, {-z0.x / a, -z0.y / a}, rho, n_outer};
  validate(p);
  const auto members =
      annulus_members({{-p.z0.x, -p.z0.y}, p.rho, p.n_outer, 1.0});
  if (members.empty()) return 0.0;
  return energy_prefactor(a, k_d) *
         deterministic_sum(
             members.size(),
             [&](std::size_t i) {
               const double dx = static_cast<double>(members[i].l1) + p.z0.x;
               const double dy = static_cast<double>(members[i].l2) + p.z0.y;
               return detail::inv_pow_rr(dx * dx + dy * dy, 2.0);
             },
             threads);
}

/// Integer lattice shifts of the offset relabel the members bijectively, so
/// the sums agree up to summation-order noise. Returns true when the two
/// evaluations agree to 1e-12 relative.
inline bool shift_invariance_check(PlanePoint z0, std::int64_t m1,
                                   std::int64_t m2, double s, double rho,
                                   double n_outer) {
  const double va = truncated_zeta({s, z0, rho, n_outer});
  const double vb = truncated_zeta(
      {s,
       {z0.x + static_cast<double>(m1), z0.y + static_cast<double>(m2)},
       rho,
       n_outer});
  const double scale = std::max(std::abs(va), std::abs(vb));
  return std::abs(va - vb) <= 1e-12 * scale;
}

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual
};

/// Least-squares line through (x_i, y_i).
inline LogFit fit_line(std::span<const std::pair<double, double>> pts) {
  if (pts.size() < 2) throw ConfigError("line fit needs at least two points");
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw ConfigError("line fit is degenerate");
  LogFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (fit.slope * x + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

/// Fits zeta_{rho,N}(2, z0) against ln N over the given N values. The slope
/// tends to 2 pi, matching the continuum growth (a^2 G/4 pi) ln N after the
/// energy prefactor.
inline LogFit log_divergence_fit(PlanePoint z0, double rho,
                                 std::span<const double> n_list,
                                 int threads = 1) {
  if (n_list.size() < 2)
    throw ConfigError("log divergence fit needs at least two N values");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(n_list.size());
  for (double n : n_list)
    pts.emplace_back(std::log(n), truncated_zeta({2.0, z0, rho, n}, threads));
  return fit_line(pts);
}

}  // namespace dislokit
