#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dislokit/lattice.hpp"
#include "dislokit/section.hpp"
#include "dislokit/summation.hpp"

namespace dislokit {

/// Spring constants: k_p for the axis springs (natural length a), k_d for
/// the diagonal springs (natural length sqrt(2)a). Only k_d survives at
/// leading order.
struct SpringConstants {
  double k_p = 1.0;
  double k_d = 1.0;
};

inline void validate(const SpringConstants& k) {
  if (!(k.k_p >= 0.0) || !std::isfinite(k.k_p))
    throw ConfigError("k_p must be nonnegative and finite");
  if (!(k.k_d > 0.0) || !std::isfinite(k.k_d))
    throw ConfigError("k_d must be positive and finite");
}

/// Relative height differences of the four edge families leaving a column:
/// e1 to (l1+1, l2), e2 to (l1, l2+1), e_plus to (l1+1, l2+1) and e_minus to
/// (l1+1, l2-1). Each lies in (-a/2, a/2] by the wrapped-branch convention.
struct EdgeEpsilons {
  double e1 = 0.0;
  double e2 = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

/// Elongations of the ten springs attached to a column. delta3 is
/// identically zero: vertical segments keep their natural length.
struct EdgeElongations {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double delta_d1p = 0.0;
  double delta_d1m = 0.0;
  double delta_d2p = 0.0;
  double delta_d2m = 0.0;
  double delta_dp = 0.0;
  double delta_dm = 0.0;
};

/// Exact edge epsilons of column (l1, l2): (a/2 pi) times the wrapped
/// difference of section arguments across each edge. The global phase gamma
/// cancels in the differences.
inline EdgeEpsilons edge_epsilons(std::int64_t l1, std::int64_t l2,
                                  const DislocationSet& dis, double a,
                                  double gamma_phase = 0.0,
                                  double center_tol = kCenterTol) {
  const double tol = center_tol * a;
  const double u = static_cast<double>(l1);
  const double v = static_cast<double>(l2);
  const double p0 =
      section_value({u * a, v * a}, dis, gamma_phase, tol).phase;
  const double scale = a / kTwoPi;
  auto eps = [&](double px, double py) {
    const double p = section_value({px, py}, dis, gamma_phase, tol).phase;
    return scale * wrap_pi(p - p0);
  };
  return {eps((u + 1.0) * a, v * a), eps(u * a, (v + 1.0) * a),
          eps((u + 1.0) * a, (v + 1.0) * a), eps((u + 1.0) * a, (v - 1.0) * a)};
}

/// Closed-form elongations from the edge epsilons:
///   delta_i     = sqrt(a^2 + e_i^2) - a
///   delta_d(i,+/-) = sqrt((a +/- e_i)^2 + a^2) - sqrt(2) a
///   delta_d(+/-)   = sqrt(2 a^2 + e_{+/-}^2) - sqrt(2) a
inline EdgeElongations edge_deltas(const EdgeEpsilons& e, double a) {
  const double sqrt2a = std::sqrt(2.0) * a;
  EdgeElongations d;
  d.delta1 = std::sqrt(a * a + e.e1 * e.e1) - a;
  d.delta2 = std::sqrt(a * a + e.e2 * e.e2) - a;
  d.delta3 = 0.0;
  d.delta_d1p = std::sqrt((a + e.e1) * (a + e.e1) + a * a) - sqrt2a;
  d.delta_d1m = std::sqrt((a - e.e1) * (a - e.e1) + a * a) - sqrt2a;
  d.delta_d2p = std::sqrt((a + e.e2) * (a + e.e2) + a * a) - sqrt2a;
  d.delta_d2m = std::sqrt((a - e.e2) * (a - e.e2) + a * a) - sqrt2a;
  d.delta_dp = std::sqrt(2.0 * a * a + e.e_plus * e.e_plus) - sqrt2a;
  d.delta_dm = std::sqrt(2.0 * a * a + e.e_minus * e.e_minus) - sqrt2a;
  return d;
}

/// Leading-order epsilons of the far field, superposed over all centers.
/// For a single center z0 = (x0, y0) with r^2 = (l1 a - x0)^2 + (l2 a - y0)^2:
///   e1    = -(a^2/2 pi) (l2 a - y0) / r^2
///   e2    = +(a^2/2 pi) (l1 a - x0) / r^2
///   e_+/- = (a^2/2 pi) (+/-(l1 a - x0) - (l2 a - y0)) / r^2
/// Negative centers contribute with opposite sign. For the mirrored dipole
/// these reduce to the familiar difference-of-two-terms fields.
inline EdgeEpsilons epsilon_leading_order(std::int64_t l1, std::int64_t l2,
                                          const DislocationSet& dis, double a,
                                          double center_tol = kCenterTol) {
  const double tol = center_tol * a;
  EdgeEpsilons e;
  auto accumulate = [&](PlanePoint c, double sign) {
    const double dx = static_cast<double>(l1) * a - c.x;
    const double dy = static_cast<double>(l2) * a - c.y;
    const double r2 = dx * dx + dy * dy;
    if (std::sqrt(r2) < tol) detail::throw_center_hit({l1 * a, l2 * a}, c);
    const double k = sign * a * a / (kTwoPi * r2);
    e.e1 += -k * dy;
    e.e2 += k * dx;
    e.e_plus += k * (dx - dy);
    e.e_minus += k * (-dx - dy);
  };
  for (const auto& c : dis.plus) accumulate(c, +1.0);
  for (const auto& c : dis.minus) accumulate(c, -1.0);
  return e;
}

/// Convenience overload for a single positive center.
inline EdgeEpsilons epsilon_leading_order(std::int64_t l1, std::int64_t l2,
                                          PlanePoint center, double a,
                                          double center_tol = kCenterTol) {
  return epsilon_leading_order(l1, l2, DislocationSet{{center}, {}}, a,
                               center_tol);
}

namespace detail {

// Per-column spring energy. The d(i,+)/d(i,-) squares are combined with a
// single commutative addition each, so exchanging S+ and S- (which swaps the
// pair) leaves the value bit-identical.
inline double column_energy(const EdgeElongations& d,
                            const SpringConstants& k) {
  const double axis =
      (d.delta1 * d.delta1 + d.delta2 * d.delta2) + d.delta3 * d.delta3;
  const double diag = ((d.delta_d1p * d.delta_d1p + d.delta_d1m * d.delta_d1m) +
                       (d.delta_d2p * d.delta_d2p + d.delta_d2m * d.delta_d2m)) +
                      (d.delta_dp * d.delta_dp + d.delta_dm * d.delta_dm);
  return 0.5 * k.k_p * axis + 0.5 * k.k_d * diag;
}

}  // namespace detail

/// Exact spring energy over the region members: the ten-spring quadratic
/// form per column, compensated summation in the given (lexicographic)
/// member order. Swapping S+ and S- and joint integer translations of
/// centers and members leave the result bit-identical.
inline double exact_energy(const DislocationSet& dis,
                           std::span<const Cell> members, double a,
                           const SpringConstants& k, double gamma_phase = 0.0,
                           int threads = 1, double center_tol = kCenterTol) {
  validate(dis);
  validate(k);
  if (dis.empty() || members.empty()) return 0.0;
  return deterministic_sum(
      members.size(),
      [&](std::size_t i) {
        const Cell c = members[i];
        try {
          const EdgeEpsilons e =
              edge_epsilons(c.l1, c.l2, dis, a, gamma_phase, center_tol);
          return detail::column_energy(edge_deltas(e, a), k);
        } catch (const DislocationCenterHit& ex) {
          throw DislocationCenterHit("region member (" + std::to_string(c.l1) +
                                         ", " + std::to_string(c.l2) + "): " +
                                         ex.what(),
                                     ex.at());
        }
      },
      threads);
}

/// k_d a^2 / (8 pi^2), the prefactor of the leading-order energy.
inline double energy_prefactor(double a, double k_d) {
  return k_d * a * a / (8.0 * kPi * kPi);
}

namespace detail {

inline double inv_pow_rr(double rr, double s) {
  if (s == 2.0) return 1.0 / rr;
  if (s == 4.0) return 1.0 / (rr * rr);
  return std::pow(rr, -0.5 * s);
}

inline bool is_mirror_dipole(const DislocationSet& dis) {
  return dis.plus.size() == 1 && dis.minus.size() == 1 &&
         dis.plus[0].x == dis.minus[0].x && dis.plus[0].y == -dis.minus[0].y &&
         dis.plus[0].y != 0.0;
}

}  // namespace detail

/// Leading-order (far-field) energy over the region members.
/// Single center: (k_d a^2/8 pi^2) sum 1/rhat^2 with rhat the offset in
/// units of a — the truncated zeta summand, shared bitwise with the zeta
/// module. Mirrored dipole S+ = {(x0, y0)}, S- = {(x0, -y0)}:
/// (k_d a^2/8 pi^2) sum 4 yhat0^2/(rhat+^2 rhat-^2). Any other set uses the
/// superposed leading-order fields k_d (e1^2 + e2^2)/2.
inline double leading_order_energy(const DislocationSet& dis,
                                   std::span<const Cell> members, double a,
                                   double k_d, int threads = 1) {
  validate(dis);
  if (!(k_d > 0.0) || !std::isfinite(k_d))
    throw ConfigError("k_d must be positive and finite");
  if (dis.empty() || members.empty()) return 0.0;

  const double pref = energy_prefactor(a, k_d);
  if (dis.size() == 1) {
    const PlanePoint c = dis.plus.empty() ? dis.minus[0] : dis.plus[0];
    const double xh = c.x / a;
    const double yh = c.y / a;
    return pref * deterministic_sum(
                      members.size(),
                      [&](std::size_t i) {
                        const double dx = static_cast<double>(members[i].l1) - xh;
                        const double dy = static_cast<double>(members[i].l2) - yh;
                        return detail::inv_pow_rr(dx * dx + dy * dy, 2.0);
                      },
                      threads);
  }
  if (detail::is_mirror_dipole(dis)) {
    const double xh = dis.plus[0].x / a;
    const double yh = dis.plus[0].y / a;
    return pref * deterministic_sum(
                      members.size(),
                      [&](std::size_t i) {
                        const double dx = static_cast<double>(members[i].l1) - xh;
                        const double dp = static_cast<double>(members[i].l2) - yh;
                        const double dm = static_cast<double>(members[i].l2) + yh;
                        const double rp2 = dx * dx + dp * dp;
                        const double rm2 = dx * dx + dm * dm;
                        return 4.0 * yh * yh / (rp2 * rm2);
                      },
                      threads);
  }
  return deterministic_sum(
      members.size(),
      [&](std::size_t i) {
        const EdgeEpsilons e =
            epsilon_leading_order(members[i].l1, members[i].l2, dis, a);
        return 0.5 * k_d * (e.e1 * e.e1 + e.e2 * e.e2);
      },
      threads);
}

/// Per-N leading-order dipole energies E_{rho,N}(S) for the mirrored pair
/// S+ = {(x0, y0)}, S- = {(x0, -y0)} over B'_{rho,N}. Requires the
/// convergence hypothesis rho*a > 2|y0|.
struct ScanRow {
  double n_outer = 0.0;
  double energy = 0.0;
  std::size_t region_size = 0;
};

inline std::vector<ScanRow> dipole_convergence_scan(
    double x0, double y0, double rho, double a, double k_d,
    std::span<const double> n_list, int threads = 1) {
  if (!(rho * a > 2.0 * std::abs(y0)))
    throw HypothesisViolated("dipole scan requires rho*a > 2|y0|");
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
    if (!(n_list[i] < n_list[i + 1]))
      throw ConfigError("scan n_list must be strictly increasing");

  DislocationSet dis{{{x0, y0}}, {{x0, -y0}}};
  const bool degenerate = y0 == 0.0;  // both centers coincide; energy is 0
  std::vector<ScanRow> rows;
  rows.reserve(n_list.size());
  for (double n : n_list) {
    if (!(n > rho)) throw ConfigError("scan requires every N > rho");
    const auto members =
        degenerate
            ? annulus_members({{x0, y0}, rho, n, a})
            : dipole_region_members({x0, y0}, {x0, -y0}, rho, n, a);
    const double e =
        degenerate ? 0.0 : leading_order_energy(dis, members, a, k_d, threads);
    rows.push_back({n, e, members.size()});
  }
  return rows;
}

}  // namespace dislokit
