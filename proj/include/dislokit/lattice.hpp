#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dislokit/types.hpp"

namespace dislokit {

enum class LatticeKind { SC, BCC };

/// Lattice specification: kind, lattice constant, rigid offset delta in
/// 3-space and the global section phase (the argument of gamma in S^1).
struct LatticeSpec {
  LatticeKind kind = LatticeKind::SC;
  double a = 1.0;
  std::array<double, 3> delta{0.0, 0.0, 0.0};
  double gamma_phase = 0.0;

  /// Vertical spacing of the Z-family over one planar column: a for SC along
  /// (0,0,1) and sqrt(3)a/2 (the Burgers length) for BCC along (1,1,1).
  double fiber_period() const {
    return kind == LatticeKind::SC ? a : std::sqrt(3.0) * a / 2.0;
  }
};

inline void validate(const LatticeSpec& spec) {
  if (!(spec.a > 0.0) || !std::isfinite(spec.a))
    throw ConfigError("lattice constant a must be positive and finite");
  for (double d : spec.delta)
    if (!std::isfinite(d)) throw ConfigError("lattice offset delta must be finite");
  if (!std::isfinite(spec.gamma_phase) || spec.gamma_phase < 0.0 ||
      spec.gamma_phase >= kTwoPi)
    throw ConfigError("gamma_phase must lie in [0, 2*pi)");
}

/// Embedding of the SC lattice: (l1 a, l2 a, l3 a) + delta.
inline SpacePoint sc_lattice_point(std::int64_t l1, std::int64_t l2,
                                   std::int64_t l3, const LatticeSpec& spec) {
  if (spec.kind != LatticeKind::SC)
    throw UnsupportedLattice("sc_lattice_point requires an SC lattice spec");
  return {static_cast<double>(l1) * spec.a + spec.delta[0],
          static_cast<double>(l2) * spec.a + spec.delta[1],
          static_cast<double>(l3) * spec.a + spec.delta[2]};
}

inline void check_sheet(int sheet) {
  if (sheet < 0 || sheet > 2)
    throw ConfigError("sheet index must be 0, 1 or 2");
}

/// Projected planar coordinates of column (l1, l2) on sheet c of the BCC
/// (1,1,1) decomposition. The frame sends the body diagonal 2b to
/// sqrt(3)a(0,0,1); sheet offsets are the images of a1-b and a1+a2-b, i.e.
/// (sqrt2 a/2, -sqrt6 a/6) and (sqrt2 a/2, +sqrt6 a/6).
inline PlanePoint bcc_sheet_planar_coords(std::int64_t l1, std::int64_t l2,
                                          int sheet, double a) {
  check_sheet(sheet);
  const double s2 = std::sqrt(2.0);
  const double s6 = std::sqrt(6.0);
  const double u = static_cast<double>(l1);
  const double v = static_cast<double>(l2);
  switch (sheet) {
    case 0:
      return {s2 * u * a + s2 * v * a / 2.0, s6 * v * a / 2.0};
    case 1:
      return {s2 * u * a + s2 * a / 2.0 + s2 * v * a / 2.0,
              (s6 * v * a - s6 * a / 3.0) / 2.0};
    default:
      return {s2 * u * a + s2 * a / 2.0 + s2 * v * a / 2.0,
              (s6 * v * a + s6 * a / 3.0) / 2.0};
  }
}

/// Height of BCC sheet c above sheet 0: c * sqrt(3)a/6.
inline double bcc_sheet_height_offset(int sheet, double a) {
  check_sheet(sheet);
  return static_cast<double>(sheet) * (std::sqrt(3.0) * a / 6.0);
}

/// Sheet spacing of the SC lattice fibered along (1,1,1): c * sqrt(3)a/3.
/// Geometry only; no dislocation or energy support is attached to this
/// direction.
inline double sc_diagonal_sheet_height_offset(int sheet, double a) {
  check_sheet(sheet);
  return static_cast<double>(sheet) * (std::sqrt(3.0) * a / 3.0);
}

/// Planar integer cell (l1, l2); ordering is lexicographic.
struct Cell {
  std::int64_t l1 = 0;
  std::int64_t l2 = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Open annulus of column indices around `center`:
///   rho*a < |(l1 a, l2 a) - center| < n_outer*a, both inequalities strict.
struct AnnulusRegion {
  PlanePoint center;
  double rho = 0.0;
  double n_outer = 0.0;
  double a = 1.0;
};

inline void validate(const AnnulusRegion& r) {
  if (!is_finite(r.center)) throw ConfigError("annulus center must be finite");
  if (!(r.rho > 0.0) || !std::isfinite(r.rho))
    throw ConfigError("annulus rho must be positive and finite");
  if (!(r.n_outer > r.rho) || !std::isfinite(r.n_outer))
    throw ConfigError("annulus n_outer must exceed rho");
  if (!(r.a > 0.0) || !std::isfinite(r.a))
    throw ConfigError("annulus lattice constant must be positive");
}

inline double distance_to_center(const AnnulusRegion& r, Cell c) {
  const double dx = static_cast<double>(c.l1) * r.a - r.center.x;
  const double dy = static_cast<double>(c.l2) * r.a - r.center.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline bool annulus_contains(const AnnulusRegion& r, Cell c) {
  const double d = distance_to_center(r, c);
  return d > r.rho * r.a && d < r.n_outer * r.a;
}

/// All cells of the open annulus, in lexicographic (l1, l2) order. The scan
/// box [floor(x0/a - N) - 1, ceil(x0/a + N) + 1]^2 is a guaranteed superset.
inline std::vector<Cell> annulus_members(const AnnulusRegion& r) {
  validate(r);
  const auto lo1 = static_cast<std::int64_t>(
      std::floor(r.center.x / r.a - r.n_outer)) - 1;
  const auto hi1 = static_cast<std::int64_t>(
      std::ceil(r.center.x / r.a + r.n_outer)) + 1;
  const auto lo2 = static_cast<std::int64_t>(
      std::floor(r.center.y / r.a - r.n_outer)) - 1;
  const auto hi2 = static_cast<std::int64_t>(
      std::ceil(r.center.y / r.a + r.n_outer)) + 1;

  std::vector<Cell> out;
  for (std::int64_t l1 = lo1; l1 <= hi1; ++l1)
    for (std::int64_t l2 = lo2; l2 <= hi2; ++l2)
      if (Cell c{l1, l2}; annulus_contains(r, c)) out.push_back(c);
  return out;
}

/// True when some scanned cell sits within tol*a of either bounding circle.
/// Strict membership is then sensitive to rounding; the CLI warns.
inline bool annulus_boundary_is_close(const AnnulusRegion& r,
                                      double tol = 1e-9) {
  validate(r);
  const auto lo1 = static_cast<std::int64_t>(
      std::floor(r.center.x / r.a - r.n_outer)) - 1;
  const auto hi1 = static_cast<std::int64_t>(
      std::ceil(r.center.x / r.a + r.n_outer)) + 1;
  const auto lo2 = static_cast<std::int64_t>(
      std::floor(r.center.y / r.a - r.n_outer)) - 1;
  const auto hi2 = static_cast<std::int64_t>(
      std::ceil(r.center.y / r.a + r.n_outer)) + 1;
  for (std::int64_t l1 = lo1; l1 <= hi1; ++l1)
    for (std::int64_t l2 = lo2; l2 <= hi2; ++l2) {
      const double d = distance_to_center(r, {l1, l2});
      if (std::abs(d - r.rho * r.a) < tol * r.a ||
          std::abs(d - r.n_outer * r.a) < tol * r.a)
        return true;
    }
  return false;
}

/// Cells of B'_{rho,N}: the intersection of the annuli around the two dipole
/// centers, lexicographic order.
inline std::vector<Cell> dipole_region_members(PlanePoint center_plus,
                                               PlanePoint center_minus,
                                               double rho, double n_outer,
                                               double a) {
  const auto ma = annulus_members({center_plus, rho, n_outer, a});
  const auto mb = annulus_members({center_minus, rho, n_outer, a});
  std::vector<Cell> out;
  std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace dislokit
