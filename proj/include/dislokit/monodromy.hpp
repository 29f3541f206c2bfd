#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dislokit/lattice.hpp"
#include "dislokit/section.hpp"
#include "dislokit/summation.hpp"

namespace dislokit {

/// Closed cycle of columns on one planar sheet. Consecutive steps must be
/// nearest- or diagonal-neighbor moves and the last step must equal the
/// first.
struct LatticeLoop {
  std::vector<ColumnIndex> steps;
};

using PlanarMap = std::function<PlanePoint(const ColumnIndex&)>;

inline PlanarMap sc_planar_map(const LatticeSpec& spec) {
  return [spec](const ColumnIndex& c) {
    return PlanePoint{static_cast<double>(c.l1) * spec.a + spec.delta[0],
                      static_cast<double>(c.l2) * spec.a + spec.delta[1]};
  };
}

inline PlanarMap bcc_planar_map(const LatticeSpec& spec) {
  return [spec](const ColumnIndex& c) {
    PlanePoint p = bcc_sheet_planar_coords(c.l1, c.l2, c.sheet, spec.a);
    p.x += spec.delta[0];
    p.y += spec.delta[1];
    return p;
  };
}

inline void validate(const LatticeLoop& loop) {
  const auto& s = loop.steps;
  if (s.size() < 2) throw ConfigError("loop needs at least two steps");
  if (!(s.front() == s.back()))
    throw ConfigError("loop must be closed (last step equal to first)");
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].sheet != s[i + 1].sheet)
      throw ConfigError("loop must stay on a single sheet");
    const auto d1 = std::abs(s[i + 1].l1 - s[i].l1);
    const auto d2 = std::abs(s[i + 1].l2 - s[i].l2);
    if (d1 > 1 || d2 > 1 || (d1 == 0 && d2 == 0))
      throw ConfigError("loop step " + std::to_string(i) +
                        " is not a neighbor move");
  }
}

namespace detail {

inline double point_segment_distance(PlanePoint p, PlanePoint a, PlanePoint b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = wx - t * vx, dy = wy - t * vy;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace detail

/// Height gained by lifting the loop through the section: the sum of
/// (d/2 pi) * wrapped phase differences along the steps. Equals d times the
/// signed winding sum of the loop around S+ minus S-, provided each step is
/// fine enough that the true section-phase change along it stays below pi in
/// magnitude. A single center never violates this on a segment it does not
/// touch, but several centers crowding one step can; such loops must be
/// refined by the caller. Throws StepTooCoarse when a step difference wraps
/// to exactly pi, and DislocationCenterHit when a segment passes within
/// center_tol of a center.
inline double loop_monodromy(const LatticeLoop& loop, const DislocationSet& dis,
                             double d, const PlanarMap& planar_map,
                             double gamma_phase = 0.0,
                             double center_tol = kCenterTol) {
  validate(loop);
  validate(dis);
  if (!(d > 0.0)) throw ConfigError("fiber period must be positive");

  const auto& s = loop.steps;
  std::vector<PlanePoint> pos(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) pos[i] = planar_map(s[i]);

  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    for (const auto& c : dis.plus)
      if (detail::point_segment_distance(c, pos[i], pos[i + 1]) < center_tol)
        throw DislocationCenterHit(
            "loop segment " + std::to_string(i) + " passes through a center",
            c);
    for (const auto& c : dis.minus)
      if (detail::point_segment_distance(c, pos[i], pos[i + 1]) < center_tol)
        throw DislocationCenterHit(
            "loop segment " + std::to_string(i) + " passes through a center",
            c);
  }

  std::vector<double> phases(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    phases[i] = section_value(pos[i], dis, gamma_phase, center_tol).phase;

  NeumaierSum total;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double delta = wrap_pi(phases[i + 1] - phases[i]);
    if (!(std::abs(delta) < kPi))
      throw StepTooCoarse("loop step " + std::to_string(i) +
                          " wraps by pi; refine the loop");
    total.add(delta);
  }
  return d * total.value() / kTwoPi;
}

/// Axis-aligned rectangle cycle on sheet `sheet`, counterclockwise, starting
/// and ending at (l1_min, l2_min).
inline LatticeLoop rectangle_loop(std::int64_t l1_min, std::int64_t l1_max,
                                  std::int64_t l2_min, std::int64_t l2_max,
                                  int sheet = 0) {
  if (l1_min >= l1_max || l2_min >= l2_max)
    throw ConfigError("rectangle loop needs min < max in both directions");
  LatticeLoop loop;
  for (std::int64_t l1 = l1_min; l1 < l1_max; ++l1)
    loop.steps.push_back({l1, l2_min, sheet});
  for (std::int64_t l2 = l2_min; l2 < l2_max; ++l2)
    loop.steps.push_back({l1_max, l2, sheet});
  for (std::int64_t l1 = l1_max; l1 > l1_min; --l1)
    loop.steps.push_back({l1, l2_max, sheet});
  for (std::int64_t l2 = l2_max; l2 > l2_min; --l2)
    loop.steps.push_back({l1_min, l2, sheet});
  loop.steps.push_back({l1_min, l2_min, sheet});
  return loop;
}

}  // namespace dislokit
