#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dislokit/lattice.hpp"
#include "dislokit/section.hpp"

namespace dislokit {

/// Inclusive planar index box for configuration generation.
struct IndexBox {
  std::int64_t l1_min = 0;
  std::int64_t l1_max = 0;
  std::int64_t l2_min = 0;
  std::int64_t l2_max = 0;
};

inline void validate(const IndexBox& b) {
  if (b.l1_min > b.l1_max || b.l2_min > b.l2_max)
    throw ConfigError("index box must satisfy min <= max");
}

struct ConfigPoint {
  ColumnIndex column;
  PlanePoint planar;
  std::vector<double> heights;  // ascending, spaced by the fiber period
};

/// A generated dislocated point cloud. Points are ordered by
/// (sheet, l1, l2); heights per column ascend and lie in [window_lo,
/// window_hi].
struct Configuration {
  LatticeSpec spec;
  DislocationSet dislocations;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<ConfigPoint> points;
};

namespace detail {

inline void rethrow_with_column(const DislocationCenterHit& e,
                                ColumnIndex col) {
  throw DislocationCenterHit(
      "column (sheet=" + std::to_string(col.sheet) +
          ", l1=" + std::to_string(col.l1) + ", l2=" + std::to_string(col.l2) +
          "): " + e.what(),
      e.at());
}

}  // namespace detail

/// Dislocated SC configuration along (0,0,1). Column (l1, l2) sits at
/// (l1 a + d1, l2 a + d2); its heights are the Z-family
/// d3 + a*phase/(2 pi) + a Z clipped to the window, where phase is the
/// section argument at the column.
inline Configuration generate_sc_configuration(const LatticeSpec& spec,
                                               const DislocationSet& dis,
                                               const IndexBox& box,
                                               double window_lo,
                                               double window_hi,
                                               double center_tol = kCenterTol) {
  if (spec.kind != LatticeKind::SC)
    throw UnsupportedLattice("generate_sc_configuration requires kind = SC");
  validate(spec);
  validate(dis);
  validate(box);

  Configuration cfg{spec, dis, window_lo, window_hi, {}};
  const double tol = center_tol * spec.a;
  for (std::int64_t l1 = box.l1_min; l1 <= box.l1_max; ++l1)
    for (std::int64_t l2 = box.l2_min; l2 <= box.l2_max; ++l2) {
      const ColumnIndex col{l1, l2, 0};
      const PlanePoint planar{static_cast<double>(l1) * spec.a + spec.delta[0],
                              static_cast<double>(l2) * spec.a + spec.delta[1]};
      double phase = 0.0;
      try {
        phase = section_value(planar, dis, spec.gamma_phase, tol).phase;
      } catch (const DislocationCenterHit& e) {
        detail::rethrow_with_column(e, col);
      }
      const double base = spec.delta[2] + spec.a * phase / kTwoPi;
      cfg.points.push_back(
          {col, planar, height_family(base, spec.a, window_lo, window_hi)});
    }
  return cfg;
}

/// Dislocated BCC configuration along (1,1,1). Sheet c columns sit at their
/// projected coordinates plus (d1, d2); heights are the Z-family
/// d3 + c*sqrt(3)a/6 + d*phase/(2 pi) + d Z with d = sqrt(3)a/2, phase the
/// section argument at the column. The sheet offset is applied as an exact
/// height shift (the per-sheet S^1 factor with argument 2 pi c/3), so the
/// undislocated sheets reproduce bcc_sheet_height_offset exactly.
inline Configuration generate_bcc_configuration(const LatticeSpec& spec,
                                                const DislocationSet& dis,
                                                const IndexBox& box,
                                                double window_lo,
                                                double window_hi,
                                                double center_tol = kCenterTol) {
  if (spec.kind != LatticeKind::BCC)
    throw UnsupportedLattice("generate_bcc_configuration requires kind = BCC");
  validate(spec);
  validate(dis);
  validate(box);

  Configuration cfg{spec, dis, window_lo, window_hi, {}};
  const double d = spec.fiber_period();
  const double tol = center_tol * spec.a;
  for (int sheet = 0; sheet < 3; ++sheet) {
    const double sheet_off = bcc_sheet_height_offset(sheet, spec.a);
    for (std::int64_t l1 = box.l1_min; l1 <= box.l1_max; ++l1)
      for (std::int64_t l2 = box.l2_min; l2 <= box.l2_max; ++l2) {
        const ColumnIndex col{l1, l2, sheet};
        PlanePoint planar = bcc_sheet_planar_coords(l1, l2, sheet, spec.a);
        planar.x += spec.delta[0];
        planar.y += spec.delta[1];
        double phase = 0.0;
        try {
          phase = section_value(planar, dis, spec.gamma_phase, tol).phase;
        } catch (const DislocationCenterHit& e) {
          detail::rethrow_with_column(e, col);
        }
        const double base = spec.delta[2] + sheet_off + d * phase / kTwoPi;
        cfg.points.push_back(
            {col, planar, height_family(base, d, window_lo, window_hi)});
      }
  }
  return cfg;
}

inline Configuration generate_configuration(const LatticeSpec& spec,
                                            const DislocationSet& dis,
                                            const IndexBox& box,
                                            double window_lo, double window_hi,
                                            double center_tol = kCenterTol) {
  return spec.kind == LatticeKind::SC
             ? generate_sc_configuration(spec, dis, box, window_lo, window_hi,
                                         center_tol)
             : generate_bcc_configuration(spec, dis, box, window_lo, window_hi,
                                          center_tol);
}

}  // namespace dislokit
