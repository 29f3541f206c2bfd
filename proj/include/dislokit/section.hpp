#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dislokit/types.hpp"

namespace dislokit {

/// Positive (S+) and negative (S-) screw dislocation centers in the plane.
struct DislocationSet {
  std::vector<PlanePoint> plus;
  std::vector<PlanePoint> minus;

  bool empty() const { return plus.empty() && minus.empty(); }
  std::size_t size() const { return plus.size() + minus.size(); }
};

inline void validate(const DislocationSet& dis) {
  auto check_list = [](const std::vector<PlanePoint>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!is_finite(v[i]))
        throw ConfigError(std::string(name) + " centers must be finite");
      for (std::size_t j = i + 1; j < v.size(); ++j)
        if (v[i] == v[j])
          throw ConfigError(std::string("duplicate center in ") + name);
    }
  };
  check_list(dis.plus, "plus");
  check_list(dis.minus, "minus");
  for (const auto& p : dis.plus)
    for (const auto& m : dis.minus)
      if (p == m) throw ConfigError("plus and minus center sets must be disjoint");
}

/// A point of S^1 stored as its argument in (-pi, pi].
struct SectionValue {
  double phase = 0.0;
};

namespace detail {

// Product of unit complex factors, accumulated as explicit re/im pairs.
// Plus and minus factors are multiplied into separate products and combined
// with one conjugating multiply at the end; swapping S+ and S- then yields
// the bit-exact complex conjugate of the combined value.
struct UnitProduct {
  double re = 1.0;
  double im = 0.0;

  void mul(double ux, double uy) {
    const double r = re * ux - im * uy;
    im = re * uy + im * ux;
    re = r;
  }
};

inline void throw_center_hit(PlanePoint z, PlanePoint center) {
  throw DislocationCenterHit(
      "evaluation point (" + std::to_string(z.x) + ", " + std::to_string(z.y) +
          ") collides with dislocation center (" + std::to_string(center.x) +
          ", " + std::to_string(center.y) + ")",
      center);
}

}  // namespace detail

/// Argument of the S^1-section
///   gamma * prod_{S+} (z - z_i)/|z - z_i| * prod_{S-} conj(z - z_j)/|z - z_j|
/// wrapped into (-pi, pi]. Throws DislocationCenterHit when z lies within
/// center_tol of a center. With gamma_phase = 0, swapping S+ and S- negates
/// the phase exactly (up to the pi branch point).
inline SectionValue section_value(PlanePoint z, const DislocationSet& dis,
                                  double gamma_phase = 0.0,
                                  double center_tol = kCenterTol) {
  detail::UnitProduct pos, neg;
  for (const auto& p : dis.plus) {
    const double dx = z.x - p.x;
    const double dy = z.y - p.y;
    const double h = std::hypot(dx, dy);
    if (h < center_tol) detail::throw_center_hit(z, p);
    pos.mul(dx / h, dy / h);
  }
  for (const auto& m : dis.minus) {
    const double dx = z.x - m.x;
    const double dy = z.y - m.y;
    const double h = std::hypot(dx, dy);
    if (h < center_tol) detail::throw_center_hit(z, m);
    neg.mul(dx / h, dy / h);
  }
  // pos * conj(neg)
  const double re = pos.re * neg.re + pos.im * neg.im;
  const double im = pos.im * neg.re - pos.re * neg.im;
  double phase = std::atan2(im, re);
  if (gamma_phase != 0.0) phase = wrap_pi(phase + gamma_phase);
  if (phase == -kPi) phase = kPi;
  return {phase};
}

/// All heights h in [lo, hi] with h == offset + d*phase/(2 pi) (mod d),
/// ascending. May be empty.
inline std::vector<double> height_family(double base, double d, double lo,
                                         double hi) {
  if (!(lo <= hi)) throw ConfigError("height window must satisfy lo <= hi");
  if (!(d > 0.0)) throw ConfigError("fiber period must be positive");
  std::vector<double> out;
  auto kmin = static_cast<std::int64_t>(std::ceil((lo - base) / d)) - 1;
  auto kmax = static_cast<std::int64_t>(std::floor((hi - base) / d)) + 1;
  for (std::int64_t k = kmin; k <= kmax; ++k) {
    const double h = base + static_cast<double>(k) * d;
    if (h >= lo && h <= hi) out.push_back(h);
  }
  return out;
}

/// The Z-family of heights represented by a section value: the set
/// d*phase/(2 pi) + d Z restricted to the closed window.
inline std::vector<double> height_set(SectionValue s, double d, double lo,
                                      double hi) {
  return height_family(d * s.phase / kTwoPi, d, lo, hi);
}

}  // namespace dislokit
