#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dislokit {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Default guard radius for dislocation-center collisions, in units of the
// lattice constant.
inline constexpr double kCenterTol = 1e-12;

/// A point of the base plane, identified with a complex number x + iy.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// A point of 3-space.
struct SpacePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Planar column index (l1, l2) plus the sheet label of the (1,1,1)
/// decomposition. SC columns along (0,0,1) always carry sheet 0.
/// Ordered by (sheet, l1, l2), the canonical row order of generated output.
struct ColumnIndex {
  std::int64_t l1 = 0;
  std::int64_t l2 = 0;
  int sheet = 0;

  friend bool operator==(const ColumnIndex&, const ColumnIndex&) = default;
  friend auto operator<=>(const ColumnIndex& a, const ColumnIndex& b) {
    if (auto c = a.sheet <=> b.sheet; c != 0) return c;
    if (auto c = a.l1 <=> b.l1; c != 0) return c;
    return a.l2 <=> b.l2;
  }
};

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto its stable exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An evaluation point collided with a dislocation center (exit code 3).
class DislocationCenterHit : public Error {
 public:
  DislocationCenterHit(const std::string& what, PlanePoint at)
      : Error(what), at_(at) {}
  PlanePoint at() const { return at_; }

 private:
  PlanePoint at_;
};

/// Operation not defined for the requested lattice kind (exit code 4).
class UnsupportedLattice : public Error {
 public:
  using Error::Error;
};

/// A convergence hypothesis (rho*a > 2|y0|) does not hold (exit code 5).
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

/// A loop step produced a wrapped phase jump of pi (exit code 6).
class StepTooCoarse : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------

/// Wrap an angle into (-pi, pi]. std::remainder is exact, so values already
/// in range pass through bit-identically and wrap_pi(-t) == -wrap_pi(t)
/// away from the branch point.
inline double wrap_pi(double t) {
  double r = std::remainder(t, kTwoPi);
  return r == -kPi ? kPi : r;
}

inline bool is_finite(PlanePoint p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

}  // namespace dislokit
