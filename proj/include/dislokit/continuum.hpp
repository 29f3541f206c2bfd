#pragma once

#include <cmath>

#include "dislokit/types.hpp"

namespace dislokit {

/// Continuum strain energy of a single screw dislocation over the annulus
/// rho*a < r < N*a, per unit length along the line: (a^2 G / 4 pi) ln(N/rho).
inline double continuum_annulus_energy(double a, double G, double rho,
                                       double n_outer) {
  if (!(a > 0.0) || !(rho > 0.0) || !(n_outer >= rho))
    throw ConfigError("continuum annulus needs a > 0 and 0 < rho <= n_outer");
  if (n_outer == rho) return 0.0;
  return a * a * G / (4.0 * kPi) * std::log(n_outer / rho);
}

namespace detail {

// Integrand of the theta integral for the dipole region: the r-integral of
// 4 y0^2 r / (r+^2 r-^2) over the radial section of the annulus
// intersection has the closed form (2 y0^2 / w) * atan(...) with
// w = 2 y0^2 |sin t cos t|; written below in a form that stays finite as
// w -> 0.
inline double dipole_theta_integrand(double t, double y0, double rin,
                                     double rout) {
  const double s = std::sin(t);
  const double c = std::cos(t);
  const double ri = std::sqrt(rin * rin - y0 * y0 * c * c);
  const double ro = std::sqrt(rout * rout - y0 * y0 * c * c);
  const double rlo = std::abs(y0 * s) + ri;
  const double rhi = ro - std::abs(y0 * s);
  if (rhi <= rlo) return 0.0;
  const double ulo = rlo * rlo;
  const double uhi = rhi * rhi;
  const double p = y0 * y0 * (1.0 - 2.0 * s * s);
  const double w = 2.0 * y0 * y0 * std::abs(s * c);
  const double den = w * w + (uhi + p) * (ulo + p);
  const double arg = w * (uhi - ulo) / den;
  const double shape = std::abs(arg) > 1e-8 ? std::atan(arg) / arg : 1.0;
  return 2.0 * y0 * y0 * (uhi - ulo) / den * shape;
}

}  // namespace detail

/// Continuum dipole energy: prefactor times the integral of
/// 4 y0^2 / (r+^2 r-^2) over the intersection of the two annuli centered at
/// (x0, +/-y0) with radii (rho a, N a). Evaluated in polar coordinates about
/// the dipole midpoint with a closed-form radial integral and composite
/// Simpson panels in the angle, refined until the relative change drops
/// below rel_tol. Monotone nondecreasing in n_outer. Requires the
/// convergence hypothesis rho*a > 2|y0|.
inline double continuum_dipole_energy(double x0, double y0, double rho,
                                      double n_outer, double a,
                                      double prefactor,
                                      double rel_tol = 1e-6) {
  (void)x0;  // translation invariant in x0
  if (!(a > 0.0) || !(rho > 0.0) || !(n_outer > rho))
    throw ConfigError("dipole energy needs a > 0 and 0 < rho < n_outer");
  if (!(rho * a > 2.0 * std::abs(y0)))
    throw HypothesisViolated(
        "continuum dipole energy requires rho*a > 2|y0|");
  if (y0 == 0.0) return 0.0;

  const double rin = rho * a;
  const double rout = n_outer * a;
  auto f = [&](double t) {
    return detail::dipole_theta_integrand(t, std::abs(y0), rin, rout);
  };

  // The integrand is symmetric under t -> -t and t -> pi - t; integrate
  // [0, pi/2] and scale by 4.
  const double hi = kPi / 2.0;
  std::size_t panels = 64;
  auto simpson = [&](std::size_t n) {
    const double h = hi / static_cast<double>(n);
    double s = f(0.0) + f(hi);
    for (std::size_t i = 1; i < n; ++i)
      s += (i % 2 == 1 ? 4.0 : 2.0) * f(static_cast<double>(i) * h);
    return s * h / 3.0;
  };
  double prev = simpson(panels);
  for (int iter = 0; iter < 12; ++iter) {
    panels *= 2;
    const double cur = simpson(panels);
    if (std::abs(cur - prev) <= 0.5 * rel_tol * std::abs(cur)) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  return prefactor * 4.0 * prev;
}

/// Closed-form upper bound for the dipole integral (prefactor 1) over any
/// region contained in the annulus rho'*a < |z - (x0, 0)| < N*a:
///   8 pi y0^2 (1/(2 (rho' a - y0)^2) + y0/(3 (rho' a - y0)^3)).
inline double dipole_energy_bound(double y0, double rho_prime, double a) {
  const double y = std::abs(y0);
  const double m = rho_prime * a - y;
  if (!(m > 0.0)) throw ConfigError("bound requires rho'*a > |y0|");
  return 8.0 * kPi * y * y * (1.0 / (2.0 * m * m) + y / (3.0 * m * m * m));
}

}  // namespace dislokit
