#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "relu_forge/errors.hpp"

namespace relu_forge {

// Modulus of continuity: nondecreasing, subadditive, omega(0) = 0. Certified
// error bounds are stated in terms of this object, so it must dominate the
// true modulus of the target on [0, domain_radius].
struct ModulusOfContinuity {
  enum class Kind { holder, tabulated, callable };

  Kind kind = Kind::holder;
  double lambda = 1.0;  // holder: omega(r) = lambda * r^alpha
  double alpha = 1.0;
  std::vector<double> radii;    // tabulated nodes, radii[0] == 0
  std::vector<double> omegas;   // tabulated values, omegas[0] == 0
  std::function<double(double)> fn;  // callable
  double domain_radius = 0.0;   // largest r the modulus is meant to cover

  static ModulusOfContinuity holder(double lambda, double alpha, double domain_radius = 2.0) {
    if (!(lambda >= 0.0)) throw argument_error("modulus: lambda must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw argument_error("modulus: alpha must be in (0, 1]");
    ModulusOfContinuity m;
    m.kind = Kind::holder;
    m.lambda = lambda;
    m.alpha = alpha;
    m.domain_radius = domain_radius;
    return m;
  }

  static ModulusOfContinuity tabulated(std::vector<double> radii, std::vector<double> omegas) {
    if (radii.size() != omegas.size() || radii.size() < 2)
      throw argument_error("modulus: tabulated needs >= 2 matching samples");
    if (radii.front() != 0.0 || omegas.front() != 0.0)
      throw argument_error("modulus: tabulated samples must start at (0, 0)");
    for (std::size_t i = 1; i < radii.size(); ++i) {
      if (!(radii[i - 1] < radii[i])) throw argument_error("modulus: radii must increase");
      if (omegas[i] < omegas[i - 1]) throw argument_error("modulus: values must be nondecreasing");
    }
    ModulusOfContinuity m;
    m.kind = Kind::tabulated;
    m.domain_radius = radii.back();
    m.radii = std::move(radii);
    m.omegas = std::move(omegas);
    return m;
  }

  static ModulusOfContinuity from_callable(std::function<double(double)> fn,
                                           double domain_radius) {
    ModulusOfContinuity m;
    m.kind = Kind::callable;
    m.fn = std::move(fn);
    m.domain_radius = domain_radius;
    if (m(0.0) != 0.0) throw argument_error("modulus: callable must vanish at 0");
    return m;
  }

  double operator()(double r) const {
    if (r < 0.0) throw argument_error("modulus evaluated at negative radius");
    switch (kind) {
      case Kind::holder:
        return r == 0.0 ? 0.0 : lambda * std::pow(r, alpha);
      case Kind::tabulated: {
        if (r >= radii.back()) return omegas.back();  // clamped past the table
        std::size_t hi = 1;
        while (radii[hi] < r) ++hi;
        const double t = (r - radii[hi - 1]) / (radii[hi] - radii[hi - 1]);
        return omegas[hi - 1] + t * (omegas[hi] - omegas[hi - 1]);
      }
      case Kind::callable:
        return fn(r);
    }
    return 0.0;
  }

  // omega'(r) = omega(c * r); used when the target's argument is rescaled.
  ModulusOfContinuity scale_argument(double c) const {
    if (!(c > 0.0)) throw argument_error("modulus: scale factor must be positive");
    if (kind == Kind::holder) {
      ModulusOfContinuity m = holder(lambda * std::pow(c, alpha), alpha, domain_radius / c);
      return m;
    }
    ModulusOfContinuity self = *this;
    return from_callable([self, c](double r) { return self(c * r); }, domain_radius / c);
  }

  bool is_zero() const { return kind == Kind::holder && lambda == 0.0; }
};

// Checks omega(0) = 0, monotonicity and subadditivity on a deterministic grid
// of radius pairs; throws precondition_error on the first violation found.
inline void check_modulus_admissible(const ModulusOfContinuity& omega, double rmax,
                                     std::size_t steps = 64) {
  if (omega(0.0) != 0.0) throw precondition_error("modulus does not vanish at 0");
  const double tol = 1e-12 * (1.0 + omega(rmax));
  double prev = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double w = omega(rmax * static_cast<double>(i) / static_cast<double>(steps));
    if (w < prev - tol)
      throw precondition_error("modulus decreases near r = " +
                               std::to_string(rmax * static_cast<double>(i) / steps));
    prev = std::max(prev, w);
  }
  for (std::size_t i = 1; i <= steps; ++i)
    for (std::size_t j = i; i + j <= steps; j += 3) {
      const double r1 = rmax * static_cast<double>(i) / steps;
      const double r2 = rmax * static_cast<double>(j) / steps;
      if (omega(r1 + r2) > omega(r1) + omega(r2) + tol)
        throw precondition_error("modulus is not subadditive at r1 = " + std::to_string(r1) +
                                 ", r2 = " + std::to_string(r2));
    }
}

}  // namespace relu_forge
