#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "relu_forge/approximator.hpp"
#include "relu_forge/errors.hpp"
#include "relu_forge/modulus.hpp"
#include "relu_forge/network.hpp"

namespace relu_forge {

// A function sampled on finitely many points of the box [-R, R]^d.
struct SampledDomain {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
  double R = 1.0;

  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }

  static SampledDomain make(std::vector<std::vector<double>> points, std::vector<double> values,
                            double R) {
    if (points.empty()) throw argument_error("SampledDomain: no points");
    if (points.size() != values.size())
      throw argument_error("SampledDomain: point/value count mismatch");
    if (!(R > 0.0) || !std::isfinite(R)) throw argument_error("SampledDomain: R must be positive");
    const std::size_t d = points.front().size();
    if (d == 0) throw argument_error("SampledDomain: zero-dimensional points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != d)
        throw argument_error("SampledDomain: point " + std::to_string(i) +
                             " has inconsistent dimension");
      for (double c : points[i]) {
        if (!std::isfinite(c)) throw numeric_error("SampledDomain: non-finite coordinate");
        if (std::abs(c) > R * (1.0 + 1e-12))
          throw argument_error("SampledDomain: point " + std::to_string(i) +
                               " leaves the box [-R, R]^d");
      }
      if (!std::isfinite(values[i])) throw numeric_error("SampledDomain: non-finite value");
    }
    return SampledDomain{std::move(points), std::move(values), R};
  }
};

inline double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw shape_error("euclidean_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Largest omega-continuous function dominated by the samples:
// g(x) = max_i (f_i - omega(|x - p_i| + slack)). With slack = 0 this is the
// classical extension (g = f on the samples); a positive slack lowers g by
// at most omega(slack) everywhere, which absorbs sample-site perturbations.
struct McShaneExtension {
  SampledDomain domain;
  ModulusOfContinuity omega;
  double slack = 0.0;

  double operator()(const std::vector<double>& x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < domain.points.size(); ++i)
      best = std::max(best,
                      domain.values[i] - omega(euclidean_distance(x, domain.points[i]) + slack));
    return best;
  }
};

// Validates that the samples admit an omega-continuous extension, i.e. every
// pair satisfies |f_i - f_j| <= omega(|p_i - p_j| + slack). The check is
// strict (no tolerance): it is exactly the inequality the extension relies
// on, so anything that fails here would break the extension pointwise.
inline McShaneExtension mcshane_extend(SampledDomain domain, ModulusOfContinuity omega,
                                       double slack = 0.0) {
  if (slack < 0.0 || !std::isfinite(slack))
    throw argument_error("mcshane_extend: slack must be finite and nonnegative");
  const std::size_t d = domain.dim();
  check_modulus_admissible(omega, 2.0 * domain.R * std::sqrt(static_cast<double>(d)) + slack +
                                      1.0);
  const std::size_t n = domain.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::abs(domain.values[i] - domain.values[j]);
      const double allowed = omega(euclidean_distance(domain.points[i], domain.points[j]) + slack);
      if (gap > allowed)
        throw precondition_error("mcshane_extend: samples " + std::to_string(i) + " and " +
                                 std::to_string(j) + " violate the modulus (|df| = " +
                                 std::to_string(gap) + " > " + std::to_string(allowed) + ")");
    }
  }
  return McShaneExtension{std::move(domain), std::move(omega), slack};
}

struct DomainApproximant {
  ReluNetwork network;
  std::size_t N = 1, L = 1, d = 1;
  double R = 1.0;
  double bound = 0.0;        // sup error guarantee on the sampled set
  double measured_sup = 0.0; // sup error over the samples themselves
  bool pass = false;
};

// Approximates a sampled function on [-R, R]^d: extends it with the McShane
// formula, rescales the box onto the unit cube, and builds the uniform cube
// approximant. Guarantee on the samples:
// omega(slack) + 19 sqrt(d) omega(2R (NL)^{-2/d}).
inline DomainApproximant approximate_on_domain(const SampledDomain& domain,
                                               const ModulusOfContinuity& omega, std::size_t N,
                                               std::size_t L, double slack = 0.0,
                                               ApproxOptions opts = {}) {
  const std::size_t d = domain.dim();
  const double R = domain.R;
  McShaneExtension ext = mcshane_extend(domain, omega, slack);

  TargetFunction rescaled;
  rescaled.dim = d;
  rescaled.name = "mcshane_extension";
  rescaled.modulus = omega.scale_argument(2.0 * R);
  rescaled.f = [ext, R, d](const std::vector<double>& u) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = 2.0 * R * u[i] - R;
    return ext(x);
  };

  const Approximant ap = build_approximant(rescaled, N, L,
                                           std::numeric_limits<double>::infinity(),
                                           /*uniform=*/true, opts);

  // feed x in [-R, R]^d through u = x/(2R) + 1/2
  Matrix scale(d, d);
  for (std::size_t i = 0; i < d; ++i) scale(i, i) = 1.0 / (2.0 * R);
  ReluNetwork net = precompose_affine(ap.network, scale, std::vector<double>(d, 0.5));

  DomainApproximant da;
  da.N = N;
  da.L = L;
  da.d = d;
  da.R = R;
  da.bound = omega(slack) + ap.bound_global;
  double worst = 0.0;
  for (std::size_t i = 0; i < domain.points.size(); ++i)
    worst = std::max(worst,
                     std::abs(domain.values[i] - evaluate_scalar(net, domain.points[i])));
  da.measured_sup = worst;
  da.pass = da.measured_sup <= da.bound;
  net.metadata["construction"] = "domain_approximant";
  net.metadata["R"] = detail::format_real(R);
  net.metadata["slack"] = detail::format_real(slack);
  net.metadata["bound"] = detail::format_real(da.bound);
  da.network = std::move(net);
  return da;
}

}  // namespace relu_forge
