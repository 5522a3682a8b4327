#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "relu_forge/cpwl.hpp"
#include "relu_forge/errors.hpp"
#include "relu_forge/modulus.hpp"
#include "relu_forge/target.hpp"

namespace relu_forge {

// Pyramid bump supported on the cube of side eta centered at c (which must
// sit inside the unit cube), peaking at (eta/2)^alpha / 2. The peak is
// calibrated so a Holder(1, alpha) modulus dominates the bump: the value
// climbs by the peak over a sup-distance of eta/2.
struct BumpSpec {
  std::vector<double> center;
  double eta = 1.0;
  double alpha = 1.0;
};

inline double bump_peak(double eta, double alpha) {
  return 0.5 * std::pow(eta / 2.0, alpha);
}

inline double bump_value(const BumpSpec& spec, const std::vector<double>& x) {
  if (x.size() != spec.center.size()) throw shape_error("bump_value: dimension mismatch");
  double far = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    far = std::max(far, std::abs(x[i] - spec.center[i]));
  const double half = spec.eta / 2.0;
  return bump_peak(spec.eta, spec.alpha) * std::max(0.0, 1.0 - far / half);
}

inline void check_bump(const BumpSpec& spec) {
  if (!(spec.eta > 0.0)) throw argument_error("bump: side length must be positive");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0))
    throw argument_error("bump: alpha must lie in (0, 1]");
  for (double c : spec.center)
    if (c - spec.eta / 2.0 < -1e-12 || c + spec.eta / 2.0 > 1.0 + 1e-12)
      throw argument_error("bump: support cube leaves the unit cube");
}

// A hard test target: one signed bump per cell of the uniform K-grid.
// signs is laid out row-major (last axis densest) with one entry in {-1, +1}
// per cell. Holder continuous with constant 1 and exponent alpha.
inline TargetFunction sign_patch_function(std::size_t K, std::size_t d, double alpha,
                                          std::vector<int> signs) {
  if (K < 1 || d < 1) throw argument_error("sign_patch_function: K, d must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw argument_error("sign_patch_function: alpha must lie in (0, 1]");
  double cells_real = std::pow(static_cast<double>(K), static_cast<double>(d));
  if (cells_real > 1e8) throw capacity_error("sign_patch_function: too many cells");
  const std::size_t cells = static_cast<std::size_t>(cells_real + 0.5);
  if (signs.size() != cells)
    throw argument_error("sign_patch_function: expected " + std::to_string(cells) +
                         " signs, got " + std::to_string(signs.size()));
  for (int s : signs)
    if (s != 1 && s != -1) throw argument_error("sign_patch_function: signs must be +-1");

  TargetFunction f;
  f.dim = d;
  f.name = "sign_patch_K" + std::to_string(K) + "_a" + std::to_string(alpha);
  f.modulus = ModulusOfContinuity::holder(1.0, alpha);
  const double eta = 1.0 / static_cast<double>(K);
  f.f = [K, d, alpha, eta, signs = std::move(signs)](const std::vector<double>& x) {
    if (x.size() != d) throw shape_error("sign_patch_function: dimension mismatch");
    std::size_t idx = 0;
    BumpSpec spec;
    spec.center.resize(d);
    spec.eta = eta;
    spec.alpha = alpha;
    for (std::size_t i = 0; i < d; ++i) {
      double b = std::floor(x[i] * static_cast<double>(K));
      b = std::min(b, static_cast<double>(K - 1));
      b = std::max(b, 0.0);
      idx = idx * K + static_cast<std::size_t>(b);
      spec.center[i] = (b + 0.5) * eta;
    }
    return static_cast<double>(signs[idx]) * bump_value(spec, x);
  };
  return f;
}

// Named test targets with exact moduli, for experiments and demos:
//   const         constant 0.3 (any dimension)
//   linear        coordinate mean (any dimension)
//   abs           |x - 1/2| on [0,1]
//   holder_sqrt   |x1 - x2|^(1/2) on [0,1]^2
//   cpwl-<seed>   seeded random piecewise-linear function on [0,1]
inline TargetFunction fixture(const std::string& name, std::size_t dim = 0) {
  TargetFunction f;
  f.name = name;
  if (name == "const") {
    f.dim = dim ? dim : 1;
    f.modulus = ModulusOfContinuity::holder(0.0, 1.0);
    f.f = [](const std::vector<double>&) { return 0.3; };
    return f;
  }
  if (name == "linear") {
    f.dim = dim ? dim : 1;
    f.modulus = ModulusOfContinuity::holder(1.0, 1.0);
    const std::size_t d = f.dim;
    f.f = [d](const std::vector<double>& x) {
      double s = 0.0;
      for (double c : x) s += c;
      return s / static_cast<double>(d);
    };
    return f;
  }
  if (name == "abs") {
    f.dim = 1;
    f.modulus = ModulusOfContinuity::holder(1.0, 1.0);
    f.f = [](const std::vector<double>& x) { return std::abs(x[0] - 0.5); };
    return f;
  }
  if (name == "holder_sqrt") {
    f.dim = 2;
    // |u|^(1/2) gains at most (2r)^(1/2) when u moves by 2r, and |x1 - x2|
    // moves by at most sqrt(2) |dx|: the exact modulus is (sqrt(2) r)^(1/2).
    f.modulus = ModulusOfContinuity::holder(std::pow(2.0, 0.25), 0.5);
    f.f = [](const std::vector<double>& x) { return std::sqrt(std::abs(x[0] - x[1])); };
    return f;
  }
  if (name.rfind("cpwl-", 0) == 0) {
    std::uint64_t seed = 0;
    const std::string tail = name.substr(5);
    if (tail.empty()) throw lookup_error("fixture: cpwl- needs a numeric seed");
    for (char c : tail) {
      if (c < '0' || c > '9') throw lookup_error("fixture: cpwl- needs a numeric seed");
      seed = seed * 10 + static_cast<std::uint64_t>(c - '0');
    }
    std::mt19937_64 rng(seed);
    const auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    std::vector<double> bp{0.0};
    for (int i = 0; i < 10; ++i) {
      const double c = unit();
      if (c > 1e-3 && c < 1.0 - 1e-3) bp.push_back(c);
    }
    bp.push_back(1.0);
    std::sort(bp.begin(), bp.end());
    std::vector<double> keep{bp.front()};
    for (double c : bp)
      if (c - keep.back() > 1e-3) keep.push_back(c);
    if (keep.back() != 1.0) keep.push_back(1.0);
    std::vector<double> vals(keep.size());
    for (double& v : vals) v = unit();
    auto shape = CpwlFunction::make(keep, vals);
    double steep = 0.0;
    for (std::size_t i = 0; i + 1 < keep.size(); ++i)
      steep = std::max(steep, std::abs(shape.segment_slope(i)));
    f.dim = 1;
    f.modulus = ModulusOfContinuity::holder(steep, 1.0);
    f.f = [shape = std::move(shape)](const std::vector<double>& x) { return shape(x[0]); };
    return f;
  }
  throw lookup_error("fixture: unknown name '" + name +
                     "' (known: abs, const, cpwl-<seed>, holder_sqrt, linear)");
}

}  // namespace relu_forge
