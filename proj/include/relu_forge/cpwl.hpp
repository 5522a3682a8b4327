#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "relu_forge/errors.hpp"
#include "relu_forge/network.hpp"

namespace relu_forge {

enum class ExtendMode { constant, linear };

// Continuous piecewise-linear function of one variable: node values joined by
// segments, extended left/right of the node range either as a constant or by
// continuing the outermost segment slope.
struct CpwlFunction {
  std::vector<double> breakpoints;  // strictly increasing, at least one
  std::vector<double> values;       // same length
  ExtendMode left = ExtendMode::constant;
  ExtendMode right = ExtendMode::constant;

  static CpwlFunction make(std::vector<double> xs, std::vector<double> ys,
                           ExtendMode left_mode = ExtendMode::constant,
                           ExtendMode right_mode = ExtendMode::constant) {
    if (xs.empty()) throw argument_error("CpwlFunction: no breakpoints");
    if (xs.size() != ys.size()) throw argument_error("CpwlFunction: breakpoint/value count mismatch");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
        throw numeric_error("CpwlFunction: non-finite node");
      if (i > 0 && !(xs[i - 1] < xs[i]))
        throw argument_error("CpwlFunction: breakpoints not strictly increasing at index " +
                             std::to_string(i));
    }
    return CpwlFunction{std::move(xs), std::move(ys), left_mode, right_mode};
  }

  std::size_t size() const { return breakpoints.size(); }

  double segment_slope(std::size_t i) const {  // slope on [x_i, x_{i+1}]
    return (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]);
  }

  double left_slope() const {
    return (left == ExtendMode::linear && size() >= 2) ? segment_slope(0) : 0.0;
  }
  double right_slope() const {
    return (right == ExtendMode::linear && size() >= 2) ? segment_slope(size() - 2) : 0.0;
  }

  double operator()(double x) const {
    const std::vector<double>& b = breakpoints;
    if (x <= b.front()) return values.front() + left_slope() * (x - b.front());
    if (x >= b.back()) return values.back() + right_slope() * (x - b.back());
    auto it = std::lower_bound(b.begin(), b.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - b.begin());
    if (b[hi] == x) return values[hi];
    std::size_t lo = hi - 1;
    return values[lo] + segment_slope(lo) * (x - b[lo]);
  }
};

// Compiles a CPwL function into an exact one-hidden-layer network: one kink
// neuron per breakpoint plus, when the function is not constant to the left,
// a sigma(x)/sigma(-x) pair carrying the affine part. Width <= k + 2 for k
// breakpoints.
inline ReluNetwork compile_cpwl(const CpwlFunction& f) {
  const std::size_t n = f.size();
  const double sl = f.left_slope();

  // Slope sequence around each breakpoint; kink i changes slope by c_i.
  std::vector<double> c(n, 0.0);
  double prev = sl;
  for (std::size_t i = 0; i < n; ++i) {
    const double next = (i + 1 < n) ? f.segment_slope(i) : f.right_slope();
    c[i] = next - prev;
    prev = next;
  }

  const bool carry_affine = sl != 0.0;
  const std::size_t width = n + (carry_affine ? 2 : 0);
  Matrix w0(width, 1);
  std::vector<double> b0(width, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    w0(i, 0) = 1.0;
    b0[i] = -f.breakpoints[i];
  }
  if (carry_affine) {
    w0(n, 0) = 1.0;
    w0(n + 1, 0) = -1.0;
  }

  Matrix w1(1, width);
  for (std::size_t i = 0; i < n; ++i) w1(0, i) = c[i];
  double bias = f.values.front() - sl * f.breakpoints.front();
  if (carry_affine) {
    w1(0, n) = sl;
    w1(0, n + 1) = -sl;
  }

  ReluNetwork net;
  net.input_dim = 1;
  net.layers.push_back(Layer{std::move(w0), std::move(b0)});
  net.layers.push_back(Layer{std::move(w1), {bias}});
  net.metadata["construction"] = "cpwl_compile";
  net.metadata["breakpoints"] = std::to_string(n);
  return net;
}

}  // namespace relu_forge
