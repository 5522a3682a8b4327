#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "relu_forge/errors.hpp"

namespace relu_forge {

// Evaluation cost of a width-N, depth-L network on a machine with p
// parallel lanes: layers run in sequence, each layer's N^2 work is shared
// by min(p, N^2) lanes with a log-depth reduction once lanes outnumber
// row entries.
inline double parallel_cost(std::size_t N, std::size_t L, double p) {
  if (N < 1 || L < 1) throw argument_error("parallel_cost: N, L must be >= 1");
  if (!(p >= 1.0)) throw argument_error("parallel_cost: p must be >= 1");
  const double n = static_cast<double>(N);
  const double l = static_cast<double>(L);
  if (p <= n) return n * n * l / p;
  if (p <= n * n) return l * (n * n / p + std::log(p / n));
  return l * (1.0 + std::log(n));
}

struct SizingQuery {
  double epsilon = 0.1;   // target accuracy, in (0, 1)
  double alpha = 1.0;     // smoothness exponent, in (0, 1]
  std::size_t d = 1;      // input dimension
  double p = 1.0;         // parallel lanes
  double serial_threshold = 8.0;  // lane count below which depth is free
};

struct SizingPlan {
  std::size_t N = 1, L = 1;
  std::string regime;   // "serial", "parallel_shallow" or "parallel_balanced"
  double cost = 0.0;
  double budget = 0.0;  // required N*L product (before rounding)
};

// Picks (N, L) minimizing parallel evaluation cost subject to the accuracy
// requirement N*L >= epsilon^(-d/(2 alpha)). Few lanes favor thin deep nets,
// many lanes favor wide shallow ones, and the middle ground is found by an
// exact scan over the bounded candidate range.
inline SizingPlan plan_sizes(const SizingQuery& q) {
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0))
    throw argument_error("plan_sizes: epsilon must lie in (0, 1)");
  if (!(q.alpha > 0.0 && q.alpha <= 1.0))
    throw argument_error("plan_sizes: alpha must lie in (0, 1]");
  if (q.d < 1) throw argument_error("plan_sizes: dimension must be >= 1");
  if (!(q.p >= 1.0)) throw argument_error("plan_sizes: lane count must be >= 1");

  const double C =
      std::pow(q.epsilon, -static_cast<double>(q.d) / (2.0 * q.alpha));
  if (!(C < 9.0e15))
    throw capacity_error("plan_sizes: required size " + std::to_string(C) +
                         " exceeds integer range");

  SizingPlan plan;
  plan.budget = C;
  if (q.p <= q.serial_threshold) {
    plan.N = q.d;
    plan.L = static_cast<std::size_t>(std::ceil(C / static_cast<double>(q.d)));
    plan.L = std::max<std::size_t>(plan.L, 1);
    plan.regime = "serial";
  } else if (std::sqrt(q.p) > C) {
    plan.N = static_cast<std::size_t>(std::ceil(C));
    plan.N = std::max<std::size_t>(plan.N, 1);
    plan.L = 1;
    plan.regime = "parallel_shallow";
  } else {
    const std::size_t lo =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(q.p))));
    const std::size_t hi = static_cast<std::size_t>(
        std::min(std::ceil(q.p), std::ceil(C)));
    std::size_t bestN = lo;
    double bestCost = std::numeric_limits<double>::infinity();
    for (std::size_t N = lo; N <= hi; ++N) {
      const std::size_t L =
          static_cast<std::size_t>(std::ceil(C / static_cast<double>(N)));
      const double cost = parallel_cost(N, std::max<std::size_t>(L, 1), q.p);
      if (cost < bestCost) {
        bestCost = cost;
        bestN = N;
      }
    }
    plan.N = bestN;
    plan.L = std::max<std::size_t>(
        static_cast<std::size_t>(std::ceil(C / static_cast<double>(bestN))), 1);
    plan.regime = "parallel_balanced";
  }
  plan.cost = parallel_cost(plan.N, plan.L, q.p);
  return plan;
}

}  // namespace relu_forge
