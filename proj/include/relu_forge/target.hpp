#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "relu_forge/errors.hpp"
#include "relu_forge/modulus.hpp"

namespace relu_forge {

// A function on [0,1]^dim together with a modulus of continuity that is
// declared to dominate it. The modulus is what the synthesis trusts; tests
// spot-check the domination on random pairs rather than proving it.
struct TargetFunction {
  std::size_t dim = 1;
  std::function<double(const std::vector<double>&)> f;
  ModulusOfContinuity modulus;
  std::string name;

  double operator()(const std::vector<double>& x) const {
    if (x.size() != dim) throw shape_error("target '" + name + "' takes dim " + std::to_string(dim));
    return f(x);
  }
};

}  // namespace relu_forge
