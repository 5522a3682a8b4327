#pragma once

// relu_forge: constructive synthesis and certification of ReLU networks.
//
// Everything lives in namespace relu_forge and is header-only; include this
// umbrella or the individual headers.

#include "relu_forge/approximator.hpp"
#include "relu_forge/constructions.hpp"
#include "relu_forge/cpwl.hpp"
#include "relu_forge/domain_ext.hpp"
#include "relu_forge/errors.hpp"
#include "relu_forge/fixtures.hpp"
#include "relu_forge/io.hpp"
#include "relu_forge/manifold.hpp"
#include "relu_forge/matrix.hpp"
#include "relu_forge/modulus.hpp"
#include "relu_forge/network.hpp"
#include "relu_forge/planner.hpp"
#include "relu_forge/serialization.hpp"
#include "relu_forge/target.hpp"
