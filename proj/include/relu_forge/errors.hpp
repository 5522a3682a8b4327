#pragma once

#include <stdexcept>
#include <string>

namespace relu_forge {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible shapes: input length vs. first layer, junction widths, ...
struct shape_error : error {
  using error::error;
};

// A value left the numeric domain (NaN/Inf weight or input, modulus violation).
struct numeric_error : error {
  using error::error;
};

// A caller-supplied argument violates a documented precondition.
struct argument_error : error {
  using error::error;
};

// The request is well-formed but exceeds a configured resource budget.
struct capacity_error : error {
  using error::error;
};

// The request needs more than this implementation supports (hard caps).
struct capability_error : error {
  using error::error;
};

// Malformed serialized input; message carries the byte offset when known.
struct parse_error : error {
  using error::error;
};

// A document declares a format_version this build does not understand.
struct version_error : error {
  using error::error;
};

// Data fails a mathematical precondition (e.g. modulus admissibility).
struct precondition_error : error {
  using error::error;
};

// A name was not found in a registry (fixture zoo, subcommands, ...).
struct lookup_error : error {
  using error::error;
};

}  // namespace relu_forge
