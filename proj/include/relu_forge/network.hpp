#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relu_forge/errors.hpp"
#include "relu_forge/matrix.hpp"

namespace relu_forge {

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

struct Layer {
  Matrix weights;            // rows = layer output size, cols = layer input size
  std::vector<double> bias;  // length = rows
};

// A feed-forward ReLU network kept as explicit weights. The activation is
// applied after every layer except the last, so a single layer is a plain
// affine map. depth = number of hidden (activated) layers, width = widest
// hidden layer.
struct ReluNetwork {
  std::size_t input_dim = 0;
  std::vector<Layer> layers;  // never empty
  std::map<std::string, std::string> metadata;

  std::size_t output_dim() const { return layers.back().weights.rows; }
  std::size_t depth() const { return layers.size() - 1; }

  std::size_t width() const {
    std::size_t w = 0;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
      w = std::max(w, layers[i].weights.rows);
    return w;
  }

  std::vector<std::size_t> hidden_widths() const {
    std::vector<std::size_t> ws;
    for (std::size_t i = 0; i + 1 < layers.size(); ++i)
      ws.push_back(layers[i].weights.rows);
    return ws;
  }
};

// Checks that the layer chain is self-consistent; throws shape_error if not.
inline void validate(const ReluNetwork& net) {
  if (net.layers.empty()) throw shape_error("network has no layers");
  std::size_t in = net.input_dim;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& layer = net.layers[i];
    if (layer.weights.cols != in)
      throw shape_error("layer " + std::to_string(i) + " expects input " +
                        std::to_string(layer.weights.cols) + ", gets " + std::to_string(in));
    if (layer.bias.size() != layer.weights.rows)
      throw shape_error("layer " + std::to_string(i) + " bias length mismatch");
    in = layer.weights.rows;
  }
}

inline std::vector<double> evaluate(const ReluNetwork& net, const std::vector<double>& x) {
  if (x.size() != net.input_dim)
    throw shape_error("evaluate: input has " + std::to_string(x.size()) +
                      " entries, network takes " + std::to_string(net.input_dim));
  for (double v : x)
    if (!std::isfinite(v)) throw numeric_error("evaluate: non-finite input");
  std::vector<double> h = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& layer = net.layers[i];
    if (layer.weights.cols != h.size())
      throw shape_error("evaluate: layer " + std::to_string(i) + " width mismatch");
    std::vector<double> z = layer.weights.mul(h);
    for (std::size_t r = 0; r < z.size(); ++r) {
      z[r] += layer.bias[r];
      if (!std::isfinite(z[r]))
        throw numeric_error("evaluate: non-finite value in layer " + std::to_string(i));
      if (i + 1 < net.layers.size()) z[r] = relu(z[r]);
    }
    h = std::move(z);
  }
  return h;
}

inline double evaluate_scalar(const ReluNetwork& net, const std::vector<double>& x) {
  std::vector<double> out = evaluate(net, x);
  if (out.size() != 1) throw shape_error("evaluate_scalar: network output is not scalar");
  return out[0];
}

inline double evaluate_scalar(const ReluNetwork& net, double x) {
  return evaluate_scalar(net, std::vector<double>{x});
}

// ---- Affine building blocks -------------------------------------------------

inline ReluNetwork affine_network(Matrix w, std::vector<double> b) {
  if (w.rows != b.size()) throw shape_error("affine_network: bias length mismatch");
  ReluNetwork net;
  net.input_dim = w.cols;
  net.layers.push_back(Layer{std::move(w), std::move(b)});
  return net;
}

// y = B(Ax + a) + b folded into a single affine layer.
inline Layer fuse_affine(const Layer& outer, const Layer& inner) {
  Layer out;
  out.weights = outer.weights.mul(inner.weights);
  out.bias = outer.weights.mul(inner.bias);
  for (std::size_t i = 0; i < out.bias.size(); ++i) out.bias[i] += outer.bias[i];
  return out;
}

// Replaces net(x) by net(Wx + b); the map is folded into the first layer, so
// width and depth are unchanged.
inline ReluNetwork precompose_affine(const ReluNetwork& net, const Matrix& w,
                                     const std::vector<double>& b) {
  ReluNetwork out = net;
  out.input_dim = w.cols;
  out.layers.front() = fuse_affine(net.layers.front(), Layer{w, b});
  return out;
}

// Replaces net(x) by W net(x) + b; folded into the last layer.
inline ReluNetwork postcompose_affine(const ReluNetwork& net, const Matrix& w,
                                      const std::vector<double>& b) {
  ReluNetwork out = net;
  out.layers.back() = fuse_affine(Layer{w, b}, net.layers.back());
  return out;
}

// net'(x) = net(x[idx0], x[idx1], ...) over a wider input vector.
inline ReluNetwork select_inputs(const ReluNetwork& net, const std::vector<std::size_t>& idx,
                                 std::size_t new_input_dim) {
  if (idx.size() != net.input_dim) throw shape_error("select_inputs: index count mismatch");
  Matrix sel(net.input_dim, new_input_dim);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= new_input_dim) throw argument_error("select_inputs: index out of range");
    sel(i, idx[i]) = 1.0;
  }
  return precompose_affine(net, sel, std::vector<double>(net.input_dim, 0.0));
}

// Identity on one scalar through `depth` activated layers. A nonnegative
// value rides a single channel (sigma(s) = s); a general value rides the
// (sigma(s), sigma(-s)) pair and is recombined by subtraction at the end.
inline ReluNetwork scalar_passthrough(std::size_t depth, bool nonneg) {
  ReluNetwork net;
  net.input_dim = 1;
  if (depth == 0) {
    net.layers.push_back(Layer{Matrix::identity(1), {0.0}});
    return net;
  }
  const std::size_t ch = nonneg ? 1 : 2;
  Matrix first(ch, 1);
  first(0, 0) = 1.0;
  if (!nonneg) first(1, 0) = -1.0;
  net.layers.push_back(Layer{first, std::vector<double>(ch, 0.0)});
  for (std::size_t i = 1; i < depth; ++i)
    net.layers.push_back(Layer{Matrix::identity(ch), std::vector<double>(ch, 0.0)});
  Matrix last(1, ch);
  last(0, 0) = 1.0;
  if (!nonneg) last(0, 1) = -1.0;
  net.layers.push_back(Layer{last, {0.0}});
  return net;
}

// ---- Composition algebra ----------------------------------------------------

// second(first(x)). The output affine map of `first` is merged into the first
// layer of `second`, so depth adds exactly and no junction layer appears.
inline ReluNetwork compose_serial(const ReluNetwork& first, const ReluNetwork& second) {
  validate(first);
  validate(second);
  if (second.input_dim != first.output_dim())
    throw shape_error("compose_serial: junction is " + std::to_string(first.output_dim()) +
                      " wide, second network takes " + std::to_string(second.input_dim));
  ReluNetwork out;
  out.input_dim = first.input_dim;
  out.layers.assign(first.layers.begin(), first.layers.end() - 1);
  out.layers.push_back(fuse_affine(second.layers.front(), first.layers.back()));
  out.layers.insert(out.layers.end(), second.layers.begin() + 1, second.layers.end());
  return out;
}

namespace detail {

// Extends a network to the requested depth without changing its function:
// the final affine output s is re-expressed as sigma(s) - sigma(-s), carried
// through identity layers, and recombined at the new output layer.
inline ReluNetwork pad_to_depth(const ReluNetwork& net, std::size_t target_depth) {
  if (net.depth() > target_depth) throw shape_error("pad_to_depth: network too deep");
  if (net.depth() == target_depth) return net;
  const std::size_t o = net.output_dim();
  ReluNetwork out;
  out.input_dim = net.input_dim;
  out.layers.assign(net.layers.begin(), net.layers.end() - 1);

  const Layer& last = net.layers.back();
  Layer split;
  split.weights = Matrix(2 * o, last.weights.cols);
  split.bias.assign(2 * o, 0.0);
  for (std::size_t r = 0; r < o; ++r) {
    for (std::size_t c = 0; c < last.weights.cols; ++c) {
      split.weights(r, c) = last.weights(r, c);
      split.weights(o + r, c) = -last.weights(r, c);
    }
    split.bias[r] = last.bias[r];
    split.bias[o + r] = -last.bias[r];
  }
  out.layers.push_back(std::move(split));

  for (std::size_t i = net.depth() + 1; i < target_depth; ++i)
    out.layers.push_back(Layer{Matrix::identity(2 * o), std::vector<double>(2 * o, 0.0)});

  Matrix recombine(o, 2 * o);
  for (std::size_t r = 0; r < o; ++r) {
    recombine(r, r) = 1.0;
    recombine(r, o + r) = -1.0;
  }
  out.layers.push_back(Layer{recombine, std::vector<double>(o, 0.0)});
  return out;
}

}  // namespace detail

// Runs all nets on the same input and concatenates their outputs. Nets of
// unequal depth are padded with passthrough channel pairs first; the result
// has depth = max depth and width = sum of the per-layer widths.
inline ReluNetwork stack_parallel(const std::vector<ReluNetwork>& nets) {
  if (nets.empty()) throw argument_error("stack_parallel: no networks given");
  const std::size_t d = nets.front().input_dim;
  std::size_t target_depth = 0;
  for (const ReluNetwork& n : nets) {
    validate(n);
    if (n.input_dim != d) throw shape_error("stack_parallel: input dims differ");
    target_depth = std::max(target_depth, n.depth());
  }
  std::vector<ReluNetwork> padded;
  padded.reserve(nets.size());
  for (const ReluNetwork& n : nets) padded.push_back(detail::pad_to_depth(n, target_depth));

  ReluNetwork out;
  out.input_dim = d;
  for (std::size_t li = 0; li <= target_depth; ++li) {
    std::size_t rows = 0;
    const std::size_t cols_in =
        li == 0 ? d : out.layers[li - 1].weights.rows;  // total width of previous layer
    for (const ReluNetwork& n : padded) rows += n.layers[li].weights.rows;
    Layer merged;
    merged.weights = Matrix(rows, cols_in);
    merged.bias.assign(rows, 0.0);
    std::size_t row0 = 0, col0 = 0;
    for (const ReluNetwork& n : padded) {
      const Layer& src = n.layers[li];
      const std::size_t src_col0 = li == 0 ? 0 : col0;  // layer 0 blocks all read x
      for (std::size_t r = 0; r < src.weights.rows; ++r) {
        for (std::size_t c = 0; c < src.weights.cols; ++c)
          merged.weights(row0 + r, src_col0 + c) = src.weights(r, c);
        merged.bias[row0 + r] = src.bias[r];
      }
      row0 += src.weights.rows;
      if (li > 0) col0 += src.weights.cols;
    }
    out.layers.push_back(std::move(merged));
  }
  return out;
}

// ---- Exact one- and two-layer gadgets ----------------------------------------

// min(x1,x2) = (x1 + x2 - |x1 - x2|)/2, |t| = sigma(t) + sigma(-t).
inline ReluNetwork gadget_min2() {
  ReluNetwork net;
  net.input_dim = 2;
  net.layers.push_back(Layer{Matrix{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}, {0, 0, 0, 0}});
  net.layers.push_back(Layer{Matrix{{0.5, -0.5, -0.5, -0.5}}, {0}});
  return net;
}

inline ReluNetwork gadget_max2() {
  ReluNetwork net;
  net.input_dim = 2;
  net.layers.push_back(Layer{Matrix{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}, {0, 0, 0, 0}});
  net.layers.push_back(Layer{Matrix{{0.5, -0.5, 0.5, 0.5}}, {0}});
  return net;
}

// Median of three: a+b+c - max(a, max(b,c)) - min(a, min(b,c)). Layer one
// forms max/min of (b,c) from a shared sigma quadruple and carries a and
// a+b+c as pairs; layer two finishes both outer comparisons.
inline ReluNetwork gadget_mid3() {
  ReluNetwork net;
  net.input_dim = 3;
  // h = sigma of: b+c, -(b+c), b-c, c-b, a, -a, a+b+c, -(a+b+c)
  net.layers.push_back(Layer{Matrix{{0, 1, 1},
                                    {0, -1, -1},
                                    {0, 1, -1},
                                    {0, -1, 1},
                                    {1, 0, 0},
                                    {-1, 0, 0},
                                    {1, 1, 1},
                                    {-1, -1, -1}},
                             std::vector<double>(8, 0.0)});
  // In terms of h: u = max(b,c) = (h0-h1+h2+h3)/2, v = min(b,c) = (h0-h1-h2-h3)/2,
  // a = h4-h5, s = h6-h7.
  // g = sigma of: a+u, -(a+u), a-u, u-a, a+v, -(a+v), a-v, v-a, s, -s
  net.layers.push_back(Layer{Matrix{{0.5, -0.5, 0.5, 0.5, 1, -1, 0, 0},
                                    {-0.5, 0.5, -0.5, -0.5, -1, 1, 0, 0},
                                    {-0.5, 0.5, -0.5, -0.5, 1, -1, 0, 0},
                                    {0.5, -0.5, 0.5, 0.5, -1, 1, 0, 0},
                                    {0.5, -0.5, -0.5, -0.5, 1, -1, 0, 0},
                                    {-0.5, 0.5, 0.5, 0.5, -1, 1, 0, 0},
                                    {-0.5, 0.5, 0.5, 0.5, 1, -1, 0, 0},
                                    {0.5, -0.5, -0.5, -0.5, -1, 1, 0, 0},
                                    {0, 0, 0, 0, 0, 0, 1, -1},
                                    {0, 0, 0, 0, 0, 0, -1, 1}},
                             std::vector<double>(10, 0.0)});
  // mid = s - max(a,u) - min(a,v) with max(a,u) = (g0-g1+g2+g3)/2,
  // min(a,v) = (g4-g5-g6-g7)/2, s = g8-g9.
  net.layers.push_back(
      Layer{Matrix{{-0.5, 0.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1, -1}}, {0}});
  return net;
}

}  // namespace relu_forge
