#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relu_forge/errors.hpp"
#include "relu_forge/network.hpp"

namespace relu_forge {

// Largest k with k^d <= n. Uses exact integer arithmetic so grid sizes never
// suffer from pow() rounding (e.g. 8^(1/3)).
inline std::size_t iroot(std::size_t n, std::size_t d) {
  if (d == 0) throw argument_error("iroot: zero degree");
  if (d == 1 || n <= 1) return n;
  auto pow_le = [n](std::size_t k, std::size_t d) {
    std::size_t acc = 1;
    for (std::size_t i = 0; i < d; ++i) {
      if (k != 0 && acc > n / k) return false;  // acc * k would exceed n
      acc *= k;
    }
    return acc <= n;
  };
  std::size_t k = static_cast<std::size_t>(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d)));
  while (pow_le(k + 1, d)) ++k;
  while (k > 1 && !pow_le(k, d)) --k;
  return k;
}

// Number of plateaus a (N, L, d) step network resolves per axis.
inline std::size_t step_grid_size(std::size_t N, std::size_t L, std::size_t d) {
  const std::size_t nf = iroot(N, d);
  const std::size_t lf = iroot(L * L, d);
  return nf * nf * lf;
}

namespace detail {

inline void annotate(ReluNetwork& net, const std::string& construction,
                     std::initializer_list<std::pair<const char*, std::string>> kv = {}) {
  net.metadata["construction"] = construction;
  for (const auto& [k, v] : kv) net.metadata[k] = v;
}

}  // namespace detail

// Interpolates n1*(n2+1)+1 samples (x_i, y_i) with a network of width vector
// exactly [2*n1, 2*n2+1]. The samples split into n1 blocks of n2+1 points
// plus a final lone point; the net passes through every sample and is linear
// on every interval interior to a block, while inter-block intervals absorb
// the width savings. First-layer kinks sit at the 2*n1 block boundaries;
// each second-layer unit is an x-piecewise-linear pre-activation whose zero
// crossings land exactly on the sample points it must bend at.
inline ReluNetwork fit_points_two_layer(const std::vector<double>& xs,
                                        const std::vector<double>& ys, std::size_t n1,
                                        std::size_t n2) {
  if (n1 < 1 || n2 < 1) throw argument_error("fit_points_two_layer: n1, n2 must be >= 1");
  const std::size_t count = n1 * (n2 + 1) + 1;
  if (xs.size() != count || ys.size() != count)
    throw argument_error("fit_points_two_layer: expected " + std::to_string(count) +
                         " samples, got " + std::to_string(xs.size()));
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw numeric_error("fit_points_two_layer: non-finite sample");
    if (i > 0 && !(xs[i - 1] < xs[i]))
      throw argument_error("fit_points_two_layer: x samples must be strictly increasing (index " +
                           std::to_string(i) + ")");
    if (ys[i] < 0.0)
      throw argument_error("fit_points_two_layer: y samples must be nonnegative (index " +
                           std::to_string(i) + ")");
  }

  const auto idx = [n2](std::size_t j, std::size_t t) { return j * (n2 + 1) + t; };

  std::vector<double> b(2 * n1);  // block boundaries = first-layer kinks
  for (std::size_t j = 0; j < n1; ++j) {
    b[2 * j] = xs[idx(j, 0)];
    b[2 * j + 1] = xs[idx(j, n2)];
  }

  const auto seg_slope = [&](std::size_t j, std::size_t t) {
    return (ys[idx(j, t + 1)] - ys[idx(j, t)]) / (xs[idx(j, t + 1)] - xs[idx(j, t)]);
  };

  // Realizes the piecewise-linear pre-activation that equals
  // v_j + m_j * (x - b_{2j}) on block j, interpolates across inter-block
  // gaps, is constant left of b_0 and has slope `sr` right of b_{2n1-1}.
  // Returns ramp coefficients, the left-constant bias, and vertex values.
  struct Row {
    std::vector<double> coeff;
    double bias;
    std::vector<double> vertex;
  };
  const auto build_row = [&](const std::vector<double>& v, const std::vector<double>& m,
                             double sr) {
    Row row;
    row.coeff.assign(2 * n1, 0.0);
    row.vertex.assign(2 * n1, 0.0);
    for (std::size_t j = 0; j < n1; ++j) {
      row.vertex[2 * j] = v[j];
      row.vertex[2 * j + 1] = v[j] + m[j] * (b[2 * j + 1] - b[2 * j]);
    }
    double cur = 0.0;
    for (std::size_t p = 0; p < 2 * n1; ++p) {
      double next;
      if (p % 2 == 0) {
        next = m[p / 2];
      } else {
        const std::size_t j = p / 2;
        next = (j + 1 < n1)
                   ? (row.vertex[2 * j + 2] - row.vertex[2 * j + 1]) / (b[2 * j + 2] - b[2 * j + 1])
                   : sr;
      }
      row.coeff[p] = next - cur;
      cur = next;
    }
    row.bias = row.vertex[0];
    return row;
  };

  struct Unit {
    Row row;
    double out_weight;
  };
  std::vector<Unit> units;
  units.reserve(2 * n2 + 1);

  // Signed slope-change units, one pair per interior sample position. The
  // unit for position t is zero until the t-th sample of each block, then
  // ramps with that block's (positive or negative part of the) slope change.
  for (std::size_t t = 1; t < n2; ++t) {
    std::vector<double> vp(n1), mp(n1), vm(n1), mm(n1);
    for (std::size_t j = 0; j < n1; ++j) {
      const double c = seg_slope(j, t) - seg_slope(j, t - 1);
      const double gp = std::max(c, 0.0);
      const double gm = std::max(-c, 0.0);
      vp[j] = gp * (b[2 * j] - xs[idx(j, t)]);
      mp[j] = gp;
      vm[j] = gm * (b[2 * j] - xs[idx(j, t)]);
      mm[j] = gm;
    }
    units.push_back(Unit{build_row(vp, mp, 0.0), +1.0});
    units.push_back(Unit{build_row(vm, mm, 0.0), -1.0});
  }

  // Blockwise affine carrier: first-segment affine of each block, sloped
  // after the last boundary so the final lone sample is hit exactly. Offset
  // by C so it clears the activation over the sample hull; the offset is
  // removed in the output bias.
  std::vector<double> va(n1), ma(n1);
  for (std::size_t j = 0; j < n1; ++j) {
    va[j] = ys[idx(j, 0)];
    ma[j] = seg_slope(j, 0);
  }
  const std::size_t last_b = idx(n1 - 1, n2);
  const double sr = (ys[count - 1] - ys[last_b]) / (xs[count - 1] - xs[last_b]);
  Row carrier = build_row(va, ma, sr);
  double lo = carrier.vertex[0];
  for (double v : carrier.vertex) lo = std::min(lo, v);
  lo = std::min(lo, carrier.vertex[2 * n1 - 1] + sr * (xs[count - 1] - b[2 * n1 - 1]));
  const double C = 1.0 + std::max(0.0, -lo);
  carrier.bias += C;
  units.push_back(Unit{std::move(carrier), +1.0});

  while (units.size() < 2 * n2 + 1)  // structural padding up to the stated width vector
    units.push_back(Unit{Row{std::vector<double>(2 * n1, 0.0), 0.0, {}}, 0.0});

  ReluNetwork net;
  net.input_dim = 1;
  Matrix w0(2 * n1, 1);
  std::vector<double> b0(2 * n1);
  for (std::size_t p = 0; p < 2 * n1; ++p) {
    w0(p, 0) = 1.0;
    b0[p] = -b[p];
  }
  net.layers.push_back(Layer{std::move(w0), std::move(b0)});

  Matrix w1(units.size(), 2 * n1);
  std::vector<double> b1(units.size());
  Matrix w2(1, units.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t p = 0; p < 2 * n1; ++p) w1(u, p) = units[u].row.coeff[p];
    b1[u] = units[u].row.bias;
    w2(0, u) = units[u].out_weight;
  }
  net.layers.push_back(Layer{std::move(w1), std::move(b1)});
  net.layers.push_back(Layer{std::move(w2), {-C}});
  detail::annotate(net, "two_layer_point_fit",
                   {{"n1", std::to_string(n1)}, {"n2", std::to_string(n2)}});
  return net;
}

// Grows a two-hidden-layer net [N, w2] to [w1', w2'] by inserting inert
// neurons (zero in, zero out); the computed function is unchanged.
inline ReluNetwork pad_two_hidden(const ReluNetwork& net, std::size_t w1, std::size_t w2) {
  validate(net);
  if (net.depth() != 2 || net.output_dim() != 1)
    throw shape_error("pad_two_hidden: needs two hidden layers and scalar output");
  const std::size_t n1 = net.layers[0].weights.rows;
  const std::size_t n2 = net.layers[1].weights.rows;
  if (n1 > w1 || n2 > w2) throw shape_error("pad_two_hidden: target widths too small");
  ReluNetwork out;
  out.input_dim = net.input_dim;
  Layer l0{Matrix(w1, net.input_dim), std::vector<double>(w1, 0.0)};
  for (std::size_t r = 0; r < n1; ++r) {
    for (std::size_t c = 0; c < net.input_dim; ++c) l0.weights(r, c) = net.layers[0].weights(r, c);
    l0.bias[r] = net.layers[0].bias[r];
  }
  Layer l1{Matrix(w2, w1), std::vector<double>(w2, 0.0)};
  for (std::size_t r = 0; r < n2; ++r) {
    for (std::size_t c = 0; c < n1; ++c) l1.weights(r, c) = net.layers[1].weights(r, c);
    l1.bias[r] = net.layers[1].bias[r];
  }
  Layer l2{Matrix(1, w2), {net.layers[2].bias[0]}};
  for (std::size_t c = 0; c < n2; ++c) l2.weights(0, c) = net.layers[2].weights(0, c);
  out.layers = {std::move(l0), std::move(l1), std::move(l2)};
  out.metadata = net.metadata;
  return out;
}

// Reshapes a scalar-output net with hidden widths [N, N*L] into an identical
// function of width <= 2N+2 and depth <= L+1. The wide second layer is cut
// into L blocks evaluated one per level; each level carries the shared first
// hidden vector g (nonnegative, identity channels) and the running output
// sum as a sigma(s)/sigma(-s) pair.
inline ReluNetwork wide_to_deep(const ReluNetwork& net, std::size_t L) {
  validate(net);
  if (L < 1) throw argument_error("wide_to_deep: L must be >= 1");
  if (net.depth() != 2) throw shape_error("wide_to_deep: needs exactly two hidden layers");
  if (net.output_dim() != 1) throw shape_error("wide_to_deep: needs scalar output");
  const std::size_t n = net.layers[0].weights.rows;
  const std::size_t m = net.layers[1].weights.rows;
  if (m != n * L)
    throw shape_error("wide_to_deep: hidden widths [" + std::to_string(n) + ", " +
                      std::to_string(m) + "] are not [N, N*L] for L = " + std::to_string(L));

  const Layer& first = net.layers[0];
  const Layer& mid = net.layers[1];
  const Layer& last = net.layers[2];

  ReluNetwork out;
  out.input_dim = net.input_dim;
  out.layers.push_back(first);  // level 0: g

  for (std::size_t level = 1; level <= L; ++level) {
    const bool from_g_only = level == 1;
    const bool is_last = level == L;
    const std::size_t prev_w = from_g_only ? n : 2 * n + 2;
    const std::size_t g_off = from_g_only ? 0 : n;
    const std::size_t rows = is_last ? n + 2 : 2 * n + 2;
    Layer lay{Matrix(rows, prev_w), std::vector<double>(rows, 0.0)};

    // h_level = sigma(W1 block applied to the carried g)
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c)
        lay.weights(r, g_off + c) = mid.weights((level - 1) * n + r, c);
      lay.bias[r] = mid.bias[(level - 1) * n + r];
    }
    std::size_t pos = n;
    if (!is_last) {  // keep g for the next block
      for (std::size_t r = 0; r < n; ++r) lay.weights(pos + r, g_off + r) = 1.0;
      pos += n;
    }
    if (!from_g_only) {  // s_{level-1} = s_{level-2} + W2 block over previous h
      for (std::size_t c = 0; c < n; ++c) {
        lay.weights(pos, c) = last.weights(0, (level - 2) * n + c);
        lay.weights(pos + 1, c) = -last.weights(0, (level - 2) * n + c);
      }
      lay.weights(pos, 2 * n) = 1.0;
      lay.weights(pos, 2 * n + 1) = -1.0;
      lay.weights(pos + 1, 2 * n) = -1.0;
      lay.weights(pos + 1, 2 * n + 1) = 1.0;
    }
    out.layers.push_back(std::move(lay));
  }

  Layer fin{Matrix(1, n + 2), {last.bias[0]}};
  for (std::size_t c = 0; c < n; ++c) fin.weights(0, c) = last.weights(0, (L - 1) * n + c);
  fin.weights(0, n) = 1.0;
  fin.weights(0, n + 1) = -1.0;
  out.layers.push_back(std::move(fin));
  out.metadata = net.metadata;
  out.metadata["reshaped"] = "depth_" + std::to_string(L + 1);
  return out;
}

namespace detail {

// Sorts samples by x and runs the two-layer fit followed by the reshape that
// realizes width vector [w1, w1*Lr] at depth Lr+1.
inline ReluNetwork fit_sorted_deep(std::vector<std::pair<double, double>> samples, std::size_t n1,
                                   std::size_t n2, std::size_t w1, std::size_t Lr) {
  std::sort(samples.begin(), samples.end());
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (const auto& [x, y] : samples) {
    xs.push_back(x);
    ys.push_back(y);
  }
  ReluNetwork fit = fit_points_two_layer(xs, ys, n1, n2);
  return wide_to_deep(pad_two_hidden(fit, w1, w1 * Lr), Lr);
}

}  // namespace detail

// Single-input net that returns k on [k/K, (k+1)/K - delta] (the last plateau
// reaches 1) for K = floor(N^(1/d))^2 * floor(L^(2/d)) plateaus. Width
// <= 4*floor(N^(1/d)) + 3, depth <= 4L + 5. For d = 1 the index k = m*L + l
// is assembled from a coarse stage (m) and a fine stage (l) applied to the
// residual x - m/M, which keeps K = N^2 L^2 plateaus at the same width.
inline ReluNetwork step_function_net(std::size_t N, std::size_t L, std::size_t d, double delta) {
  if (N < 1 || L < 1 || d < 1) throw argument_error("step_function_net: N, L, d must be >= 1");
  const std::size_t K = step_grid_size(N, L, d);
  if (K == 1) {  // a single plateau at height 0; any delta is acceptable
    ReluNetwork net = affine_network(Matrix(1, 1), {0.0});
    detail::annotate(net, "step_function",
                     {{"N", std::to_string(N)},
                      {"L", std::to_string(L)},
                      {"d", std::to_string(d)},
                      {"K", "1"}});
    return net;
  }
  if (!(delta > 0.0 && delta <= 1.0 / (3.0 * static_cast<double>(K))))
    throw argument_error("step_function_net: delta must lie in (0, 1/(3K)]; K = " +
                         std::to_string(K));

  ReluNetwork net;
  if (d == 1) {
    const std::size_t M = N * N * L;  // K = M * L
    const double Md = static_cast<double>(M);

    std::vector<std::pair<double, double>> sa;
    for (std::size_t m = 0; m < M; ++m) sa.emplace_back(m / Md, m);
    for (std::size_t m = 0; m + 1 < M; ++m) sa.emplace_back((m + 1) / Md - delta, m);
    sa.emplace_back(1.0, M - 1);
    sa.emplace_back(2.0, 0.0);
    ReluNetwork coarse = detail::fit_sorted_deep(std::move(sa), N, 2 * N * L - 1, 2 * N, 2 * L);

    const double MLd = static_cast<double>(M * L);
    std::vector<std::pair<double, double>> sb;
    for (std::size_t l = 0; l < L; ++l) sb.emplace_back(l / MLd, l);
    for (std::size_t l = 0; l + 1 < L; ++l) sb.emplace_back((l + 1) / MLd - delta, l);
    sb.emplace_back(1.0 / Md, L - 1);
    sb.emplace_back(2.0, 0.0);
    ReluNetwork fine = detail::fit_sorted_deep(std::move(sb), 1, 2 * L - 1, 2, 2 * L);

    // (x) -> (m, x) -> (x - m/M, m) -> (l, m) -> m*L + l
    ReluNetwork stage1 =
        stack_parallel({coarse, scalar_passthrough(coarse.depth(), /*nonneg=*/true)});
    ReluNetwork sub;
    sub.input_dim = 2;
    sub.layers.push_back(
        Layer{Matrix{{-1.0 / Md, 1.0}, {1.0 / Md, -1.0}, {1.0, 0.0}}, {0.0, 0.0, 0.0}});
    sub.layers.push_back(Layer{Matrix{{1, -1, 0}, {0, 0, 1}}, {0.0, 0.0}});
    ReluNetwork stage2 =
        stack_parallel({select_inputs(fine, {0}, 2),
                        select_inputs(scalar_passthrough(fine.depth(), /*nonneg=*/true), {1}, 2)});
    ReluNetwork join = affine_network(Matrix{{1.0, static_cast<double>(L)}}, {0.0});
    net = compose_serial(compose_serial(compose_serial(stage1, sub), stage2), join);
  } else {
    const std::size_t nf = iroot(N, d);
    const std::size_t lf = iroot(L * L, d);
    const double Kd = static_cast<double>(K);
    std::vector<std::pair<double, double>> s;
    for (std::size_t k = 0; k < K; ++k) s.emplace_back(k / Kd, k);
    for (std::size_t k = 0; k + 1 < K; ++k) s.emplace_back((k + 1) / Kd - delta, k);
    s.emplace_back(1.0, K - 1);
    s.emplace_back(2.0, 0.0);
    net = detail::fit_sorted_deep(std::move(s), nf, 2 * nf * lf - 1, 2 * nf, 2 * lf);
  }
  detail::annotate(net, "step_function",
                   {{"N", std::to_string(N)},
                    {"L", std::to_string(L)},
                    {"d", std::to_string(d)},
                    {"K", std::to_string(K)}});
  return net;
}

// Two-input net: for xi = 0.b_1 b_2 ... b_L (binary) and l in {1..L},
// net(xi, l) = b_1 + ... + b_l. Each of the L rounds peels the leading bit
// with thresholds at one half, doubles the remainder, and gates the bit by
// whether its index is <= l; width 7, depth 2L.
inline ReluNetwork bit_extract_net(std::size_t L) {
  if (L < 1) throw argument_error("bit_extract_net: L must be >= 1");
  if (L > 30)
    throw capability_error("bit_extract_net: at most 30 bits supported (weights grow like 2^L)");
  const double scale = std::ldexp(1.0, static_cast<int>(L));  // 1/delta = 2^L

  ReluNetwork net;
  net.input_dim = 2;
  for (std::size_t j = 1; j <= L; ++j) {
    // layer A_j: [a, b, c, d, x, e, s] with a,b the bit thresholds, c,d the
    // gate thresholds sigma(l-j+1), sigma(l-j), x the remainder, e = l,
    // s the running sum.
    Layer a;
    if (j == 1) {
      a.weights = Matrix{{scale, 0}, {scale, 0}, {0, 1}, {0, 1}, {1, 0}, {0, 1}, {0, 0}};
    } else {
      // previous layer B: [z, x, e, s]
      a.weights = Matrix{{0, scale, 0, 0}, {0, scale, 0, 0}, {0, 0, 1, 0}, {0, 0, 1, 0},
                         {0, 1, 0, 0},     {0, 0, 1, 0},     {1, 0, 0, 1}};
    }
    const double jj = static_cast<double>(j);
    a.bias = {1.0 - scale / 2.0, -scale / 2.0, -(jj - 1.0), -jj, 0.0, 0.0, 0.0};
    net.layers.push_back(std::move(a));

    // layer B_j: [z, x', e, s] with z = sigma(theta + gate - 1) the gated
    // bit and x' = 2x - theta the next remainder.
    Layer bl;
    bl.weights = Matrix{{1, -1, 1, -1, 0, 0, 0},
                        {-1, 1, 0, 0, 2, 0, 0},
                        {0, 0, 0, 0, 0, 1, 0},
                        {0, 0, 0, 0, 0, 0, 1}};
    bl.bias = {-1.0, 0.0, 0.0, 0.0};
    net.layers.push_back(std::move(bl));
  }
  net.layers.push_back(Layer{Matrix{{1, 0, 0, 1}}, {0.0}});  // sum + last bit
  detail::annotate(net, "bit_extract", {{"bits", std::to_string(L)}});
  return net;
}

// Two-input net over a stored bit matrix theta (N^2*L rows, L columns):
// net(m, l) = theta[m][0] + ... + theta[m][l] for integer m, l on the grid.
// Stage one interpolates m -> 0.theta[m][0]...theta[m][L-1] as a binary
// fraction, stage two extracts the prefix sum. Width <= 4N+3, depth <= 3L+3.
inline ReluNetwork bit_sum_net(const std::vector<std::vector<int>>& theta, std::size_t N,
                               std::size_t L) {
  if (N < 1 || L < 1) throw argument_error("bit_sum_net: N, L must be >= 1");
  const std::size_t M = N * N * L;
  if (theta.size() != M)
    throw argument_error("bit_sum_net: expected " + std::to_string(M) + " rows, got " +
                         std::to_string(theta.size()));
  std::vector<std::pair<double, double>> samples;
  samples.reserve(M + 1);
  for (std::size_t m = 0; m < M; ++m) {
    if (theta[m].size() != L) throw argument_error("bit_sum_net: row " + std::to_string(m) +
                                                   " does not have " + std::to_string(L) + " bits");
    double y = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      if (theta[m][l] != 0 && theta[m][l] != 1)
        throw argument_error("bit_sum_net: entries must be bits");
      y += theta[m][l] * std::ldexp(1.0, -static_cast<int>(l) - 1);
    }
    samples.emplace_back(static_cast<double>(m), y);
  }
  samples.emplace_back(static_cast<double>(M), 0.0);

  if (M == 1 && L == 1) {  // single cell: the only prefix sum is its own bit
    ReluNetwork net = affine_network(Matrix(1, 2), {static_cast<double>(theta[0][0])});
    detail::annotate(net, "bit_sum", {{"N", "1"}, {"L", "1"}});
    return net;
  }

  ReluNetwork words = detail::fit_sorted_deep(std::move(samples), N, N * L - 1, 2 * N, L);
  ReluNetwork stage1 =
      stack_parallel({select_inputs(words, {0}, 2),
                      select_inputs(scalar_passthrough(words.depth(), /*nonneg=*/true), {1}, 2)});
  // feed (word, l+1) into the extractor
  ReluNetwork extract = precompose_affine(bit_extract_net(L), Matrix::identity(2), {0.0, 1.0});
  ReluNetwork net = compose_serial(stage1, extract);
  detail::annotate(net, "bit_sum", {{"N", std::to_string(N)}, {"L", std::to_string(L)}});
  return net;
}

// Two-input net matching a nonnegative grid y (N^2*L rows, L columns whose
// row-wise steps are bounded by eps) up to eps: net(m, l) lands in
// [y[m][l] - eps, y[m][l]], and 0 <= net <= max(y) for every real input.
// The value is reconstructed as eps * (a_{m,0} + ups - downs) from the
// quantized start column and two bit-counting nets over the +1/-1 steps of
// a = floor(y/eps), then clamped. Width <= 12N+8, depth <= 3L+6.
inline ReluNetwork grid_fit_net(const std::vector<std::vector<double>>& y, double eps,
                                std::size_t N, std::size_t L) {
  if (N < 1 || L < 1) throw argument_error("grid_fit_net: N, L must be >= 1");
  if (!(eps > 0.0)) throw argument_error("grid_fit_net: step bound eps must be positive");
  const std::size_t M = N * N * L;
  if (y.size() != M)
    throw argument_error("grid_fit_net: expected " + std::to_string(M) + " rows, got " +
                         std::to_string(y.size()));
  double ymax = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    if (y[m].size() != L)
      throw argument_error("grid_fit_net: row " + std::to_string(m) + " does not have " +
                           std::to_string(L) + " columns");
    for (std::size_t l = 0; l < L; ++l) {
      if (!std::isfinite(y[m][l]) || y[m][l] < 0.0)
        throw argument_error("grid_fit_net: values must be finite and nonnegative");
      if (l > 0 && std::abs(y[m][l] - y[m][l - 1]) > eps)
        throw argument_error("grid_fit_net: step at (" + std::to_string(m) + ", " +
                             std::to_string(l) + ") exceeds eps");
      ymax = std::max(ymax, y[m][l]);
    }
  }

  if (M == 1 && L == 1) {  // single cell: emit its quantized value directly
    ReluNetwork net = affine_network(Matrix(1, 2), {eps * std::floor(y[0][0] / eps)});
    detail::annotate(net, "grid_fit",
                     {{"N", "1"}, {"L", "1"}, {"eps", std::to_string(eps)}});
    return net;
  }

  std::vector<std::vector<int>> ups(M, std::vector<int>(L, 0));
  std::vector<std::vector<int>> downs(M, std::vector<int>(L, 0));
  std::vector<std::pair<double, double>> start;
  start.reserve(M + 1);
  for (std::size_t m = 0; m < M; ++m) {
    double prev = std::floor(y[m][0] / eps);
    start.emplace_back(static_cast<double>(m), prev);
    for (std::size_t l = 1; l < L; ++l) {
      const double cur = std::floor(y[m][l] / eps);
      const double step = cur - prev;
      if (step > 1.5 || step < -1.5)
        throw numeric_error("grid_fit_net: quantized step left {-1,0,1} at row " +
                            std::to_string(m));
      ups[m][l] = step > 0.5 ? 1 : 0;
      downs[m][l] = step < -0.5 ? 1 : 0;
      prev = cur;
    }
  }
  start.emplace_back(static_cast<double>(M), 0.0);

  ReluNetwork base = detail::fit_sorted_deep(std::move(start), N, N * L - 1, 2 * N, L);
  ReluNetwork stacked = stack_parallel(
      {select_inputs(base, {0}, 2), bit_sum_net(ups, N, L), bit_sum_net(downs, N, L)});
  ReluNetwork quantized = postcompose_affine(stacked, Matrix{{eps, eps, -eps}}, {0.0});

  ReluNetwork clamp;  // min(sigma(u), ymax)
  clamp.input_dim = 1;
  clamp.layers.push_back(Layer{Matrix{{1.0}}, {0.0}});
  clamp.layers.push_back(Layer{Matrix{{1}, {-1}, {1}, {-1}}, {ymax, -ymax, -ymax, ymax}});
  clamp.layers.push_back(Layer{Matrix{{0.5, -0.5, -0.5, -0.5}}, {0.0}});

  ReluNetwork net = compose_serial(quantized, clamp);
  detail::annotate(net, "grid_fit",
                   {{"N", std::to_string(N)},
                    {"L", std::to_string(L)},
                    {"eps", std::to_string(eps)}});
  return net;
}

// Single-input net matching y_0..y_{J-1} at the integers 0..J-1 up to eps
// (consecutive samples may differ by at most eps, J <= N^2 L^2), with range
// pinned to [0, max(y)] on the whole line. Splits j = m*L + l, recovers m
// with an integer staircase interpolant, and hands (m, j - L*m) to the grid
// fitter. Width <= 12N+8, depth <= 4L+9.
inline ReluNetwork point_fit_net(const std::vector<double>& ys, double eps, std::size_t N,
                                 std::size_t L) {
  if (N < 1 || L < 1) throw argument_error("point_fit_net: N, L must be >= 1");
  const std::size_t J = ys.size();
  if (J < 1) throw argument_error("point_fit_net: no samples");
  for (std::size_t j = 0; j < J; ++j)
    if (!std::isfinite(ys[j]) || ys[j] < 0.0)
      throw argument_error("point_fit_net: samples must be finite and nonnegative");
  if (J == 1) {  // a constant net; the step bound is irrelevant
    ReluNetwork net = affine_network(Matrix(1, 1), {ys[0]});
    detail::annotate(net, "point_fit", {{"J", "1"}});
    return net;
  }
  if (!(eps > 0.0)) throw argument_error("point_fit_net: step bound eps must be positive");
  for (std::size_t j = 1; j < J; ++j)
    if (std::abs(ys[j] - ys[j - 1]) > eps)
      throw argument_error("point_fit_net: step at sample " + std::to_string(j) + " exceeds eps");
  if (static_cast<double>(J) > static_cast<double>(N) * N * L * L)
    throw capacity_error("point_fit_net: " + std::to_string(J) + " samples exceed capacity N^2 L^2 = " +
                         std::to_string(N * N * L * L));

  const std::size_t M = N * N * L;
  std::vector<double> padded = ys;
  padded.resize(M * L, ys.back());

  // Integer staircase m(j): constant m on [m*L, m*L + L - 1], linear across
  // the unit gap before the next plateau.
  std::vector<std::pair<double, double>> staircase;
  ReluNetwork index;
  if (L >= 2) {
    for (std::size_t m = 0; m <= M; ++m)
      staircase.emplace_back(static_cast<double>(m * L), static_cast<double>(m));
    for (std::size_t m = 0; m < M; ++m)
      staircase.emplace_back(static_cast<double>(m * L + L - 1), static_cast<double>(m));
    index = detail::fit_sorted_deep(std::move(staircase), N, 2 * N * L - 1, 4 * N, L);
  } else {
    for (std::size_t m = 0; m <= M; ++m)
      staircase.emplace_back(static_cast<double>(m), static_cast<double>(m));
    index = detail::fit_sorted_deep(std::move(staircase), N, N * L - 1, 4 * N, L);
  }

  // (j) -> (m, j) -> (m, j - L*m) -> grid value
  ReluNetwork stage1 =
      stack_parallel({index, scalar_passthrough(index.depth(), /*nonneg=*/false)});
  const Matrix residual{{1.0, 0.0}, {-static_cast<double>(L), 1.0}};
  std::vector<std::vector<double>> grid(M, std::vector<double>(L));
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t l = 0; l < L; ++l) grid[m][l] = padded[m * L + l];
  ReluNetwork table = precompose_affine(grid_fit_net(grid, eps, N, L), residual, {0.0, 0.0});
  ReluNetwork net = compose_serial(stage1, table);
  detail::annotate(net, "point_fit",
                   {{"J", std::to_string(J)},
                    {"N", std::to_string(N)},
                    {"L", std::to_string(L)},
                    {"eps", std::to_string(eps)}});
  return net;
}

}  // namespace relu_forge
