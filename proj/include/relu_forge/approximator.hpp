#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "relu_forge/constructions.hpp"
#include "relu_forge/cpwl.hpp"
#include "relu_forge/errors.hpp"
#include "relu_forge/modulus.hpp"
#include "relu_forge/network.hpp"
#include "relu_forge/target.hpp"

namespace relu_forge {

// The unit cube minus trifling strips: cube beta covers
// [beta_i/K, (beta_i+1)/K - delta] per axis (no gap after the last block).
struct Partition {
  std::size_t K = 1;
  std::size_t d = 1;
  double delta = 0.0;
};

// True when x falls in one of the removed strips ((k - delta*K)/K, k/K) on
// some axis; points of the kept region Omega return false.
inline bool in_trifling(const std::vector<double>& x, const Partition& part) {
  if (x.size() != part.d) throw shape_error("in_trifling: dimension mismatch");
  if (part.K <= 1 || part.delta <= 0.0) return false;
  for (double xi : x) {
    const double t = xi * static_cast<double>(part.K);
    const double k = std::ceil(t);
    if (k >= 1.0 && k <= static_cast<double>(part.K - 1) && t < k &&
        t > k - part.delta * static_cast<double>(part.K))
      return true;
  }
  return false;
}

// Affine row turning per-axis plateau indices (k_1..k_d) into the scalar
// breakpoint coordinate (k_d/(2K^d) + sum_{i<d} k_i/K^i); scaled by 2K^d it
// is the even cube index with room for the odd midpoints between blocks.
inline ReluNetwork index_map(std::size_t K, std::size_t d) {
  if (K < 1 || d < 1) throw argument_error("index_map: K, d must be >= 1");
  Matrix row(1, d);
  double p = static_cast<double>(K);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    row(0, i) = 1.0 / p;
    p *= static_cast<double>(K);
  }
  row(0, d - 1) = 0.5 / p;  // p = K^d here
  return affine_network(row, {0.0});
}

struct ApproxOptions {
  std::size_t eval_cap = 1'000'000;  // max target evaluations per build
};

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw parse_error("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw parse_error("not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    throw parse_error("number out of range: '" + s + "'");
  }
}

inline std::string norm_label(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

inline double parse_norm_label(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return std::numeric_limits<double>::infinity();
  const double p = parse_real(s);
  if (!(p >= 1.0)) throw argument_error("norm must be >= 1 or 'inf', got '" + s + "'");
  return p;
}

}  // namespace detail

// Samples the shifted target f - f(0) + omega(sqrt(d)) on the cube grid and
// fills the odd inter-block positions by linear interpolation, yielding a
// nonnegative piecewise-linear profile over 2K^d+1 breakpoints whose
// neighboring values differ by at most omega(sqrt(d)/K).
inline CpwlFunction build_g(const TargetFunction& f, std::size_t K,
                            std::size_t eval_cap = 1'000'000) {
  const std::size_t d = f.dim;
  if (K < 1) throw argument_error("build_g: K must be >= 1");
  const double kd_real = std::pow(static_cast<double>(K), static_cast<double>(d));
  if (kd_real + 1.0 > static_cast<double>(eval_cap))
    throw capacity_error("build_g: needs " + std::to_string(kd_real + 1.0) +
                         " target evaluations, cap is " + std::to_string(eval_cap));
  const std::size_t Kd = static_cast<std::size_t>(kd_real + 0.5);

  const double wsd = f.modulus(std::sqrt(static_cast<double>(d)));
  const double f0 = f(std::vector<double>(d, 0.0));
  const auto shifted = [&](const std::vector<double>& x) { return f(x) - f0 + wsd; };

  const std::size_t total = 2 * Kd + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> vals(total, nan);

  // even indices: cube corners beta/K, laid out with the last axis densest
  std::vector<std::size_t> beta(d, 0);
  std::vector<double> x(d, 0.0);
  bool more = true;
  while (more) {
    std::size_t j = beta[d - 1];
    std::size_t mult = 1;
    for (std::size_t i = d - 1; i-- > 0;) {
      mult *= K;
      j += 2 * beta[i] * mult;
    }
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<double>(beta[i]) / K;
    vals[j] = shifted(x);
    std::size_t axis = d;
    more = false;
    while (axis-- > 0) {
      if (++beta[axis] < K) {
        more = true;
        break;
      }
      beta[axis] = 0;
    }
  }
  vals[total - 1] = shifted(std::vector<double>(d, 1.0));

  // odd stretches: linear bridges between the last corner of one slab and
  // the first corner of the next
  const std::size_t slabs = Kd / K;  // K^{d-1}
  for (std::size_t i = 1; i <= slabs; ++i) {
    const std::size_t hi = 2 * K * i;
    const std::size_t lo = hi - (K + 1);
    for (std::size_t j = lo + 1; j < hi; ++j) {
      const double t = static_cast<double>(j - lo) / static_cast<double>(K + 1);
      vals[j] = vals[lo] + t * (vals[hi] - vals[lo]);
    }
  }
  for (double v : vals)
    if (std::isnan(v)) throw numeric_error("build_g: breakpoint grid has gaps");

  std::vector<double> bp(total);
  for (std::size_t j = 0; j < total; ++j)
    bp[j] = static_cast<double>(j) / (2.0 * kd_real);
  return CpwlFunction::make(std::move(bp), std::move(vals));
}

// Median-of-three smoother: replaces the net by mid(net(x - delta e_i),
// net(x), net(x + delta e_i)) for every axis, which repairs the trifling
// strips (each strip is delta wide and at least 2*delta away from the next,
// so at least two of the three probes are always on good territory). Width
// grows by 3 per axis plus the median gadget floor; the approximation error
// grows by omega(delta) per axis.
inline ReluNetwork uniform_lift(const ReluNetwork& net, const Partition& part,
                                double omega_delta) {
  validate(net);
  if (net.input_dim != part.d) throw shape_error("uniform_lift: dimension mismatch");
  if (net.output_dim() != 1) throw shape_error("uniform_lift: scalar output required");
  if (part.d > 4)
    throw capability_error("uniform_lift: supported up to 4 inputs (width grows like 3^d)");
  if (part.delta < 0.0 || !std::isfinite(part.delta))
    throw argument_error("uniform_lift: delta must be finite and nonnegative");
  if (omega_delta < 0.0) throw argument_error("uniform_lift: modulus value must be nonnegative");
  ReluNetwork cur = net;
  if (part.K <= 1 || part.delta == 0.0) return cur;  // nothing to repair
  for (std::size_t axis = 0; axis < part.d; ++axis) {
    std::vector<ReluNetwork> copies;
    copies.reserve(3);
    for (int s = -1; s <= 1; ++s) {
      std::vector<double> shift(part.d, 0.0);
      shift[axis] = static_cast<double>(s) * part.delta;
      copies.push_back(precompose_affine(cur, Matrix::identity(part.d), shift));
    }
    cur = compose_serial(stack_parallel(copies), gadget_mid3());
  }
  cur.metadata = net.metadata;
  cur.metadata["uniform_lift"] = "median3_per_axis";
  cur.metadata["lift_penalty"] =
      detail::format_real(static_cast<double>(part.d) * omega_delta);
  return cur;
}

// A built approximant together with the partition and certificate data
// needed to check it later.
struct Approximant {
  ReluNetwork network;
  std::size_t N = 1, L = 1, d = 1, K = 1;
  double delta = 0.0;
  double norm_p = std::numeric_limits<double>::infinity();
  bool uniform = false;
  double bound_outside = 0.0;  // error bound off the trifling strips
  double bound_global = 0.0;   // error bound everywhere (L^p or uniform)
  std::string target_name;
};

// Builds the ReLU approximant of f on [0,1]^d with the prescribed size
// budget. The network realizes shift + psi2(2 K^d psi1(Phi1(x))) where Phi1
// locates the partition cube per axis, psi1 flattens the index vector, and
// psi2 fits the sampled profile of f. Error off the trifling strips is at
// most 18 sqrt(d) omega((NL)^{-2/d}); with `uniform` the strips are repaired
// (d <= 4) and the 19 sqrt(d) bound holds everywhere, else it holds in L^p.
inline Approximant build_approximant(const TargetFunction& f, std::size_t N, std::size_t L,
                                     double p = std::numeric_limits<double>::infinity(),
                                     bool uniform = false, ApproxOptions opts = {}) {
  const std::size_t d = f.dim;
  if (d < 1) throw argument_error("build_approximant: dimension must be >= 1");
  if (N < 1 || L < 1) throw argument_error("build_approximant: N, L must be >= 1");
  if (!(p >= 1.0)) throw argument_error("build_approximant: norm exponent must be >= 1");

  const double sd = std::sqrt(static_cast<double>(d));
  const double wsd = f.modulus(sd);
  const double f0 = f(std::vector<double>(d, 0.0));
  const double r = std::pow(static_cast<double>(N) * static_cast<double>(L), -2.0 / d);
  const double wr = f.modulus(r);

  Approximant ap;
  ap.N = N;
  ap.L = L;
  ap.d = d;
  ap.norm_p = p;
  ap.uniform = uniform;
  ap.target_name = f.name;

  if (wsd == 0.0) {  // constant target: the shift alone is exact
    ap.network = affine_network(Matrix(1, d), {f0});
    ap.K = 1;
    ap.delta = 0.0;
    ap.bound_outside = 18.0 * sd * wr;
    ap.bound_global = 19.0 * sd * wr;
  } else {
    const std::size_t K = step_grid_size(N, L, d);
    ap.K = K;

    // Trifling width: large enough to be representable, small enough that
    // the strips carry at most the allowed share of the L^p error (or, for
    // the uniform build, small enough that d*omega(delta) <= omega(r)).
    double delta = 0.0;
    if (K > 1) {
      const double cap = 1.0 / (3.0 * static_cast<double>(K));
      const double floor_delta = std::ldexp(1.0, -40) / static_cast<double>(K);
      if (uniform || std::isinf(p)) {
        if (static_cast<double>(d) * f.modulus(cap) <= wr) {
          delta = cap;
        } else {
          double lo = floor_delta, hi = cap;
          for (int it = 0; it < 80; ++it) {
            const double midp = 0.5 * (lo + hi);
            if (static_cast<double>(d) * f.modulus(midp) <= wr)
              lo = midp;
            else
              hi = midp;
          }
          delta = lo;
        }
      } else {
        const double B = 2.0 * std::abs(f0) + 2.0 * wsd;
        const double share =
            std::pow(wr, p) /
            (static_cast<double>(K) * static_cast<double>(d) * std::pow(B, p));
        delta = std::min(cap, share);
        delta = std::max(delta, floor_delta);
      }
    }
    ap.delta = delta;

    ReluNetwork step = step_function_net(N, L, d, K > 1 ? delta : 0.5);
    ReluNetwork locate;
    if (d == 1) {
      locate = step;
    } else {
      std::vector<ReluNetwork> axes;
      axes.reserve(d);
      for (std::size_t i = 0; i < d; ++i) axes.push_back(select_inputs(step, {i}, d));
      locate = stack_parallel(axes);
    }
    ReluNetwork flatten = compose_serial(locate, index_map(K, d));

    CpwlFunction g = build_g(f, K, opts.eval_cap);
    const std::size_t Kd = (g.values.size() - 1) / 2;
    std::vector<double> samples(g.values.begin(), g.values.begin() + 2 * Kd);

    const double eps_theory = f.modulus(sd / static_cast<double>(K));
    double eps_actual = 0.0;
    for (std::size_t j = 1; j < samples.size(); ++j)
      eps_actual = std::max(eps_actual, std::abs(samples[j] - samples[j - 1]));
    if (eps_actual > eps_theory * (1.0 + 1e-6) + 1e-300)
      throw numeric_error(
          "build_approximant: sampled target steps exceed its declared modulus of continuity");
    const double eps_fit = std::max(eps_theory, eps_actual);

    ReluNetwork table;
    if (eps_fit == 0.0) {
      table = affine_network(Matrix(1, 1), {samples[0]});
    } else {
      table = point_fit_net(samples, eps_fit, N, 2 * L);
    }
    table = precompose_affine(table, Matrix{{2.0 * static_cast<double>(Kd)}}, {0.0});

    ReluNetwork phi = compose_serial(flatten, table);
    phi = postcompose_affine(phi, Matrix{{1.0}}, {f0 - wsd});

    ap.bound_outside = 18.0 * sd * wr;
    ap.bound_global = 19.0 * sd * wr;
    if (uniform) {
      phi = uniform_lift(phi, Partition{K, d, delta}, f.modulus(delta));
      ap.bound_outside = ap.bound_global;
    }
    ap.network = std::move(phi);
  }

  ap.network.metadata["construction"] = "modulus_approximant";
  ap.network.metadata["target"] = f.name;
  ap.network.metadata["N"] = std::to_string(N);
  ap.network.metadata["L"] = std::to_string(L);
  ap.network.metadata["K"] = std::to_string(ap.K);
  ap.network.metadata["delta"] = detail::format_real(ap.delta);
  ap.network.metadata["norm"] = detail::norm_label(p);
  ap.network.metadata["uniform"] = uniform ? "true" : "false";
  ap.network.metadata["bound_outside"] = detail::format_real(ap.bound_outside);
  ap.network.metadata["bound_global"] = detail::format_real(ap.bound_global);
  return ap;
}

// Rehydrates the certificate data stored in a network's metadata (written by
// build_approximant), so a serialized approximant can be re-certified.
inline Approximant approximant_from_network(const ReluNetwork& net) {
  const auto need = [&](const char* key) -> const std::string& {
    auto it = net.metadata.find(key);
    if (it == net.metadata.end())
      throw parse_error(std::string("network metadata lacks '") + key +
                        "'; not a stored approximant");
    return it->second;
  };
  Approximant ap;
  ap.network = net;
  ap.N = static_cast<std::size_t>(detail::parse_real(need("N")));
  ap.L = static_cast<std::size_t>(detail::parse_real(need("L")));
  ap.d = net.input_dim;
  ap.K = static_cast<std::size_t>(detail::parse_real(need("K")));
  ap.delta = detail::parse_real(need("delta"));
  ap.norm_p = detail::parse_norm_label(need("norm"));
  ap.uniform = need("uniform") == "true";
  ap.bound_outside = detail::parse_real(need("bound_outside"));
  ap.bound_global = detail::parse_real(need("bound_global"));
  ap.target_name = need("target");
  return ap;
}

// How to sample the cube when certifying.
struct SamplePlan {
  enum class Kind { grid, monte_carlo };
  Kind kind = Kind::monte_carlo;
  std::size_t count = 100'000;
  std::uint64_t seed = 1;

  static SamplePlan grid_plan(std::size_t count) { return {Kind::grid, count, 0}; }
  static SamplePlan monte_carlo_plan(std::size_t count, std::uint64_t seed) {
    return {Kind::monte_carlo, count, seed};
  }
};

struct ErrorReport {
  std::size_t N = 0, L = 0, K = 0;
  double delta = 0.0;
  double norm_p = std::numeric_limits<double>::infinity();
  double measured_outside = 0.0;  // sup error off the trifling strips
  double bound_outside = 0.0;
  double measured_global = 0.0;  // L^p (or sup) error over all samples
  double bound_global = 0.0;
  bool pass = false;
  std::size_t samples = 0;
  std::string note;  // failure diagnostics for sweep rows that did not build
};

namespace detail {

// Deterministic uniform doubles in [0,1) from raw engine output.
inline double canonical_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline std::vector<double> sample_points(std::size_t d, const SamplePlan& plan) {
  std::vector<double> pts;
  if (plan.count == 0) throw argument_error("certify: sample count must be positive");
  if (plan.kind == SamplePlan::Kind::grid) {
    if (d == 1) {
      pts.reserve(plan.count);
      for (std::size_t i = 0; i < plan.count; ++i)
        pts.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(plan.count));
      return pts;
    }
    std::size_t per = static_cast<std::size_t>(
        std::round(std::pow(static_cast<double>(plan.count), 1.0 / static_cast<double>(d))));
    per = std::max<std::size_t>(per, 2);
    std::vector<std::size_t> ix(d, 0);
    for (;;) {
      for (std::size_t i = 0; i < d; ++i)
        pts.push_back((static_cast<double>(ix[i]) + 0.5) / static_cast<double>(per));
      std::size_t axis = d;
      bool done = true;
      while (axis-- > 0) {
        if (++ix[axis] < per) {
          done = false;
          break;
        }
        ix[axis] = 0;
      }
      if (done) break;
    }
    return pts;
  }
  std::mt19937_64 rng(plan.seed);
  pts.reserve(plan.count * d);
  for (std::size_t i = 0; i < plan.count * d; ++i) pts.push_back(canonical_unit(rng));
  return pts;
}

}  // namespace detail

// Measures the approximant against its target over a sample plan and checks
// the stored bounds. Points are generated once up front; evaluation runs on
// a fixed set of chunks whose partial results are reduced in chunk order, so
// the report is identical run to run for a given plan.
inline ErrorReport certify(const Approximant& ap, const TargetFunction& f, SamplePlan plan) {
  if (f.dim != ap.d || ap.network.input_dim != ap.d)
    throw shape_error("certify: approximant and target dimensions disagree");
  const std::size_t d = ap.d;
  const std::vector<double> pts = detail::sample_points(d, plan);
  const std::size_t n = pts.size() / d;
  const Partition part{ap.K, d, ap.delta};

  struct Chunk {
    double max_out = 0.0;
    double max_all = 0.0;
    double sum_pow = 0.0;
  };
  const std::size_t chunk_count = 16;
  const bool finite_p = !std::isinf(ap.norm_p);
  std::vector<std::future<Chunk>> futs;
  futs.reserve(chunk_count);
  for (std::size_t c = 0; c < chunk_count; ++c) {
    const std::size_t lo = n * c / chunk_count;
    const std::size_t hi = n * (c + 1) / chunk_count;
    futs.push_back(std::async(std::launch::async, [&, lo, hi]() {
      Chunk ch;
      std::vector<double> x(d);
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t k = 0; k < d; ++k) x[k] = pts[i * d + k];
        const double err = std::abs(f(x) - evaluate_scalar(ap.network, x));
        ch.max_all = std::max(ch.max_all, err);
        if (!in_trifling(x, part)) ch.max_out = std::max(ch.max_out, err);
        if (finite_p) ch.sum_pow += std::pow(err, ap.norm_p);
      }
      return ch;
    }));
  }
  Chunk total;
  for (auto& fu : futs) {
    const Chunk ch = fu.get();
    total.max_out = std::max(total.max_out, ch.max_out);
    total.max_all = std::max(total.max_all, ch.max_all);
    total.sum_pow += ch.sum_pow;
  }

  ErrorReport rep;
  rep.N = ap.N;
  rep.L = ap.L;
  rep.K = ap.K;
  rep.delta = ap.delta;
  rep.norm_p = ap.norm_p;
  rep.samples = n;
  rep.measured_outside = total.max_out;
  rep.bound_outside = ap.bound_outside;
  rep.measured_global =
      finite_p ? std::pow(total.sum_pow / static_cast<double>(n), 1.0 / ap.norm_p) : total.max_all;
  rep.bound_global = ap.bound_global;
  rep.pass = rep.measured_outside <= rep.bound_outside && rep.measured_global <= rep.bound_global;
  return rep;
}

// Builds and certifies one approximant per (N, L) cell. Cells are processed
// in sorted order; cells whose build fails produce a NaN row that fails.
struct SweepCell {
  std::size_t N = 1, L = 1;
};

inline std::vector<ErrorReport> rate_sweep(const TargetFunction& f, std::vector<SweepCell> cells,
                                           double p, bool uniform, SamplePlan plan,
                                           ApproxOptions opts = {}) {
  std::sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
    return a.N != b.N ? a.N < b.N : a.L < b.L;
  });
  std::vector<ErrorReport> rows;
  rows.reserve(cells.size());
  for (const SweepCell& cell : cells) {
    try {
      const Approximant ap = build_approximant(f, cell.N, cell.L, p, uniform, opts);
      rows.push_back(certify(ap, f, plan));
    } catch (const error& e) {
      ErrorReport rep;
      rep.N = cell.N;
      rep.L = cell.L;
      rep.norm_p = p;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rep.delta = nan;
      rep.measured_outside = rep.bound_outside = rep.measured_global = rep.bound_global = nan;
      rep.pass = false;
      rep.note = e.what();
      rows.push_back(std::move(rep));
    }
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<ErrorReport>& rows) {
  std::string out =
      "N,L,K,delta,norm,measured_out,bound_out,measured_global,bound_global,pass\n";
  for (const ErrorReport& r : rows) {
    out += std::to_string(r.N) + ',' + std::to_string(r.L) + ',' + std::to_string(r.K) + ',';
    out += detail::format_real(r.delta) + ',';
    out += detail::norm_label(r.norm_p) + ',';
    out += detail::format_real(r.measured_outside) + ',';
    out += detail::format_real(r.bound_outside) + ',';
    out += detail::format_real(r.measured_global) + ',';
    out += detail::format_real(r.bound_global) + ',';
    out += r.pass ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace relu_forge
