#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "relu_forge/domain_ext.hpp"
#include "relu_forge/errors.hpp"
#include "relu_forge/network.hpp"
#include "relu_forge/target.hpp"

namespace relu_forge {

// Points in [0,1]^d, optionally tagged: tagged points mark the underlying
// low-dimensional set, untagged ones its epsilon-neighborhood.
struct PointCloud {
  std::vector<std::vector<double>> points;
  std::vector<char> base_tag;  // empty, or one flag per point

  std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
  bool tagged() const {
    for (char t : base_tag)
      if (t) return true;
    return false;
  }

  static PointCloud make(std::vector<std::vector<double>> points, std::vector<char> tags = {}) {
    if (points.empty()) throw argument_error("PointCloud: no points");
    const std::size_t d = points.front().size();
    if (d == 0) throw argument_error("PointCloud: zero-dimensional points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != d)
        throw argument_error("PointCloud: point " + std::to_string(i) +
                             " has inconsistent dimension");
      for (double c : points[i]) {
        if (!std::isfinite(c)) throw numeric_error("PointCloud: non-finite coordinate");
        if (c < -1e-12 || c > 1.0 + 1e-12)
          throw argument_error("PointCloud: point " + std::to_string(i) +
                               " leaves the unit cube");
      }
    }
    if (!tags.empty() && tags.size() != points.size())
      throw argument_error("PointCloud: tag/point count mismatch");
    return PointCloud{std::move(points), std::move(tags)};
  }
};

// A scaled row-orthogonal projection R^d -> R^{d_low}; rows have norm
// sqrt(d/d_low), so A A^T = (d/d_low) I and |A x|_inf <= sqrt(d/d_low) for
// x in the unit cube shifted to the origin-symmetric box.
struct ProjectionMap {
  Matrix A{0, 0};
  std::size_t d = 0, d_low = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;

  std::vector<double> project(const std::vector<double>& x) const {
    if (x.size() != d) throw shape_error("ProjectionMap: dimension mismatch");
    return A.mul(x);
  }
};

namespace detail {

// Gaussian draws from raw engine output, identical across platforms
// (library normal distributions are implementation-defined).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1p-53; }
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

// Draws a random d_low x d matrix with orthogonal rows of norm
// sqrt(d/d_low): Gaussian rows orthonormalized by twice-applied
// Gram-Schmidt, then rescaled. Deterministic in the seed.
inline ProjectionMap random_orthoprojector(std::size_t d, std::size_t d_low, double delta,
                                           std::uint64_t seed) {
  if (d_low < 1 || d_low > d) throw argument_error("random_orthoprojector: need 1 <= d_low <= d");
  if (!(delta >= 0.0 && delta < 1.0))
    throw argument_error("random_orthoprojector: distortion delta must lie in [0, 1)");
  ProjectionMap proj;
  proj.d = d;
  proj.d_low = d_low;
  proj.delta = delta;
  proj.seed = seed;
  const double scale = std::sqrt(static_cast<double>(d) / static_cast<double>(d_low));

  if (d_low == d) {  // the identity is the only isometric choice
    proj.A = Matrix::identity(d);
    return proj;
  }

  detail::GaussianStream gauss(seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(d_low);
  while (rows.size() < d_low) {
    std::vector<double> v(d);
    for (double& c : v) c = gauss.next();
    for (int pass = 0; pass < 2; ++pass) {  // modified Gram-Schmidt, twice
      for (const auto& u : rows) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += v[i] * u[i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= dot * u[i];
      }
    }
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // degenerate draw; take a fresh row
    for (double& c : v) c /= norm;
    rows.push_back(std::move(v));
  }

  proj.A = Matrix(d_low, d);
  for (std::size_t r = 0; r < d_low; ++r)
    for (std::size_t c = 0; c < d; ++c) proj.A(r, c) = scale * rows[r][c];

  for (std::size_t r = 0; r < d_low; ++r) {  // safety net: verify A A^T
    for (std::size_t s = 0; s < d_low; ++s) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += proj.A(r, c) * proj.A(s, c);
      const double want = r == s ? scale * scale : 0.0;
      if (std::abs(dot - want) > 1e-9)
        throw numeric_error("random_orthoprojector: row orthogonality drifted");
    }
  }
  return proj;
}

struct DistortionReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double fraction_within = 0.0;  // share of pairs with ratio in [1-delta, 1+delta]
  std::size_t pairs = 0;
};

// Estimates how the projection distorts pairwise distances on the cloud by
// sampling random point pairs. Deterministic in the seed.
inline DistortionReport distortion_check(const ProjectionMap& proj, const PointCloud& cloud,
                                         std::size_t pairs = 2000, std::uint64_t seed = 7) {
  const std::size_t n = cloud.points.size();
  if (n < 2) throw argument_error("distortion_check: needs at least two points");
  if (pairs == 0) throw argument_error("distortion_check: needs at least one pair");
  std::mt19937_64 rng(seed);
  const auto pick = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };

  DistortionReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  std::size_t within = 0, got = 0, attempts = 0;
  while (got < pairs && attempts < 100 * pairs + 100) {
    ++attempts;
    const std::size_t i = pick(n), j = pick(n);
    if (i == j) continue;
    const double base = euclidean_distance(cloud.points[i], cloud.points[j]);
    if (base == 0.0) continue;
    const double mapped =
        euclidean_distance(proj.project(cloud.points[i]), proj.project(cloud.points[j]));
    const double ratio = mapped / base;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio >= 1.0 - proj.delta && ratio <= 1.0 + proj.delta) ++within;
    ++got;
  }
  if (got == 0) throw argument_error("distortion_check: cloud has no distinct points");
  rep.pairs = got;
  rep.fraction_within = static_cast<double>(within) / static_cast<double>(got);
  return rep;
}

struct ProjectorSearchPolicy {
  std::size_t pairs = 2000;
  double min_fraction = 1.0;     // required share of pairs inside the band
  std::size_t max_attempts = 64;
};

// Retries seeded draws until one keeps all sampled pairwise ratios inside
// [1-delta, 1+delta] and maps the cloud into the analysis box.
inline ProjectionMap find_projector(const PointCloud& cloud, std::size_t d_low, double delta,
                                    std::uint64_t seed, ProjectorSearchPolicy policy = {}) {
  const std::size_t d = cloud.dim();
  const double box = std::sqrt(static_cast<double>(d) / static_cast<double>(d_low));
  for (std::size_t attempt = 0; attempt < policy.max_attempts; ++attempt) {
    ProjectionMap proj = random_orthoprojector(d, d_low, delta, seed + attempt);
    bool contained = true;
    for (const auto& x : cloud.points) {
      for (double c : proj.project(x))
        if (std::abs(c) > box) {
          contained = false;
          break;
        }
      if (!contained) break;
    }
    if (!contained) continue;
    if (cloud.points.size() >= 2) {
      const DistortionReport rep = distortion_check(proj, cloud, policy.pairs, seed ^ 0x9e3779b9u);
      if (rep.fraction_within < policy.min_fraction) continue;
    }
    return proj;
  }
  throw precondition_error("find_projector: no draw met the distortion band in " +
                           std::to_string(policy.max_attempts) + " attempts");
}

namespace detail {

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace detail

struct ManifoldApproximant {
  ReluNetwork network;
  ProjectionMap projection;
  std::size_t N = 1, L = 1;
  double epsilon = 0.0;
  double bound = 0.0;         // guarantee over the sampled neighborhood
  double measured_sup = 0.0;  // sup error over the cloud
  bool pass = false;
};

// Approximates f restricted to an epsilon-neighborhood of a low-dimensional
// set: projects the cloud to d_low coordinates, assigns each projected point
// the value of a canonical (lexicographically smallest) nearby base point,
// extends over the low-dimensional box, and pulls the network back through
// the projection.  Guarantee over the cloud:
//   2 omega(2 eps sqrt(d/d_low)/(1-delta) + 2 eps)
//     + 19 sqrt(d) omega((2 sqrt(d)/((1-delta) sqrt(d_low))) (NL)^{-2/d_low}).
inline ManifoldApproximant build_manifold_approximant(const TargetFunction& f,
                                                      const PointCloud& cloud,
                                                      const ProjectionMap& proj, double epsilon,
                                                      std::size_t N, std::size_t L,
                                                      ApproxOptions opts = {}) {
  const std::size_t d = cloud.dim();
  if (f.dim != d || proj.d != d)
    throw shape_error("build_manifold_approximant: dimension mismatch");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw argument_error("build_manifold_approximant: epsilon must be finite and nonnegative");
  if (N < 1 || L < 1) throw argument_error("build_manifold_approximant: N, L must be >= 1");
  const std::size_t d_low = proj.d_low;
  const double delta = proj.delta;

  // Candidate base points: the tagged subset if any, else the whole cloud.
  std::vector<std::size_t> base;
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    if (cloud.base_tag.empty() || !cloud.tagged() || cloud.base_tag[i]) base.push_back(i);

  std::vector<std::vector<double>> projected(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    projected[i] = proj.project(cloud.points[i]);

  const double box = std::sqrt(static_cast<double>(d) / static_cast<double>(d_low));
  for (std::size_t i = 0; i < projected.size(); ++i)
    for (double c : projected[i])
      if (std::abs(c) > box)
        throw precondition_error("build_manifold_approximant: projected point " +
                                 std::to_string(i) +
                                 " leaves the analysis box; redraw the projector");

  // Mesh of the projected base set decides how far a projected point may sit
  // from its representative.
  double mesh = 0.0;
  if (base.size() >= 2) {
    for (std::size_t a : base) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t b : base) {
        if (a == b) continue;
        nearest = std::min(nearest, euclidean_distance(projected[a], projected[b]));
      }
      mesh = std::max(mesh, nearest);
    }
  }
  const double tol = 1e-8 + (1.0 + delta) * mesh;

  // One sample per projected base point, valued at the canonical preimage.
  std::vector<std::vector<double>> dom_points;
  std::vector<double> dom_values;
  for (std::size_t i : base) {
    std::size_t rep = cloud.points.size();
    for (std::size_t k : base) {
      if (euclidean_distance(projected[k], projected[i]) > tol) continue;
      if (rep == cloud.points.size() || detail::lex_less(cloud.points[k], cloud.points[rep]))
        rep = k;
    }
    if (rep == cloud.points.size())
      throw precondition_error("build_manifold_approximant: no base point matches sample " +
                               std::to_string(i));
    dom_points.push_back(projected[i]);
    dom_values.push_back(f(cloud.points[rep]));
  }

  const ModulusOfContinuity stretched = f.modulus.scale_argument(1.0 / (1.0 - delta));
  const double slack = 2.0 * epsilon * box + 2.0 * epsilon * (1.0 - delta);
  const SampledDomain domain = SampledDomain::make(std::move(dom_points), std::move(dom_values), box);
  const DomainApproximant da = approximate_on_domain(domain, stretched, N, L, slack, opts);

  ReluNetwork net =
      precompose_affine(da.network, proj.A, std::vector<double>(d_low, 0.0));
  net.metadata["construction"] = "manifold_approximant";
  net.metadata["d_low"] = std::to_string(d_low);
  net.metadata["epsilon"] = detail::format_real(epsilon);

  ManifoldApproximant ma;
  ma.projection = proj;
  ma.N = N;
  ma.L = L;
  ma.epsilon = epsilon;
  const double sd = std::sqrt(static_cast<double>(d));
  ma.bound = 2.0 * f.modulus(2.0 * epsilon * box / (1.0 - delta) + 2.0 * epsilon) +
             19.0 * sd *
                 f.modulus((2.0 * sd / ((1.0 - delta) * std::sqrt(static_cast<double>(d_low)))) *
                           std::pow(static_cast<double>(N) * static_cast<double>(L),
                                    -2.0 / static_cast<double>(d_low)));
  double worst = 0.0;
  for (const auto& x : cloud.points)
    worst = std::max(worst, std::abs(f(x) - evaluate_scalar(net, x)));
  ma.measured_sup = worst;
  ma.pass = ma.measured_sup <= ma.bound;
  ma.network = std::move(net);
  return ma;
}

}  // namespace relu_forge
