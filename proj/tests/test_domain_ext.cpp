#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relu_forge/domain_ext.hpp"
#include "relu_forge/io.hpp"

using namespace relu_forge;

namespace {

struct RandomDomain {
  SampledDomain domain;
  ModulusOfContinuity omega;
};

// Samples of beta * omega(|p - q|) + c are omega-compatible with margin
// 1 - beta, so the extension precondition holds with room for rounding.
RandomDomain random_domain(oracles::Rng& rng, std::size_t d, std::size_t n) {
  const double R = rng.uniform(0.5, 2.0);
  const double lambda = rng.uniform(0.5, 2.0);
  const double alpha = rng.index(2) ? 1.0 : rng.uniform(0.4, 0.9);
  ModulusOfContinuity omega =
      ModulusOfContinuity::holder(lambda, alpha, /*domain_radius=*/20.0);
  std::vector<double> q(d);
  for (double& c : q) c = rng.uniform(-R, R);
  const double beta = rng.uniform(0.2, 0.9);
  const double shift = rng.uniform(-1.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& c : pts[i]) c = rng.uniform(-R, R);
    vals[i] = beta * omega(euclidean_distance(pts[i], q)) + shift;
  }
  return {SampledDomain::make(std::move(pts), std::move(vals), R), std::move(omega)};
}

}  // namespace

TEST_CASE("sampled domain validation") {
  CHECK_THROWS_AS(SampledDomain::make({}, {}, 1.0), argument_error);
  CHECK_THROWS_AS(SampledDomain::make({{0.0}}, {1.0, 2.0}, 1.0), argument_error);
  CHECK_THROWS_AS(SampledDomain::make({{0.0}}, {1.0}, 0.0), argument_error);
  CHECK_THROWS_AS(SampledDomain::make({{0.0}, {0.1, 0.2}}, {1.0, 2.0}, 1.0), argument_error);
  CHECK_THROWS_AS(SampledDomain::make({{2.0}}, {1.0}, 1.0), argument_error);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SampledDomain::make({{inf}}, {1.0}, 1.0), numeric_error);
  CHECK_THROWS_AS(SampledDomain::make({{0.5}}, {inf}, 1.0), numeric_error);
  CHECK_NOTHROW(SampledDomain::make({{0.5, -0.5}}, {3.0}, 0.5));
}

TEST_CASE("extension reproduces every sample bit for bit") {
  oracles::Rng rng(601);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + rng.index(3);
    const std::size_t n = 2 + rng.index(11);
    RandomDomain rd = random_domain(rng, d, n);
    const McShaneExtension ext = mcshane_extend(rd.domain, rd.omega);
    for (std::size_t i = 0; i < rd.domain.points.size(); ++i)
      REQUIRE(ext(rd.domain.points[i]) == rd.domain.values[i]);
  }
}

TEST_CASE("extension respects its modulus between arbitrary points") {
  oracles::Rng rng(607);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t d = 1 + rng.index(3);
    RandomDomain rd = random_domain(rng, d, 6);
    const McShaneExtension ext = mcshane_extend(rd.domain, rd.omega);
    for (int pair = 0; pair < 200; ++pair) {
      std::vector<double> x(d), y(d);
      for (double& c : x) c = rng.uniform(-3.0, 3.0);
      for (double& c : y) c = rng.uniform(-3.0, 3.0);
      const double gap = std::abs(ext(x) - ext(y));
      CHECK(gap <= rd.omega(euclidean_distance(x, y)) + 1e-12);
    }
  }
}

TEST_CASE("incompatible samples are rejected with their indices") {
  const SampledDomain bad =
      SampledDomain::make({{0.0}, {0.01}}, {0.0, 5.0}, 1.0);
  const ModulusOfContinuity omega = ModulusOfContinuity::holder(1.0, 1.0, 10.0);
  try {
    mcshane_extend(bad, omega);
    FAIL("expected precondition_error");
  } catch (const precondition_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("samples 0 and 1") != std::string::npos);
  }
}

TEST_CASE("slack lowers the extension by at most omega(slack)") {
  oracles::Rng rng(613);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 1 + rng.index(2);
    RandomDomain rd = random_domain(rng, d, 5);
    const double slack = rng.uniform(0.01, 0.5);
    const McShaneExtension ext = mcshane_extend(rd.domain, rd.omega, slack);
    const double drop = rd.omega(slack);
    for (std::size_t i = 0; i < rd.domain.points.size(); ++i) {
      const double g = ext(rd.domain.points[i]);
      CHECK(g <= rd.domain.values[i] + 1e-12);
      CHECK(g >= rd.domain.values[i] - drop - 1e-12);
    }
  }
  const SampledDomain dom = SampledDomain::make({{0.0}}, {1.0}, 1.0);
  CHECK_THROWS_AS(mcshane_extend(dom, ModulusOfContinuity::holder(1, 1), -0.1),
                  argument_error);
}

TEST_CASE("inadmissible moduli are rejected up front") {
  const SampledDomain dom = SampledDomain::make({{0.0}, {0.5}}, {0.0, 0.1}, 1.0);
  const auto convex =
      ModulusOfContinuity::from_callable([](double r) { return r * r; }, 10.0);
  CHECK_THROWS_AS(mcshane_extend(dom, convex), precondition_error);
}

TEST_CASE("domain approximants certify against the stated bound") {
  const double R = 1.5;
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  for (int i = 0; i < 9; ++i) {
    const double x = -R + 2.0 * R * i / 8.0;
    pts.push_back({x});
    vals.push_back(std::abs(std::sin(x)));  // Lipschitz-1
  }
  const ModulusOfContinuity omega = ModulusOfContinuity::holder(1.0, 1.0, 20.0);
  const double slack = 0.05;
  const DomainApproximant da = approximate_on_domain(
      SampledDomain::make(pts, vals, R), omega, 2, 2, slack);

  const double r = 2.0 * R * std::pow(4.0, -2.0);
  CHECK_THAT(da.bound,
             Catch::Matchers::WithinRel(omega(slack) + 19.0 * omega(r), 1e-12));
  CHECK(da.pass);
  CHECK(da.measured_sup <= da.bound);
  CHECK(da.network.input_dim == 1);
  CHECK(da.network.metadata.at("construction") == "domain_approximant");
  CHECK(da.network.metadata.count("R") == 1);
  CHECK(da.network.metadata.count("slack") == 1);
  CHECK(da.network.metadata.count("bound") == 1);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(std::abs(evaluate_scalar(da.network, pts[i]) - vals[i]) <= da.bound);
}

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("domain CSV parsing") {
  const TempFile good("ut_domain_good.csv");
  write_file_atomic(good.path, "x1,x2,value\n0.5,0.25,1.0\n-0.5,0.0,2.0\n");
  const SampledDomain dom = read_domain_csv(good.path);
  REQUIRE(dom.points.size() == 2);
  CHECK(dom.dim() == 2);
  CHECK(dom.points[1][0] == -0.5);
  CHECK(dom.values[1] == 2.0);
  CHECK(dom.R == 0.5);  // radius inferred from the widest coordinate

  const SampledDomain wide = read_domain_csv(good.path, 3.0);
  CHECK(wide.R == 3.0);

  const TempFile origin("ut_domain_origin.csv");
  write_file_atomic(origin.path, "x1,value\n0,7\n");
  CHECK(read_domain_csv(origin.path).R == 1.0);  // all points at 0: default box

  const TempFile missing("ut_domain_missing.csv");
  write_file_atomic(missing.path, "x1,x2\n0.5,0.25\n");
  CHECK_THROWS_AS(read_domain_csv(missing.path), parse_error);

  const TempFile ragged("ut_domain_ragged.csv");
  write_file_atomic(ragged.path, "x1,value\n0.5,1.0\n0.25\n");
  try {
    read_domain_csv(ragged.path);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  const TempFile header("ut_domain_header.csv");
  write_file_atomic(header.path, "x2,x1,value\n0.5,1.0,0.0\n");
  CHECK_THROWS_AS(read_domain_csv(header.path), parse_error);

  const TempFile junk("ut_domain_junk.csv");
  write_file_atomic(junk.path, "x1,value\npelican,1.0\n");
  CHECK_THROWS_AS(read_domain_csv(junk.path), parse_error);

  const TempFile empty("ut_domain_empty.csv");
  write_file_atomic(empty.path, "");
  CHECK_THROWS_AS(read_domain_csv(empty.path), parse_error);

  CHECK_THROWS_AS(read_domain_csv("ut_domain_does_not_exist.csv"), parse_error);
}
