#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relu_forge/fixtures.hpp"

using namespace relu_forge;

TEST_CASE("pyramid bump geometry") {
  CHECK(bump_peak(1.0, 1.0) == 0.25);
  CHECK(bump_peak(0.5, 1.0) == 0.125);
  CHECK_THAT(bump_peak(0.5, 0.5), Catch::Matchers::WithinRel(0.5 * std::sqrt(0.25), 1e-15));

  BumpSpec spec;
  spec.center = {0.5, 0.5};
  spec.eta = 0.5;
  spec.alpha = 1.0;
  CHECK_NOTHROW(check_bump(spec));
  CHECK(bump_value(spec, {0.5, 0.5}) == bump_peak(0.5, 1.0));
  CHECK(bump_value(spec, {0.75, 0.5}) == 0.0);   // sup-distance half side
  CHECK(bump_value(spec, {0.9, 0.5}) == 0.0);    // outside the support
  CHECK_THAT(bump_value(spec, {0.625, 0.5}),
             Catch::Matchers::WithinRel(0.5 * bump_peak(0.5, 1.0), 1e-12));
  CHECK_THROWS_AS(bump_value(spec, {0.5}), shape_error);

  BumpSpec bad = spec;
  bad.center = {0.1, 0.5};
  CHECK_THROWS_AS(check_bump(bad), argument_error);
  bad = spec;
  bad.eta = 0.0;
  CHECK_THROWS_AS(check_bump(bad), argument_error);
  bad = spec;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(check_bump(bad), argument_error);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(check_bump(bad), argument_error);
}

TEST_CASE("sign patches place one bump per grid cell") {
  const TargetFunction f = sign_patch_function(2, 2, 1.0, {1, -1, -1, 1});
  CHECK(f.dim == 2);
  const double peak = bump_peak(0.5, 1.0);
  CHECK_THAT(f({0.25, 0.25}), Catch::Matchers::WithinRel(peak, 1e-12));
  CHECK_THAT(f({0.25, 0.75}), Catch::Matchers::WithinRel(-peak, 1e-12));   // row-major
  CHECK_THAT(f({0.75, 0.25}), Catch::Matchers::WithinRel(-peak, 1e-12));
  CHECK_THAT(f({0.75, 0.75}), Catch::Matchers::WithinRel(peak, 1e-12));
  CHECK(f({0.5, 0.25}) == 0.0);  // cell boundaries are zero crossings
  CHECK(f({0.25, 0.0}) == 0.0);
}

TEST_CASE("sign patch validation") {
  CHECK_THROWS_AS(sign_patch_function(0, 1, 1.0, {}), argument_error);
  CHECK_THROWS_AS(sign_patch_function(2, 1, 0.0, {1, 1}), argument_error);
  CHECK_THROWS_AS(sign_patch_function(2, 2, 1.0, {1, -1, 1}), argument_error);
  CHECK_THROWS_AS(sign_patch_function(2, 2, 1.0, {1, -1, 2, 1}), argument_error);
  CHECK_THROWS_AS(sign_patch_function(100'000, 2, 1.0, {}), capacity_error);
}

namespace {

// Numeric check that the declared modulus dominates the target in Euclidean
// distance over random point pairs in the unit cube.
void check_modulus_dominates(const TargetFunction& f, oracles::Rng& rng, int pairs) {
  for (int i = 0; i < pairs; ++i) {
    std::vector<double> x(f.dim), y(f.dim);
    for (double& c : x) c = rng.unit();
    for (double& c : y) c = rng.unit();
    double dist = 0.0;
    for (std::size_t k = 0; k < f.dim; ++k) dist += (x[k] - y[k]) * (x[k] - y[k]);
    dist = std::sqrt(dist);
    const double gap = std::abs(f(x) - f(y));
    REQUIRE(gap <= f.modulus(dist) * (1.0 + 1e-9) + 1e-12);
  }
}

}  // namespace

TEST_CASE("declared moduli dominate the targets") {
  oracles::Rng rng(811);
  check_modulus_dominates(fixture("const", 2), rng, 500);
  check_modulus_dominates(fixture("linear", 3), rng, 500);
  check_modulus_dominates(fixture("abs"), rng, 500);
  check_modulus_dominates(fixture("holder_sqrt"), rng, 500);
  check_modulus_dominates(fixture("cpwl-17"), rng, 500);
  check_modulus_dominates(sign_patch_function(3, 2, 0.5, std::vector<int>(9, 1)), rng, 500);
  TargetFunction flipped = sign_patch_function(2, 2, 1.0, {1, -1, -1, 1});
  check_modulus_dominates(flipped, rng, 500);
}

TEST_CASE("fixture zoo values") {
  const TargetFunction c = fixture("const", 4);
  CHECK(c.dim == 4);
  CHECK(c({0.1, 0.2, 0.3, 0.4}) == 0.3);
  CHECK(c.modulus.is_zero());

  const TargetFunction lin = fixture("linear", 3);
  CHECK_THAT(lin({0.3, 0.6, 0.9}), Catch::Matchers::WithinRel(0.6, 1e-15));

  const TargetFunction ab = fixture("abs");
  CHECK(ab.dim == 1);
  CHECK(ab({0.2}) == 0.3);
  CHECK(ab({0.5}) == 0.0);

  const TargetFunction hs = fixture("holder_sqrt");
  CHECK(hs.dim == 2);
  CHECK(hs({0.75, 0.5}) == 0.5);
  CHECK(hs.modulus.alpha == 0.5);
  CHECK_THAT(hs.modulus.lambda, Catch::Matchers::WithinRel(std::pow(2.0, 0.25), 1e-15));
}

TEST_CASE("seeded piecewise-linear fixtures are reproducible") {
  const TargetFunction a = fixture("cpwl-12345");
  const TargetFunction b = fixture("cpwl-12345");
  const TargetFunction other = fixture("cpwl-54321");
  oracles::Rng rng(823);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = rng.unit();
    REQUIRE(a({x}) == b({x}));
    differs = differs || a({x}) != other({x});
  }
  CHECK(differs);
  CHECK(a.dim == 1);
  CHECK(a.modulus.alpha == 1.0);
  CHECK(a.modulus.lambda > 0.0);
}

TEST_CASE("unknown fixtures list the catalogue") {
  CHECK_THROWS_AS(fixture("pelican"), lookup_error);
  CHECK_THROWS_AS(fixture("cpwl-"), lookup_error);
  CHECK_THROWS_AS(fixture("cpwl-seed"), lookup_error);
  try {
    fixture("nope");
    FAIL("expected lookup_error");
  } catch (const lookup_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("known:") != std::string::npos);
    CHECK(msg.find("holder_sqrt") != std::string::npos);
  }
}
