#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "relu_forge/constructions.hpp"

using namespace relu_forge;

TEST_CASE("integer roots are exact") {
  for (std::size_t n = 0; n <= 3000; ++n) {
    for (std::size_t d = 1; d <= 5; ++d) {
      const std::size_t k = iroot(n, d);
      // oracle: check k^d <= n < (k+1)^d by repeated multiplication
      auto pw = [](std::size_t b, std::size_t e) {
        std::size_t acc = 1;
        for (std::size_t i = 0; i < e; ++i) acc *= b;
        return acc;
      };
      if (n > 0) CHECK(pw(k, d) <= n);
      CHECK(pw(k + 1, d) > n);
    }
  }
  CHECK(iroot(8, 3) == 2);
  CHECK(iroot(7, 3) == 1);
  CHECK(iroot(1'000'000, 2) == 1000);
}

TEST_CASE("step grid sizes") {
  CHECK(step_grid_size(1, 1, 1) == 1);
  CHECK(step_grid_size(2, 1, 1) == 4);
  CHECK(step_grid_size(2, 3, 1) == 36);  // 2^2 * 3^2
  CHECK(step_grid_size(8, 3, 3) == 2 * 2 * 2);   // floor(8^(1/3))^2 * floor(9^(1/3))
  CHECK(step_grid_size(9, 3, 2) == 9 * 3);       // floor(3)^2 * floor(9^(1/2))
}

namespace {

struct FitCase {
  std::vector<double> xs, ys;
  std::size_t n1, n2;
};

FitCase random_fit_case(oracles::Rng& rng, std::size_t n1, std::size_t n2) {
  FitCase fc;
  fc.n1 = n1;
  fc.n2 = n2;
  const std::size_t count = n1 * (n2 + 1) + 1;
  double x = rng.uniform(-1.0, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    fc.xs.push_back(x);
    fc.ys.push_back(rng.uniform(0.0, 4.0));
    x += rng.uniform(0.05, 1.0);
  }
  return fc;
}

}  // namespace

TEST_CASE("two-layer fit hits every sample and is linear inside blocks") {
  oracles::Rng rng(303);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n1 = 1 + rng.index(4);
    const std::size_t n2 = 1 + rng.index(4);
    const FitCase fc = random_fit_case(rng, n1, n2);
    const ReluNetwork net = fit_points_two_layer(fc.xs, fc.ys, n1, n2);

    CHECK(net.depth() == 2);
    const auto widths = net.hidden_widths();
    REQUIRE(widths.size() == 2);
    CHECK(widths[0] == 2 * n1);
    CHECK(widths[1] == 2 * n2 + 1);

    double scale = 1.0;
    for (double y : fc.ys) scale = std::max(scale, std::abs(y));
    for (std::size_t i = 0; i < fc.xs.size(); ++i)
      CHECK_THAT(oracles::forward1(net, fc.xs[i]),
                 Catch::Matchers::WithinAbs(fc.ys[i], 1e-9 * scale));

    // linearity on intervals interior to a block: the midpoint value is the
    // average of the endpoint values
    for (std::size_t i = 1; i < fc.xs.size(); ++i) {
      if (i % (n2 + 1) == 0) continue;  // block boundary or final gap
      const double mid = 0.5 * (fc.xs[i - 1] + fc.xs[i]);
      const double want = 0.5 * (oracles::forward1(net, fc.xs[i - 1]) +
                                 oracles::forward1(net, fc.xs[i]));
      CHECK_THAT(oracles::forward1(net, mid), Catch::Matchers::WithinAbs(want, 1e-9 * scale));
    }
  }
}

TEST_CASE("two-layer fit input validation") {
  CHECK_THROWS_AS(fit_points_two_layer({0, 1, 2}, {0, 1, 2}, 0, 1), argument_error);
  CHECK_THROWS_AS(fit_points_two_layer({0, 1}, {0, 1}, 1, 1), argument_error);       // count
  CHECK_THROWS_AS(fit_points_two_layer({0, 1, 1}, {0, 1, 2}, 1, 1), argument_error); // order
  CHECK_THROWS_AS(fit_points_two_layer({0, 1, 2}, {0, -1, 2}, 1, 1), argument_error); // sign
}

TEST_CASE("reshaping a wide net to a deep net preserves the function") {
  oracles::Rng rng(307);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t N = 1 + rng.index(5);
    const std::size_t L = 1 + rng.index(5);
    ReluNetwork wide;
    wide.input_dim = 1;
    Layer l0{Matrix(N, 1), std::vector<double>(N)};
    for (std::size_t r = 0; r < N; ++r) {
      l0.weights(r, 0) = rng.uniform(-2.0, 2.0);
      l0.bias[r] = rng.uniform(-1.0, 1.0);
    }
    Layer l1{Matrix(N * L, N), std::vector<double>(N * L)};
    for (std::size_t r = 0; r < N * L; ++r) {
      for (std::size_t c = 0; c < N; ++c) l1.weights(r, c) = rng.uniform(-2.0, 2.0);
      l1.bias[r] = rng.uniform(-1.0, 1.0);
    }
    Layer l2{Matrix(1, N * L), {rng.uniform(-1.0, 1.0)}};
    for (std::size_t c = 0; c < N * L; ++c) l2.weights(0, c) = rng.uniform(-2.0, 2.0);
    wide.layers = {l0, l1, l2};

    const ReluNetwork deep = wide_to_deep(wide, L);
    CHECK(deep.depth() == L + 1);
    CHECK(deep.width() <= 2 * N + 2);
    if (L == 1) CHECK(deep.width() <= N + 2);

    for (int pt = 0; pt < 50; ++pt) {
      const double x = rng.uniform(-3.0, 3.0);
      const double want = oracles::forward1(wide, x);
      CHECK_THAT(oracles::forward1(deep, x),
                 Catch::Matchers::WithinAbs(want, 1e-10 * (1.0 + std::abs(want))));
    }
  }
}

TEST_CASE("reshape rejects mismatched widths") {
  oracles::Rng rng(1);
  const auto square = oracles::random_network(rng, 1, 1, 3, 1);
  CHECK_THROWS_AS(wide_to_deep(square, 7), shape_error);
}

TEST_CASE("padding hidden layers is inert") {
  oracles::Rng rng(311);
  ReluNetwork net;
  net.input_dim = 1;
  net.layers.push_back(Layer{Matrix{{1.0}, {-1.0}}, {0.0, 0.5}});
  net.layers.push_back(Layer{Matrix{{1.0, 2.0}, {0.5, -1.0}, {1.0, 1.0}}, {0.0, 0.1, -0.2}});
  net.layers.push_back(Layer{Matrix{{1.0, -1.0, 0.5}}, {0.25}});
  const auto padded = pad_two_hidden(net, 5, 7);
  CHECK(padded.hidden_widths() == std::vector<std::size_t>{5, 7});
  for (int pt = 0; pt < 40; ++pt) {
    const double x = rng.uniform(-2.0, 2.0);
    CHECK(oracles::forward1(padded, x) == oracles::forward1(net, x));
  }
  CHECK_THROWS_AS(pad_two_hidden(net, 1, 7), shape_error);
}

TEST_CASE("step networks hit every plateau") {
  for (std::size_t N : {1u, 2u, 3u}) {
    for (std::size_t L : {1u, 2u}) {
      for (std::size_t d : {1u, 2u}) {
        const std::size_t K = step_grid_size(N, L, d);
        const double delta = 1.0 / (3.0 * static_cast<double>(K));
        const ReluNetwork net = step_function_net(N, L, d, delta);
        CHECK(net.input_dim == 1);
        CHECK(net.width() <= 4 * iroot(N, d) + 3);
        CHECK(net.depth() <= 4 * L + 5);
        for (std::size_t k = 0; k < K; ++k) {
          const double lo = static_cast<double>(k) / K;
          const double hi =
              k + 1 == K ? 1.0 : static_cast<double>(k + 1) / K - delta;
          for (int t = 0; t <= 10; ++t) {
            const double x = lo + (hi - lo) * t / 10.0;
            CHECK_THAT(oracles::forward1(net, x),
                       Catch::Matchers::WithinAbs(static_cast<double>(k), 1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("single-plateau step net is identically zero") {
  const ReluNetwork net = step_function_net(1, 1, 1, 0.0);
  CHECK(net.depth() == 0);
  for (double x : {-1.0, 0.0, 0.3, 1.0, 5.0}) CHECK(oracles::forward1(net, x) == 0.0);
}

TEST_CASE("step network rejects an out-of-range gap width") {
  const std::size_t K = step_grid_size(2, 1, 1);
  CHECK_THROWS_AS(step_function_net(2, 1, 1, 0.0), argument_error);
  CHECK_THROWS_AS(step_function_net(2, 1, 1, 1.0 / K), argument_error);
  CHECK_NOTHROW(step_function_net(2, 1, 1, 1.0 / (3.0 * K)));
}

namespace {

std::vector<double> random_step_bounded(oracles::Rng& rng, std::size_t n, double eps) {
  std::vector<double> ys(n);
  double y = rng.uniform(0.0, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = y;
    y = std::max(0.0, y + rng.uniform(-eps, eps));
  }
  return ys;
}

}  // namespace

TEST_CASE("point-fit networks land within eps below each sample") {
  oracles::Rng rng(313);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t N = 1 + rng.index(3);
    const std::size_t L = 1 + rng.index(3);
    const std::size_t J = 1 + rng.index(N * N * L * L);
    const double eps = rng.uniform(0.05, 0.5);
    const std::vector<double> ys = random_step_bounded(rng, J, eps);
    const ReluNetwork net = point_fit_net(ys, eps, N, L);
    CHECK(net.width() <= 12 * N + 8);
    CHECK(net.depth() <= 4 * L + 9);

    double ymax = 0.0;
    for (double y : ys) ymax = std::max(ymax, y);
    for (std::size_t j = 0; j < J; ++j) {
      const double v = oracles::forward1(net, static_cast<double>(j));
      CHECK(v <= ys[j] + 1e-9);
      CHECK(v >= ys[j] - eps - 1e-9);
    }
    // range control at arbitrary real inputs
    for (int pt = 0; pt < 200; ++pt) {
      const double x = rng.uniform(-5.0, static_cast<double>(N * N * L * L) + 5.0);
      const double v = oracles::forward1(net, x);
      CHECK(v >= -1e-9);
      CHECK(v <= ymax + 1e-9);
    }
  }
}

TEST_CASE("point-fit edge cases") {
  CHECK_THROWS_AS(point_fit_net({}, 0.1, 1, 1), argument_error);
  CHECK_THROWS_AS(point_fit_net({0.0, -1.0}, 2.0, 1, 1), argument_error);
  CHECK_THROWS_AS(point_fit_net({0.0, 1.0}, 0.5, 1, 1), argument_error);  // step too big
  CHECK_THROWS_AS(point_fit_net({0.0, 0.5}, 0.0, 1, 1), argument_error);  // zero eps
  CHECK_THROWS_AS(point_fit_net(std::vector<double>(3, 1.0), 1.0, 1, 1), capacity_error);

  const ReluNetwork constant = point_fit_net({2.5}, 0.0, 1, 1);
  CHECK(constant.depth() == 0);
  for (double x : {-1.0, 0.0, 7.0}) CHECK(oracles::forward1(constant, x) == 2.5);
}

TEST_CASE("grid-fit networks quantize to the step resolution") {
  oracles::Rng rng(317);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t N = 1 + rng.index(2);
    const std::size_t L = 1 + rng.index(3);
    const std::size_t M = N * N * L;
    const double eps = rng.uniform(0.05, 0.4);
    std::vector<std::vector<double>> y(M, std::vector<double>(L));
    for (std::size_t m = 0; m < M; ++m) {
      double v = rng.uniform(0.0, 2.0);
      for (std::size_t l = 0; l < L; ++l) {
        y[m][l] = v;
        v = std::max(0.0, v + rng.uniform(-eps, eps));
      }
    }
    const ReluNetwork net = grid_fit_net(y, eps, N, L);
    CHECK(net.width() <= 12 * N + 8);
    CHECK(net.depth() <= 3 * L + 6);

    double ymax = 0.0;
    for (const auto& row : y)
      for (double v : row) ymax = std::max(ymax, v);

    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t l = 0; l < L; ++l) {
        const double v = oracles::forward(net, {static_cast<double>(m),
                                                static_cast<double>(l)})[0];
        CHECK(v <= y[m][l] + 1e-9);
        CHECK(v >= y[m][l] - eps - 1e-9);
      }
    }
    for (int pt = 0; pt < 100; ++pt) {
      const double u = rng.uniform(-3.0, static_cast<double>(M) + 3.0);
      const double w = rng.uniform(-3.0, static_cast<double>(L) + 3.0);
      const double v = oracles::forward(net, {u, w})[0];
      CHECK(v >= -1e-9);
      CHECK(v <= ymax + 1e-9);
    }
  }
}

TEST_CASE("grid-fit validates dimensions and steps") {
  CHECK_THROWS_AS(grid_fit_net({{0.0}}, 0.5, 2, 1), argument_error);          // row count
  CHECK_THROWS_AS(grid_fit_net({{0.0, 0.1}}, 0.5, 1, 1), argument_error);     // column count
  CHECK_THROWS_AS(grid_fit_net({{-0.5}}, 0.5, 1, 1), argument_error);         // sign
  CHECK_THROWS_AS(grid_fit_net({{0.0}}, 0.0, 1, 1), argument_error);          // eps
  CHECK_THROWS_AS(grid_fit_net({{0.0, 0.4}, {0.0, 0.0}}, 0.1, 1, 2),
                  argument_error);                                            // step size
}

TEST_CASE("grid-fit of the zero grid is identically zero") {
  const ReluNetwork net = grid_fit_net({{0.0, 0.0}, {0.0, 0.0}}, 0.5, 1, 2);
  oracles::Rng rng(331);
  for (int pt = 0; pt < 50; ++pt)
    CHECK(oracles::forward(net, {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)})[0] == 0.0);
}
