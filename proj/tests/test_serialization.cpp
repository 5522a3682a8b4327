#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "relu_forge/serialization.hpp"

using namespace relu_forge;

namespace {

bool identical(const ReluNetwork& a, const ReluNetwork& b) {
  if (a.input_dim != b.input_dim || a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const Layer& la = a.layers[i];
    const Layer& lb = b.layers[i];
    if (la.weights.rows != lb.weights.rows || la.weights.cols != lb.weights.cols) return false;
    for (std::size_t k = 0; k < la.weights.data.size(); ++k) {
      // bit-for-bit, including signed zero
      if (std::signbit(la.weights.data[k]) != std::signbit(lb.weights.data[k])) return false;
      if (la.weights.data[k] != lb.weights.data[k]) return false;
    }
    if (la.bias != lb.bias) return false;
  }
  return a.metadata == b.metadata;
}

}  // namespace

TEST_CASE("hex literals round trip exactly") {
  for (double v : {0.0, -0.0, 1.0, -1.5, 0.1, 1e-300, 1.7976931348623157e308,
                   5e-324, 3.141592653589793, -2.2250738585072014e-308}) {
    const std::string s = to_hex_literal(v);
    const double back = from_hex_literal(s);
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK_THROWS_AS(from_hex_literal(""), parse_error);
  CHECK_THROWS_AS(from_hex_literal("0x1p+1 trailing"), parse_error);
  CHECK_THROWS_AS(from_hex_literal("zebra"), parse_error);
}

TEST_CASE("serialization round trips random networks bit for bit") {
  oracles::Rng rng(202);
  for (int rep = 0; rep < 15; ++rep) {
    auto net = oracles::random_network(rng, 1 + rng.index(3), rng.index(4), 5, 1 + rng.index(2));
    net.metadata["construction"] = "test";
    net.metadata["note"] = "round trip " + std::to_string(rep);
    const std::string doc = serialize(net);
    const ReluNetwork back = deserialize(doc);
    CHECK(identical(net, back));
    CHECK(serialize(back) == doc);  // deterministic output
  }
}

TEST_CASE("deserialization rejects malformed documents") {
  CHECK_THROWS_AS(deserialize("{ not json"), parse_error);
  CHECK_THROWS_AS(deserialize("[]"), parse_error);
  CHECK_THROWS_AS(deserialize("{}"), parse_error);
  CHECK_THROWS_AS(deserialize(R"({"format_version": 99, "input_dim": 1, "layers": []})"),
                  version_error);
  CHECK_THROWS_AS(deserialize(R"({"format_version": 1, "input_dim": 1, "layers": []})"),
                  parse_error);
  // ragged weights
  CHECK_THROWS_AS(
      deserialize(
          R"({"format_version": 1, "input_dim": 2,
              "layers": [{"weights": [["0x1p+0", "0x1p+0"], ["0x1p+0"]], "bias": ["0x0p+0"]}]})"),
      parse_error);
  // bias length disagrees with weight rows -> validation failure at load
  CHECK_THROWS_AS(
      deserialize(
          R"({"format_version": 1, "input_dim": 1,
              "layers": [{"weights": [["0x1p+0"]], "bias": ["0x0p+0", "0x0p+0"]}]})"),
      parse_error);
  // junk numeric literal
  CHECK_THROWS_AS(
      deserialize(
          R"({"format_version": 1, "input_dim": 1,
              "layers": [{"weights": [["pelican"]], "bias": ["0x0p+0"]}]})"),
      parse_error);
  // inner width mismatch between layers
  CHECK_THROWS_AS(
      deserialize(
          R"({"format_version": 1, "input_dim": 1,
              "layers": [{"weights": [["0x1p+0"]], "bias": ["0x0p+0"]},
                         {"weights": [["0x1p+0", "0x1p+0"]], "bias": ["0x0p+0"]}]})"),
      parse_error);
}

TEST_CASE("plain decimal numbers are accepted on input") {
  const ReluNetwork net = deserialize(
      R"({"format_version": 1, "input_dim": 1,
          "layers": [{"weights": [[2.5]], "bias": [0.5]}]})");
  CHECK(evaluate_scalar(net, 2.0) == 5.5);
}
