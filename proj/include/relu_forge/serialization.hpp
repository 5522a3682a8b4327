#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "relu_forge/errors.hpp"
#include "relu_forge/network.hpp"

namespace relu_forge {

inline constexpr int kFormatVersion = 1;

// Reals travel as C hexadecimal float literals ("0x1.8p+1"): exact round
// trips without depending on decimal shortest-form printing.
inline std::string to_hex_literal(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline double from_hex_literal(const std::string& s) {
  if (s.empty()) throw parse_error("empty numeric literal");
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw parse_error("bad numeric literal '" + s + "'");
  return v;
}

namespace detail {

inline double json_real(const nlohmann::json& j) {
  if (j.is_string()) return from_hex_literal(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw parse_error("expected a numeric literal, got " + std::string(j.type_name()));
}

}  // namespace detail

inline std::string serialize(const ReluNetwork& net) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["input_dim"] = net.input_dim;
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& layer : net.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < layer.weights.rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < layer.weights.cols; ++c)
        row.push_back(to_hex_literal(layer.weights(r, c)));
      rows.push_back(std::move(row));
    }
    nlohmann::json bias = nlohmann::json::array();
    for (double b : layer.bias) bias.push_back(to_hex_literal(b));
    layers.push_back(nlohmann::json{{"weights", std::move(rows)}, {"bias", std::move(bias)}});
  }
  doc["layers"] = std::move(layers);
  doc["metadata"] = net.metadata;
  return doc.dump(2) + "\n";
}

inline ReluNetwork deserialize(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("document is not well-formed at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
  try {
    if (!doc.is_object()) throw parse_error("document root is not an object");
    if (!doc.contains("format_version")) throw parse_error("missing format_version");
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion)
      throw version_error("document format_version " + std::to_string(version) +
                          " is not supported (this build reads version " +
                          std::to_string(kFormatVersion) + ")");
    ReluNetwork net;
    net.input_dim = doc.at("input_dim").get<std::size_t>();
    const nlohmann::json& layers = doc.at("layers");
    if (!layers.is_array() || layers.empty()) throw parse_error("layers must be a non-empty array");
    for (const nlohmann::json& jl : layers) {
      const nlohmann::json& rows = jl.at("weights");
      const nlohmann::json& bias = jl.at("bias");
      if (!rows.is_array() || rows.empty()) throw parse_error("layer weights must be non-empty");
      Layer layer;
      layer.weights = Matrix(rows.size(), rows.front().size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != layer.weights.cols)
          throw parse_error("ragged weight rows in layer");
        for (std::size_t c = 0; c < layer.weights.cols; ++c)
          layer.weights(r, c) = detail::json_real(rows[r][c]);
      }
      for (const nlohmann::json& b : bias) layer.bias.push_back(detail::json_real(b));
      net.layers.push_back(std::move(layer));
    }
    if (doc.contains("metadata"))
      net.metadata = doc.at("metadata").get<std::map<std::string, std::string>>();
    try {
      validate(net);
    } catch (const shape_error& e) {
      throw parse_error(std::string("document declares inconsistent shapes: ") + e.what());
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("document structure error: ") + e.what());
  }
}

}  // namespace relu_forge
