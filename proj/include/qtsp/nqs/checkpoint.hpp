#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtsp/errors.hpp"
#include "qtsp/nqs/cnn.hpp"
#include "qtsp/nqs/rbm.hpp"

namespace qtsp::nqs {

using NetworkParams = std::variant<RbmParams, CnnParams>;

// {"kind": "rbm"|"cnn", "shape": {...}, "values": [[re, im], ...]}
// nlohmann/json writes doubles in shortest round-trip form, so a save/load
// cycle reproduces every parameter bit for bit.
inline nlohmann::json params_to_json(const NetworkParams& params) {
  nlohmann::json j;
  std::vector<cd> values;
  if (const auto* rbm = std::get_if<RbmParams>(&params)) {
    j["kind"] = "rbm";
    j["shape"] = {{"n_visible", rbm->n_visible()}, {"n_hidden", rbm->n_hidden()}};
    values = rbm->to_complex();
  } else {
    const auto& cnn = std::get<CnnParams>(params);
    j["kind"] = "cnn";
    j["shape"] = {{"kernel_size", cnn.kernel_size}, {"n_channels", cnn.n_channels}};
    values = cnn.to_complex();
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : values) arr.push_back({v.real(), v.imag()});
  j["values"] = std::move(arr);
  return j;
}

inline NetworkParams params_from_json(const nlohmann::json& j) {
  try {
    std::vector<cd> values;
    for (const auto& pair : j.at("values")) values.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    const auto kind = j.at("kind").get<std::string>();
    const auto& shape = j.at("shape");
    if (kind == "rbm") {
      RbmParams p(shape.at("n_visible").get<Eigen::Index>(), shape.at("n_hidden").get<Eigen::Index>());
      p.from_complex(values);
      return p;
    }
    if (kind == "cnn") {
      CnnParams p(shape.at("kernel_size").get<std::size_t>(), shape.at("n_channels").get<std::size_t>());
      p.from_complex(values);
      return p;
    }
    throw InvalidConfig("unknown network kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("malformed parameter checkpoint: ") + e.what());
  }
}

inline void save_params(const NetworkParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << params_to_json(params).dump() << '\n';
}

inline NetworkParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("cannot parse " + path + ": " + e.what());
  }
  return params_from_json(j);
}

}  // namespace qtsp::nqs
