#include "nashq/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "nashq/io_util.hpp"

namespace nashq {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "nashq-checkpoint-v1";

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

json vector_to_json(const Eigen::VectorXd& v) {
  json data = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v(i));
  return json{{"shape", {v.size()}}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
  const auto& shape = j.at("shape");
  const auto& data = j.at("data");
  if (shape.size() != 2) throw std::runtime_error("checkpoint: " + name + " is not 2-d");
  const auto rows = shape[0].get<Eigen::Index>();
  const auto cols = shape[1].get<Eigen::Index>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("checkpoint: " + name + " data length does not match shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& name) {
  const auto& shape = j.at("shape");
  const auto& data = j.at("data");
  if (shape.size() != 1 || shape[0].get<std::size_t>() != data.size()) {
    throw std::runtime_error("checkpoint: " + name + " has inconsistent 1-d shape");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) v(i) = data[i].get<double>();
  return v;
}

void put_network(json& tensors, json& steps, const std::string& net,
                 const neural::NetworkParams& p) {
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const std::string base = net + ".layer" + std::to_string(l);
    tensors[base + ".weight"] = matrix_to_json(p.layers[l].weight);
    tensors[base + ".bias"] = vector_to_json(p.layers[l].bias);
    tensors[base + ".weight.adam_m"] = matrix_to_json(p.adam_m[l].weight);
    tensors[base + ".bias.adam_m"] = vector_to_json(p.adam_m[l].bias);
    tensors[base + ".weight.adam_v"] = matrix_to_json(p.adam_v[l].weight);
    tensors[base + ".bias.adam_v"] = vector_to_json(p.adam_v[l].bias);
  }
  steps[net] = p.step_count;
}

neural::NetworkParams get_network(const json& tensors, const json& steps,
                                  const std::string& net) {
  neural::NetworkParams p;
  for (std::size_t l = 0;; ++l) {
    const std::string base = net + ".layer" + std::to_string(l);
    if (!tensors.contains(base + ".weight")) break;
    auto load = [&](const std::string& suffix) {
      const std::string w = base + ".weight" + suffix;
      const std::string b = base + ".bias" + suffix;
      if (!tensors.contains(b)) throw std::runtime_error("checkpoint: missing " + b);
      neural::DenseLayer layer{matrix_from_json(tensors.at(w), w),
                               vector_from_json(tensors.at(b), b)};
      if (layer.bias.size() != layer.weight.rows()) {
        throw std::runtime_error("checkpoint: bias/weight mismatch in " + base);
      }
      return layer;
    };
    p.layers.push_back(load(""));
    p.adam_m.push_back(load(".adam_m"));
    p.adam_v.push_back(load(".adam_v"));
  }
  if (p.layers.empty()) throw std::runtime_error("checkpoint: no layers for " + net);
  for (std::size_t l = 1; l < p.layers.size(); ++l) {
    if (p.layers[l].weight.cols() != p.layers[l - 1].weight.rows()) {
      throw std::runtime_error("checkpoint: layer shapes of " + net + " do not chain");
    }
  }
  p.step_count = steps.at(net).get<std::int64_t>();
  return p;
}

}  // namespace

std::string serialize_checkpoint(const ModelSet& models) {
  json tensors = json::object();
  json steps = json::object();
  put_network(tensors, steps, "policy_blue", models.policy_blue);
  put_network(tensors, steps, "policy_red", models.policy_red);
  put_network(tensors, steps, "critic", models.critic);
  const json doc{{"format", kFormat}, {"step_count", steps}, {"tensors", tensors}};
  return doc.dump() + "\n";
}

ModelSet parse_checkpoint(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("checkpoint: parse error: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw std::runtime_error("checkpoint: unsupported format tag");
    }
    const auto& tensors = doc.at("tensors");
    const auto& steps = doc.at("step_count");
    return ModelSet{get_network(tensors, steps, "policy_blue"),
                    get_network(tensors, steps, "policy_red"),
                    get_network(tensors, steps, "critic")};
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: malformed document: ") + e.what());
  }
}

void write_checkpoint(const std::filesystem::path& path, const ModelSet& models) {
  write_file_atomic(path, serialize_checkpoint(models));
}

ModelSet read_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace nashq
