// Copyright 2026 The tn-slicer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TNSLICER_NETWORK_HPP_
#define TNSLICER_NETWORK_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tnslicer/common.hpp"

namespace tnslicer {

struct EdgeSpec {
  std::string label;
  int log2_weight = 1;
};

struct VertexSpec {
  int id = 0;
  std::vector<std::string> indices;
};

struct Edge {
  std::string label;
  int log2_weight = 1;
  std::vector<int> endpoints;  // vertex ids, ascending

  bool open() const { return endpoints.size() == 1; }
};

struct Vertex {
  int id = 0;
  std::vector<EdgeId> order;  // as declared
  IndexSet indices;           // sorted
};

/// Undirected simple multigraph of tensors (vertices) and indices (edges).
/// Immutable once built; every constructor path goes through validation.
class TensorNetwork {
 public:
  TensorNetwork() = default;

  static TensorNetwork create(std::vector<EdgeSpec> edges, std::vector<VertexSpec> vertices) {
    if (vertices.empty()) throw ValidationError("empty network");
    TensorNetwork net;
    std::sort(edges.begin(), edges.end(),
              [](const EdgeSpec& a, const EdgeSpec& b) { return a.label < b.label; });
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].label.empty()) throw ValidationError("edge with empty id");
      if (i > 0 && edges[i].label == edges[i - 1].label)
        throw ValidationError("duplicate index id '" + edges[i].label + "'");
      if (edges[i].log2_weight < 1)
        throw ValidationError("edge '" + edges[i].label + "' has log2_weight < 1");
      net.lookup_.emplace(edges[i].label, static_cast<EdgeId>(i));
      net.edges_.push_back(Edge{edges[i].label, edges[i].log2_weight, {}});
    }

    std::sort(vertices.begin(), vertices.end(),
              [](const VertexSpec& a, const VertexSpec& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i].id != static_cast<int>(i))
        throw ValidationError("vertex ids must be exactly 0.." +
                              std::to_string(vertices.size() - 1) + " (found " +
                              std::to_string(vertices[i].id) + ")");
      Vertex v;
      v.id = vertices[i].id;
      for (const auto& label : vertices[i].indices) {
        const auto it = net.lookup_.find(label);
        if (it == net.lookup_.end())
          throw ValidationError("vertex " + std::to_string(v.id) + " references unknown index '" +
                                label + "'");
        v.order.push_back(it->second);
      }
      v.indices = v.order;
      std::sort(v.indices.begin(), v.indices.end());
      if (std::adjacent_find(v.indices.begin(), v.indices.end()) != v.indices.end())
        throw ValidationError("vertex " + std::to_string(v.id) + " lists an index twice");
      for (EdgeId e : v.indices) net.edges_[e].endpoints.push_back(v.id);
      net.vertices_.push_back(std::move(v));
    }

    for (const auto& e : net.edges_) {
      if (e.endpoints.empty())
        throw ValidationError("edge '" + e.label + "' has 0 endpoints");
      if (e.endpoints.size() > 2)
        throw ValidationError("edge '" + e.label + "' has " + std::to_string(e.endpoints.size()) +
                              " endpoints (hyperedges are not supported)");
    }
    return net;
  }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_vertices() const { return vertices_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::string& label(EdgeId e) const { return edges_.at(e).label; }
  int weight(EdgeId e) const { return edges_.at(e).log2_weight; }

  std::optional<EdgeId> find(std::string_view label) const {
    const auto it = lookup_.find(std::string(label));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  EdgeId at(std::string_view label) const {
    if (auto e = find(label)) return *e;
    throw ValidationError("unknown index '" + std::string(label) + "'");
  }

  /// Σ log2_weight over the set.
  int rank(const IndexSet& s) const {
    int r = 0;
    for (EdgeId e : s) r += edges_[e].log2_weight;
    return r;
  }

  bool unit_weights() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.log2_weight == 1; });
  }

  IndexSet open_edges() const {
    IndexSet out;
    for (EdgeId e = 0; e < edges_.size(); ++e)
      if (edges_[e].open()) out.push_back(e);
    return out;
  }

  std::vector<std::string> labels(const IndexSet& s) const {
    std::vector<std::string> out;
    out.reserve(s.size());
    for (EdgeId e : s) out.push_back(edges_.at(e).label);
    return out;
  }

  IndexSet ids(const std::vector<std::string>& labels) const {
    IndexSet out;
    for (const auto& l : labels) out.push_back(at(l));
    return sets::normalized(std::move(out));
  }

  /// Connected components over closed edges; returns component id per vertex.
  std::vector<int> components() const {
    std::vector<int> comp(vertices_.size(), -1);
    int next = 0;
    for (std::size_t start = 0; start < vertices_.size(); ++start) {
      if (comp[start] >= 0) continue;
      std::vector<int> stack{static_cast<int>(start)};
      comp[start] = next;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (EdgeId e : vertices_[v].indices)
          for (int w : edges_[e].endpoints)
            if (comp[w] < 0) {
              comp[w] = next;
              stack.push_back(w);
            }
      }
      ++next;
    }
    return comp;
  }

  bool connected() const {
    const auto comp = components();
    return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
  }

 private:
  std::vector<Edge> edges_;
  std::vector<Vertex> vertices_;
  std::map<std::string, EdgeId> lookup_;
};

/// Pairwise contraction order. SSA numbering: leaves are 0..n-1, the result
/// of step k gets id n + k.
struct ContractionPath {
  std::vector<std::pair<int, int>> steps;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                     const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline void check_format(const nlohmann::json& doc) {
  if (doc.contains("format")) {
    if (!doc["format"].is_string() || doc["format"].get<std::string>() != kFormatTag)
      throw ValidationError("field 'format': expected \"" + std::string(kFormatTag) + "\"");
  }
}

inline nlohmann::json parse_json(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

}  // namespace detail

inline TensorNetwork network_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("network: document must be an object");
  detail::check_format(doc);
  const auto& edges = detail::require(doc, "edges", "network");
  const auto& vertices = detail::require(doc, "vertices", "network");
  if (!edges.is_array()) throw ValidationError("field 'edges': expected array");
  if (!vertices.is_array()) throw ValidationError("field 'vertices': expected array");

  std::vector<EdgeSpec> es;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const auto& id = detail::require(edges[i], "id", where);
    if (!id.is_string()) throw ValidationError(where + ".id: expected string");
    EdgeSpec spec{id.get<std::string>(), 1};
    if (edges[i].contains("log2_weight")) {
      const auto& w = edges[i]["log2_weight"];
      if (!w.is_number_integer()) throw ValidationError(where + ".log2_weight: expected integer");
      spec.log2_weight = w.get<int>();
    }
    es.push_back(std::move(spec));
  }

  std::vector<VertexSpec> vs;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    const auto& id = detail::require(vertices[i], "id", where);
    const auto& idx = detail::require(vertices[i], "indices", where);
    if (!id.is_number_integer()) throw ValidationError(where + ".id: expected integer");
    if (!idx.is_array()) throw ValidationError(where + ".indices: expected array");
    VertexSpec spec{id.get<int>(), {}};
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!idx[k].is_string())
        throw ValidationError(where + ".indices[" + std::to_string(k) + "]: expected string");
      spec.indices.push_back(idx[k].get<std::string>());
    }
    vs.push_back(std::move(spec));
  }
  return TensorNetwork::create(std::move(es), std::move(vs));
}

/// Parses the network JSON document.
inline TensorNetwork parse_network(std::string_view text) {
  return network_from_json(detail::parse_json(text, "network"));
}

inline nlohmann::ordered_json network_to_json(const TensorNetwork& net) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : net.edges())
    edges.push_back({{"id", e.label}, {"log2_weight", e.log2_weight}});
  auto vertices = nlohmann::ordered_json::array();
  for (const auto& v : net.vertices()) {
    auto idx = nlohmann::ordered_json::array();
    for (EdgeId e : v.order) idx.push_back(net.label(e));
    vertices.push_back({{"id", v.id}, {"indices", idx}});
  }
  doc["edges"] = std::move(edges);
  doc["vertices"] = std::move(vertices);
  return doc;
}

inline std::string serialize_network(const TensorNetwork& net) {
  return network_to_json(net).dump(2);
}

inline ContractionPath parse_path(std::string_view text) {
  const auto doc = detail::parse_json(text, "path");
  if (!doc.is_object()) throw ValidationError("path: document must be an object");
  detail::check_format(doc);
  const auto& steps = detail::require(doc, "ssa_path", "path");
  if (!steps.is_array()) throw ValidationError("field 'ssa_path': expected array");
  ContractionPath path;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      throw ValidationError("ssa_path[" + std::to_string(i) + "]: expected [int, int]");
    path.steps.emplace_back(s[0].get<int>(), s[1].get<int>());
  }
  return path;
}

inline std::string serialize_path(const ContractionPath& path) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  auto steps = nlohmann::ordered_json::array();
  for (auto [a, b] : path.steps) steps.push_back({a, b});
  doc["ssa_path"] = std::move(steps);
  return doc.dump();
}

}  // namespace tnslicer

#endif  // TNSLICER_NETWORK_HPP_
