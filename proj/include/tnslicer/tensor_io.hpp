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

// Input tensors on disk: a JSON manifest
//
//   {"format": "tn-slicer/v1",
//    "tensors": [{"vertex": 0, "indices": ["a", "b"], "file": "t0.bin"}, ...]}
//
// and one raw file per vertex holding little-endian (re, im) double pairs in
// row-major order of "indices". Relative file names resolve against the
// manifest's directory.

#ifndef TNSLICER_TENSOR_IO_HPP_
#define TNSLICER_TENSOR_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnslicer/exec.hpp"
#include "tnslicer/network.hpp"
#include "tnslicer/tensor.hpp"

namespace tnslicer {

static_assert(std::endian::native == std::endian::little,
              "tensor files are read by reinterpretation on little-endian hosts only");

inline std::vector<DenseTensor> read_tensor_manifest(const TensorNetwork& net,
                                                     const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ValidationError("cannot open tensor manifest '" + manifest.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto doc = detail::parse_json(text, "tensor manifest");
  detail::check_format(doc);
  const auto& list = detail::require(doc, "tensors", "tensor manifest");
  if (!list.is_array()) throw ValidationError("field 'tensors': expected array");
  std::vector<DenseTensor> out(net.num_vertices());
  std::vector<bool> seen(net.num_vertices(), false);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "tensors[" + std::to_string(i) + "]";
    const auto& v = detail::require(list[i], "vertex", where);
    const auto& idx = detail::require(list[i], "indices", where);
    const auto& file = detail::require(list[i], "file", where);
    if (!v.is_number_integer() || v.get<long>() < 0 ||
        v.get<long>() >= static_cast<long>(net.num_vertices()))
      throw ValidationError(where + ".vertex: expected a vertex id");
    if (!idx.is_array() || !file.is_string())
      throw ValidationError(where + ": expected 'indices' array and 'file' string");
    const auto vid = v.get<std::size_t>();
    if (seen[vid]) throw ValidationError(where + ": vertex listed twice");
    seen[vid] = true;
    DenseTensor t;
    for (const auto& name : idx) {
      if (!name.is_string()) throw ValidationError(where + ".indices: expected strings");
      const EdgeId e = net.at(name.get<std::string>());
      t.order.push_back(e);
      t.log2_extents.push_back(net.weight(e));
    }
    auto path = std::filesystem::path(file.get<std::string>());
    if (path.is_relative()) path = manifest.parent_path() / path;
    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw ValidationError(where + ": cannot open '" + path.string() + "'");
    const std::vector<char> raw((std::istreambuf_iterator<char>(bin)),
                                std::istreambuf_iterator<char>());
    t.data.resize(t.size());
    if (raw.size() != t.data.size() * sizeof(Scalar))
      throw ValidationError(where + ": expected " + std::to_string(t.data.size() * sizeof(Scalar)) +
                            " bytes in '" + path.string() + "', found " +
                            std::to_string(raw.size()));
    std::memcpy(t.data.data(), raw.data(), raw.size());
    out[vid] = std::move(t);
  }
  for (std::size_t v = 0; v < seen.size(); ++v)
    if (!seen[v]) throw ValidationError("tensor manifest: no tensor for vertex " + std::to_string(v));
  check_inputs(net, out);
  return out;
}

/// Writes `inputs` as t<vertex>.bin files next to the manifest.
inline void write_tensor_manifest(const TensorNetwork& net, const std::vector<DenseTensor>& inputs,
                                  const std::filesystem::path& manifest) {
  check_inputs(net, inputs);
  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  auto list = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < inputs.size(); ++v) {
    const std::string name = "t" + std::to_string(v) + ".bin";
    std::ofstream bin(manifest.parent_path() / name, std::ios::binary);
    bin.write(reinterpret_cast<const char*>(inputs[v].data.data()),
              static_cast<std::streamsize>(inputs[v].data.size() * sizeof(Scalar)));
    if (!bin) throw ValidationError("cannot write '" + name + "'");
    auto idx = nlohmann::ordered_json::array();
    for (EdgeId e : inputs[v].order) idx.push_back(net.label(e));
    list.push_back({{"vertex", v}, {"indices", idx}, {"file", name}});
  }
  doc["tensors"] = std::move(list);
  std::ofstream out(manifest);
  out << doc.dump(2) << "\n";
  if (!out) throw ValidationError("cannot write '" + manifest.string() + "'");
}

}  // namespace tnslicer

#endif  // TNSLICER_TENSOR_IO_HPP_
