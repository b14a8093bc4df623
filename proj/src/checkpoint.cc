// Copyright 2026 The sdtag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdt/checkpoint.h"

#include <fstream>
#include <sstream>

#include "sdt/binary_io.h"
#include "sdt/error.h"

namespace sdt {

using json = nlohmann::json;
using binary::ExpectMagic;
using binary::Read;
using binary::ReadString;
using binary::Write;
using binary::WriteString;

json LabelSetToJson(const LabelSet& label_set) {
  return json{{"name", label_set.name()},
              {"labels", label_set.labels()},
              {"none_label", label_set.none_label()}};
}

LabelSet LabelSetFromJson(const json& j) {
  try {
    return LabelSet(j.at("name").get<std::string>(),
                    j.at("labels").get<std::vector<std::string>>(),
                    j.at("none_label").get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("label set: ") + e.what());
  }
}

std::string SerializeModel(const TaggerModel& model) {
  model.CheckShapes();
  std::ostringstream out(std::ios::binary);
  out.write("SDTM", 4);
  Write<std::uint32_t>(out, kCheckpointVersion);
  WriteString(out, model.config.ToJson().dump());
  WriteString(out, LabelSetToJson(model.label_set).dump());
  const auto params = model.Parameters();
  Write<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    WriteString(out, name);
    Write<std::uint32_t>(out, static_cast<std::uint32_t>(t->rank()));
    for (std::size_t k = 0; k < t->rank(); ++k) Write<std::uint64_t>(out, t->dim(k));
    for (double v : t->values()) Write<double>(out, v);
  }
  return out.str();
}

TaggerModel DeserializeModel(const std::string& bytes, const std::string& source) {
  std::istringstream in(bytes, std::ios::binary);
  ExpectMagic(in, "SDTM", source);
  const auto version = Read<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw ValidationError(source + ": unsupported checkpoint version " + std::to_string(version));
  }
  TaggerModel model;
  try {
    model.config = TaggerConfig::FromJson(json::parse(ReadString(in, "config")));
    model.label_set = LabelSetFromJson(json::parse(ReadString(in, "label set")));
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  auto params = model.Parameters();
  const auto count = Read<std::uint32_t>(in, "tensor count");
  if (count != params.size()) {
    throw ValidationError(source + ": expected " + std::to_string(params.size()) +
                          " tensors, found " + std::to_string(count));
  }
  for (auto& [name, t] : params) {
    const std::string got = ReadString(in, "tensor name", 1024);
    if (got != name) throw ValidationError(source + ": expected tensor " + name + ", found " + got);
    const auto rank = Read<std::uint32_t>(in, "rank");
    if (rank == 0 || rank > 3) throw ValidationError(source + ": bad rank for " + name);
    Shape shape(rank);
    std::uint64_t total = 1;
    for (auto& dim : shape) {
      dim = static_cast<std::size_t>(Read<std::uint64_t>(in, "dim"));
      total *= dim;
    }
    if (total > bytes.size() / 8) throw ValidationError(source + ": implausible shape for " + name);
    Tensor value(shape);
    for (double& v : value.values()) v = Read<double>(in, "tensor values");
    *t = std::move(value);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ValidationError(source + ": trailing bytes after last tensor");
  }
  model.CheckShapes();
  return model;
}

void SaveModel(const TaggerModel& model, const std::filesystem::path& path) {
  const std::string bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

TaggerModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeModel(buf.str(), path.string());
}

}  // namespace sdt
