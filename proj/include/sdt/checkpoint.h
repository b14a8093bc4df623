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

#ifndef SDT_CHECKPOINT_H_
#define SDT_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "sdt/tagger.h"

namespace sdt {

// "SDTM" container:
//   magic, u32 version, str config JSON, str label set JSON,
//   u32 tensor count, then per tensor: str name, u32 rank, rank x u64 dims,
//   prod(dims) f64 values.
// Little-endian throughout; str is a u32 byte length plus bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string SerializeModel(const TaggerModel& model);
TaggerModel DeserializeModel(const std::string& bytes, const std::string& source = "<memory>");
void SaveModel(const TaggerModel& model, const std::filesystem::path& path);
TaggerModel LoadModel(const std::filesystem::path& path);

nlohmann::json LabelSetToJson(const LabelSet& label_set);
LabelSet LabelSetFromJson(const nlohmann::json& j);

}  // namespace sdt

#endif  // SDT_CHECKPOINT_H_
