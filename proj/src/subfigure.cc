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

#include "sdt/subfigure.h"

#include <cctype>
#include <charconv>

namespace sdt {

std::string SubfigureCode::ToString() const {
  std::string out = std::to_string(figure);
  if (panel != '\0') out.push_back(panel);
  return out;
}

std::optional<SubfigureCode> SubfigureCode::Parse(std::string_view text) {
  int figure = 0;
  const auto [end, ec] =
      std::from_chars(text.data(), text.data() + text.size(), figure);
  if (ec != std::errc() || end == text.data() || figure <= 0) return std::nullopt;
  const std::string_view rest(end, static_cast<std::size_t>(text.data() + text.size() - end));
  if (rest.empty()) return SubfigureCode{figure, '\0'};
  if (rest.size() == 1 && std::isalpha(static_cast<unsigned char>(rest[0]))) {
    return SubfigureCode{
        figure, static_cast<char>(std::toupper(static_cast<unsigned char>(rest[0])))};
  }
  return std::nullopt;
}

std::vector<std::string> CodeStrings(const CodeSet& codes) {
  std::vector<std::string> out;
  out.reserve(codes.size());
  for (const SubfigureCode& c : codes) out.push_back(c.ToString());
  return out;
}

}  // namespace sdt
