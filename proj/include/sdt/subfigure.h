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

#ifndef SDT_SUBFIGURE_H_
#define SDT_SUBFIGURE_H_

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sdt {

// A figure panel reference such as "1A", or a whole figure such as "3".
struct SubfigureCode {
  int figure = 0;
  char panel = '\0';  // uppercase letter, or '\0' for figure-only codes

  std::string ToString() const;
  // Parses the canonical form (case-insensitive panel); nullopt if invalid.
  static std::optional<SubfigureCode> Parse(std::string_view text);

  auto operator<=>(const SubfigureCode&) const = default;
};

using CodeSet = std::set<SubfigureCode>;

// Per-clause semantic references and explicit surface mentions.
struct FragmentAnnotation {
  std::vector<CodeSet> referred;
  std::vector<CodeSet> mentioned;

  bool operator==(const FragmentAnnotation&) const = default;
};

std::vector<std::string> CodeStrings(const CodeSet& codes);

}  // namespace sdt

#endif  // SDT_SUBFIGURE_H_
