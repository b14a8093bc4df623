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

#ifndef SDT_CLI_H_
#define SDT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace sdt {

// Runs the sdtag command line. `args` excludes the program name. Returns
// the process exit status: 0 success, 2 I/O, 3 validation, 4 internal.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64 digest of a file, as 16 hex digits; recorded in run manifests.
std::string FileDigest(const std::string& path);

}  // namespace sdt

#endif  // SDT_CLI_H_
