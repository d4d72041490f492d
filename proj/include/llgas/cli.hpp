// Copyright 2026 The llgas Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace llgas {

/// Exit status: 0 when every requested check passes, 1 on a failed check or a
/// runtime error, 2 on a usage error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal that always shows a decimal point ("0.0", "1.5").
std::string format_number(double v);

}  // namespace llgas
