// Copyright 2026 The qflag Authors
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

#include <array>
#include <string_view>

namespace qflag {

#ifdef QFLAG_VERSION
inline constexpr std::string_view kVersion = QFLAG_VERSION;
#else
inline constexpr std::string_view kVersion = "0.1.0";
#endif

/// Library modules; all share the package version.
inline constexpr std::array<std::string_view, 10> kModules{
    "quantum-core", "circuit-ir", "qasm-io",  "code513",  "flag-protocol",
    "noise-device", "tomography", "channel-fit", "transpile", "cli"};

}  // namespace qflag
