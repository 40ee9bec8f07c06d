// Copyright 2026 The kerrgate Authors
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

#ifndef KERRGATE_TOOLS_CLI_HPP
#define KERRGATE_TOOLS_CLI_HPP

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "kerrgate/states.hpp"

namespace kerrgate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;

/// Relative --out/--summary paths are resolved against this directory when set.
inline constexpr const char* kOutputDirEnv = "KERRGATE_OUTPUT_DIR";

/// "4" or "4,0.5" (real, imaginary).
std::complex<double> parse_complex(const std::string& text);

/// Preset name (uniform, even, odd, HH, HV, VH, VV) or 4 real / 8 real-imag
/// comma separated amplitudes in the order HH, HV, VH, VV.
PolarizationState parse_input_state(const std::string& text);

/// Runs the command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kerrgate::cli

#endif  // KERRGATE_TOOLS_CLI_HPP
