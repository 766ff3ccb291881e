// Copyright 2026 The slamkit Authors. All Rights Reserved.
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

#pragma once

#include <ostream>

namespace slamkit::cli {

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "SLAMKIT_OUT";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;

// Entry point of the `slamkit` tool. Progress goes to `out`; failures are a
// single "slamkit: error: kind=<kind> message=<text>" line on `err`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace slamkit::cli
