// Copyright 2026 The PolicyScope Authors
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

#include <filesystem>
#include <vector>

namespace policyscope {

// Reads every run_<rep>.csv in `dir` and writes SVG plots next to them:
// convergence.svg (median best-so-far with the interquartile band) and, for
// each run that carries weights, weights_run_<rep>.svg (stacked weights per
// iteration). Returns the written paths. Throws FileError naming the path
// when the directory holds no run CSV or one cannot be parsed.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir);

}  // namespace policyscope
