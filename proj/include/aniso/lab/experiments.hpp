/*
   Copyright 2026 The aniso-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <iosfwd>

#include "aniso/lab/config.hpp"
#include "aniso/lab/output.hpp"

namespace aniso::lab {

struct RunResult {
  RunManifest manifest;
  // 0: finished and every check passed; 1: a check failed; 3: the run
  // aborted (manifest marked partial).
  int exit_code = 0;
};

/// Runs the configured experiment into config.output_dir and writes
/// manifest.json there. Check lines and progress notes go to `log`.
/// Throws std::runtime_error only when the output directory is unusable.
RunResult run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace aniso::lab
