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

// aniso-lab: run experiment configs and the built-in checks.
//
// Exit codes: 0 success, 1 a check failed, 2 bad config or arguments,
// 3 the run aborted (partial outputs and manifest are still written).

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "aniso/errors.hpp"
#include "aniso/lab/checks.hpp"
#include "aniso/lab/config.hpp"
#include "aniso/lab/experiments.hpp"

namespace {

int run_command(const std::string& path, const std::optional<std::string>& out_dir,
                const std::optional<std::uint64_t>& seed, bool svg) {
  aniso::lab::ExperimentConfig config;
  try {
    config = aniso::lab::load_config(path);
  } catch (const aniso::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (out_dir) config.output_dir = *out_dir;
  if (seed) config.seed = *seed;
  if (svg) config.emit_svg = true;

  try {
    const aniso::lab::RunResult r = aniso::lab::run_experiment(config, std::cout);
    std::cout << "outputs in " << config.output_dir << '\n';
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "aniso-lab: " << e.what() << '\n';
    return 3;
  }
}

int check_command() {
  bool all_pass = true;
  for (const aniso::lab::CheckResult& c : aniso::lab::full_check_suite(1)) {
    std::cout << aniso::lab::check_line(c) << '\n';
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient dynamics with anisotropic noise"};
  app.set_version_flag("--version", std::string("aniso-lab ") + ANISO_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool svg = false;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  CLI::Option* out_opt = run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "Master seed (overrides seed)");
  run->add_flag("--svg", svg, "Also write SVG figures");

  CLI::App* check = app.add_subcommand("check", "Run the built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : 2;
  }

  try {
    if (*run) {
      std::optional<std::string> out;
      if (*out_opt) out = out_dir;
      std::optional<std::uint64_t> s;
      if (*seed_opt) s = seed;
      return run_command(config_path, out, s, svg);
    }
    if (*check) return check_command();
  } catch (const std::exception& e) {
    std::cerr << "aniso-lab: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
