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

#include "aniso/lab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "aniso/errors.hpp"
#include "json.hpp"

namespace aniso::lab {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ExperimentName {
  ExperimentKind kind;
  std::string_view name;
};

constexpr ExperimentName kExperiments[] = {
    {ExperimentKind::ou_validate, "ou_validate"},
    {ExperimentKind::toy2d_escape, "toy2d_escape"},
    {ExperimentKind::prop_check, "prop_check"},
    {ExperimentKind::nn_escape, "nn_escape"},
    {ExperimentKind::indicator_trace, "indicator_trace"},
};

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads the keys of one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(join(path_, key), "expected a number");
      out = v->get<double>();
    }
  }

  void read(const char* key, long& out) {
    if (const json* v = find(key)) out = as_integer(*v, join(path_, key));
  }

  void read(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(join(path_, key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void read(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(join(path_, key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      const std::string p = join(path_, key);
      if (!v->is_array()) fail(p, "expected an array of numbers");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_number()) fail(p, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void read(const char* key, std::vector<long>& out) {
    if (const json* v = find(key)) {
      const std::string p = join(path_, key);
      if (!v->is_array()) fail(p, "expected an array of integers");
      out.clear();
      for (const json& e : *v) out.push_back(as_integer(e, p));
    }
  }

  void read(const char* key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      const std::string p = join(path_, key);
      if (!v->is_array()) fail(p, "expected an array of strings");
      out.clear();
      for (const json& e : *v) {
        if (!e.is_string()) fail(p, "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  void read(const char* key, std::array<double, 2>& out) {
    if (const json* v = find(key)) {
      const std::string p = join(path_, key);
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        fail(p, "expected an array of two numbers");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  void read(const char* key, Normalization& out) {
    std::string name;
    if (find(key) == nullptr) return;
    read(key, name);
    try {
      out = parse_normalization(name);
    } catch (const std::invalid_argument& e) {
      fail(join(path_, key), e.what());
    }
  }

  void read(const char* key, ToyDataCovariance& out) {
    std::string name;
    if (find(key) == nullptr) return;
    read(key, name);
    if (name == "quadric_inverse") {
      out = ToyDataCovariance::quadric_inverse;
    } else if (name == "identity") {
      out = ToyDataCovariance::identity;
    } else {
      fail(join(path_, key), "unknown data covariance '" + name + "' (valid: quadric_inverse, identity)");
    }
  }

  // Optional nested object; returns nullptr when absent.
  const json* child(const char* key) {
    const json* v = find(key);
    return v;
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (seen_.count(it.key()) == 0) fail(join(path_, it.key()), "unknown key");
    }
  }

 private:
  static long as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long>();
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) fail(path, msg);
}

void check_dynamics(const std::vector<std::string>& names, const std::string& path) {
  require(!names.empty(), path, "needs at least one dynamics");
  for (const std::string& n : names) {
    if (n == kGradientDescent) continue;
    try {
      parse_noise_kind(n);
    } catch (const std::invalid_argument&) {
      fail(path, "unknown dynamics '" + n + "' (valid: " + valid_dynamics_list() + ")");
    }
  }
}

void parse_ou(const json& obj, OuSection& s) {
  Section r(obj, "ou");
  r.read("dim", s.dim);
  r.read("pairs", s.pairs);
  r.read("paths", s.paths);
  r.read("dt_scale", s.dt_scale);
  r.read("time_scales", s.time_scales);
  r.read("max_z", s.max_z);
  r.read("small_t_tolerance", s.small_t_tolerance);
  r.finish();
  require(s.dim >= 1, "ou.dim", "must be >= 1");
  require(s.pairs >= 1, "ou.pairs", "must be >= 1");
  require(s.paths >= 2, "ou.paths", "must be >= 2");
  require(s.dt_scale > 0.0 && s.dt_scale < 2.0, "ou.dt_scale", "must lie in (0, 2)");
  require(!s.time_scales.empty(), "ou.time_scales", "needs at least one time");
  for (double t : s.time_scales) require(t >= 0.0, "ou.time_scales", "times must be >= 0");
  require(s.max_z > 0.0, "ou.max_z", "must be > 0");
  require(s.small_t_tolerance > 0.0, "ou.small_t_tolerance", "must be > 0");
}

void parse_toy2d(const json& obj, Toy2dSection& s) {
  Section r(obj, "toy2d");
  r.read("n_points", s.n_points);
  r.read("data_seed", s.data_seed);
  r.read("data_covariance", s.data_covariance);
  r.read("start", s.start);
  r.read("basin_radius", s.basin_radius);
  r.read("trials", s.trials);
  r.read("eta", s.eta);
  r.read("iterations", s.iterations);
  r.read("record_every", s.record_every);
  r.read("target_norm", s.target_norm);
  r.read("normalization", s.normalization);
  r.read("batch_size", s.batch_size);
  r.read("k", s.k);
  r.read("refresh", s.refresh);
  r.read("dynamics", s.dynamics);
  r.read("check_ordering", s.check_ordering);
  r.read("ordering_margin", s.ordering_margin);
  r.finish();
  require(s.n_points >= 1, "toy2d.n_points", "must be >= 1");
  require(s.basin_radius > 0.0, "toy2d.basin_radius", "must be > 0");
  require(s.trials >= 1, "toy2d.trials", "must be >= 1");
  require(s.eta > 0.0, "toy2d.eta", "must be > 0");
  require(s.iterations >= 1, "toy2d.iterations", "must be >= 1");
  require(s.record_every >= 0, "toy2d.record_every", "must be >= 0");
  require(s.target_norm >= 0.0, "toy2d.target_norm", "must be >= 0");
  require(s.batch_size >= 1, "toy2d.batch_size", "must be >= 1");
  require(s.k >= 1 && s.k <= 2, "toy2d.k", "must be 1 or 2 on the 2-D surface");
  require(s.refresh >= 1, "toy2d.refresh", "must be >= 1");
  check_dynamics(s.dynamics, "toy2d.dynamics");
}

void parse_nn(const json& obj, NnSection& s) {
  Section r(obj, "nn");
  r.read("input_dim", s.input_dim);
  r.read("hidden", s.hidden);
  r.read("n_clean", s.n_clean);
  r.read("n_corrupt", s.n_corrupt);
  r.read("n_test", s.n_test);
  r.read("mu", s.mu);
  r.read("data_seed", s.data_seed);
  r.read("gd_eta", s.gd_eta);
  r.read("gd_iterations", s.gd_iterations);
  r.read("eta", s.eta);
  r.read("batch_size", s.batch_size);
  r.read("sigma", s.sigma);
  r.read("k", s.k);
  r.read("refresh", s.refresh);
  r.read("phase2_iterations", s.phase2_iterations);
  r.read("checkpoint_every", s.checkpoint_every);
  r.read("sharpness_delta", s.sharpness_delta);
  r.read("sharpness_samples", s.sharpness_samples);
  r.read("normalization", s.normalization);
  r.read("dynamics", s.dynamics);
  r.read("run_checks", s.run_checks);
  r.read("a_hat_threshold", s.a_hat_threshold);
  r.read("ratio_threshold", s.ratio_threshold);
  r.read("trapped_accuracy", s.trapped_accuracy);
  r.read("converged_accuracy", s.converged_accuracy);
  r.finish();
  require(s.input_dim >= 1, "nn.input_dim", "must be >= 1");
  require(s.hidden >= 1, "nn.hidden", "must be >= 1");
  require(s.n_clean >= 0 && s.n_corrupt >= 0 && s.n_clean + s.n_corrupt >= 2, "nn.n_clean",
          "need at least two training examples");
  require(s.n_test >= 1, "nn.n_test", "must be >= 1");
  require(s.gd_eta > 0.0, "nn.gd_eta", "must be > 0");
  require(s.gd_iterations >= 1, "nn.gd_iterations", "must be >= 1");
  require(s.eta > 0.0, "nn.eta", "must be > 0");
  require(s.batch_size >= 1, "nn.batch_size", "must be >= 1");
  require(s.sigma >= 0.0, "nn.sigma", "must be >= 0");
  require(s.k >= 1, "nn.k", "must be >= 1");
  require(s.refresh >= 1, "nn.refresh", "must be >= 1");
  require(s.phase2_iterations >= 1, "nn.phase2_iterations", "must be >= 1");
  require(s.checkpoint_every >= 1, "nn.checkpoint_every", "must be >= 1");
  require(s.sharpness_delta >= 0.0, "nn.sharpness_delta", "must be >= 0");
  require(s.sharpness_samples >= 1, "nn.sharpness_samples", "must be >= 1");
  check_dynamics(s.dynamics, "nn.dynamics");
}

void parse_prop(const json& obj, PropCheckSection& s) {
  Section r(obj, "prop_check");
  r.read("nets", s.nets);
  r.read("max_hidden", s.max_hidden);
  r.read("max_input", s.max_input);
  r.read("max_examples", s.max_examples);
  r.read("tolerance", s.tolerance);
  r.read("fisher_tolerance", s.fisher_tolerance);
  r.read("dims", s.dims);
  r.read("tail_exponent", s.tail_exponent);
  r.read("min_slope", s.min_slope);
  r.read("delta", s.delta);
  r.read("covariance_draws", s.covariance_draws);
  r.finish();
  require(s.nets >= 1, "prop_check.nets", "must be >= 1");
  require(s.max_hidden >= 1, "prop_check.max_hidden", "must be >= 1");
  require(s.max_input >= 1, "prop_check.max_input", "must be >= 1");
  require(s.max_examples >= 1, "prop_check.max_examples", "must be >= 1");
  require(s.tolerance >= 0.0, "prop_check.tolerance", "must be >= 0");
  require(s.fisher_tolerance >= 0.0, "prop_check.fisher_tolerance", "must be >= 0");
  require(s.dims.size() >= 2, "prop_check.dims", "needs at least two dimensions");
  for (Index d : s.dims) require(d >= 2, "prop_check.dims", "dimensions must be >= 2");
  require(s.tail_exponent > 0.0, "prop_check.tail_exponent", "must be > 0");
  require(s.delta > 0.0, "prop_check.delta", "must be > 0");
  require(s.covariance_draws >= 1, "prop_check.covariance_draws", "must be >= 1");
}

void parse_trace(const json& obj, IndicatorTraceSection& s) {
  Section r(obj, "indicator_trace");
  r.read("iterations", s.iterations);
  r.read("eta", s.eta);
  r.read("batch_size", s.batch_size);
  r.read("checkpoint_every", s.checkpoint_every);
  r.read("spectrum_count", s.spectrum_count);
  r.finish();
  require(s.iterations >= 1, "indicator_trace.iterations", "must be >= 1");
  require(s.eta > 0.0, "indicator_trace.eta", "must be > 0");
  require(s.batch_size >= 1, "indicator_trace.batch_size", "must be >= 1");
  require(s.checkpoint_every >= 1, "indicator_trace.checkpoint_every", "must be >= 1");
  require(s.spectrum_count >= 1, "indicator_trace.spectrum_count", "must be >= 1");
}

}  // namespace

std::string_view experiment_name(ExperimentKind k) {
  for (const auto& e : kExperiments) {
    if (e.kind == k) return e.name;
  }
  return "unknown";
}

std::string valid_dynamics_list() {
  std::string out(kGradientDescent);
  for (NoiseKind k : all_noise_kinds()) out += ", " + std::string(noise_kind_name(k));
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + source + ": " + e.what());
  }

  ExperimentConfig c;
  Section top(doc, "");
  std::string kind;
  if (top.find("experiment") == nullptr) fail("experiment", "missing (valid: ou_validate, toy2d_escape, prop_check, nn_escape, indicator_trace)");
  top.read("experiment", kind);
  bool known = false;
  for (const auto& e : kExperiments) {
    if (e.name == kind) {
      c.experiment = e.kind;
      known = true;
    }
  }
  if (!known) {
    fail("experiment", "unknown experiment '" + kind +
                           "' (valid: ou_validate, toy2d_escape, prop_check, nn_escape, indicator_trace)");
  }
  top.read("seed", c.seed);
  top.read("output_dir", c.output_dir);
  top.read("emit_svg", c.emit_svg);
  if (const json* s = top.child("ou")) parse_ou(*s, c.ou);
  if (const json* s = top.child("toy2d")) parse_toy2d(*s, c.toy2d);
  if (const json* s = top.child("nn")) parse_nn(*s, c.nn);
  if (const json* s = top.child("prop_check")) parse_prop(*s, c.prop_check);
  if (const json* s = top.child("indicator_trace")) parse_trace(*s, c.indicator_trace);
  top.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = std::string(experiment_name(c.experiment));
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["emit_svg"] = c.emit_svg;

  const OuSection& o = c.ou;
  j["ou"] = {{"dim", o.dim},         {"pairs", o.pairs}, {"paths", o.paths},
             {"dt_scale", o.dt_scale}, {"time_scales", o.time_scales}, {"max_z", o.max_z},
             {"small_t_tolerance", o.small_t_tolerance}};

  const Toy2dSection& t = c.toy2d;
  j["toy2d"] = {
      {"n_points", t.n_points},
      {"data_seed", t.data_seed},
      {"data_covariance", t.data_covariance == ToyDataCovariance::identity ? "identity" : "quadric_inverse"},
      {"start", t.start},
      {"basin_radius", t.basin_radius},
      {"trials", t.trials},
      {"eta", t.eta},
      {"iterations", t.iterations},
      {"record_every", t.record_every},
      {"target_norm", t.target_norm},
      {"normalization", std::string(normalization_name(t.normalization))},
      {"batch_size", t.batch_size},
      {"k", t.k},
      {"refresh", t.refresh},
      {"dynamics", t.dynamics},
      {"check_ordering", t.check_ordering},
      {"ordering_margin", t.ordering_margin}};

  const NnSection& n = c.nn;
  j["nn"] = {{"input_dim", n.input_dim},
             {"hidden", n.hidden},
             {"n_clean", n.n_clean},
             {"n_corrupt", n.n_corrupt},
             {"n_test", n.n_test},
             {"mu", n.mu},
             {"data_seed", n.data_seed},
             {"gd_eta", n.gd_eta},
             {"gd_iterations", n.gd_iterations},
             {"eta", n.eta},
             {"batch_size", n.batch_size},
             {"sigma", n.sigma},
             {"k", n.k},
             {"refresh", n.refresh},
             {"phase2_iterations", n.phase2_iterations},
             {"checkpoint_every", n.checkpoint_every},
             {"sharpness_delta", n.sharpness_delta},
             {"sharpness_samples", n.sharpness_samples},
             {"normalization", std::string(normalization_name(n.normalization))},
             {"dynamics", n.dynamics},
             {"run_checks", n.run_checks},
             {"a_hat_threshold", n.a_hat_threshold},
             {"ratio_threshold", n.ratio_threshold},
             {"trapped_accuracy", n.trapped_accuracy},
             {"converged_accuracy", n.converged_accuracy}};

  const PropCheckSection& p = c.prop_check;
  j["prop_check"] = {{"nets", p.nets},
                     {"max_hidden", p.max_hidden},
                     {"max_input", p.max_input},
                     {"max_examples", p.max_examples},
                     {"tolerance", p.tolerance},
                     {"fisher_tolerance", p.fisher_tolerance},
                     {"dims", p.dims},
                     {"tail_exponent", p.tail_exponent},
                     {"min_slope", p.min_slope},
                     {"delta", p.delta},
                     {"covariance_draws", p.covariance_draws}};

  const IndicatorTraceSection& it = c.indicator_trace;
  j["indicator_trace"] = {{"iterations", it.iterations},
                          {"eta", it.eta},
                          {"batch_size", it.batch_size},
                          {"checkpoint_every", it.checkpoint_every},
                          {"spectrum_count", it.spectrum_count}};
  return j.dump(2);
}

}  // namespace aniso::lab
