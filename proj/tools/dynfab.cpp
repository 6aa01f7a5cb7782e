// Copyright 2026 The dynfab Authors.
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

// Scenario runner. Exit codes: 0 success, 2 invalid configuration or
// usage, 3 run or output failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "dynfab/dynfab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRunFailure = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir = "out";
  std::string planner;
  bool no_timing = false;
};

void PrintValidation(const dynfab::ValidationError& e) {
  std::cerr << "error: invalid configuration\n";
  for (const std::string& f : e.fields()) std::cerr << "  " << f << '\n';
}

void Apply(const Overrides& o, dynfab::ScenarioConfig& cfg) {
  if (o.seed) cfg.batch.seed = *o.seed;
  if (o.planner == "static") cfg.base.mode = dynfab::PlannerMode::kStatic;
  if (o.planner == "dynamic") cfg.base.mode = dynfab::PlannerMode::kDynamic;
  if (o.no_timing) cfg.base.record_timing = false;
  cfg.base.seed = cfg.batch.seed;
}

void PrintSummary(const dynfab::Scenario& s,
                  const std::vector<dynfab::RunResult>& results) {
  const dynfab::BatchSummary b = dynfab::summarize(results);
  std::printf(
      "%s [%s] runs=%zu success=%zu collisions=%zu deadlocks=%zu "
      "failures=%zu success_rate=%.3f min_clearance=%.4f "
      "mean_summed_error=%.4f mean_solver_time=%.3gs\n",
      s.name.c_str(), dynfab::to_string(s.mode), b.runs, b.successes,
      b.collisions, b.deadlocks, b.numeric_failures, b.success_rate,
      b.min_clearance, b.mean_summed_error, b.mean_solver_time);
}

int Execute(dynfab::ScenarioConfig cfg, const Overrides& o) {
  Apply(o, cfg);
  std::vector<dynfab::Scenario> instances;
  try {
    instances = dynfab::expand_batch(cfg);
  } catch (const dynfab::ValidationError& e) {
    PrintValidation(e);
    return kExitInvalid;
  }
  std::vector<dynfab::RunResult> results;
  try {
    results = dynfab::run_batch(instances, o.jobs);
  } catch (const dynfab::Error& e) {
    std::cerr << "error: run failed: " << e.what() << '\n';
    return kExitRunFailure;
  }
  const dynfab::OutputPaths out = dynfab::resolved_outputs(cfg);
  try {
    const auto files = dynfab::write_outputs(o.out_dir, out.csv, out.json,
                                             out.svg, instances, results);
    PrintSummary(instances.front(), results);
    std::printf("wrote %zu csv, %s, %s\n", files.csv.size(),
                files.json.string().c_str(), files.svg.string().c_str());
  } catch (const dynfab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
  for (const dynfab::RunResult& r : results) {
    if (r.record.numeric_failure) {
      std::cerr << "error: run " << r.instance << "/" << r.initial
                << " failed: " << r.record.failure << '\n';
      return kExitRunFailure;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic fabrics scenario runner"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Batch seed override");
  app.add_option("--jobs", o.jobs, "Parallel workers (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out-dir", o.out_dir, "Output directory");
  app.add_option("--planner", o.planner, "Planner mode override")
      ->check(CLI::IsMember({"static", "dynamic"}));
  app.add_flag("--no-timing", o.no_timing,
               "Record zero solver time so outputs are reproducible");

  std::string config;
  std::string name;
  auto* run = app.add_subcommand("run", "Run a configuration file");
  run->add_option("config", config, "Scenario JSON")->required();
  auto* validate = app.add_subcommand("validate", "Validate a configuration");
  validate->add_option("config", config, "Scenario JSON")->required();
  auto* repro = app.add_subcommand("repro", "Run a built-in scenario");
  repro->add_option("name", name, "Built-in scenario name")->required();
  auto* list = app.add_subcommand("list", "List built-in scenarios");
  auto* show = app.add_subcommand("show", "Print a built-in scenario");
  show->add_option("name", name, "Built-in scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  if (*seed_opt) o.seed = seed;
  if (o.jobs == 0) {
    o.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  if (*list) {
    for (const auto& b : dynfab::builtin_scenarios()) {
      const auto doc = dynfab::Json::parse(b.document);
      std::printf("%-24s %s\n", std::string(b.name).c_str(),
                  doc.at("description").get<std::string>().c_str());
    }
    return kExitOk;
  }
  if (*show || *repro) {
    const auto doc = dynfab::builtin_document(name);
    if (!doc) {
      std::cerr << "error: unknown scenario '" << name
                << "' (see 'dynfab list')\n";
      return kExitInvalid;
    }
    if (*show) {
      std::cout << doc->dump(2) << '\n';
      return kExitOk;
    }
    try {
      return Execute(dynfab::parse_config(*doc), o);
    } catch (const dynfab::ValidationError& e) {
      PrintValidation(e);
      return kExitInvalid;
    }
  }

  dynfab::ScenarioConfig cfg;
  try {
    cfg = dynfab::load_config(config);
  } catch (const dynfab::ValidationError& e) {
    PrintValidation(e);
    return kExitInvalid;
  } catch (const dynfab::Error& e) {
    std::cerr << "error: " << config << ": " << e.what() << '\n';
    return kExitInvalid;
  }
  if (*validate) {
    std::printf("%s: ok (%s, %zu initial states, %d runs)\n", config.c_str(),
                cfg.base.name.c_str(), cfg.base.initial_states.size(),
                cfg.batch.runs);
    return kExitOk;
  }
  return Execute(std::move(cfg), o);
}
