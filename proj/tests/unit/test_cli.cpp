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


#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dynfab/dynfab.hpp"
#include "support/test_support.hpp"

namespace dynfab {
namespace {

namespace fs = std::filesystem;
using testing::MaxAbs;

const fs::path kSource = DYNFAB_SOURCE_DIR;

std::vector<std::string> Errors(const Json& doc) {
  try {
    parse_config(doc);
  } catch (const ValidationError& e) {
    return e.fields();
  }
  return {};
}

bool Mentions(const std::vector<std::string>& errors, const std::string& s) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) {
    return e.find(s) != std::string::npos;
  });
}

Json Minimal() {
  return Json::parse(R"({
    "name": "minimal",
    "robot": {"type": "point"},
    "goal": {"point": [1.0, 0.0]},
    "initial": {"q": [0.0, 0.0]}
  })");
}

TEST(Config, EveryBuiltinParses) {
  ASSERT_GE(builtin_scenarios().size(), 12u);
  for (const BuiltinScenario& b : builtin_scenarios()) {
    const ScenarioConfig cfg = parse_config(*builtin_document(b.name));
    EXPECT_EQ(cfg.base.name, b.name);
    EXPECT_FALSE(cfg.base.description.empty());
    EXPECT_FALSE(cfg.base.initial_states.empty());
    EXPECT_EQ(expand_batch(cfg).size(), static_cast<std::size_t>(cfg.batch.runs));
  }
  EXPECT_FALSE(builtin_document("no-such-scenario").has_value());
}

TEST(Config, ShippedConfigFilesMatchBuiltins) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(kSource / "configs")) {
    if (entry.path().extension() != ".json") continue;
    const ScenarioConfig cfg = load_config(entry.path().string());
    const auto doc = builtin_document(cfg.base.name);
    ASSERT_TRUE(doc.has_value()) << entry.path();
    std::ifstream in(entry.path());
    EXPECT_EQ(Json::parse(in), *doc) << entry.path();
    ++count;
  }
  EXPECT_EQ(count, builtin_scenarios().size());
}

TEST(Config, MinimalDocumentUsesDefaults) {
  const ScenarioConfig cfg = parse_config(Minimal());
  EXPECT_EQ(cfg.base.mode, PlannerMode::kStatic);
  EXPECT_DOUBLE_EQ(cfg.base.dt, 0.01);
  EXPECT_DOUBLE_EQ(cfg.base.T, 15.0);
  EXPECT_DOUBLE_EQ(cfg.base.goal_tolerance, 0.1);
  EXPECT_EQ(cfg.batch.runs, 1);
  EXPECT_EQ(cfg.base.initial_states[0].qdot.size(), 2);
  const OutputPaths out = resolved_outputs(cfg);
  EXPECT_EQ(out.csv, "minimal-static.csv");
  EXPECT_EQ(out.json, "minimal-static.json");
  EXPECT_EQ(out.svg, "minimal-static.svg");
}

TEST(Config, ZeroTimeStepCitesField) {
  const auto errors = [] {
    try {
      load_config((kSource / "tests/data/zero_dt.json").string());
    } catch (const ValidationError& e) {
      return e.fields();
    }
    return std::vector<std::string>{};
  }();
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0], "integration.dt: must be > 0");
}

TEST(Config, ReportsEveryProblem) {
  std::vector<std::string> errors;
  try {
    load_config((kSource / "tests/data/many_errors.json").string());
  } catch (const ValidationError& e) {
    errors = e.fields();
  }
  EXPECT_TRUE(Mentions(errors, "robot.type: must be one of"));
  EXPECT_TRUE(Mentions(errors, "goal: required"));
  EXPECT_TRUE(Mentions(errors, "integration.substeps: unknown key"));
  EXPECT_GE(errors.size(), 3u);
}

TEST(Config, RejectsMalformedFields) {
  Json doc = Minimal();
  doc["extra"] = 1;
  EXPECT_TRUE(Mentions(Errors(doc), "extra: unknown key"));
  doc = Minimal();
  doc["initial"]["q"] = {0.0, 0.0, 0.0};
  EXPECT_TRUE(Mentions(Errors(doc), "initial.q: must have 2 entries"));
  doc = Minimal();
  doc["goal"] = Json::parse(R"({"point": [1, 0], "spline": {}})");
  EXPECT_TRUE(Mentions(Errors(doc), "goal: needs exactly one of"));
  doc = Minimal();
  doc["planner"] = Json::parse(R"({"mode": "hybrid"})");
  EXPECT_TRUE(Mentions(Errors(doc), "planner.mode"));
  doc = Minimal();
  doc["obstacles"] = Json::parse(R"([{"center": [0, 0], "radius": -1}])");
  EXPECT_TRUE(Mentions(Errors(doc), "obstacles[0].radius: must be > 0"));
  doc = Minimal();
  doc["integration"] = Json::parse(R"({"dt": 0.1, "T": 0.05})");
  EXPECT_TRUE(Mentions(Errors(doc), "integration.T"));
  doc = Minimal();
  doc["goal"] = Json::parse(R"({"analytic": {"expr": "spiral"}})");
  EXPECT_TRUE(Mentions(Errors(doc), "goal.analytic.expr"));
  doc = Minimal();
  doc["robot"] = Json::parse(R"({"type": "planar", "n": 2, "limits": [[1, -1], [0, 1]]})");
  doc["initial"]["q"] = {0.0, 0.0};
  EXPECT_TRUE(Mentions(Errors(doc), "robot.limits[0]: lower must be < upper"));
}

TEST(Config, RejectsUnparseableText) {
  try {
    parse_config(std::string("{ not json"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(Mentions(e.fields(), "<document>"));
  }
  EXPECT_THROW(load_config("/nonexistent/config.json"), ValidationError);
}

TEST(Config, HeadingsAreEvenlySpaced) {
  const std::vector<Vector> h = UniformHeadings(10, 1.0);
  ASSERT_EQ(h.size(), 10u);
  EXPECT_LT(MaxAbs(h[0] - Eigen::Vector2d(-1.0, 0.0)), 1e-15);
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_NEAR(h[i].norm(), 1.0, 1e-15);
    const Vector next = h[(i + 1) % h.size()];
    EXPECT_NEAR(std::acos(h[i].dot(next)), 2.0 * std::numbers::pi / 10.0, 1e-12);
  }
}

TEST(Batch, SeededExpansionIsReproducibleAndPrefixStable) {
  ScenarioConfig cfg = parse_config(*builtin_document("point-follow"));
  const std::vector<Scenario> a = expand_batch(cfg);
  const std::vector<Scenario> b = expand_batch(cfg);
  cfg.batch.runs = 5;
  const std::vector<Scenario> prefix = expand_batch(cfg);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].obstacles.size(), 5u);
    EXPECT_EQ(a[i].seed, cfg.batch.seed + i);
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_EQ(a[i].obstacles[k].center(0.0).x, b[i].obstacles[k].center(0.0).x);
      EXPECT_EQ(a[i].obstacles[k].radius, b[i].obstacles[k].radius);
      if (i < prefix.size()) {
        EXPECT_EQ(a[i].obstacles[k].center(0.0).x,
                  prefix[i].obstacles[k].center(0.0).x);
      }
    }
  }
  EXPECT_NE(a[0].obstacles[0].center(0.0).x, a[1].obstacles[0].center(0.0).x);
}

TEST(Batch, RandomObstaclesKeepClearOfStartGoalAndPath) {
  const ScenarioConfig cfg = parse_config(*builtin_document("point-follow"));
  const double margin = cfg.batch.obstacles->margin;
  for (const Scenario& s : expand_batch(cfg)) {
    for (const Obstacle& o : s.obstacles) {
      const Vector c = o.center(0.0).x;
      EXPECT_GE((c - s.initial_states[0].q).norm(), o.radius + margin);
      for (int k = 0; k <= 100; ++k) {
        const double t = s.T * k / 100.0;
        EXPECT_GE((c - s.goal(t).x).norm(), o.radius + margin - 0.05);
      }
      EXPECT_GE(o.radius, 0.3);
      EXPECT_LE(o.radius, 0.5);
    }
  }
}

TEST(Batch, RandomGoalsInsideBox) {
  const ScenarioConfig cfg = parse_config(*builtin_document("point-moving-obs"));
  for (const Scenario& s : expand_batch(cfg)) {
    const Vector g = s.goal(0.0).x;
    EXPECT_GE(g[0], 2.5);
    EXPECT_LT(g[0], 4.0);
    EXPECT_GE(g[1], -2.5);
    EXPECT_LT(g[1], 2.5);
  }
}

TEST(Batch, ImpossiblePlacementIsAValidationError) {
  Json doc = Minimal();
  doc["batch"] = Json::parse(R"({"runs": 1, "randomize": {"obstacles": {
      "count": 3, "center_min": [0, 0], "center_max": [0, 0], "radius_min": 0.5}}})");
  EXPECT_THROW(expand_batch(parse_config(doc)), ValidationError);
}

RunResult TinyRun() {
  Scenario s = parse_config(Minimal()).base;
  s.T = 0.05;
  s.record_timing = false;
  RunResult r;
  r.record = run_single(s, s.initial_states[0]);
  r.metrics = compute_metrics(r.record, s);
  return r;
}

TEST(Io, CsvLayout) {
  const RunResult r = TinyRun();
  std::ostringstream os;
  write_csv(os, r.record, RobotConfig{});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,q0,q1,qd0,qd1,xee0,xee1,min_dist,solver_time_s");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(rows, 6u);
  EXPECT_NE(os.str().find("\n0,0,0,0,0,0,0,inf,0\n"), std::string::npos);
}

TEST(Io, MetricsJsonValidates) {
  const Scenario s = parse_config(Minimal()).base;
  const std::vector<RunResult> results = {TinyRun()};
  Json doc = metrics_to_json(s, results);
  EXPECT_TRUE(validate_metrics_json(doc).empty());
  EXPECT_TRUE(doc["summary"]["min_clearance"].is_null());
  EXPECT_EQ(doc["runs"][0]["rows"], 6);
  doc["planner"] = "hybrid";
  doc["summary"].erase("runs");
  doc["runs"][0]["success"] = 1;
  const auto errors = validate_metrics_json(doc);
  EXPECT_TRUE(Mentions(errors, "planner: must be static|dynamic"));
  EXPECT_TRUE(Mentions(errors, "summary.runs: required"));
  EXPECT_TRUE(Mentions(errors, "runs[0].success: must be a boolean"));
}

TEST(Io, MetricsSchemaListsValidatedKeys) {
  std::ifstream in(kSource / "docs/metrics.schema.json");
  ASSERT_TRUE(in.good());
  const Json schema = Json::parse(in);
  const Scenario s = parse_config(Minimal()).base;
  const Json doc = metrics_to_json(s, {TinyRun()});
  auto check = [](const Json& required, const Json& object) {
    for (const auto& key : required) {
      EXPECT_TRUE(object.contains(key.get<std::string>())) << key;
    }
    for (auto it = object.begin(); it != object.end(); ++it) {
      if (it.key() == "failure") continue;
      EXPECT_NE(std::find(required.begin(), required.end(), it.key()),
                required.end())
          << it.key();
    }
  };
  check(schema["required"], doc);
  check(schema["properties"]["summary"]["required"], doc["summary"]);
  check(schema["properties"]["runs"]["items"]["required"], doc["runs"][0]);
}

TEST(Io, CsvPathPerRun) {
  EXPECT_EQ(csv_path_for("out/a.csv", 0, 1), fs::path("out/a.csv"));
  EXPECT_EQ(csv_path_for("out/a.csv", 3, 20), fs::path("out/a_003.csv"));
}

TEST(Io, SvgContents) {
  Scenario s = parse_config(*builtin_document("point-moving-obs")).base;
  const RunResult r = TinyRun();
  std::ostringstream os;
  write_svg(os, s, {&r.record});
  const std::string svg = os.str();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<title>point-moving-obs (dynamic)</title>"), std::string::npos);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Io, WriteOutputsCreatesFiles) {
  const fs::path dir = fs::temp_directory_path() / "dynfab_io_test";
  fs::remove_all(dir);
  const Scenario s = parse_config(Minimal()).base;
  const std::vector<RunResult> results = {TinyRun(), TinyRun()};
  const WrittenFiles files =
      write_outputs(dir, "run.csv", "run.json", "run.svg", {s}, results);
  ASSERT_EQ(files.csv.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "run_000.csv"));
  EXPECT_TRUE(fs::exists(dir / "run_001.csv"));
  EXPECT_TRUE(fs::exists(dir / "run.json"));
  EXPECT_TRUE(fs::exists(dir / "run.svg"));
  std::ifstream in(dir / "run.json");
  EXPECT_TRUE(validate_metrics_json(Json::parse(in)).empty());
  fs::remove_all(dir);
  EXPECT_THROW(write_outputs("/proc/dynfab-no-such-dir", "a.csv", "", "", {s},
                             results),
               IoError);
}

}  // namespace
}  // namespace dynfab
