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

// Run outputs: per-step CSV, metrics JSON and an SVG overview plot.

#ifndef DYNFAB_IO_HPP_
#define DYNFAB_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynfab/core.hpp"
#include "dynfab/sim.hpp"

namespace dynfab {

using Json = nlohmann::json;

// File could not be written; the message names the path.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

inline std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Column layout of the trajectory CSV:
//   t, q0..q{n-1}, qd0..qd{k-1}, xee0..xee{m-1}, min_dist, solver_time_s
inline void write_csv(std::ostream& os, const RunRecord& r, int n, int k,
                      int m) {
  os << "t";
  for (int i = 0; i < n; ++i) os << ",q" << i;
  for (int i = 0; i < k; ++i) os << ",qd" << i;
  for (int i = 0; i < m; ++i) os << ",xee" << i;
  os << ",min_dist,solver_time_s\n";
  for (std::size_t row = 0; row < r.rows(); ++row) {
    detail::RequireDim(r.q[row].size(), n, "csv q");
    detail::RequireDim(r.qdot[row].size(), k, "csv qdot");
    detail::RequireDim(r.x_ee[row].size(), m, "csv x_ee");
    std::string line = FormatNumber(r.t[row]);
    for (int i = 0; i < n; ++i) line += "," + FormatNumber(r.q[row][i]);
    for (int i = 0; i < k; ++i) line += "," + FormatNumber(r.qdot[row][i]);
    for (int i = 0; i < m; ++i) line += "," + FormatNumber(r.x_ee[row][i]);
    line += "," + FormatNumber(r.min_dist[row]);
    line += "," + FormatNumber(r.solver_time[row]);
    os << line << '\n';
  }
}

inline void write_csv(std::ostream& os, const RunRecord& r,
                      const RobotConfig& robot) {
  write_csv(os, r, robot.config_dim(), robot.velocity_dim(), 2);
}

namespace detail {

inline Json FiniteOrNull(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

}  // namespace detail

inline Json metrics_to_json(const Scenario& s,
                            const std::vector<RunResult>& results) {
  const BatchSummary b = summarize(results);
  Json summary = {
      {"runs", b.runs},
      {"successes", b.successes},
      {"success_rate", b.success_rate},
      {"collisions", b.collisions},
      {"deadlocks", b.deadlocks},
      {"numeric_failures", b.numeric_failures},
      {"mean_clearance", detail::FiniteOrNull(b.mean_clearance)},
      {"min_clearance", detail::FiniteOrNull(b.min_clearance)},
      {"mean_path_length", b.mean_path_length},
      {"mean_summed_error", b.mean_summed_error},
      {"mean_solver_time", b.mean_solver_time},
      {"mean_time_to_goal",
       b.mean_time_to_goal ? Json(*b.mean_time_to_goal) : Json(nullptr)},
  };
  Json runs = Json::array();
  for (const RunResult& r : results) {
    const Metrics& m = r.metrics;
    Json run = {
        {"instance", r.instance},
        {"initial", r.initial},
        {"rows", r.record.rows()},
        {"clearance", detail::FiniteOrNull(m.clearance)},
        {"path_length", m.path_length},
        {"time_to_goal", m.time_to_goal ? Json(*m.time_to_goal) : Json(nullptr)},
        {"summed_error", m.summed_error},
        {"solver_time", m.solver_time},
        {"success", m.success},
        {"goal_reached", r.record.goal_reached},
        {"collided", r.record.collided},
        {"deadlocked", r.record.deadlocked},
        {"numeric_failure", r.record.numeric_failure},
    };
    if (!r.record.failure.empty()) run["failure"] = r.record.failure;
    runs.push_back(std::move(run));
  }
  return {
      {"scenario", s.name},
      {"description", s.description},
      {"planner", to_string(s.mode)},
      {"seed", s.seed},
      {"dt", s.dt},
      {"T", s.T},
      {"summary", std::move(summary)},
      {"runs", std::move(runs)},
  };
}

// Structural check of a metrics document; returns one message per problem.
// Mirrors docs/metrics.schema.json.
inline std::vector<std::string> validate_metrics_json(const Json& doc) {
  std::vector<std::string> errors;
  auto need = [&](const Json& o, const std::string& path, const char* key,
                  auto pred, const char* what) {
    if (!o.is_object() || !o.contains(key)) {
      errors.push_back(path + key + ": required");
    } else if (!pred(o.at(key))) {
      errors.push_back(path + key + ": must be " + what);
    }
  };
  const auto is_string = [](const Json& v) { return v.is_string(); };
  const auto is_count = [](const Json& v) { return v.is_number_unsigned(); };
  const auto is_nonneg = [](const Json& v) {
    return v.is_number() && v.get<double>() >= 0.0;
  };
  const auto is_nonneg_or_null = [&](const Json& v) {
    return v.is_null() || is_nonneg(v);
  };
  const auto is_number_or_null = [](const Json& v) {
    return v.is_null() || v.is_number();
  };
  const auto is_bool = [](const Json& v) { return v.is_boolean(); };
  const auto is_rate = [](const Json& v) {
    return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
  };
  const auto is_mode = [](const Json& v) {
    return v.is_string() && (v == "static" || v == "dynamic");
  };

  if (!doc.is_object()) return {"<root>: must be an object"};
  need(doc, "", "scenario", is_string, "a string");
  need(doc, "", "description", is_string, "a string");
  need(doc, "", "planner", is_mode, "static|dynamic");
  need(doc, "", "seed", is_count, "a non-negative integer");
  need(doc, "", "dt", is_nonneg, "a number >= 0");
  need(doc, "", "T", is_nonneg, "a number >= 0");
  if (doc.contains("summary")) {
    const Json& s = doc.at("summary");
    const std::string p = "summary.";
    for (const char* k :
         {"runs", "successes", "collisions", "deadlocks", "numeric_failures"}) {
      need(s, p, k, is_count, "a non-negative integer");
    }
    need(s, p, "success_rate", is_rate, "a number in [0, 1]");
    need(s, p, "mean_clearance", is_number_or_null, "a number or null");
    need(s, p, "min_clearance", is_number_or_null, "a number or null");
    for (const char* k :
         {"mean_path_length", "mean_summed_error", "mean_solver_time"}) {
      need(s, p, k, is_nonneg, "a number >= 0");
    }
    need(s, p, "mean_time_to_goal", is_nonneg_or_null, "a number >= 0 or null");
  } else {
    errors.push_back("summary: required");
  }
  if (!doc.contains("runs") || !doc.at("runs").is_array()) {
    errors.push_back("runs: must be an array");
    return errors;
  }
  const Json& runs = doc.at("runs");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Json& r = runs[i];
    const std::string p = "runs[" + std::to_string(i) + "].";
    need(r, p, "instance", is_count, "a non-negative integer");
    need(r, p, "initial", is_count, "a non-negative integer");
    need(r, p, "rows", is_count, "a non-negative integer");
    need(r, p, "clearance", is_number_or_null, "a number or null");
    need(r, p, "path_length", is_nonneg, "a number >= 0");
    need(r, p, "time_to_goal", is_nonneg_or_null, "a number >= 0 or null");
    need(r, p, "summed_error", is_nonneg, "a number >= 0");
    need(r, p, "solver_time", is_nonneg, "a number >= 0");
    for (const char* k : {"success", "goal_reached", "collided", "deadlocked",
                          "numeric_failure"}) {
      need(r, p, k, is_bool, "a boolean");
    }
    if (r.is_object() && r.contains("failure") && !r.at("failure").is_string()) {
      errors.push_back(p + "failure: must be a string");
    }
  }
  return errors;
}

// Overview of the first instance: obstacles at t = 0 (moving ones with
// their path), the goal or reference path, and every end-effector trace.
inline void write_svg(std::ostream& os, const Scenario& s,
                      const std::vector<const RunRecord*>& records) {
  constexpr double kSize = 600.0;
  constexpr double kPad = 20.0;
  double lo_x = std::numeric_limits<double>::infinity();
  double lo_y = lo_x;
  double hi_x = -lo_x;
  double hi_y = -lo_x;
  auto grow = [&](double x, double y, double r = 0.0) {
    lo_x = std::min(lo_x, x - r);
    hi_x = std::max(hi_x, x + r);
    lo_y = std::min(lo_y, y - r);
    hi_y = std::max(hi_y, y + r);
  };
  const double t_end = s.T;
  const int samples = 200;
  for (const RunRecord* r : records) {
    for (const Vector& p : r->x_ee) grow(p[0], p[1]);
  }
  for (const Obstacle& o : s.obstacles) {
    for (int i = 0; i <= (o.moving() ? samples : 0); ++i) {
      const Vector c = o.center(t_end * i / samples).x;
      grow(c[0], c[1], o.radius);
    }
  }
  for (int i = 0; i <= samples; ++i) {
    const Vector g = s.goal(t_end * i / samples).x;
    grow(g[0], g[1]);
  }
  if (!std::isfinite(lo_x)) {
    lo_x = lo_y = -1.0;
    hi_x = hi_y = 1.0;
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  const double scale = (kSize - 2.0 * kPad) / span;
  auto px = [&](double x) { return FormatNumber(kPad + (x - lo_x) * scale); };
  auto py = [&](double y) {
    return FormatNumber(kSize - kPad - (y - lo_y) * scale);
  };
  auto polyline = [&](auto sample, int count, const char* style) {
    os << "  <polyline fill=\"none\" " << style << " points=\"";
    for (int i = 0; i < count; ++i) {
      const Vector p = sample(i);
      os << (i ? " " : "") << px(p[0]) << "," << py(p[1]);
    }
    os << "\"/>\n";
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
     << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize
     << "\">\n";
  os << "  <title>" << s.name << " (" << to_string(s.mode) << ")</title>\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Obstacle& o : s.obstacles) {
    const Vector c = o.center(0.0).x;
    os << "  <circle cx=\"" << px(c[0]) << "\" cy=\"" << py(c[1]) << "\" r=\""
       << FormatNumber(o.radius * scale)
       << "\" fill=\"#d9d9d9\" stroke=\"#555\"/>\n";
    if (o.moving()) {
      polyline([&](int i) { return o.center(t_end * i / samples).x; },
               samples + 1, "stroke=\"#999\" stroke-dasharray=\"4 3\"");
    }
  }
  if (s.goal.is_static()) {
    const Vector g = s.goal(0.0).x;
    os << "  <circle cx=\"" << px(g[0]) << "\" cy=\"" << py(g[1])
       << "\" r=\"5\" fill=\"#2a9d2a\"/>\n";
  } else {
    polyline([&](int i) { return s.goal(t_end * i / samples).x; }, samples + 1,
             "stroke=\"#2a9d2a\" stroke-dasharray=\"6 4\"");
    const Vector g = s.goal_position(t_end);
    os << "  <circle cx=\"" << px(g[0]) << "\" cy=\"" << py(g[1])
       << "\" r=\"5\" fill=\"#2a9d2a\"/>\n";
  }
  for (const RunRecord* r : records) {
    if (r->rows() == 0) continue;
    const char* color = r->collided     ? "stroke=\"#d62728\""
                        : r->goal_reached ? "stroke=\"#1f77b4\""
                                          : "stroke=\"#ff7f0e\"";
    polyline([&](int i) { return r->x_ee[static_cast<std::size_t>(i)]; },
             static_cast<int>(r->rows()), color);
  }
  os << "</svg>\n";
}

// Trajectory file of run `index` out of `count`: the configured name when
// there is a single run, name_<index> otherwise.
inline std::filesystem::path csv_path_for(const std::filesystem::path& base,
                                          std::size_t index,
                                          std::size_t count) {
  if (count <= 1) return base;
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), "_%03zu", index);
  std::filesystem::path p = base;
  p.replace_filename(base.stem().string() + suffix + base.extension().string());
  return p;
}

namespace detail {

template <typename Fn>
void WriteFile(const std::filesystem::path& path, Fn&& body) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  body(out);
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace detail

struct WrittenFiles {
  std::vector<std::filesystem::path> csv;
  std::filesystem::path json;
  std::filesystem::path svg;
};

// Writes every trajectory CSV, one metrics JSON and one SVG under `dir`.
// Empty output names are skipped.
inline WrittenFiles write_outputs(const std::filesystem::path& dir,
                                  const std::string& csv_name,
                                  const std::string& json_name,
                                  const std::string& svg_name,
                                  const std::vector<Scenario>& instances,
                                  const std::vector<RunResult>& results) {
  if (instances.empty()) throw ContractError("write_outputs: no instances");
  WrittenFiles files;
  if (!csv_name.empty()) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      const RunResult& r = results[i];
      const auto path = csv_path_for(dir / csv_name, i, results.size());
      detail::WriteFile(path, [&](std::ostream& os) {
        write_csv(os, r.record, instances[r.instance].robot);
      });
      files.csv.push_back(path);
    }
  }
  if (!json_name.empty()) {
    files.json = dir / json_name;
    const Json doc = metrics_to_json(instances.front(), results);
    detail::WriteFile(files.json,
                      [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  }
  if (!svg_name.empty()) {
    files.svg = dir / svg_name;
    std::vector<const RunRecord*> first;
    for (const RunResult& r : results) {
      if (r.instance == 0) first.push_back(&r.record);
    }
    detail::WriteFile(files.svg, [&](std::ostream& os) {
      write_svg(os, instances.front(), first);
    });
  }
  return files;
}

}  // namespace dynfab

#endif  // DYNFAB_IO_HPP_
