// Copyright 2026 The contactflow Authors
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

#include "sim/demonstrator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "error.hpp"
#include "nn/rng.hpp"

namespace cf::sim {

namespace {

constexpr std::uint64_t kProjectionSeed = 0x5eedf00dULL;
constexpr double kNearRadius = 0.02;

geom::Pose7 PoseAt(const geom::Vec3& p) { return {p[0], p[1], p[2], 1.0, 0.0, 0.0, 0.0}; }

transition::SubtaskTarget Target(const geom::Vec3& p) { return {PoseAt(p), std::nullopt}; }

transition::SubtaskTarget Target(const geom::Vec3& p, double lower, double upper) {
  return {PoseAt(p), transition::ForceBounds{lower, upper}};
}

// Proportional step towards `goal` with the step length capped.
geom::Vec3 Servo(const geom::Vec3& from, const geom::Vec3& goal, double gain, double cap) {
  geom::Vec3 d = geom::Scale(geom::Sub(goal, from), gain);
  const double n = geom::Norm(d);
  if (n > cap) d = geom::Scale(d, cap / n);
  return d;
}

double Planar(const geom::Vec3& a, const geom::Vec3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

std::string_view TaskName(TaskKind task) {
  switch (task) {
    case TaskKind::kPress: return "press";
    case TaskKind::kWipe: return "wipe";
    case TaskKind::kProbe: return "probe";
  }
  return "press";
}

TaskKind ParseTask(std::string_view name) {
  if (name == "press") return TaskKind::kPress;
  if (name == "wipe") return TaskKind::kWipe;
  if (name == "probe") return TaskKind::kProbe;
  Fail(ErrorCode::kUsage, "unknown task '" + std::string(name) + "' (press, wipe, probe)");
}

std::vector<context::PromptBlock> DefaultPromptCorpus() {
  return {
      {"press the bottle down firmly",
       {"move above the bottle", "touch the bottle lightly", "press down with twenty newtons",
        "lift away from the bottle"}},
      {"wipe the board clean",
       {"move above the board", "touch the board lightly", "slide along the board with ten newtons",
        "lift away from the board"}},
      {"probe the surface gently",
       {"move above the surface", "touch the surface lightly", "push in with ten newtons",
        "lift away from the surface"}},
  };
}

std::vector<nn::Matrix> RenderVisual(const geom::Vec3& object, const geom::Pose7& tool,
                                     const VisualLayout& layout) {
  nn::Rng rng(kProjectionSeed);
  const double u[4] = {10.0 * (object[0] - tool[0]), 10.0 * (object[1] - tool[1]),
                       10.0 * (object[2] - tool[2]), 1.0};
  std::vector<nn::Matrix> out;
  out.reserve(layout.cameras);
  for (std::size_t c = 0; c < layout.cameras; ++c) {
    nn::Matrix grid(layout.tokens, layout.feature_dim);
    for (std::size_t t = 0; t < layout.tokens; ++t)
      for (std::size_t j = 0; j < layout.feature_dim; ++j) {
        double acc = 0.0;
        for (double x : u) acc += 0.5 * rng.Normal() * x;
        grid(t, j) = std::tanh(acc);
      }
    out.push_back(std::move(grid));
  }
  return out;
}

TaskScene MakeScene(TaskKind task, std::uint64_t seed, const EnvParams& base) {
  nn::Rng rng(seed);
  TaskScene s;
  s.task = task;
  s.seed = seed;
  s.env = base;
  const double h = rng.Uniform(0.0, 0.05);
  s.object = {rng.Uniform(-0.06, 0.06), rng.Uniform(-0.06, 0.06), h};
  s.env.surface_height = h;
  s.start = PoseAt({rng.Uniform(-0.03, 0.03), rng.Uniform(-0.03, 0.03), h + 0.15});
  const double ox = s.object[0];
  const double oy = s.object[1];
  s.prompts = DefaultPromptCorpus().at(static_cast<std::size_t>(task));
  switch (task) {
    case TaskKind::kPress:
      s.targets = {Target({ox, oy, h + 0.05}), Target({ox, oy, h - 0.005}, 0.0, 5.0),
                   Target({ox, oy, h - 0.02}, 5.0, 20.0), Target({ox, oy, h + 0.2})};
      break;
    case TaskKind::kWipe:
      s.targets = {Target({ox, oy, h + 0.05}), Target({ox, oy, h - 0.005}, 0.0, 5.0),
                   Target({ox + 0.12, oy, h - 0.01}, 5.0, 10.0), Target({ox + 0.12, oy, h + 0.2})};
      break;
    case TaskKind::kProbe:
      s.targets = {Target({ox, oy, h + 0.05}), Target({ox, oy, h - 0.002}, 0.0, 2.0),
                   Target({ox, oy, h - 0.01}, 2.0, 10.0), Target({ox, oy, h + 0.2})};
      break;
  }
  return s;
}

double ExpectedForce(const TaskScene& scene, const geom::Vec3& commanded) {
  return scene.env.stiffness * Penetration(commanded, scene.env);
}

flow::ActionVector ExpertAction(const TaskScene& scene, std::size_t subtask, const SimState& state) {
  Require(subtask < scene.targets.size(), ErrorCode::kDomain, "subtask index out of range");
  const geom::Vec3 p = state.position();
  const geom::Vec3 goal = geom::Position(scene.targets[subtask].pose);
  geom::Vec3 d{};
  auto descend = [&](double rate) { return -std::min(rate, std::max(0.0, p[2] - goal[2])); };
  const geom::Vec3 level{goal[0], goal[1], p[2]};
  std::optional<double> force_target;
  switch (subtask) {
    case 0:
      d = Servo(p, goal, 0.25, 0.015);
      break;
    case 1:
      d = Servo(p, level, 0.3, 0.01);
      if (Planar(p, goal) < 0.01) d[2] = descend(0.005);
      break;
    case 2:
      if (scene.task == TaskKind::kWipe) {
        d = Servo(p, {p[0], goal[1], p[2]}, 0.3, 0.01);
        d[0] = std::clamp(goal[0] - p[0], -0.01, 0.01);
        d[2] = descend(0.002);
      } else {
        // Hold height and let the admittance term drive the force to the upper bound.
        d = Servo(p, level, 0.3, 0.01);
        d[2] = 0.0;
        force_target = scene.targets[subtask].force->upper;
      }
      break;
    default:
      d[2] = std::clamp(goal[2] - p[2], 0.0, 0.01);
      break;
  }
  flow::ActionVector a;
  a.pose_delta = {d[0], d[1], d[2], 1.0, 0.0, 0.0, 0.0};
  const double f = force_target.value_or(ExpectedForce(scene, geom::Add(p, d)));
  for (std::size_t i = 0; i < 3; ++i) a.wrench[i] = f * scene.env.normal[i];
  return a;
}

void EpisodeMonitor::Observe(const SimState& state, const EnvParams& env) {
  const double fn = NormalForce(state.wrench, env);
  peak_any_ = std::max(peak_any_, fn);
  if (Planar(state.position(), scene_.object) < kNearRadius) peak_near_ = std::max(peak_near_, fn);
  if (scene_.task == TaskKind::kWipe && fn >= 5.0 && fn <= 15.0 &&
      std::abs(state.pose[1] - scene_.object[1]) < kNearRadius) {
    wipe_min_x_ = std::min(wipe_min_x_, state.pose[0]);
    wipe_max_x_ = std::max(wipe_max_x_, state.pose[0]);
  }
}

bool EpisodeMonitor::Success(const SimState& final_state, const EnvParams& env,
                             std::size_t overloads) const {
  const bool retracted = final_state.pose[2] > scene_.object[2] + 0.05 &&
                         Penetration(final_state.position(), env) == 0.0;
  if (!retracted || overloads > 0) return false;
  switch (scene_.task) {
    case TaskKind::kPress:
      return peak_near_ >= 15.0 && peak_near_ <= 25.0 && peak_any_ <= 25.0;
    case TaskKind::kWipe:
      return wipe_max_x_ - wipe_min_x_ >= 0.06 && peak_any_ <= 20.0;
    case TaskKind::kProbe:
      return peak_near_ >= 8.0 && peak_near_ <= 12.0 && peak_any_ <= 12.0;
  }
  return false;
}

Demonstration RunDemonstration(const TaskScene& scene, const EpisodeConfig& config) {
  Environment env(scene.env, scene.start);
  EpisodeMonitor monitor(scene);
  monitor.Observe(env.state(), env.params());
  transition::TransitionState ts{0, scene.targets.size(), 0.0, config.threshold};

  Demonstration demo;
  data::Trajectory& t = demo.trajectory;
  t.task = std::string(TaskName(scene.task));
  t.seed = scene.seed;
  t.object = scene.object;
  t.task_prompt = scene.prompts.task_prompt;
  t.camera_tokens = config.visual.tokens;
  std::vector<std::vector<double>> frames(config.visual.cameras);

  std::size_t segment = static_cast<std::size_t>(-1);
  for (std::size_t step = 0; step < config.max_steps; ++step) {
    const SimState& st = env.state();
    const geom::Pose7 pose = st.pose7();
    const double s =
        transition::SubtaskProgress(pose, st.wrench, scene.targets[ts.index], config.transition);
    if (ts.index != segment) {
      segment = ts.index;
      t.boundaries.push_back(step);
      t.subtask_prompts.push_back(scene.prompts.force_prompts.at(segment));
      t.targets.push_back(scene.targets[segment]);
    }
    t.timestamps.push_back(static_cast<double>(step) * scene.env.dt);
    const auto visual = RenderVisual(scene.object, pose, config.visual);
    for (std::size_t c = 0; c < visual.size(); ++c)
      frames[c].insert(frames[c].end(), visual[c].values().begin(), visual[c].values().end());
    t.poses.push_back(pose);
    t.wrenches.push_back(st.wrench);
    t.progress.push_back(s);

    flow::ActionVector action = ExpertAction(scene, ts.index, st);
    action.progress = s;
    t.actions.push_back(flow::PackAction(action));
    env.StepHybrid(action, config.gains);
    monitor.Observe(env.state(), env.params());

    const bool finishing = ts.terminal() && s >= config.threshold;
    ts = transition::SubtaskStep(ts, s);
    if (finishing) break;
  }
  const std::size_t width = config.visual.tokens * config.visual.feature_dim;
  for (auto& f : frames) t.cameras.emplace_back(t.size(), width, std::move(f));

  demo.metrics.steps = t.size();
  demo.metrics.overloads = env.overloads();
  demo.metrics.peak_force = env.peak_force();
  demo.metrics.force_rms = env.force_rms();
  demo.metrics.success = monitor.Success(env.state(), env.params(), env.overloads());
  return demo;
}

}  // namespace cf::sim
