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


#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "sim/contact_sim.hpp"
#include "sim/demonstrator.hpp"

namespace sim = cf::sim;

namespace {

sim::EnvParams Linear() {
  sim::EnvParams env;
  env.damping = 0.0;
  env.friction = 0.0;
  return env;
}

}  // namespace

TEST_CASE("contact force law") {
  auto env = Linear();
  CHECK(sim::EnvForce({0, 0, 0.05, 0, 0, 0}, {}, env) == cf::geom::Wrench{});
  const auto w = sim::EnvForce({0, 0, -0.01, 0, 0, 0}, {}, env);
  CHECK(w[2] == doctest::Approx(10.0));
  CHECK(w[0] == 0.0);
  env.stiffness = 2000.0;
  CHECK(sim::EnvForce({0, 0, -0.01, 0, 0, 0}, {}, env)[2] == doctest::Approx(20.0));
  // Continuous through the boundary.
  CHECK(sim::EnvForce({0, 0, -1e-9, 0, 0, 0}, {}, env)[2] < 1e-5);
  env.damping = 5.0;
  CHECK(sim::EnvForce({0, 0, -0.01, 0, 0, 0}, {0, 0, -0.1, 0, 0, 0}, env)[2] ==
        doctest::Approx(20.5));
}

TEST_CASE("position-only stepping") {
  const auto env = Linear();
  auto s = sim::MakeState({0, 0, 0.1, 1, 0, 0, 0}, env);
  s = sim::StepPositionOnly(s, {0, 0, 0.05, 1, 0, 0, 0}, env);
  CHECK(s.wrench == cf::geom::Wrench{});
  CHECK(s.step == 1);
  s = sim::StepPositionOnly(s, {0, 0, -0.15, 1, 0, 0, 0}, env);
  CHECK(sim::NormalForce(s.wrench, env) == doctest::Approx(150.0));
  CHECK(sim::IsOverload(s.wrench, env));
  const auto again = sim::StepPositionOnly(s, {0, 0, -0.15, 1, 0, 0, 0}, env);
  CHECK(again.pose == s.pose);
  CHECK(again.wrench == s.wrench);

  sim::Environment e(env, {0, 0, 0.1, 1, 0, 0, 0});
  e.StepPosition({0, 0, -0.15, 1, 0, 0, 0});
  CHECK(e.overloads() == 1);
}

TEST_CASE("hybrid stepping") {
  const auto env = Linear();
  sim::HybridGains gains{1.0 / (2.0 * env.stiffness)};
  auto s = sim::MakeState({0, 0, -0.005, 1, 0, 0, 0}, env);
  cf::flow::ActionVector a;
  a.wrench[2] = sim::NormalForce(s.wrench, env);
  const auto same = sim::StepHybrid(s, a, env, gains);
  CHECK(same.pose == s.pose);

  a.wrench[2] = 20.0;
  std::size_t steps = 0;
  double prev_err = std::abs(20.0 - sim::NormalForce(s.wrench, env));
  while (std::abs(20.0 - sim::NormalForce(s.wrench, env)) >= 0.5 && steps < 50) {
    s = sim::StepHybrid(s, a, env, gains);
    const double err = std::abs(20.0 - sim::NormalForce(s.wrench, env));
    CHECK(err / prev_err == doctest::Approx(0.5).epsilon(1e-6));
    prev_err = err;
    ++steps;
  }
  CHECK(steps <= 50);

  // Free space: the correction is bounded by G times the target force.
  auto free = sim::MakeState({0, 0, 0.3, 1, 0, 0, 0}, env);
  const auto moved = sim::StepHybrid(free, a, env, gains);
  CHECK(std::abs(moved.pose[2] - free.pose[2]) <= gains.admittance * 20.0 + 1e-15);
  CHECK_THROWS_AS(sim::StepHybrid(free, a, env, sim::HybridGains{-1.0}), cf::Error);
}

TEST_CASE("damped settling decays") {
  sim::EnvParams env;
  env.damping = 20.0;
  auto s = sim::MakeState({0, 0, 0.0, 1, 0, 0, 0}, env);
  s.velocity[2] = -0.5;
  auto speed = [](const sim::SimState& x) { return std::abs(x.velocity[2]); };
  double window_max = 1e9;
  for (int w = 0; w < 5; ++w) {
    double m = 0.0;
    for (int k = 0; k < 10; ++k) {
      s = sim::SettleStep(s, {0, 0, 0}, 0.5, 200.0, env);
      m = std::max(m, speed(s));
    }
    CHECK(m <= window_max);
    window_max = m;
  }
}

TEST_CASE("perturbed surface rises once the tool is near it") {
  const auto env = Linear();
  sim::Environment e(env, {0, 0, 0.05, 1, 0, 0, 0}, sim::SurfaceRise{});
  e.StepPosition({0, 0, 0.05, 1, 0, 0, 0});
  CHECK_FALSE(e.perturbed());
  for (int i = 0; i < 20 && !e.perturbed(); ++i) e.StepPosition({0, 0, 0.005, 1, 0, 0, 0});
  CHECK(e.perturbed());
  CHECK(e.overloads() == 0);
  for (int i = 0; i < 6; ++i) e.StepPosition({0, 0, 0.005, 1, 0, 0, 0});
  CHECK(e.params().surface_height == doctest::Approx(0.15));
  CHECK(e.overloads() > 0);
}

TEST_CASE("scripted demonstrations") {
  sim::EpisodeConfig config;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto scene = sim::MakeScene(sim::TaskKind::kPress, seed);
    const auto demo = sim::RunDemonstration(scene, config);
    CHECK(demo.metrics.success);
    CHECK(demo.metrics.overloads == 0);
    const auto& t = demo.trajectory;
    CHECK(t.boundaries.size() == scene.targets.size());
    CHECK(t.subtask_prompts.size() == scene.prompts.force_prompts.size());
    // Press segment: the normal force settles inside [15, 25] N.
    const std::size_t begin = t.boundaries[2], end = t.boundaries[3];
    double peak = 0.0;
    for (std::size_t k = begin; k < end; ++k) peak = std::max(peak, t.wrenches[k][2]);
    CHECK(peak >= 15.0);
    CHECK(peak <= 25.0);
    CHECK(t.wrenches[end - 1][2] >= 15.0);
  }
  const auto a = sim::MakeScene(sim::TaskKind::kPress, 10);
  const auto b = sim::MakeScene(sim::TaskKind::kPress, 11);
  CHECK(a.object != b.object);
  CHECK(a.targets.size() == b.targets.size());

  for (auto task : {sim::TaskKind::kWipe, sim::TaskKind::kProbe}) {
    const auto demo = sim::RunDemonstration(sim::MakeScene(task, 7), config);
    CHECK(demo.metrics.success);
    CHECK(demo.metrics.overloads == 0);
  }
  const auto d1 = sim::RunDemonstration(a, config);
  const auto d2 = sim::RunDemonstration(a, config);
  CHECK(d1.trajectory.poses == d2.trajectory.poses);
  CHECK(sim::ParseTask("wipe") == sim::TaskKind::kWipe);
  CHECK_THROWS_AS(sim::ParseTask("stack"), cf::Error);
}
