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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "nn/rng.hpp"
#include "transition/transition_model.hpp"

namespace tr = cf::transition;

namespace {

tr::TransitionObservation Obs(double theta, double l, double f, double n = 0.0,
                              double m = 100.0) {
  tr::TransitionObservation o;
  o.alignment = theta;
  o.distance = l;
  o.force = f;
  o.params.force = {n, m};
  return o;
}

}  // namespace

TEST_CASE("alignment distance force") {
  CHECK(tr::OrientationAlignment({0, 0, 1}, {0, 0, 2}) == doctest::Approx(1.0));
  CHECK(tr::OrientationAlignment({0, 0, 1}, {0, 0, -1}) == doctest::Approx(0.0));
  CHECK(tr::OrientationAlignment({1, 0, 0}, {0, 1, 0}) == doctest::Approx(0.5));
  CHECK(tr::RemainingDistance({0, 0, 0}, {0, 0, 0}) == 0.0);
  CHECK(tr::RemainingDistance({0, 0, 0}, {3, 4, 0}) == 5.0);
  CHECK(tr::RemainingDistance({1, 2, 3}, {-1, 0, 7}) == tr::RemainingDistance({-1, 0, 7}, {1, 2, 3}));
  CHECK(tr::ForceMagnitude({}, {0, 100}) == 0.0);
  CHECK(tr::ForceMagnitude({3, 4, 0, 9, 9, 9}, {0, 100}) == 5.0);
  CHECK(tr::ForceMagnitude({120, 0, 0, 0, 0, 0}, {0, 100}) == 100.0);
}

TEST_CASE("closed-form probability") {
  CHECK(tr::TransitionProbability(Obs(1.0, 0.0, 100.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tr::TransitionProbability(Obs(0.0, 0.2, 50.0)) == 0.0);
  CHECK(tr::TransitionProbability(Obs(0.7, 0.2, 10.0, 10.0, 30.0)) == 0.0);
  CHECK(tr::TransitionProbability(Obs(0.5, 0.1, 20.0)) ==
        doctest::Approx(0.25 * std::exp(-0.2) * 0.2).epsilon(1e-12));
  CHECK(tr::TransitionProbability(Obs(0.5, 0.1, 20.0)) == doctest::Approx(0.040937).epsilon(1e-5));
  CHECK(tr::TransitionProbability(Obs(0.9, 0.5, 50.0)) == doctest::Approx(0.148991).epsilon(1e-5));

  cf::nn::Rng rng(3);
  for (double alpha : {1.0, 2.0, 3.0, 5.0})
    for (int i = 0; i < 200; ++i) {
      auto o = Obs(rng.Uniform(), rng.Uniform(0, 2), 0.0, rng.Uniform(0, 40), 0.0);
      o.params.force.upper = o.params.force.lower + rng.Uniform(1, 60);
      o.force = rng.Uniform(o.params.force.lower, o.params.force.upper);
      o.params.alpha = alpha;
      CHECK(tr::TransitionProbability(o) ==
            doctest::Approx(tr::TransitionProbabilitySimplified(o)).epsilon(1e-12));
    }
  CHECK(tr::GammaRatio(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tr::Gamma(5.0) == doctest::Approx(24.0));
}

TEST_CASE("monte carlo oracle") {
  CHECK(tr::MonteCarloTransition(Obs(1.0, 0.0, 100.0), 10000, 1).estimate == 1.0);
  CHECK(tr::MonteCarloTransition(Obs(0.0, 0.3, 50.0), 10000, 1).estimate == 0.0);
  const auto o = Obs(0.5, 0.1, 20.0);
  const auto mc = tr::MonteCarloTransition(o, 1000000, 7);
  CHECK(std::abs(mc.estimate - tr::TransitionProbability(o)) < 3.0 * mc.stderr_);
  const auto again = tr::MonteCarloTransition(o, 1000000, 7);
  CHECK(again.estimate == mc.estimate);
}

TEST_CASE("subtask progress from poses") {
  tr::SubtaskTarget target;
  target.pose = {0.1, 0.2, 0.3, 1, 0, 0, 0};
  target.force = tr::ForceBounds{5.0, 20.0};
  const cf::geom::Wrench full{0, 0, 20, 0, 0, 0};
  CHECK(tr::SubtaskProgress(target.pose, full, target, {}) == doctest::Approx(1.0));
  CHECK(tr::SubtaskProgress({2.0, 2.0, 2.0, 1, 0, 0, 0}, full, target, {}) ==
        doctest::Approx(std::exp(-2.0 * std::sqrt(1.9 * 1.9 + 1.8 * 1.8 + 1.7 * 1.7))));
  const auto o = tr::Observe(target.pose, {0, 0, 12.5, 0, 0, 0}, target, {});
  CHECK(o.force == 12.5);
  CHECK(o.params.force.lower == 5.0);
}

TEST_CASE("subtask step") {
  tr::TransitionState s{0, 3, 0.0, 0.9};
  auto next = tr::SubtaskStep(s, 0.95);
  CHECK(next.index == 1);
  CHECK(next.progress == 0.0);
  next = tr::SubtaskStep(s, 0.5);
  CHECK(next.index == 0);
  CHECK(next.progress == 0.5);
  tr::TransitionState last{2, 3, 0.0, 0.9};
  CHECK(tr::SubtaskStep(last, 1.0).index == 2);
  CHECK_THROWS_AS(tr::SubtaskStep({5, 3, 0.0, 0.9}, 0.5), cf::Error);
}

TEST_CASE("parameter validation") {
  tr::TransitionParams p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.Validate(), cf::Error);
  p = {};
  p.force = {10.0, 10.0};
  CHECK_THROWS_AS(p.Validate(), cf::Error);
}
