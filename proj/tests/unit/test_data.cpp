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
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "app/verify.hpp"
#include "data/annotate.hpp"
#include "data/segmentation.hpp"
#include "data/stats.hpp"
#include "data/synchronize.hpp"
#include "data/trajectory.hpp"
#include "data/trajectory_io.hpp"
#include "doctest.h"
#include "error.hpp"
#include "nn/rng.hpp"
#include "sim/demonstrator.hpp"
#include "transition/transition_model.hpp"

namespace data = cf::data;

namespace {

cf::ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const cf::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return cf::ErrorCode::kUsage;
}

data::Trajectory Demo(std::uint64_t seed) {
  return cf::sim::RunDemonstration(cf::sim::MakeScene(cf::sim::TaskKind::kPress, seed), {})
      .trajectory;
}

}  // namespace

TEST_CASE("trajectory round trip") {
  cf::nn::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto t = cf::app::RandomTrajectory(rng);
    const std::string bytes = data::SerializeTrajectory(t);
    CHECK(data::SerializeTrajectory(data::DeserializeTrajectory(bytes)) == bytes);
  }
  const auto demo = Demo(3);
  const auto path = (std::filesystem::temp_directory_path() / "cf_unit_roundtrip.cft").string();
  data::WriteTrajectory(demo, path);
  const auto back = data::ReadTrajectory(path);
  CHECK(back.poses == demo.poses);
  CHECK(back.actions == demo.actions);
  CHECK(back.boundaries == demo.boundaries);
  std::filesystem::remove(path);
}

TEST_CASE("trajectory format errors") {
  CHECK(CodeOf([] { data::SerializeTrajectory(data::Trajectory{}); }) == cf::ErrorCode::kDomain);
  const std::string bytes = data::SerializeTrajectory(Demo(4));
  const auto payload = bytes.find("\n\n") + 2;

  std::string corrupt = bytes;
  const std::uint64_t huge = 1ull << 40;
  std::memcpy(corrupt.data() + payload + 8, &huge, sizeof huge);
  CHECK(CodeOf([&] { data::DeserializeTrajectory(corrupt); }) == cf::ErrorCode::kTruncated);

  CHECK(CodeOf([&] { data::DeserializeTrajectory(bytes.substr(0, bytes.size() - 40)); }) ==
        cf::ErrorCode::kTruncated);

  std::string flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x10;
  CHECK(CodeOf([&] { data::DeserializeTrajectory(flipped); }) == cf::ErrorCode::kChecksum);

  std::string version = bytes;
  version.replace(version.find(" 1\n"), 3, " 9\n");
  CHECK(CodeOf([&] { data::DeserializeTrajectory(version); }) ==
        cf::ErrorCode::kVersionMismatch);
  CHECK(CodeOf([] { data::ReadTrajectory("/nonexistent/cf.cft"); }) == cf::ErrorCode::kIo);
  CHECK(data::Crc32("123456789") == 0xCBF43926u);
}

TEST_CASE("stream synchronization") {
  data::WrenchStream constant;
  for (int i = 0; i < 300; ++i) {
    constant.times.push_back(i / 300.0);
    constant.samples.push_back({0, 0, 10, 0, 0, 0});
  }
  std::vector<double> frames;
  for (int k = 0; k < 30; ++k) frames.push_back(k / 30.0);
  const auto sync = data::SynchronizeStreams(constant, frames);
  for (const auto& w : sync.wrenches) CHECK(w[2] == doctest::Approx(10.0).epsilon(1e-14));

  data::WrenchStream ramp = constant;
  for (int i = 0; i < 300; ++i) ramp.samples[i][2] = ramp.times[i];
  const auto r = data::SynchronizeStreams(ramp, frames);
  for (int k = 0; k < 30; ++k) {
    // Samples sit at the left of their bins, so the mean trails the window midpoint by half a sample.
    const double mid = (k + 0.5) / 30.0 - 0.5 / 300.0;
    CHECK(r.wrenches[k][2] == doctest::Approx(mid).epsilon(1e-9));
  }

  data::WrenchStream late = constant;
  for (double& t : late.times) t += 0.5;
  CHECK(CodeOf([&] { data::SynchronizeStreams(late, frames); }) == cf::ErrorCode::kGap);
}

TEST_CASE("skill rules") {
  const data::SegmentationRules rules;
  data::WindowFeatures f;
  f.position_change = 0.06;
  f.force_amplitude = 12.0;
  CHECK(data::ClassifyWindow(f, rules) == data::SkillLabel::kWipe);

  f = {};
  f.position_change = 0.06;
  f.z_change = 0.06;
  f.z_force_amplitude = 6.0;
  f.force_amplitude = 8.0;
  CHECK(data::ClassifyWindow(f, rules) == data::SkillLabel::kPush);

  f = {};
  f.position_change = 0.01;
  f.axis_force_change = {0.5, 0.5, 0.5};
  CHECK(data::ClassifyWindow(f, rules) == data::SkillLabel::kExplore);

  const auto labels = data::SegmentSkills(Demo(5), rules);
  CHECK_FALSE(labels.empty());
}

TEST_CASE("transition annotation") {
  const auto t = Demo(6);
  const auto labels = data::AnnotateTransitions(t);
  REQUIRE(labels.size() == t.size());
  CHECK(labels[0] < 0.9);
  for (std::size_t k = 0; k < labels.size(); ++k) CHECK(labels[k] == t.progress[k]);

  // A step sitting on a target with f = m gives one.
  auto at = t;
  const auto& target = at.targets[2];
  at.poses[at.boundaries[2]] = target.pose;
  const double upper = target.force ? target.force->upper : 100.0;
  at.wrenches[at.boundaries[2]] = {0, 0, upper, 0, 0, 0};
  CHECK(data::AnnotateTransitions(at)[at.boundaries[2]] == doctest::Approx(1.0));

  auto broken = t;
  broken.targets.pop_back();
  CHECK(CodeOf([&] { data::AnnotateTransitions(broken); }) == cf::ErrorCode::kAnnotation);
  broken = t;
  broken.boundaries.clear();
  CHECK(CodeOf([&] { data::AnnotateTransitions(broken); }) == cf::ErrorCode::kAnnotation);

  // Without stored targets each segment ends on its own target.
  auto bare = t;
  bare.targets.clear();
  const auto derived = data::SubtaskTargets(bare);
  REQUIRE(derived.size() == t.boundaries.size());
  CHECK(derived.back().pose == t.poses.back());
}

TEST_CASE("dataset statistics") {
  data::DatasetReport report;
  auto t = Demo(7);
  for (auto& w : t.wrenches) w = {0, 0, 12, 0, 0, 0};
  data::AccumulateTrajectory(report, t);
  std::size_t occupied = 0;
  for (std::size_t b : report.histograms[2]) occupied += b > 0 ? 1 : 0;
  CHECK(occupied == 1);
  double total = 0.0;
  for (double f : report.SkillFractions()) total += f;
  CHECK(total == doctest::Approx(1.0));
  CHECK(report.tasks.at("press").trajectories == 1);
  CHECK(report.HistogramBin(-1.0) == 0);
  CHECK(report.HistogramBin(1.0) == data::kHistogramBins - 1);

  data::DatasetReport again;
  data::AccumulateTrajectory(again, t);
  CHECK(data::FormatStatsCsv(again) == data::FormatStatsCsv(report));
}

TEST_CASE("dataset manifest") {
  data::DatasetManifest m;
  m.task = "press";
  m.seed = 9;
  m.count = 2;
  m.files = {"a.cft", "b.cft"};
  const auto back = data::ParseDatasetManifest(data::FormatDatasetManifest(m));
  CHECK(back.files == m.files);
  CHECK(back.seed == 9);
  m.count = 3;
  CHECK(CodeOf([&] { m.Validate(); }) == cf::ErrorCode::kDomain);
}
