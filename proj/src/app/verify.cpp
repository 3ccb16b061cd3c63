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

#include "app/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include "analysis/control_analysis.hpp"
#include "app/checkpoint.hpp"
#include "app/policy.hpp"
#include "data/segmentation.hpp"
#include "data/synchronize.hpp"
#include "data/trajectory_io.hpp"
#include "error.hpp"
#include "moe/cross_scale_moe.hpp"
#include "nn/gradcheck.hpp"
#include "nn/optim.hpp"
#include "sim/demonstrator.hpp"
#include "transition/transition_model.hpp"

namespace cf::app {

namespace {

template <typename... Args>
std::string Fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

CheckResult Named(std::string name) {
  CheckResult r;
  r.name = std::move(name);
  return r;
}

bool SameBits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

nn::Matrix RandomMatrix(std::size_t rows, std::size_t cols, nn::Rng& rng, double scale = 1.0) {
  nn::Matrix m(rows, cols);
  for (double& v : m.values()) v = scale * rng.Normal();
  return m;
}

// Theta^alpha e^(-lambda l) (f - n) / (m - n) written out directly.
double DirectProduct(double theta, double alpha, double rate, double distance, double f, double n,
                     double m) {
  return std::pow(theta, alpha) * std::exp(-rate * distance) * (f - n) / (m - n);
}

}  // namespace

CheckResult CheckTransitionOracle(std::size_t observations, std::size_t samples,
                                  std::uint64_t seed, const FaultInjection& fault) {
  CheckResult r = Named("transition_oracle");
  nn::Rng rng(seed);
  std::size_t within = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < observations; ++i) {
    transition::TransitionObservation obs;
    obs.params.alpha = 2.0;
    obs.params.rate = 2.0;
    const double n = rng.Uniform(0.0, 50.0);
    obs.params.force = {n, n + rng.Uniform(1.0, 50.0)};
    obs.alignment = rng.Uniform(0.2, 1.0);
    obs.distance = rng.Uniform(0.0, 1.0);
    obs.force = n + (obs.params.force.upper - n) * rng.Uniform(0.05, 1.0);
    double closed = transition::TransitionProbability(obs);
    if (fault.transition_constant) {
      // Gamma(alpha) in place of Gamma(alpha + 1).
      const double a = obs.params.alpha;
      closed = closed / transition::GammaRatio(a) * transition::Gamma(a) /
               (a * transition::Gamma(a));
    }
    const auto mc = transition::MonteCarloTransition(obs, samples, seed * 1000003ULL + i);
    const double z = mc.stderr_ > 0.0 ? std::abs(closed - mc.estimate) / mc.stderr_
                                      : (closed == mc.estimate ? 0.0 : 1e300);
    worst = std::max(worst, z);
    if (z < 3.0) ++within;
  }
  const std::size_t needed = (observations * 99 + 99) / 100;
  r.passed = within >= needed;
  r.detail = Fmt("%zu/%zu within 3 SE (need %zu), worst %.2f SE", within, observations, needed,
                 worst);
  return r;
}

CheckResult CheckGammaIdentity(std::size_t inputs_per_alpha, std::uint64_t seed) {
  CheckResult r = Named("gamma_identity");
  nn::Rng rng(seed);
  double worst = 0.0;
  for (const double alpha : {1.0, 2.0, 3.0, 5.0}) {
    for (std::size_t i = 0; i < inputs_per_alpha; ++i) {
      transition::TransitionObservation obs;
      obs.params.alpha = alpha;
      obs.params.rate = rng.Uniform(0.1, 10.0);
      const double n = rng.Uniform(0.0, 20.0);
      obs.params.force = {n, n + rng.Uniform(0.5, 80.0)};
      obs.alignment = rng.Uniform();
      obs.distance = rng.Uniform(0.0, 2.0);
      obs.force = rng.Uniform(n, obs.params.force.upper);
      const double general = transition::TransitionProbability(obs);
      const double direct = DirectProduct(obs.alignment, alpha, obs.params.rate, obs.distance,
                                          obs.force, n, obs.params.force.upper);
      worst = std::max(worst, std::abs(general - direct));
    }
  }
  r.passed = worst <= 1e-12;
  r.detail = Fmt("max |general - direct| = %.3e over %zu inputs", worst, 4 * inputs_per_alpha);
  return r;
}

CheckResult CheckPipelineGradients(std::size_t instances, std::uint64_t seed) {
  CheckResult r = Named("gradcheck");
  const auto corpus = sim::DefaultPromptCorpus();
  const context::Vocabulary vocab = context::Vocabulary::Build(corpus);
  const sim::VisualLayout layout{2, 2, 4};
  const char* variants[] = {"state_fusion", "multimodal_encoder", "vlm_pathway"};
  double worst = 0.0;
  std::size_t coords = 0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    nn::Rng rng(seed + 7919ULL * inst);
    RunConfig c;
    c.width = 8;
    c.heads = 2;
    c.blocks = 1;
    c.chunk = 2;
    c.flow_hidden = 16;
    c.flow_layers = 1;
    c.time_features = 4;
    c.injection = variants[inst % 3];
    c.condition_on_progress = inst % 2 == 1;
    const ModelSpec spec = SpecFromConfig(c, vocab, layout);
    nn::ParamSet params;
    const PolicyModel model = PolicyModel::Create(params, spec, rng);
    // Perturb away from the initialization so no parameter sits at a symmetric point.
    for (nn::ParamId id = 0; id < params.size(); ++id)
      for (double& v : params.mutable_value(id).values()) v += 0.05 * rng.Normal();

    std::vector<nn::Matrix> cams;
    for (std::size_t k = 0; k < layout.cameras; ++k)
      cams.push_back(RandomMatrix(layout.tokens, layout.feature_dim, rng));
    const auto& block = corpus[inst % corpus.size()];
    const auto prompts = vocab.Encode(block.task_prompt,
                                      block.force_prompts[inst % block.force_prompts.size()]);
    geom::Quat q{rng.Normal(), rng.Normal(), rng.Normal(), rng.Normal()};
    q = geom::QuatNormalize(q);
    const geom::Pose7 pose{rng.Uniform(-0.5, 0.5), rng.Uniform(-0.5, 0.5), rng.Uniform(-0.5, 0.5),
                           q[0], q[1], q[2], q[3]};
    geom::Wrench wrench{};
    for (std::size_t k = 0; k < 6; ++k) wrench[k] = k < 3 ? rng.Uniform(-40, 40) : rng.Uniform(-5, 5);
    const Observation obs =
        MakeObservation(cams, prompts, pose, wrench, rng.Uniform(), Normalizers{});
    const std::size_t dims = spec.flow.chunk_dims();
    std::vector<double> chunk(dims), noise(dims);
    for (double& v : chunk) v = rng.Normal();
    for (double& v : noise) v = rng.Normal();
    const double tau = rng.Uniform(0.05, 0.95);

    nn::Tape tape(&params);
    const nn::Var w = tape.Input(nn::Matrix::RowVector(wrench));
    tape.Backward(model.Loss(tape, obs, chunk, noise, tau, w));
    std::vector<double> analytic;
    for (const auto& g : tape.ParamGradients())
      analytic.insert(analytic.end(), g.values().begin(), g.values().end());
    const nn::Matrix wg = tape.grad(w);
    analytic.insert(analytic.end(), wg.values().begin(), wg.values().end());

    std::vector<double> point = params.Flatten();
    const std::size_t nparams = point.size();
    point.insert(point.end(), wrench.begin(), wrench.end());
    nn::ParamSet scratch = params;
    const nn::ScalarFunction f = [&](std::span<const double> x) {
      scratch.Unflatten(x.subspan(0, nparams));
      nn::Tape t(&scratch, false);
      const nn::Var wv = t.Input(nn::Matrix::RowVector(x.subspan(nparams, 6)));
      return t.value(model.Loss(t, obs, chunk, noise, tau, wv))(0, 0);
    };
    const std::vector<double> numeric = nn::FivePointDifferences(f, point, 1e-4);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
      worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
    }
    coords += analytic.size();
  }
  r.passed = worst < 1e-4;
  r.detail = Fmt("max relative error %.3e over %zu instances (%zu coordinates)", worst, instances,
                 coords);
  return r;
}

CheckResult CheckMoeContracts(std::size_t tokens, std::uint64_t seed) {
  CheckResult r = Named("moe_contracts");
  nn::Rng rng(seed);
  nn::ParamSet params;
  const std::size_t width = 8;
  const moe::CrossScaleMoe moe = moe::CrossScaleMoe::Create(params, width, rng);
  // Larger gate weights so routing is far from uniform.
  for (double& v : params.mutable_value(moe.gate_layer().weight).values()) v *= 4.0;
  double simplex = 0.0, hull = 0.0;
  std::size_t mismatched = 0;
  const std::size_t batch = 1000;
  for (std::size_t done = 0; done < tokens; done += batch) {
    const std::size_t rows = std::min(batch, tokens - done);
    nn::Tape tape(&params, false);
    const nn::Var x = tape.Input(RandomMatrix(rows, width, rng, 2.0));
    const nn::Matrix gate = tape.value(moe.Gate(tape, x));
    std::array<nn::Matrix, moe::kExpertCount> experts;
    for (std::size_t m = 0; m < moe::kExpertCount; ++m)
      experts[m] = tape.value(moe.ExpertOutput(tape, m, x));
    const nn::Matrix soft = tape.value(moe.Forward(tape, x, moe::RoutingMode::kSoft));
    const nn::Matrix top1 = tape.value(moe.Forward(tape, x, moe::RoutingMode::kTop1));
    for (std::size_t i = 0; i < rows; ++i) {
      double sum = 0.0;
      std::size_t best = 0;
      for (std::size_t m = 0; m < moe::kExpertCount; ++m) {
        sum += gate(i, m);
        if (gate(i, m) < 0.0) simplex = std::max(simplex, -gate(i, m));
        if (gate(i, m) > gate(i, best)) best = m;
      }
      simplex = std::max(simplex, std::abs(sum - 1.0));
      double residual = 0.0;
      for (std::size_t d = 0; d < width; ++d) {
        double mix = 0.0;
        for (std::size_t m = 0; m < moe::kExpertCount; ++m) mix += gate(i, m) * experts[m](i, d);
        residual += (soft(i, d) - mix) * (soft(i, d) - mix);
        if (!SameBits(top1(i, d), experts[best](i, d))) ++mismatched;
      }
      hull = std::max(hull, std::sqrt(residual));
    }
  }
  r.passed = simplex <= 1e-12 && hull < 1e-9 && mismatched == 0;
  r.detail = Fmt("simplex error %.2e, hull residual %.2e, top1 mismatches %zu over %zu tokens",
                 simplex, hull, mismatched, tokens);
  return r;
}

CheckResult CheckFlowSampler() {
  CheckResult r = Named("flow_sampler");
  nn::Rng rng(7);
  std::vector<double> start(5), c(5);
  for (double& v : start) v = rng.Normal();
  for (double& v : c) v = rng.Normal();
  double constant_err = 0.0;
  for (const std::size_t n : {1, 7, 10, 64, 512}) {
    const auto out = flow::EulerIntegrate(
        start, n, [&](std::span<const double>, double) { return c; });
    for (std::size_t i = 0; i < c.size(); ++i)
      constant_err = std::max(constant_err, std::abs(out[i] - (start[i] + c[i])));
  }
  const flow::VelocityField linear = [](std::span<const double> a, double) {
    return std::vector<double>(a.begin(), a.end());
  };
  std::vector<double> logn, loge;
  for (std::size_t n = 8; n <= 512; n *= 2) {
    const double v = flow::EulerIntegrate(std::vector<double>{1.0}, n, linear)[0];
    logn.push_back(std::log(static_cast<double>(n)));
    loge.push_back(std::log(std::abs(std::exp(1.0) - v)));
  }
  const double mx = [&] { double s = 0; for (double v : logn) s += v; return s / logn.size(); }();
  const double my = [&] { double s = 0; for (double v : loge) s += v; return s / loge.size(); }();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < logn.size(); ++i) {
    sxy += (logn[i] - mx) * (loge[i] - my);
    sxx += (logn[i] - mx) * (logn[i] - mx);
  }
  const double order = -sxy / sxx;
  const double compound = flow::EulerIntegrate(std::vector<double>{1.0}, 10, linear)[0];
  const double closed = std::pow(1.1, 10.0);
  r.passed = constant_err <= 1e-12 && order >= 0.8 && order <= 1.2 &&
             std::abs(compound - closed) <= 1e-4 && std::abs(compound - 2.5937) <= 1e-4;
  r.detail = Fmt("constant-field error %.1e, convergence order %.4f, N=10 gives %.10f", constant_err,
                 order, compound);
  return r;
}

CheckResult CheckControllability(std::size_t samples, std::uint64_t seed) {
  CheckResult r = Named("controllability");
  using analysis::ControlMode;
  std::string failures;
  std::size_t points = 0;
  double worst_tail = 0.0;
  for (const double stiffness : {500.0, 1000.0, 4000.0}) {
    for (const double depth : {0.001, 0.01, 0.04}) {
      sim::EnvParams env;
      env.stiffness = stiffness;
      const geom::Pose6 op{0.03 * depth, -0.02, -depth, 0.0, 0.0, 0.0};
      const nn::Matrix jac = analysis::LinearizeEnv(env, op);
      for (const ControlMode mode : {ControlMode::kPositionOnly, ControlMode::kHybrid}) {
        const bool hybrid = mode == ControlMode::kHybrid;
        const auto report = analysis::Analyze(analysis::BuildSystem(jac, mode));
        const auto reach = analysis::ReachableDimEstimate(env, mode, op, samples, seed + points);
        const std::size_t want = hybrid ? 12 : 6;
        worst_tail = std::max(worst_tail, reach.tail_ratio);
        if (report.rank != want || report.kappa != (hybrid ? 1.0 : 0.5) ||
            reach.dimension != want || !(reach.tail_ratio < 1e-6))
          failures += Fmt(" [k=%g depth=%g %s: rank %zu kappa %g reach %zu tail %.1e]", stiffness,
                          depth, hybrid ? "hybrid" : "position", report.rank, report.kappa,
                          reach.dimension, reach.tail_ratio);
        ++points;
      }
    }
  }
  r.passed = failures.empty();
  r.detail = failures.empty()
                 ? Fmt("%zu operating points: position-only rank 6 kappa 0.5 reachable 6, hybrid "
                       "rank 12 kappa 1 reachable 12; worst tail ratio %.1e",
                       points, worst_tail)
                 : "mismatch:" + failures;
  return r;
}

CheckResult CheckHybridTracking() {
  CheckResult r = Named("hybrid_tracking");
  sim::EnvParams env;
  env.damping = 0.0;  // pure spring: force linear in penetration
  env.friction = 0.0;
  const double target = 20.0;
  sim::HybridGains gains{1.0 / (2.0 * env.stiffness)};
  sim::SimState state = sim::MakeState({0.0, 0.0, env.surface_height, 1.0, 0.0, 0.0, 0.0}, env);
  flow::ActionVector hold;
  hold.wrench[2] = target;
  const double expected_rate = 1.0 - gains.admittance * env.stiffness;
  double worst_rate = 0.0;
  std::size_t converged_at = 0;
  double prev = std::abs(target - sim::NormalForce(state.wrench, env));
  for (std::size_t step = 1; step <= 50; ++step) {
    state = sim::StepHybrid(state, hold, env, gains);
    const double err = std::abs(target - sim::NormalForce(state.wrench, env));
    if (prev > 1e-6) worst_rate = std::max(worst_rate, std::abs(err / prev - expected_rate) / expected_rate);
    if (!converged_at && err <= 0.5) converged_at = step;
    prev = err;
  }
  r.passed = converged_at > 0 && converged_at <= 50 && worst_rate <= 0.05;
  r.detail = Fmt("within 0.5 N after %zu steps, contraction deviates %.2e from %.3f",
                 converged_at, worst_rate, expected_rate);
  return r;
}

CheckResult CheckSegmentationSuite() {
  CheckResult r = Named("segmentation");
  using data::SkillLabel;
  const data::SegmentationRules rules;
  const std::size_t len = rules.window;
  struct Window {
    SkillLabel expected;
    std::vector<geom::Pose7> poses;
    std::vector<geom::Wrench> wrenches;
  };
  auto make = [&](SkillLabel label, double j) {
    Window w{label, {}, {}};
    for (std::size_t i = 0; i < len; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(len - 1);
      geom::Pose7 p{0.1, 0.2, 0.3, 1.0, 0.0, 0.0, 0.0};
      geom::Wrench f{0.0, 0.0, 2.0, 0.0, 0.0, 0.0};
      switch (label) {
        case SkillLabel::kWipe:
          p[0] += (0.08 + 0.01 * j) * s;
          f[2] = 2.0 + (12.0 + j) * s;
          break;
        case SkillLabel::kPush:
          p[2] -= (0.06 + 0.005 * j) * s;
          f[2] = 2.0 + (6.0 + 0.5 * j) * s;
          break;
        case SkillLabel::kGrasp:
          p[2] += (0.12 + 0.01 * j) * s;
          f[0] = (8.0 + 0.5 * j) * s;
          break;
        case SkillLabel::kRotate:
          f[0] = (1.5 + 0.2 * j) * s;
          f[1] = -(1.5 + 0.2 * j) * s;
          f[2] = 2.0 + (1.5 + 0.2 * j) * (1.0 - s);
          f[3] = 0.3 * s;
          break;
        case SkillLabel::kExplore:
          p[0] += 0.01 * j * s;
          p[2] += 0.02 * s;
          f[0] = 0.5 * s;
          f[2] = 2.0 + 3.0 * s;
          break;
      }
      w.poses.push_back(p);
      w.wrenches.push_back(f);
    }
    return w;
  };
  std::size_t correct = 0, total = 0, rule_errors = 0;
  for (const SkillLabel label : {SkillLabel::kWipe, SkillLabel::kPush, SkillLabel::kGrasp,
                                 SkillLabel::kRotate, SkillLabel::kExplore}) {
    for (int j = 0; j < 5; ++j) {
      const Window w = make(label, j);
      const auto f = data::ComputeFeatures(w.poses, w.wrenches);
      const bool rules_fired[] = {
          f.position_change > rules.wipe_position && f.force_amplitude > rules.wipe_force,
          f.z_change > rules.push_z && f.z_force_amplitude > rules.push_force_z,
          f.z_change > rules.grasp_z && f.force_amplitude > rules.grasp_force,
          std::all_of(f.axis_force_change.begin(), f.axis_force_change.end(),
                      [&](double c) { return c > rules.rotate_axis_force; })};
      const int fired = static_cast<int>(std::count(std::begin(rules_fired), std::end(rules_fired), true));
      const bool designed = label == SkillLabel::kExplore
                                ? fired == 0
                                : fired == 1 && rules_fired[static_cast<std::size_t>(label)];
      if (!designed) ++rule_errors;
      const SkillLabel got = data::ClassifyWindow(f, rules);
      if (got == label && ((got == SkillLabel::kExplore) == (fired == 0))) ++correct;
      ++total;
    }
  }
  r.passed = correct == total && rule_errors == 0;
  r.detail = Fmt("%zu/%zu windows labelled as designed, %zu windows not matching exactly one rule",
                 correct, total, rule_errors);
  return r;
}

data::Trajectory RandomTrajectory(nn::Rng& rng) {
  auto value = [&]() -> double {
    switch (rng.Index(12)) {
      case 0: return -0.0;
      case 1: return std::numeric_limits<double>::denorm_min();
      case 2: return std::numeric_limits<double>::max();
      case 3: return std::numeric_limits<double>::lowest();
      case 4: return std::nextafter(1.0, 2.0);
      default: return rng.Normal() * std::ldexp(1.0, static_cast<int>(rng.Index(80)) - 40);
    }
  };
  const char* words[] = {"press", "the", "bottle", "gently", "wipe", "firm", "contact", "lift"};
  auto sentence = [&] {
    std::string s;
    const std::size_t n = 1 + rng.Index(6);
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + std::string(words[rng.Index(8)]);
    return s;
  };
  data::Trajectory t;
  t.task = std::string(sim::TaskName(static_cast<sim::TaskKind>(rng.Index(3))));
  t.seed = (static_cast<std::uint64_t>(rng.Index(1u << 30)) << 32) | rng.Index(1u << 30);
  t.object = {value(), value(), value()};
  t.task_prompt = sentence();
  const std::size_t n = 1 + rng.Index(40);
  double time = rng.Uniform(-5.0, 5.0);
  for (std::size_t i = 0; i < n; ++i) {
    time = std::nextafter(time + rng.Uniform(0.0, 0.1), 1e9);
    t.timestamps.push_back(time);
    geom::Pose7 p;
    geom::Wrench w;
    data::Action a;
    for (double& v : p) v = value();
    for (double& v : w) v = value();
    for (double& v : a) v = value();
    t.poses.push_back(p);
    t.wrenches.push_back(w);
    t.actions.push_back(a);
    t.progress.push_back(value());
  }
  const std::size_t cams = rng.Index(3);
  t.camera_tokens = 1 + rng.Index(3);
  const std::size_t width = t.camera_tokens * (1 + rng.Index(4));
  for (std::size_t c = 0; c < cams; ++c) {
    nn::Matrix m(n, width);
    for (double& v : m.values()) v = value();
    t.cameras.push_back(std::move(m));
  }
  const std::size_t segments = rng.Index(std::min<std::size_t>(n, 5) + 1);
  for (std::size_t s = 0; s < segments; ++s) t.boundaries.push_back(rng.Index(n));
  std::sort(t.boundaries.begin(), t.boundaries.end());
  const bool with_targets = rng.Index(2) == 1;
  for (std::size_t s = 0; s < segments; ++s) {
    t.subtask_prompts.push_back(sentence());
    if (!with_targets) continue;
    transition::SubtaskTarget target;
    for (double& v : target.pose) v = value();
    if (rng.Index(2)) target.force = transition::ForceBounds{value(), value()};
    t.targets.push_back(target);
  }
  const std::size_t skills = rng.Index(5);
  for (std::size_t s = 0; s < skills; ++s)
    t.skills.push_back(static_cast<data::SkillLabel>(rng.Index(data::kSkillCount)));
  return t;
}

CheckResult CheckTrajectoryRoundTrip(std::size_t count, std::uint64_t seed) {
  CheckResult r = Named("trajectory_roundtrip");
  nn::Rng rng(seed);
  std::size_t exact = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < count; ++i) {
    const data::Trajectory t = RandomTrajectory(rng);
    try {
      const std::string bytes = data::SerializeTrajectory(t);
      const data::Trajectory back = data::DeserializeTrajectory(bytes);
      bool same = data::SerializeTrajectory(back) == bytes && back.size() == t.size() &&
                  back.task == t.task && back.seed == t.seed &&
                  back.task_prompt == t.task_prompt && back.boundaries == t.boundaries &&
                  back.subtask_prompts == t.subtask_prompts && back.skills == t.skills &&
                  back.cameras.size() == t.cameras.size() &&
                  back.targets.size() == t.targets.size();
      for (std::size_t k = 0; same && k < t.size(); ++k) {
        same = SameBits(back.timestamps[k], t.timestamps[k]) &&
               SameBits(back.progress[k], t.progress[k]);
        for (std::size_t j = 0; j < 7; ++j) same = same && SameBits(back.poses[k][j], t.poses[k][j]);
        for (std::size_t j = 0; j < 6; ++j)
          same = same && SameBits(back.wrenches[k][j], t.wrenches[k][j]);
        for (std::size_t j = 0; j < flow::kActionDim; ++j)
          same = same && SameBits(back.actions[k][j], t.actions[k][j]);
      }
      for (std::size_t c = 0; same && c < t.cameras.size(); ++c) {
        const auto a = t.cameras[c].values();
        const auto b = back.cameras[c].values();
        same = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), SameBits);
      }
      for (std::size_t j = 0; same && j < 3; ++j) same = SameBits(back.object[j], t.object[j]);
      if (same) ++exact;
      else if (first_failure.empty()) first_failure = Fmt("trajectory %zu differs", i);
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = Fmt("trajectory %zu: ", i) + e.what();
    }
  }
  r.passed = exact == count;
  r.detail = Fmt("%zu/%zu bit-exact", exact, count) +
             (first_failure.empty() ? "" : "; " + first_failure);
  return r;
}

CheckResult CheckSynchronization(std::uint64_t seed) {
  CheckResult r = Named("sync_integral");
  nn::Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    data::WrenchStream w;
    std::array<double, 6> base, slope, wave;
    for (std::size_t c = 0; c < 6; ++c) {
      base[c] = rng.Uniform(5.0, 20.0);
      slope[c] = rng.Uniform(-2.0, 2.0);
      wave[c] = rng.Uniform(0.0, 2.0);
    }
    const double duration = 2.0;
    for (std::size_t i = 0; i <= 600; ++i) {
      const double t = duration * static_cast<double>(i) / 600.0;
      geom::Wrench f;
      for (std::size_t c = 0; c < 6; ++c)
        f[c] = base[c] + slope[c] * t + wave[c] * std::sin(std::numbers::pi * t);
      w.times.push_back(t);
      w.samples.push_back(f);
    }
    std::vector<double> frames;
    for (std::size_t k = 0; k < 60; ++k) frames.push_back(static_cast<double>(k) / 30.0);
    const data::SyncResult sync = data::SynchronizeStreams(w, frames);
    for (std::size_t c = 0; c < 6; ++c) {
      const double exact = data::TrapezoidIntegral(w, c);
      const double windowed = data::WindowedIntegral(sync, c, 1.0 / 30.0);
      worst = std::max(worst, std::abs(windowed - exact) / std::abs(exact));
    }
  }
  r.passed = worst < 0.01;
  r.detail = Fmt("worst relative integral error %.3e", worst);
  return r;
}

CheckResult CheckTransitionLabels(std::size_t demos, std::size_t samples, std::uint64_t seed) {
  CheckResult r = Named("label_oracle");
  const sim::EpisodeConfig config;
  const transition::TransitionParams& params = config.transition;
  std::size_t total = 0, within = 0, exact = 0;
  double worst_closed = 0.0;
  for (std::size_t d = 0; d < demos; ++d) {
    const auto task = static_cast<sim::TaskKind>(d % 3);
    const auto demo = sim::RunDemonstration(sim::MakeScene(task, seed + d), config);
    const data::Trajectory& t = demo.trajectory;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& target = t.targets.at(t.SubtaskAt(i));
      // Tool axis from the quaternion (w, x, y, z): third column of the rotation.
      auto axis = [](const geom::Pose7& p) {
        const double n = std::sqrt(p[3] * p[3] + p[4] * p[4] + p[5] * p[5] + p[6] * p[6]);
        const double w = p[3] / n, x = p[4] / n, y = p[5] / n, z = p[6] / n;
        return geom::Vec3{2 * (x * z + w * y), 2 * (y * z - w * x), 1 - 2 * (x * x + y * y)};
      };
      const geom::Vec3 a = axis(t.poses[i]), b = axis(target.pose);
      const double cosine = std::clamp(
          (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) /
              std::sqrt((a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) * (b[0] * b[0] + b[1] * b[1] + b[2] * b[2])),
          -1.0, 1.0);
      transition::TransitionObservation obs;
      obs.params = params;
      obs.alignment = 0.5 * (cosine + 1.0);
      obs.distance = std::hypot(t.poses[i][0] - target.pose[0], t.poses[i][1] - target.pose[1],
                                t.poses[i][2] - target.pose[2]);
      if (target.force) {
        obs.params.force = *target.force;
        const double mag = std::hypot(t.wrenches[i][0], t.wrenches[i][1], t.wrenches[i][2]);
        obs.force = std::clamp(mag, target.force->lower, target.force->upper);
      } else {
        obs.force = params.force.upper;
      }
      const double recomputed =
          DirectProduct(obs.alignment, obs.params.alpha, obs.params.rate, obs.distance, obs.force,
                        obs.params.force.lower, obs.params.force.upper);
      worst_closed = std::max(worst_closed, std::abs(recomputed - t.progress[i]));
      if (std::abs(recomputed - t.progress[i]) <= 1e-12) ++exact;
      const auto mc = transition::MonteCarloTransition(obs, samples, seed * 7919ULL + total);
      const double sigma =
          std::max(mc.stderr_, std::sqrt(recomputed * (1.0 - recomputed) / samples));
      const double diff = std::abs(t.progress[i] - mc.estimate);
      if (diff <= 3.0 * sigma) ++within;
      ++total;
    }
  }
  const std::size_t needed = (total * 99 + 99) / 100;
  r.passed = total > 0 && exact == total && within >= needed;
  r.detail = Fmt("%zu labels: %zu match the independent recomputation (max diff %.1e), %zu within "
                 "3 SE of the Monte Carlo oracle (need %zu)",
                 total, exact, worst_closed, within, needed);
  return r;
}

CheckResult CheckCheckpointRoundTrip(std::uint64_t seed) {
  CheckResult r = Named("checkpoint_roundtrip");
  nn::Rng rng(seed);
  Checkpoint ckpt;
  ckpt.config.width = 8;
  ckpt.config.chunk = 2;
  ckpt.config.flow_hidden = 16;
  ckpt.corpus = sim::DefaultPromptCorpus();
  const context::Vocabulary vocab = context::Vocabulary::Build(ckpt.corpus);
  PolicyModel::Create(ckpt.params, SpecFromConfig(ckpt.config, vocab, sim::VisualLayout{}), rng);
  nn::OptimizerState opt = nn::OptimizerState::For(ckpt.params);
  nn::Gradients grads = ckpt.params.ZerosLike();
  for (auto& g : grads)
    for (double& v : g.values()) v = rng.Normal();
  nn::AdamWStep(ckpt.params, grads, opt);
  ckpt.optimizer = opt;
  ckpt.ema = ckpt.params;
  ckpt.step = 1;
  for (double& v : ckpt.normalizers.action.mean) v = rng.Normal();
  const std::string bytes = SerializeCheckpoint(ckpt);
  const Checkpoint back = DeserializeCheckpoint(bytes);
  const bool same = SerializeCheckpoint(back) == bytes &&
                    back.params.Flatten() == ckpt.params.Flatten() && back.step == ckpt.step;
  bool restored = false;
  try {
    RestorePolicy(back);
    restored = true;
  } catch (const Error&) {
  }
  r.passed = same && restored;
  r.detail = Fmt("%zu bytes, identical after round trip: %s, policy restored: %s", bytes.size(),
                 same ? "yes" : "no", restored ? "yes" : "no");
  return r;
}

std::vector<std::string> VerifyCheckNames() {
  return {"gradcheck",     "transition_oracle",          "gamma_identity",       "moe_contracts",
          "flow_sampler",  "controllability",      "hybrid_tracking",      "segmentation",
          "trajectory_roundtrip", "checkpoint_roundtrip", "sync_integral", "label_oracle"};
}

std::vector<CheckResult> RunVerify(const VerifyOptions& options) {
  const auto names = VerifyCheckNames();
  for (const auto& o : options.only)
    Require(std::find(names.begin(), names.end(), o) != names.end(), ErrorCode::kUsage,
            "unknown check '" + o + "'");
  const std::uint64_t seed = options.seed;
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"gradcheck", [&] { return CheckPipelineGradients(20, seed); }},
      {"transition_oracle", [&] { return CheckTransitionOracle(100, 1000000, seed, options.fault); }},
      {"gamma_identity", [&] { return CheckGammaIdentity(1000, seed); }},
      {"moe_contracts", [&] { return CheckMoeContracts(100000, seed); }},
      {"flow_sampler", [] { return CheckFlowSampler(); }},
      {"controllability", [&] { return CheckControllability(10000, seed); }},
      {"hybrid_tracking", [] { return CheckHybridTracking(); }},
      {"segmentation", [] { return CheckSegmentationSuite(); }},
      {"trajectory_roundtrip", [&] { return CheckTrajectoryRoundTrip(1000, seed); }},
      {"checkpoint_roundtrip", [&] { return CheckCheckpointRoundTrip(seed); }},
      {"sync_integral", [&] { return CheckSynchronization(seed); }},
      {"label_oracle", [&] { return CheckTransitionLabels(6, 100000, seed); }},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, run] : checks) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), name) == options.only.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = Named(name);
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string FormatVerifyReport(const std::vector<CheckResult>& results) {
  std::string out;
  for (const auto& r : results)
    out += (r.passed ? "PASS " : "FAIL ") + r.name + (r.passed ? " (" : ": ") + r.detail +
           (r.passed ? ")" : "") + "\n";
  return out;
}

}  // namespace cf::app
