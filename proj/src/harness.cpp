// SPDX-License-Identifier: Apache-2.0
//
// fdris: full-duplex two-RIS cell simulator and DDPG training harness
// Copyright (C) 2026 The fdris authors
// All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fdris/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "fdris/errors.hpp"
#include "fdris/features.hpp"

namespace fdris {

namespace {

constexpr std::uint64_t kEvalRun = 0xE7A1;

struct Accumulator {
  double r_bs = 0.0;
  double r_dl = 0.0;
  double reward = 0.0;
  std::size_t n = 0;

  void add(const StepOutcome& o) {
    r_bs += o.r_bs;
    r_dl += o.r_dl;
    reward += o.reward;
    ++n;
  }
};

// Chooses actions for one run; owns the learner when there is one.
class Policy {
 public:
  Policy(const ExperimentConfig& config, std::size_t run)
      : config_(config),
        env_config_(config.env_config()),
        layout_(FeatureLayout::from(env_config_)),
        spec_(config.actor_spec()),
        schedule_(config.noise_schedule()),
        csi_noise_(config.csi_noise()),
        exploration_rng_(make_stream(config.seed, run, Stream::exploration)),
        replay_rng_(make_stream(config.seed, run, Stream::replay)),
        baseline_rng_(make_stream(config.seed, run, Stream::baseline)),
        ou_(schedule_.ou_theta, schedule_.ou_sigma, schedule_.ou_dt) {
    if (config.agent.variant != Variant::randpsbf) {
      Rng init = make_stream(config.seed, run, Stream::network_init);
      agent_.emplace(spec_, config.train, init);
      buffer_.emplace(config.train.buffer);
    }
  }

  bool learns() const { return agent_.has_value(); }
  DdpgAgent& agent() { return *agent_; }
  const FeatureLayout& layout() const { return layout_; }

  void begin_episode() { ou_.reset(); }

  double sigma(std::size_t episode) const {
    if (!agent_) return 0.0;
    if (schedule_.kind == NoiseSchedule::Kind::ou) return schedule_.ou_sigma;
    return schedule_.sigma(episode);
  }

  Action choose(const Environment& env, const nn::Vector& features, std::size_t episode,
                bool explore_on) {
    if (!agent_) return randpsbf_action(env_config_.geometry, env_config_.limits, baseline_rng_);
    RawAction raw = agent_->act(features);
    if (explore_on) {
      if (schedule_.kind == NoiseSchedule::Kind::ou) {
        raw = explore_ou(std::move(raw), ou_, exploration_rng_);
      } else {
        raw = explore(std::move(raw), schedule_.sigma(episode), exploration_rng_);
      }
    }
    Action a = scale_to_action(raw, spec_);
    if (!spec_.beamformer_heads) {
      const CsiView csi = config_.agent.variant == Variant::perfcsi
                              ? perfect_csi(env.channels())
                              : corrupt_csi(env.channels(), csi_noise_, baseline_rng_);
      a = perfcsi_agent_action(std::move(a), csi);
    }
    return a;
  }

  void observe(const nn::Vector& state, const Action& action, double reward,
               const nn::Vector& next_state) {
    if (!agent_) return;
    buffer_->push({state, encode_action(layout_, action), reward, next_state});
    if (auto batch = buffer_->sample(config_.train.batch, replay_rng_)) agent_->learn(*batch);
  }

 private:
  const ExperimentConfig& config_;
  EnvConfig env_config_;
  FeatureLayout layout_;
  ActorSpec spec_;
  NoiseSchedule schedule_;
  CsiNoise csi_noise_;
  Rng exploration_rng_;
  Rng replay_rng_;
  Rng baseline_rng_;
  OuProcess ou_;
  std::optional<DdpgAgent> agent_;
  std::optional<ReplayBuffer> buffer_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config, std::size_t run) {
  config.validate();
  Environment env(config.env_config(), config.seed, run);
  Policy policy(config, run);
  RunResult result;
  for (std::size_t e = 0; e < config.episodes; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    policy.begin_episode();
    nn::Vector features = encode_state(policy.layout(), env.reset());
    Accumulator acc;
    for (std::size_t t = 0; t < config.steps; ++t) {
      const Action action = policy.choose(env, features, e, true);
      const StepOutcome out = env.step(action);
      nn::Vector next = encode_state(policy.layout(), out.next_state);
      policy.observe(features, action, out.reward, next);
      acc.add(out);
      features = std::move(next);
    }
    const auto t1 = std::chrono::steady_clock::now();
    MetricsRow row;
    row.run = run;
    row.episode = e;
    row.window = acc.n;
    row.mean_r_bs = acc.r_bs / static_cast<double>(acc.n);
    row.mean_r_dl = acc.r_dl / static_cast<double>(acc.n);
    row.mean_reward = acc.reward / static_cast<double>(acc.n);
    row.sigma = policy.sigma(e);
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.rows.push_back(row);
  }
  if (policy.learns()) {
    TensorArchive archive;
    policy.agent().save(archive);
    result.checkpoint = std::move(archive);
  }
  return result;
}

std::vector<MetricsRow> average_rows(const std::vector<RunResult>& runs) {
  std::vector<MetricsRow> mean;
  if (runs.empty()) return mean;
  const double r = static_cast<double>(runs.size());
  for (std::size_t e = 0; e < runs[0].rows.size(); ++e) {
    MetricsRow m = runs[0].rows[e];
    m.run = 0;
    m.mean_r_bs = m.mean_r_dl = m.mean_reward = m.sigma = m.wall_ms = 0.0;
    for (const auto& run : runs) {
      const MetricsRow& x = run.rows.at(e);
      m.mean_r_bs += x.mean_r_bs;
      m.mean_r_dl += x.mean_r_dl;
      m.mean_reward += x.mean_reward;
      m.sigma += x.sigma;
      m.wall_ms += x.wall_ms;
    }
    m.mean_r_bs /= r;
    m.mean_r_dl /= r;
    m.mean_reward /= r;
    m.sigma /= r;
    m.wall_ms /= r;
    mean.push_back(m);
  }
  return mean;
}

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows,
                   bool mean_file) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    f << (mean_file ? std::string("mean") : std::to_string(r.run)) << ',' << r.episode << ','
      << r.window << ',' << fmt(r.mean_r_bs) << ',' << fmt(r.mean_r_dl) << ','
      << fmt(r.mean_reward) << ',' << fmt(r.sigma) << ',' << fmt(r.wall_ms) << '\n';
  }
  if (!f) throw Error("write failed for " + path.string());
}

TrainingResult run_training(const ExperimentConfig& config, bool write) {
  config.validate();
  TrainingResult result;
  result.runs.resize(config.runs);

  const std::size_t workers = std::min(config.threads, config.runs);
  if (workers <= 1) {
    for (std::size_t r = 0; r < config.runs; ++r) result.runs[r] = run_single(config, r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < config.runs; r = next++) {
          try {
            result.runs[r] = run_single(config, r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  result.mean = average_rows(result.runs);

  if (write) {
    std::filesystem::create_directories(config.output);
    for (std::size_t r = 0; r < config.runs; ++r) {
      write_metrics(config.output / ("metrics_run" + std::to_string(r) + ".csv"),
                    result.runs[r].rows, false);
      if (result.runs[r].checkpoint) {
        result.runs[r].checkpoint->save(config.output /
                                        ("checkpoint_run" + std::to_string(r) + ".rflb"));
      }
    }
    write_metrics(config.output / "metrics_mean.csv", result.mean, true);
  }
  return result;
}

CdfResult run_cdf_eval(const ExperimentConfig& config, const std::optional<TensorArchive>& checkpoint,
                       std::size_t episodes, bool write) {
  config.validate();
  Environment env(config.env_config(), config.seed, kEvalRun);
  Policy policy(config, kEvalRun);
  if (policy.learns()) {
    if (!checkpoint) throw CheckpointError("eval: this variant needs a checkpoint");
    policy.agent().load(*checkpoint);
  }
  CdfResult cdf;
  for (std::size_t e = 0; e < episodes; ++e) {
    nn::Vector features = encode_state(policy.layout(), env.reset());
    for (std::size_t t = 0; t < config.steps; ++t) {
      const Action action = policy.choose(env, features, e, false);
      const StepOutcome out = env.step(action);
      cdf.r_bs.push_back(out.r_bs);
      cdf.r_dl.push_back(out.r_dl);
      features = encode_state(policy.layout(), out.next_state);
    }
  }
  std::sort(cdf.r_bs.begin(), cdf.r_bs.end());
  std::sort(cdf.r_dl.begin(), cdf.r_dl.end());

  if (write) {
    std::filesystem::create_directories(config.output);
    const auto path = config.output / "cdf.csv";
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << "index,cdf,r_bs,r_dl\n";
    const double n = static_cast<double>(cdf.r_bs.size());
    for (std::size_t i = 0; i < cdf.r_bs.size(); ++i) {
      f << i << ',' << fmt(static_cast<double>(i + 1) / n) << ',' << fmt(cdf.r_bs[i]) << ','
        << fmt(cdf.r_dl[i]) << '\n';
    }
    if (!f) throw Error("write failed for " + path.string());
  }
  return cdf;
}

std::uint64_t signaling_bits(Variant variant, std::size_t n1, std::size_t n2, std::size_t bits,
                             std::size_t groups) {
  switch (variant) {
    case Variant::msf_q_drl:
      return static_cast<std::uint64_t>(bits) * (n1 + n2);
    case Variant::gp_msf_q_drl:
      return static_cast<std::uint64_t>(bits) * (groups + groups);
    default:
      return 64ULL * (n1 + n2);
  }
}

}  // namespace fdris
