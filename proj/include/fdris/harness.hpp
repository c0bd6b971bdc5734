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

#pragma once

// Experiment configuration, the training loop, rate-CDF evaluation and
// signaling accounting.
//
// Config files are line oriented:
//
//   # comment
//   section.key = value
//
// Unknown keys are errors. Keys are applied in this order regardless of where
// they appear: experiment.profile, experiment.scenario, then every other key
// in file order. See README.md for the full key list.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdris/agent.hpp"
#include "fdris/baselines.hpp"
#include "fdris/env.hpp"

namespace fdris {

enum class Variant {
  msf_drl_lssic,
  msf_drl_hsic,
  msf_drl_pos,
  msf_q_drl,
  gp_msf_q_drl,
  perfcsi,
  noiscsi,
  oupsbf,
  randpsbf,
};

/// Throws std::invalid_argument for an unknown name.
Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

struct AgentSettings {
  Variant variant = Variant::msf_drl_lssic;
  std::size_t bits = 2;
  std::size_t groups = 9;
  double nmse_db = 0.0;
  double csi_h_aa_noise_var = 1e-12;
  bool drop_inter_ris = false;
  std::size_t hidden = 100;
  std::size_t layers = 2;
  double sigma0 = 0.3;
  std::optional<std::size_t> noise_horizon;  // defaults to the episode count
  double ou_theta = 0.15;
  double ou_sigma = 0.3;
};

struct ExperimentConfig {
  std::string profile = "paper";
  std::string scenario = "urban";
  std::size_t episodes = 100;
  std::size_t steps = 1000;
  std::size_t runs = 8;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t eval_episodes = 10;
  std::filesystem::path output = "fdris_out";
  EnvConfig env;
  AgentSettings agent;
  TrainConfig train;

  /// Environment settings implied by the variant (SI method, positions).
  EnvConfig env_config() const;
  ActorSpec actor_spec() const;
  NoiseSchedule noise_schedule() const;
  CsiNoise csi_noise() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Applies a named profile ("small" or "paper") on top of `config`.
void apply_profile(std::string_view name, ExperimentConfig& config);

/// Parses config text. `profile_override` replaces experiment.profile.
ExperimentConfig parse_config(std::string_view text,
                              std::optional<std::string> profile_override = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::string> profile_override = std::nullopt);

struct MetricsRow {
  std::size_t run = 0;
  std::size_t episode = 0;
  std::size_t window = 0;  // steps averaged
  double mean_r_bs = 0.0;
  double mean_r_dl = 0.0;
  double mean_reward = 0.0;
  double sigma = 0.0;
  double wall_ms = 0.0;
};

inline constexpr std::string_view kMetricsHeader =
    "run,episode,window,mean_r_bs,mean_r_dl,mean_reward,sigma,wall_ms";

struct RunResult {
  std::vector<MetricsRow> rows;
  std::optional<TensorArchive> checkpoint;  // unset for the random baseline
};

/// One seeded run of the training loop.
RunResult run_single(const ExperimentConfig& config, std::size_t run);

struct TrainingResult {
  std::vector<RunResult> runs;
  std::vector<MetricsRow> mean;
};

/// Every run, plus the run-averaged rows. When `write` is set, metrics and
/// checkpoints are written below config.output.
TrainingResult run_training(const ExperimentConfig& config, bool write = true);

std::vector<MetricsRow> average_rows(const std::vector<RunResult>& runs);
void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows,
                   bool mean_file);

struct CdfResult {
  std::vector<double> r_bs;  // sorted
  std::vector<double> r_dl;  // sorted
};

/// Greedy rollouts of a trained policy (or the random baseline, which needs
/// no checkpoint). Writes cdf.csv below config.output when `write` is set.
CdfResult run_cdf_eval(const ExperimentConfig& config, const std::optional<TensorArchive>& checkpoint,
                       std::size_t episodes, bool write = true);

/// Bits sent from the BS to both RIS controllers per configuration update.
std::uint64_t signaling_bits(Variant variant, std::size_t n1, std::size_t n2, std::size_t bits,
                             std::size_t groups);

}  // namespace fdris
