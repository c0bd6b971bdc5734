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

// fdris: train, evaluate and inspect full-duplex two-RIS DDPG agents.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 failed numerical self-check.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "fdris/errors.hpp"
#include "fdris/harness.hpp"
#include "fdris/selfcheck.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kCheckFailed = 3;

std::optional<std::string> non_empty(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex two-RIS DDPG experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string profile;
  std::string out_dir;
  auto* train = app.add_subcommand("train", "run the training loop for every seeded run");
  train->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  train->add_option("--profile", profile, "small or paper")->check(CLI::IsMember({"small", "paper"}));
  train->add_option("--out", out_dir, "output directory");

  std::string eval_config;
  std::string checkpoint;
  std::string eval_profile;
  std::string eval_out;
  std::size_t eval_episodes = 0;
  auto* eval = app.add_subcommand("eval-cdf", "greedy rollouts of a checkpoint; writes cdf.csv");
  eval->add_option("--config", eval_config, "config file")->required()->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint, "checkpoint written by train");
  eval->add_option("--profile", eval_profile, "small or paper")
      ->check(CLI::IsMember({"small", "paper"}));
  eval->add_option("--out", eval_out, "output directory");
  eval->add_option("--episodes", eval_episodes, "episodes to roll out (default from config)");

  std::string variant;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t bits = 2;
  std::size_t groups = 9;
  auto* signaling = app.add_subcommand("signaling", "BS-to-RIS signaling bits per update");
  signaling->add_option("--variant", variant, "agent variant")->required();
  signaling->add_option("--n1", n1, "RIS1 elements")->required();
  signaling->add_option("--n2", n2, "RIS2 elements")->required();
  signaling->add_option("--bits", bits, "phase bits for quantized variants");
  signaling->add_option("--groups", groups, "groups per RIS for the grouped variant");

  std::uint64_t selftest_seed = 7;
  auto* selftest = app.add_subcommand("selftest", "run the numerical self-checks");
  selftest->add_option("--seed", selftest_seed, "seed for the random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      fdris::ExperimentConfig cfg = fdris::load_config(config_path, non_empty(profile));
      if (!out_dir.empty()) cfg.output = out_dir;
      const auto result = fdris::run_training(cfg);
      const auto& last = result.mean.back();
      std::printf("trained %s: %zu runs x %zu episodes, final mean reward %.6g -> %s\n",
                  std::string(fdris::variant_name(cfg.agent.variant)).c_str(), cfg.runs,
                  cfg.episodes, last.mean_reward, cfg.output.string().c_str());
    } else if (*eval) {
      fdris::ExperimentConfig cfg = fdris::load_config(eval_config, non_empty(eval_profile));
      if (!eval_out.empty()) cfg.output = eval_out;
      std::optional<fdris::TensorArchive> archive;
      if (!checkpoint.empty()) archive = fdris::TensorArchive::load(checkpoint);
      const auto cdf = fdris::run_cdf_eval(cfg, archive, eval_episodes ? eval_episodes : cfg.eval_episodes);
      const std::size_t mid = cdf.r_bs.size() / 2;
      std::printf("%zu samples, median r_bs %.6g, median r_dl %.6g -> %s\n", cdf.r_bs.size(),
                  cdf.r_bs[mid], cdf.r_dl[mid], (cfg.output / "cdf.csv").string().c_str());
    } else if (*signaling) {
      fdris::Variant v;
      try {
        v = fdris::parse_variant(variant);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
      }
      std::printf("%llu\n", static_cast<unsigned long long>(fdris::signaling_bits(v, n1, n2, bits, groups)));
    } else if (*selftest) {
      bool ok = true;
      for (const auto& r : fdris::run_selfchecks(selftest_seed)) {
        std::printf("%s  %-34s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? 0 : kCheckFailed;
    }
  } catch (const fdris::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
