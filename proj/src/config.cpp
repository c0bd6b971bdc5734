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

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fdris/errors.hpp"
#include "fdris/harness.hpp"

namespace fdris {

namespace {

struct Variants {
  Variant v;
  std::string_view name;
};

constexpr Variants kVariants[] = {
    {Variant::msf_drl_lssic, "msf-drl-lssic"}, {Variant::msf_drl_hsic, "msf-drl-hsic"},
    {Variant::msf_drl_pos, "msf-drl-pos"},     {Variant::msf_q_drl, "msf-q-drl"},
    {Variant::gp_msf_q_drl, "gp-msf-q-drl"},   {Variant::perfcsi, "perfcsi"},
    {Variant::noiscsi, "noiscsi"},             {Variant::oupsbf, "oupsbf"},
    {Variant::randpsbf, "randpsbf"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + std::string(v) + "'", 0, key);
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + std::string(v) + "'", 0,
                      key);
  }
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + std::string(v) + "'", 0, key);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, std::string_view)>;

template <class Get>
Setter real_at(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, std::string_view v) {
    get(c) = to_double(k, v);
  };
}

template <class Get>
Setter count_at(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, std::string_view v) {
    get(c) = static_cast<std::size_t>(to_uint(k, v));
  };
}

template <class Get>
Setter flag_at(Get get) {
  return [get](ExperimentConfig& c, const std::string& k, std::string_view v) {
    get(c) = to_bool(k, v);
  };
}

#define FDRIS_REAL(expr) real_at([](ExperimentConfig& c) -> double& { return expr; })
#define FDRIS_COUNT(expr) count_at([](ExperimentConfig& c) -> std::size_t& { return expr; })
#define FDRIS_FLAG(expr) flag_at([](ExperimentConfig& c) -> bool& { return expr; })

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["experiment.episodes"] = FDRIS_COUNT(c.episodes);
    t["experiment.steps"] = FDRIS_COUNT(c.steps);
    t["experiment.runs"] = FDRIS_COUNT(c.runs);
    t["experiment.threads"] = FDRIS_COUNT(c.threads);
    t["experiment.eval_episodes"] = FDRIS_COUNT(c.eval_episodes);
    t["experiment.seed"] = [](ExperimentConfig& c, const std::string& k, std::string_view v) {
      c.seed = to_uint(k, v);
    };
    t["experiment.output"] = [](ExperimentConfig& c, const std::string&, std::string_view v) {
      c.output = std::string(v);
    };

    t["geometry.mt"] = FDRIS_COUNT(c.env.geometry.mt);
    t["geometry.mr"] = FDRIS_COUNT(c.env.geometry.mr);
    t["geometry.n1h"] = FDRIS_COUNT(c.env.geometry.n1h);
    t["geometry.n1v"] = FDRIS_COUNT(c.env.geometry.n1v);
    t["geometry.n2h"] = FDRIS_COUNT(c.env.geometry.n2h);
    t["geometry.n2v"] = FDRIS_COUNT(c.env.geometry.n2v);
    t["geometry.spacing"] = FDRIS_REAL(c.env.geometry.spacing_wavelengths);
    t["geometry.bs_x"] = FDRIS_REAL(c.env.geometry.bs.x);
    t["geometry.bs_y"] = FDRIS_REAL(c.env.geometry.bs.y);
    t["geometry.ris1_x"] = FDRIS_REAL(c.env.geometry.ris1.x);
    t["geometry.ris1_y"] = FDRIS_REAL(c.env.geometry.ris1.y);
    t["geometry.ris2_x"] = FDRIS_REAL(c.env.geometry.ris2.x);
    t["geometry.ris2_y"] = FDRIS_REAL(c.env.geometry.ris2.y);
    t["geometry.ulue_x"] = FDRIS_REAL(c.env.geometry.ulue.x);
    t["geometry.ulue_y"] = FDRIS_REAL(c.env.geometry.ulue.y);
    t["geometry.dlue_x"] = FDRIS_REAL(c.env.geometry.dlue.x);
    t["geometry.dlue_y"] = FDRIS_REAL(c.env.geometry.dlue.y);

    t["channel.carrier_hz"] = FDRIS_REAL(c.env.channel.carrier_hz);
    t["channel.bandwidth_hz"] = FDRIS_REAL(c.env.channel.bandwidth_hz);
    t["channel.noise_dbm_per_hz"] = FDRIS_REAL(c.env.channel.noise_dbm_per_hz);
    t["channel.beta_ia_db"] = FDRIS_REAL(c.env.channel.beta_ia_db);
    t["channel.beta_ui_db"] = FDRIS_REAL(c.env.channel.beta_ui_db);
    t["channel.alpha_ai"] = FDRIS_REAL(c.env.channel.alpha_ai);
    t["channel.alpha_iu"] = FDRIS_REAL(c.env.channel.alpha_iu);
    t["channel.alpha_au"] = FDRIS_REAL(c.env.channel.alpha_au);
    t["channel.alpha_r"] = FDRIS_REAL(c.env.channel.alpha_r);
    t["channel.alpha_u"] = FDRIS_REAL(c.env.channel.alpha_u);
    t["channel.sigma_aa2"] = FDRIS_REAL(c.env.channel.sigma_aa2);
    t["channel.doppler_hz"] = FDRIS_REAL(c.env.channel.doppler_hz);
    t["channel.step_seconds"] = FDRIS_REAL(c.env.channel.step_seconds);
    t["channel.oscillators"] = FDRIS_COUNT(c.env.channel.oscillators);
    t["channel.path_loss"] = FDRIS_FLAG(c.env.channel.path_loss_enabled);

    t["env.delta"] = FDRIS_REAL(c.env.delta);
    t["env.p_a_max"] = FDRIS_REAL(c.env.limits.p_a_max);
    t["env.p_u_max"] = FDRIS_REAL(c.env.limits.p_u_max);
    t["env.mobility"] = FDRIS_FLAG(c.env.mobility);
    t["env.hsic_noise_var"] = FDRIS_REAL(c.env.hsic_noise_var);
    t["env.sigma_a2"] = [](ExperimentConfig& c, const std::string& k, std::string_view v) {
      c.env.sigma_a2 = to_double(k, v);
    };
    t["env.sigma_d2"] = [](ExperimentConfig& c, const std::string& k, std::string_view v) {
      c.env.sigma_d2 = to_double(k, v);
    };

    t["agent.variant"] = [](ExperimentConfig& c, const std::string& k, std::string_view v) {
      try {
        c.agent.variant = parse_variant(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0, k);
      }
    };
    t["agent.bits"] = FDRIS_COUNT(c.agent.bits);
    t["agent.groups"] = FDRIS_COUNT(c.agent.groups);
    t["agent.nmse_db"] = FDRIS_REAL(c.agent.nmse_db);
    t["agent.csi_h_aa_noise_var"] = FDRIS_REAL(c.agent.csi_h_aa_noise_var);
    t["agent.drop_inter_ris"] = FDRIS_FLAG(c.agent.drop_inter_ris);
    t["agent.hidden"] = FDRIS_COUNT(c.agent.hidden);
    t["agent.layers"] = FDRIS_COUNT(c.agent.layers);
    t["agent.sigma0"] = FDRIS_REAL(c.agent.sigma0);
    t["agent.noise_horizon"] = [](ExperimentConfig& c, const std::string& k, std::string_view v) {
      c.agent.noise_horizon = static_cast<std::size_t>(to_uint(k, v));
    };
    t["agent.ou_theta"] = FDRIS_REAL(c.agent.ou_theta);
    t["agent.ou_sigma"] = FDRIS_REAL(c.agent.ou_sigma);

    t["train.gamma"] = FDRIS_REAL(c.train.gamma);
    t["train.buffer"] = FDRIS_COUNT(c.train.buffer);
    t["train.batch"] = FDRIS_COUNT(c.train.batch);
    t["train.lambda"] = FDRIS_REAL(c.train.lambda);
    t["train.update_every"] = FDRIS_COUNT(c.train.update_every);
    t["train.lr_actor"] = FDRIS_REAL(c.train.lr_actor);
    t["train.lr_critic"] = FDRIS_REAL(c.train.lr_critic);
    return t;
  }();
  return table;
}

#undef FDRIS_REAL
#undef FDRIS_COUNT
#undef FDRIS_FLAG

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + " " + what, 0, field);
}

}  // namespace

Variant parse_variant(std::string_view name) {
  for (const auto& v : kVariants)
    if (v.name == name) return v.v;
  throw std::invalid_argument("unknown agent variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant v) {
  for (const auto& e : kVariants)
    if (e.v == v) return e.name;
  return "unknown";
}

void apply_profile(std::string_view name, ExperimentConfig& c) {
  auto& g = c.env.geometry;
  if (name == "small") {
    g.mt = g.mr = 4;
    g.n1h = g.n1v = g.n2h = g.n2v = 4;
    c.episodes = 30;
    c.steps = 300;
    c.runs = 4;
    c.agent.groups = 4;
  } else if (name == "paper") {
    g.mt = g.mr = 10;
    g.n1h = g.n1v = g.n2h = g.n2v = 6;
    c.episodes = 100;
    c.steps = 1000;
    c.runs = 8;
    c.agent.groups = 9;
  } else {
    throw ConfigError("experiment.profile must be 'small' or 'paper', got '" + std::string(name) +
                          "'",
                      0, "experiment.profile");
  }
  c.profile = std::string(name);
}

EnvConfig ExperimentConfig::env_config() const {
  EnvConfig e = env;
  switch (agent.variant) {
    case Variant::msf_drl_hsic:
      e.si = SiMethod::hsic;
      break;
    case Variant::perfcsi:
    case Variant::noiscsi:
      e.si = SiMethod::none;
      break;
    default:
      e.si = SiMethod::lssic;
      break;
  }
  e.positions_in_state = agent.variant == Variant::msf_drl_pos;
  return e;
}

ActorSpec ExperimentConfig::actor_spec() const {
  const EnvConfig e = env_config();
  ActorSpec s = ActorSpec::for_layout(FeatureLayout::from(e));
  s.hidden = agent.hidden;
  s.layers = agent.layers;
  if (agent.variant == Variant::msf_q_drl || agent.variant == Variant::gp_msf_q_drl) {
    s.phase_mode = PhaseMode::quantized;
    s.bits = agent.bits;
  }
  if (agent.variant == Variant::gp_msf_q_drl) {
    const auto& g = e.geometry;
    s.groups_u = GroupLayout::blocks(g.n1v, g.n1h, agent.groups);
    s.groups_d = GroupLayout::blocks(g.n2v, g.n2h, agent.groups);
  }
  s.beamformer_heads = !(agent.variant == Variant::perfcsi || agent.variant == Variant::noiscsi);
  return s;
}

NoiseSchedule ExperimentConfig::noise_schedule() const {
  NoiseSchedule n;
  n.kind = agent.variant == Variant::oupsbf ? NoiseSchedule::Kind::ou
                                            : NoiseSchedule::Kind::gaussian_decay;
  n.sigma0 = agent.sigma0;
  n.horizon = agent.noise_horizon.value_or(episodes);
  n.ou_theta = agent.ou_theta;
  n.ou_sigma = agent.ou_sigma;
  return n;
}

CsiNoise ExperimentConfig::csi_noise() const {
  CsiNoise n;
  n.drop_inter_ris = agent.drop_inter_ris;
  if (agent.variant == Variant::noiscsi) {
    n.nmse_db = agent.nmse_db;
    n.h_aa_noise_var = agent.csi_h_aa_noise_var;
  }
  return n;
}

void ExperimentConfig::validate() const {
  require(episodes >= 1, "experiment.episodes", "must be at least 1");
  require(steps >= 1, "experiment.steps", "must be at least 1");
  require(runs >= 1, "experiment.runs", "must be at least 1");
  require(threads >= 1, "experiment.threads", "must be at least 1");
  require(eval_episodes >= 1, "experiment.eval_episodes", "must be at least 1");
  const auto& g = env.geometry;
  require(g.mt >= 1, "geometry.mt", "must be at least 1");
  require(g.mr >= 1, "geometry.mr", "must be at least 1");
  require(g.mt == g.mr, "geometry.mr", "must equal geometry.mt");
  require(g.n1h >= 1 && g.n1v >= 1, "geometry.n1h", "panel sizes must be at least 1");
  require(g.n2h >= 1 && g.n2v >= 1, "geometry.n2h", "panel sizes must be at least 1");
  require(g.spacing_wavelengths > 0.0, "geometry.spacing", "must be positive");
  const auto& ch = env.channel;
  require(ch.carrier_hz > 0.0, "channel.carrier_hz", "must be positive");
  require(ch.bandwidth_hz > 0.0, "channel.bandwidth_hz", "must be positive");
  require(ch.alpha_ai > 0.0, "channel.alpha_ai", "must be positive");
  require(ch.alpha_iu > 0.0, "channel.alpha_iu", "must be positive");
  require(ch.alpha_au > 0.0, "channel.alpha_au", "must be positive");
  require(ch.alpha_r > 0.0, "channel.alpha_r", "must be positive");
  require(ch.alpha_u > 0.0, "channel.alpha_u", "must be positive");
  require(ch.sigma_aa2 >= 0.0, "channel.sigma_aa2", "must be nonnegative");
  require(ch.doppler_hz >= 0.0, "channel.doppler_hz", "must be nonnegative");
  require(ch.step_seconds > 0.0, "channel.step_seconds", "must be positive");
  require(ch.oscillators >= 1, "channel.oscillators", "must be at least 1");
  require(env.delta >= 0.0 && env.delta <= 1.0, "env.delta", "must lie in [0, 1]");
  require(env.limits.p_a_max > 0.0, "env.p_a_max", "must be positive");
  require(env.limits.p_u_max > 0.0, "env.p_u_max", "must be positive");
  require(env.hsic_noise_var >= 0.0, "env.hsic_noise_var", "must be nonnegative");
  require(!env.sigma_a2 || *env.sigma_a2 > 0.0, "env.sigma_a2", "must be positive");
  require(!env.sigma_d2 || *env.sigma_d2 > 0.0, "env.sigma_d2", "must be positive");
  require(agent.bits >= 1 && agent.bits <= 8, "agent.bits", "must lie in [1, 8]");
  require(agent.hidden >= 1, "agent.hidden", "must be at least 1");
  require(agent.layers >= 1, "agent.layers", "must be at least 1");
  require(agent.sigma0 >= 0.0, "agent.sigma0", "must be nonnegative");
  require(agent.csi_h_aa_noise_var >= 0.0, "agent.csi_h_aa_noise_var", "must be nonnegative");
  require(!agent.noise_horizon || *agent.noise_horizon >= 1, "agent.noise_horizon",
          "must be at least 1");
  if (agent.variant == Variant::gp_msf_q_drl) {
    try {
      GroupLayout::blocks(g.n1v, g.n1h, agent.groups);
      GroupLayout::blocks(g.n2v, g.n2h, agent.groups);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("agent.groups: ") + e.what(), 0, "agent.groups");
    }
  }
  if (agent.variant == Variant::perfcsi || agent.variant == Variant::noiscsi) {
    require(g.mt >= 2, "geometry.mt", "must be at least 2 for zero forcing");
  }
  require(train.gamma >= 0.0 && train.gamma < 1.0, "train.gamma", "must lie in [0, 1)");
  require(train.lambda > 0.0 && train.lambda <= 1.0, "train.lambda", "must lie in (0, 1]");
  require(train.buffer >= 1, "train.buffer", "must be at least 1");
  require(train.batch >= 1 && train.batch <= train.buffer, "train.batch",
          "must lie in [1, train.buffer]");
  require(train.update_every >= 1, "train.update_every", "must be at least 1");
  require(train.lr_actor >= 0.0, "train.lr_actor", "must be nonnegative");
  require(train.lr_critic >= 0.0, "train.lr_critic", "must be nonnegative");
}

ExperimentConfig parse_config(std::string_view text, std::optional<std::string> profile_override) {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'",
                        line_no);
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value", line_no, key);
    }
    if (key != "experiment.profile" && key != "experiment.scenario" && !setters().count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'", line_no,
                        key);
    }
    for (const auto& e : entries) {
      if (e.key == key) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
                          line_no, key);
      }
    }
    entries.push_back({std::move(key), std::move(value), line_no});
  }

  auto find = [&](const std::string& key) -> const Entry* {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  };
  auto with_line = [](const ConfigError& e, std::size_t line) {
    std::string msg = e.what();
    if (line != 0) msg = "line " + std::to_string(line) + ": " + msg;
    return ConfigError(msg, line, e.field());
  };

  ExperimentConfig c;
  std::string profile = "paper";
  std::size_t profile_line = 0;
  if (const Entry* e = find("experiment.profile")) {
    profile = e->value;
    profile_line = e->line;
  }
  if (profile_override) profile = *profile_override;
  try {
    apply_profile(profile, c);
  } catch (const ConfigError& e) {
    throw with_line(e, profile_override ? 0 : profile_line);
  }

  std::string scenario = "urban";
  std::size_t scenario_line = 0;
  if (const Entry* e = find("experiment.scenario")) {
    scenario = e->value;
    scenario_line = e->line;
  }
  try {
    const ScenarioPreset preset = scenario_preset(scenario);
    apply_scenario(preset, c.env.channel);
    c.env.limits.p_a_max = preset.p_a_max_w;
    c.env.limits.p_u_max = preset.p_u_max_w;
    c.scenario = scenario;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(scenario_line ? "line " + std::to_string(scenario_line) + ": " : "") +
                          e.what(),
                      scenario_line, "experiment.scenario");
  }

  std::map<std::string, std::size_t> lines;
  for (const auto& e : entries) {
    lines[e.key] = e.line;
    if (e.key == "experiment.profile" || e.key == "experiment.scenario") continue;
    try {
      setters().at(e.key)(c, e.key, e.value);
    } catch (const ConfigError& err) {
      throw with_line(err, e.line);
    }
  }
  try {
    c.validate();
  } catch (const ConfigError& err) {
    const auto it = lines.find(err.field());
    throw with_line(err, it == lines.end() ? 0 : it->second);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::string> profile_override) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), std::move(profile_override));
}

}  // namespace fdris
