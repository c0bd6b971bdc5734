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

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "fdris/channel.hpp"
#include "fdris/checkpoint.hpp"
#include "fdris/env.hpp"
#include "fdris/errors.hpp"
#include "fdris/harness.hpp"
#include "fdris/selfcheck.hpp"

namespace py = pybind11;
using namespace fdris;

namespace {

py::dict row_dict(const MetricsRow& r) {
  py::dict d;
  d["run"] = r.run;
  d["episode"] = r.episode;
  d["window"] = r.window;
  d["mean_r_bs"] = r.mean_r_bs;
  d["mean_r_dl"] = r.mean_r_dl;
  d["mean_reward"] = r.mean_reward;
  d["sigma"] = r.sigma;
  d["wall_ms"] = r.wall_ms;
  return d;
}

py::list rows_list(const std::vector<MetricsRow>& rows) {
  py::list out;
  for (const auto& r : rows) out.append(row_dict(r));
  return out;
}

std::optional<TensorArchive> archive_from(const std::optional<py::bytes>& b) {
  if (!b) return std::nullopt;
  const std::string s = *b;
  return TensorArchive::deserialize(std::vector<std::uint8_t>(s.begin(), s.end()));
}

py::bytes archive_bytes(const TensorArchive& a) {
  const auto v = a.serialize();
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

}  // namespace

PYBIND11_MODULE(_fdris, m) {
  m.doc() = "Two-RIS full-duplex cell simulator and DDPG training harness.";

  auto base = py::register_exception<Error>(m, "FdrisError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<PowerError>(m, "PowerError", base.ptr());
  py::register_exception<LifecycleError>(m, "LifecycleError", base.ptr());
  py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());
  py::register_exception<ActionError>(m, "ActionError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_static("parse", &parse_config, py::arg("text"), py::arg("profile") = std::nullopt)
      .def_static("load", &load_config, py::arg("path"), py::arg("profile") = std::nullopt)
      .def_readwrite("profile", &ExperimentConfig::profile)
      .def_readwrite("scenario", &ExperimentConfig::scenario)
      .def_readwrite("episodes", &ExperimentConfig::episodes)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("runs", &ExperimentConfig::runs)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("eval_episodes", &ExperimentConfig::eval_episodes)
      .def_readwrite("output", &ExperimentConfig::output)
      .def_property(
          "variant", [](const ExperimentConfig& c) { return std::string(variant_name(c.agent.variant)); },
          [](ExperimentConfig& c, const std::string& v) { c.agent.variant = parse_variant(v); })
      .def_property(
          "bits", [](const ExperimentConfig& c) { return c.agent.bits; },
          [](ExperimentConfig& c, std::size_t v) { c.agent.bits = v; })
      .def_property(
          "groups", [](const ExperimentConfig& c) { return c.agent.groups; },
          [](ExperimentConfig& c, std::size_t v) { c.agent.groups = v; })
      .def_property(
          "hidden", [](const ExperimentConfig& c) { return c.agent.hidden; },
          [](ExperimentConfig& c, std::size_t v) { c.agent.hidden = v; })
      .def_property(
          "batch", [](const ExperimentConfig& c) { return c.train.batch; },
          [](ExperimentConfig& c, std::size_t v) { c.train.batch = v; })
      .def_property_readonly("mt", [](const ExperimentConfig& c) { return c.env.geometry.mt; })
      .def_property_readonly("n1", [](const ExperimentConfig& c) { return c.env.geometry.n1(); })
      .def_property_readonly("n2", [](const ExperimentConfig& c) { return c.env.geometry.n2(); })
      .def_property_readonly("p_a_max", [](const ExperimentConfig& c) { return c.env.limits.p_a_max; })
      .def_property_readonly("p_u_max", [](const ExperimentConfig& c) { return c.env.limits.p_u_max; })
      .def("validate", &ExperimentConfig::validate);

  py::class_<Action>(m, "Action")
      .def(py::init<>())
      .def_readwrite("theta_u", &Action::theta_u)
      .def_readwrite("theta_d", &Action::theta_d)
      .def_readwrite("w_t", &Action::w_t)
      .def_readwrite("w_r", &Action::w_r)
      .def_readwrite("p_a", &Action::p_a)
      .def_readwrite("p_u", &Action::p_u)
      .def(
          "validate",
          [](const Action& a, const ExperimentConfig& c) { a.validate(c.env.geometry, c.env.limits); },
          py::arg("config"));

  py::class_<Environment>(m, "Environment")
      .def(py::init([](const ExperimentConfig& c, std::uint64_t run) {
             c.validate();
             return Environment(c.env_config(), c.seed, run);
           }),
           py::arg("config"), py::arg("run") = 0)
      .def("reset", [](Environment& e) { return e.reset().flatten(); })
      .def(
          "step",
          [](Environment& e, const Action& a) {
            const StepOutcome o = e.step(a);
            py::dict d;
            d["reward"] = o.reward;
            d["gamma_bs"] = o.gamma_bs;
            d["gamma_dl"] = o.gamma_dl;
            d["r_bs"] = o.r_bs;
            d["r_dl"] = o.r_dl;
            d["state"] = o.next_state.flatten();
            return d;
          },
          py::arg("action"))
      .def(
          "random_action",
          [](const Environment& e, std::uint64_t seed) {
            Rng rng(seed);
            return random_initial_action(e.config().geometry, e.config().limits, rng);
          },
          py::arg("seed"))
      .def_property_readonly("steps_taken", &Environment::steps_taken);

  m.def(
      "train",
      [](const ExperimentConfig& c, bool write) {
        TrainingResult r;
        {
          py::gil_scoped_release release;
          r = run_training(c, write);
        }
        py::dict out;
        py::list runs, checkpoints;
        for (const auto& run : r.runs) {
          runs.append(rows_list(run.rows));
          checkpoints.append(run.checkpoint ? py::object(archive_bytes(*run.checkpoint)) : py::none());
        }
        out["runs"] = runs;
        out["mean"] = rows_list(r.mean);
        out["checkpoints"] = checkpoints;
        return out;
      },
      py::arg("config"), py::arg("write") = false);

  m.def(
      "evaluate_cdf",
      [](const ExperimentConfig& c, const std::optional<py::bytes>& checkpoint, std::size_t episodes, bool write) {
        const auto archive = archive_from(checkpoint);
        py::gil_scoped_release release;
        const CdfResult r = run_cdf_eval(c, archive, episodes, write);
        return std::make_pair(r.r_bs, r.r_dl);
      },
      py::arg("config"), py::arg("checkpoint") = std::nullopt, py::arg("episodes") = 1,
      py::arg("write") = false);

  m.def(
      "signaling_bits",
      [](const std::string& variant, std::size_t n1, std::size_t n2, std::size_t bits, std::size_t groups) {
        return signaling_bits(parse_variant(variant), n1, n2, bits, groups);
      },
      py::arg("variant"), py::arg("n1"), py::arg("n2"), py::arg("bits") = 2, py::arg("groups") = 9);

  m.def("path_loss_db", &path_loss_db, py::arg("carrier_hz"), py::arg("distance"), py::arg("alpha"));

  m.def(
      "selfcheck",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& c : run_selfchecks(seed)) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
      },
      py::arg("seed") = 7);

  m.attr("metrics_header") = std::string(kMetricsHeader);
}
