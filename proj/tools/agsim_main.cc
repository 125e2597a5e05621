/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: run, serve, report, validate.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "agsim/error.h"
#include "agsim/rpc/dispatcher.h"
#include "agsim/rpc/protocol.h"
#include "agsim/rpc/server.h"
#include "agsim/scenario.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitTask = 3;
constexpr int kExitBind = 4;

std::atomic<bool> g_stop{false};

void HandleSignal(int) { g_stop = true; }

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> realtime;
};

agsim::scenario::ScenarioConfig Load(const std::string& path, const Overrides& o) {
  auto config = agsim::scenario::LoadScenario(path);
  if (o.seed) config.sim.seed = *o.seed;
  if (o.realtime) {
    if (*o.realtime < 0.0) throw agsim::ConfigError("flag '--realtime' must be >= 0");
    config.sim.realtime_factor = *o.realtime;
  }
  return config;
}

int Run(const std::string& config_path, const std::string& out, const Overrides& o) {
  const auto config = Load(config_path, o);
  std::filesystem::path dir = out;
  if (dir.empty()) {
    dir = config.outputs.empty()
              ? std::filesystem::path("out") / std::string(agsim::scenario::TaskKindName(config.task))
              : config.outputs;
  }
  const auto result = agsim::scenario::RunScenario(config, dir);
  std::cout << agsim::scenario::TaskKindName(config.task) << " run complete: "
            << config.vehicles.size() << " vehicles, seed " << config.sim.seed << "\n";
  for (const auto& artifact : result.artifacts) std::cout << "  wrote " << artifact.string() << "\n";
  return kExitOk;
}

int Serve(const std::string& config_path, const Overrides& o) {
  auto config = Load(config_path, o);
  if (!o.realtime) config.sim.realtime_factor = 1.0;
  if (config.sim.realtime_factor <= 0.0) {
    throw agsim::ConfigError("serve needs a positive realtime factor");
  }
  auto sim = agsim::scenario::BuildSimulation(config, agsim::scenario::LoadScenarioScene(config));
  if (config.task == agsim::scenario::TaskKind::kTracking) sim->SetTarget(config.tracking.target);

  agsim::rpc::Dispatcher dispatcher(sim.get());
  agsim::rpc::Server server(&dispatcher, agsim::rpc::EndpointConfigFromEnv());
  server.Start();
  for (const auto kind : {agsim::rpc::PortKind::kMultirotor, agsim::rpc::PortKind::kCar,
                          agsim::rpc::PortKind::kWorld}) {
    std::cout << agsim::rpc::PortKindName(kind) << " " << server.config().host << ":"
              << server.port(kind) << "\n";
  }
  std::cout << "serving " << config.vehicles.size() << " vehicles at realtime factor "
            << config.sim.realtime_factor << "; interrupt to stop" << std::endl;

  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  const auto stats = sim->RunRealtime(g_stop, /*honor_duration=*/false);
  server.Stop();
  std::cout << "stopped after " << stats.ticks << " ticks, " << stats.overruns << " overruns"
            << std::endl;
  return kExitOk;
}

int Validate(const std::string& config_path, const Overrides& o) {
  const auto config = Load(config_path, o);
  agsim::scenario::LoadScenarioScene(config);
  std::cout << config_path << ": ok (" << agsim::scenario::TaskKindName(config.task) << ", "
            << config.vehicles.size() << " vehicles)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Headless air-ground multi-robot simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string report_dir;
  Overrides overrides;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
    cmd->add_option("--seed", overrides.seed, "Override sim.seed");
    cmd->add_option("--realtime", overrides.realtime, "Realtime factor (0 = as fast as possible)");
  };

  CLI::App* run = app.add_subcommand("run", "Run a scenario to completion and write artifacts");
  add_common(run);
  run->add_option("--out", out_dir, "Artifact directory");

  CLI::App* serve = app.add_subcommand("serve", "Step in real time and serve the RPC endpoints");
  add_common(serve);

  CLI::App* report = app.add_subcommand("report", "Render report tables from an artifact directory");
  report->add_option("dir", report_dir, "Artifact directory")->required();

  CLI::App* validate = app.add_subcommand("validate", "Check a config without running it");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return Run(config_path, out_dir, overrides);
    if (*serve) return Serve(config_path, overrides);
    if (*validate) return Validate(config_path, overrides);
    std::cout << agsim::scenario::RenderReports(report_dir);
    return kExitOk;
  } catch (const agsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const agsim::TaskFailure& e) {
    std::cerr << "task failure: " << e.what() << "\n";
    return kExitTask;
  } catch (const agsim::BindError& e) {
    std::cerr << "bind error: " << e.what() << "\n";
    return kExitBind;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
