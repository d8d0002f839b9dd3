// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Everything goes through the C interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "flowrt/flowrt.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  frt_status status;
  std::string message;
};

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  frt_string_free(s);
  return out;
}

void check(frt_status status) {
  if (status != FRT_OK) throw Failure{status, frt_last_error()};
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{FRT_ERR_IO, "cannot open " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure{FRT_ERR_FORMAT, path + ": " + e.what()};
  }
}

struct RunFlags {
  std::string config;
  std::optional<std::string> output;
  std::optional<std::string> weights;
  std::optional<std::size_t> k;
  std::optional<std::string> metric;
  std::optional<unsigned> workers;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("-c,--config", f.config, "Run config JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--k", f.k, "Controllers per vertex")->check(CLI::PositiveNumber);
  cmd->add_option("--metric", f.metric, "Distance metric")
      ->check(CLI::IsMember({"geodesic", "euclidean"}));
  cmd->add_option("-j,--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--weights", f.weights, "Precomputed weight file");
}

std::string resolve_config(const RunFlags& f, bool output_is_dir) {
  json patch = json::object();
  if (f.k) patch["k_nearest"] = *f.k;
  if (f.metric) patch["distance_metric"] = *f.metric;
  if (f.workers) patch["workers"] = *f.workers;
  if (f.weights) patch["paths"]["weights"] = absolute(*f.weights);
  if (f.output && output_is_dir) patch["paths"]["output_dir"] = absolute(*f.output);
  char* resolved = nullptr;
  check(frt_resolve_config(f.config.c_str(), patch.dump().c_str(), &resolved));
  return take(resolved);
}

int cmd_weights(const RunFlags& f) {
  if (!f.output) throw Failure{FRT_ERR_INVALID_ARGUMENT, "weights: --output is required"};
  const auto cfg = resolve_config(f, false);
  char* report = nullptr;
  check(frt_run_weights(cfg.c_str(), absolute(*f.output).c_str(), &report));
  const json r = json::parse(take(report));
  std::cout << "wrote " << *f.output << ": " << r.value("controllers", 0) << " controllers";
  if (r.contains("dropped_landmarks") && !r["dropped_landmarks"].empty()) {
    std::cout << ", dropped " << r["dropped_landmarks"].dump();
  }
  std::cout << "\n";
  return 0;
}

int cmd_retarget(const RunFlags& f, bool print_config) {
  const auto cfg = resolve_config(f, true);
  if (print_config) {
    std::cout << cfg << "\n";
    return 0;
  }
  char* diagnostics = nullptr;
  check(frt_run_retarget(cfg.c_str(), &diagnostics));
  const json d = json::parse(take(diagnostics));
  std::cout << "retargeted " << d["frame_count"].get<std::size_t>() << " frames into "
            << d["config"]["paths"]["output_dir"].get<std::string>() << " ("
            << d["totals"]["inactive_controllers"].get<std::size_t>() << " inactive, "
            << d["totals"]["clamped_controllers"].get<std::size_t>() << " clamped controller-frames)\n";
  return 0;
}

int cmd_request(const std::string& request_path, const std::optional<std::string>& output,
                bool loss) {
  json req = read_json_file(request_path);
  if (output) req["output"] = absolute(*output);
  const auto base = fs::absolute(request_path).parent_path().string();
  char* out = nullptr;
  if (loss) {
    check(frt_run_loss(req.dump().c_str(), base.c_str(), &out));
    const json r = json::parse(take(out));
    std::cout << r["summary"].dump(2) << "\n";
  } else {
    check(frt_run_warp(req.dump().c_str(), base.c_str(), &out));
    std::cout << take(out) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowrt: flow-driven mesh retargeting"};
  app.set_version_flag("--version", std::string(frt_version()));
  app.require_subcommand(1);

  RunFlags weights_flags;
  auto* weights = app.add_subcommand("weights", "Anchor landmarks and write controlling weights");
  add_run_flags(weights, weights_flags);
  weights->add_option("-o,--output", weights_flags.output, "Weight file to write");

  RunFlags retarget_flags;
  bool print_config = false;
  auto* retarget = app.add_subcommand("retarget", "Deform the mesh for every frame of a sequence");
  add_run_flags(retarget, retarget_flags);
  retarget->add_option("-o,--output", retarget_flags.output, "Output directory");
  retarget->add_flag("--print-config", print_config, "Show the resolved config and exit");

  std::string warp_request;
  std::optional<std::string> warp_output;
  auto* warp = app.add_subcommand("warp", "Apply warp kernels to tensor files");
  warp->add_option("request", warp_request, "Warp request JSON")->required()->check(CLI::ExistingFile);
  warp->add_option("-o,--output", warp_output, "Output tensor");

  std::string loss_request;
  std::optional<std::string> loss_output;
  auto* loss = app.add_subcommand("loss", "Losses and metrics over paired frames");
  loss->add_option("request", loss_request, "Loss request JSON")->required()->check(CLI::ExistingFile);
  loss->add_option("-o,--output", loss_output, "Report JSON");

  std::string fixture_dir = "fixtures";
  auto* fixtures = app.add_subcommand("gen-fixtures", "Write the synthetic test fixtures");
  fixtures->add_option("-o,--output", fixture_dir, "Destination directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*weights) return cmd_weights(weights_flags);
    if (*retarget) return cmd_retarget(retarget_flags, print_config);
    if (*warp) return cmd_request(warp_request, warp_output, false);
    if (*loss) return cmd_request(loss_request, loss_output, true);
    if (*fixtures) {
      check(frt_generate_fixtures(fixture_dir.c_str()));
      std::cout << "fixtures written to " << fixture_dir << "\n";
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "flowrt: " << f.message << " [" << frt_status_name(f.status) << "]\n";
    return f.status == FRT_ERR_INTERNAL ? 70 : 1 + static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "flowrt: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
