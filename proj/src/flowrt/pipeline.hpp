// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

#include "flowrt/config.hpp"

namespace flowrt {

/// Files named <prefix><digits><extension> in `dir`, keyed by the number.
/// Two names with the same number (e.g. depth_3.png, depth_0003.png) are an
/// error.
std::map<long, std::filesystem::path> index_files(const std::filesystem::path& dir,
                                                  const std::string& prefix,
                                                  const std::string& extension);

struct SequenceFrame {
  long index = 0;
  std::filesystem::path depth;
  std::filesystem::path flow;
};

/// Pairs depth_NNNNN.png in frame_dir with flow_NNNNN.flo in flow_dir.
/// Any index present on only one side is an error naming that frame.
std::vector<SequenceFrame> match_sequence(const std::filesystem::path& frame_dir,
                                          const std::filesystem::path& flow_dir);

/// Anchors landmarks and computes weights; writes the weight file to `out`
/// and returns the report (also embedded in the file).
nlohmann::json run_weights(const RunConfig& cfg, const std::filesystem::path& out);

/// Full retargeting run: writes output_dir/frame_NNNNN.obj for every frame
/// and output_dir/diagnostics.json, and returns the diagnostics. The
/// diagnostics hold a "run" object with a timestamp; everything else is a
/// pure function of the inputs.
nlohmann::json run_retarget(const RunConfig& cfg);

/// Applies warp kernels described by a request object:
///   {"op": "apply", "features", "flow", "mask"?, "dictionary"?, "beta"?,
///    "dictionary_size"?, "output", "dtype"?}
///   {"op": "refine", "decoded": [...], "inpainted": [...], "output", "dtype"?}
/// Relative paths resolve against base_dir.
nlohmann::json run_warp(const nlohmann::json& request, const std::filesystem::path& base_dir);

/// Loss and metric report over paired frame directories:
///   {"pred_dir", "gt_dir", "output"?, "depth_normalization"?, "loss_weights"?,
///    "smooth_reduction"?, "structure_reduction"?, "window"?,
///    "pred_landmarks"?, "gt_landmarks"?, "pred_embeddings"?, "gt_embeddings"?,
///    "pred_features"?, "gt_features"?}
nlohmann::json run_loss(const nlohmann::json& request, const std::filesystem::path& base_dir);

}  // namespace flowrt
