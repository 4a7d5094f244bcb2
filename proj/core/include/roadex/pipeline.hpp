// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end extraction: configuration, the eight pipeline stages and the
// artifacts they leave on disk.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "roadex/centerline.hpp"
#include "roadex/errors.hpp"
#include "roadex/evaluation.hpp"
#include "roadex/ground_filter.hpp"
#include "roadex/preprocess.hpp"

namespace roadex {

struct PipelineConfig {
  std::uint64_t seed = 7;
  unsigned threads = 0;  ///< 0: all hardware threads
  OutlierFilterParams outlier;
  DbscanParams dbscan;
  GroundFilterParams ground;
  CenterlineParams centerline;
  RegionGrowParams region;
  IoUParams evaluation;
};

/// Flat "key = value" lines; '#' starts a comment, "[section]" prefixes the
/// following keys with "section.". Unknown keys throw ConfigError.
PipelineConfig parse_config(std::string_view text);
/// Throws IoError when the file cannot be read.
PipelineConfig load_config(const std::filesystem::path& path);
/// Every key in a fixed order; parse_config(dump_config(c)) == c.
std::string dump_config(const PipelineConfig& config);
void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value);
std::vector<std::string> config_keys();
/// Throws ConfigError naming the first invalid key.
void validate(const PipelineConfig& config);

/// A stage failed; `stage` is its name in stages.json.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StageRecord {
  std::string name;
  std::string output_unit;  ///< points, pixels or vertices; input_points uses the previous stage's unit
  std::size_t input_points = 0;
  std::size_t output_points = 0;
  double elapsed_s = 0.0;
};

struct ExtractResult {
  PointCloud preprocessed;
  PointCloud ground;
  SkeletonResult skeleton;
  std::vector<Centerline3D> centerlines;  ///< first pass, over the ground skeleton
  PointCloud road;
  std::vector<Centerline3D> final_centerlines;
  std::vector<StageRecord> stages;
  RunStats stats;
};

using StageCallback = std::function<void(const StageRecord&)>;

/// preprocess -> ground_filter -> corners -> raster -> skeleton ->
/// centerline -> region_grow -> final_centerline. Failures surface as
/// StageError; `result` then holds everything computed before the failure.
void run_extract(const PointCloud& input, const PipelineConfig& config, ExtractResult& result,
                 const StageCallback& on_stage = {});
ExtractResult run_extract(const PointCloud& input, const PipelineConfig& config,
                          const StageCallback& on_stage = {});

/// {"stages": [...], "summary": {...}}. Without timing every elapsed field
/// is omitted, which makes the document reproducible.
std::string stages_json(const ExtractResult& result, bool include_timing = true);

/// Writes ground.ply, road.ply, skeleton.png (+ .pgw), skeleton.json,
/// centerlines.json, centerlines.ply and stages.json, skipping parts a
/// failed run never produced. Returns the file names written.
std::vector<std::string> write_extract_outputs(const ExtractResult& result, const std::filesystem::path& dir,
                                               bool include_timing = true);

}  // namespace roadex
