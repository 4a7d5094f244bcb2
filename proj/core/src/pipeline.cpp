// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "roadex/parallel.hpp"
#include "roadex/ply.hpp"

namespace roadex {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), "cannot parse '" + std::string(text) + "' as a number");
  }
  return v;
}

struct Field {
  const char* key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, std::string_view)> set;
};

#define ROADEX_DOUBLE(KEY, EXPR)                                                                    \
  Field {                                                                                           \
    KEY, [](const PipelineConfig& c) { return format_double(c.EXPR); },                             \
        [](PipelineConfig& c, std::string_view v) { c.EXPR = parse_number<double>(KEY, v); }        \
  }
#define ROADEX_SIZE(KEY, EXPR)                                                                      \
  Field {                                                                                           \
    KEY, [](const PipelineConfig& c) { return std::to_string(c.EXPR); },                            \
        [](PipelineConfig& c, std::string_view v) {                                                 \
          c.EXPR = static_cast<decltype(c.EXPR)>(parse_number<std::uint64_t>(KEY, v));              \
        }                                                                                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      ROADEX_SIZE("seed", seed),
      ROADEX_SIZE("threads", threads),
      ROADEX_SIZE("preprocess.knn", outlier.k),
      ROADEX_DOUBLE("preprocess.alpha", outlier.alpha),
      ROADEX_DOUBLE("preprocess.dbscan_eps", dbscan.eps),
      ROADEX_SIZE("preprocess.dbscan_min_pts", dbscan.min_pts),
      ROADEX_DOUBLE("ground.chunk_size", ground.chunk_size),
      ROADEX_DOUBLE("ground.ransac_distance", ground.ransac_distance),
      ROADEX_SIZE("ground.ransac_iters", ground.ransac_iters),
      ROADEX_DOUBLE("ground.max_tilt", ground.max_tilt_deg),
      ROADEX_DOUBLE("ground.z_percentile", ground.z_percentile),
      ROADEX_DOUBLE("ground.z_band", ground.z_band),
      ROADEX_DOUBLE("ground.min_inlier_ratio", ground.min_inlier_ratio),
      ROADEX_DOUBLE("ground.min_mode_fraction", ground.min_mode_fraction),
      ROADEX_SIZE("ground.max_vertical_planes", ground.max_vertical_planes),
      ROADEX_DOUBLE("ground.cleanup_eps", ground.cleanup.eps),
      ROADEX_SIZE("ground.cleanup_min_pts", ground.cleanup.min_pts),
      ROADEX_DOUBLE("raster.pixel_size", centerline.raster.pixel_size),
      ROADEX_DOUBLE("raster.sigma", centerline.raster.sigma),
      ROADEX_DOUBLE("raster.threshold", centerline.raster.threshold),
      ROADEX_DOUBLE("skeleton.max_bridge_gap", centerline.skeleton.max_bridge_gap),
      ROADEX_SIZE("skeleton.min_branch_len", centerline.skeleton.min_branch_len),
      ROADEX_SIZE("skeleton.end_lookback", centerline.skeleton.end_lookback),
      ROADEX_SIZE("centerline.savgol_window", centerline.savgol.window),
      ROADEX_SIZE("centerline.savgol_order", centerline.savgol.polyorder),
      ROADEX_DOUBLE("centerline.z_radius", centerline.z_radius),
      ROADEX_DOUBLE("region.half_width", region.half_width),
      ROADEX_DOUBLE("region.z_tolerance", region.z_tolerance),
      ROADEX_DOUBLE("region.sample_step", region.sample_step),
      ROADEX_DOUBLE("evaluation.voxel", evaluation.voxel),
      ROADEX_DOUBLE("evaluation.threshold", evaluation.threshold),
  };
  return table;
}

#undef ROADEX_DOUBLE
#undef ROADEX_SIZE

// Runs one stage, timing it and re-throwing failures as StageError.
template <typename Fn>
double timed(const std::string& stage, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(config, trim(value));
      return;
    }
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.emplace_back(f.key);
  return out;
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig c;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    set_config_value(c, key, value);
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const PipelineConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

void validate(const PipelineConfig& c) {
  const auto check = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const ParameterError& e) {
      throw ConfigError(key, e.what());
    }
  };
  if (c.outlier.k == 0) throw ConfigError("preprocess.knn", "must be positive");
  if (!(c.outlier.alpha > 0.0)) throw ConfigError("preprocess.alpha", "must be positive");
  if (!(c.dbscan.eps > 0.0)) throw ConfigError("preprocess.dbscan_eps", "must be positive");
  if (c.dbscan.min_pts == 0) throw ConfigError("preprocess.dbscan_min_pts", "must be positive");
  check("ground", [&] { validate(c.ground); });
  check("raster", [&] { validate(c.centerline.raster); });
  check("skeleton", [&] { validate(c.centerline.skeleton); });
  check("centerline.savgol_window", [&] { validate(c.centerline.savgol); });
  if (!(c.centerline.z_radius > 0.0)) throw ConfigError("centerline.z_radius", "must be positive");
  check("region", [&] { validate(c.region); });
  check("evaluation", [&] { validate(c.evaluation); });
}

ExtractResult run_extract(const PointCloud& input, const PipelineConfig& config, const StageCallback& on_stage) {
  ExtractResult r;
  run_extract(input, config, r, on_stage);
  return r;
}

void run_extract(const PointCloud& input, const PipelineConfig& config, ExtractResult& r,
                 const StageCallback& on_stage) {
  validate(config);
  set_thread_limit(config.threads);
  r = ExtractResult{};
  const auto record = [&](const char* name, const char* unit, std::size_t in, std::size_t out, double s) {
    r.stages.push_back({name, unit, in, out, s});
    if (on_stage) on_stage(r.stages.back());
  };

  double t = timed("preprocess", [&] {
    if (input.empty()) throw ParameterError("input cloud is empty");
    const OutlierSplit split = remove_statistical_outliers(input, config.outlier);
    const ClusterLabels labels = dbscan(split.kept, config.dbscan);
    r.preprocessed = drop_small_clusters(split.kept, labels, config.dbscan.min_pts);
    if (r.preprocessed.empty()) throw ParameterError("no points survive outlier removal and clustering");
  });
  record("preprocess", "points", input.size(), r.preprocessed.size(), t);

  t = timed("ground_filter", [&] {
    r.ground = filter_ground(r.preprocessed, config.ground, config.seed);
    if (r.ground.empty()) throw ParameterError("no ground points found");
  });
  record("ground_filter", "points", r.preprocessed.size(), r.ground.size(), t);

  PointCloud with_corners;
  t = timed("corners", [&] {
    float zmin = r.ground[0].z;
    for (const Point3& p : r.ground) zmin = std::min(zmin, p.z);
    with_corners = add_alignment_corners(r.ground, bounding_box(input), zmin);
  });
  record("corners", "points", r.ground.size(), with_corners.size(), t);

  const CenterlineParams& cp = config.centerline;
  Raster binary;
  t = timed("raster", [&] {
    validate(cp.raster);
    r.skeleton.density = project_topdown(with_corners, cp.raster.pixel_size, {0, kAlignmentCornerCount});
    binary = binarize(normalize_max(blur(r.skeleton.density, gaussian_kernel(cp.raster.sigma))), cp.raster.threshold);
    r.skeleton.binary = binary;
  });
  record("raster", "pixels", with_corners.size(), binary.count_nonzero(), t);

  t = timed("skeleton", [&] {
    r.skeleton.graph = skeleton_graph(binary, cp.skeleton);
    if (r.skeleton.graph.branches.empty()) throw ParameterError("skeleton has no branches");
  });
  const std::size_t skeleton_pixels = r.skeleton.graph.pixel_count();
  record("skeleton", "pixels", binary.count_nonzero(), skeleton_pixels, t);

  const auto vertex_count = [](const std::vector<Centerline3D>& lines) {
    std::size_t n = 0;
    for (const auto& l : lines) n += l.vertices.size();
    return n;
  };
  t = timed("centerline", [&] {
    const SpatialIndex index(r.ground, 2);
    r.centerlines = centerlines_from_graph(r.skeleton.graph, r.ground, index, cp);
    if (r.centerlines.empty()) throw ParameterError("no centreline could be traced");
  });
  record("centerline", "vertices", skeleton_pixels, vertex_count(r.centerlines), t);

  t = timed("region_grow", [&] {
    // Grown over the preprocessed cloud so road points a chunk verdict
    // discarded can still be recovered by the centreline criterion.
    const SpatialIndex index(r.preprocessed, 2);
    r.road = r.preprocessed.select(region_grow_indices(r.centerlines, r.preprocessed, index, config.region));
    if (r.road.empty()) throw ParameterError("region growing selected no points");
  });
  record("region_grow", "points", vertex_count(r.centerlines), r.road.size(), t);

  t = timed("final_centerline", [&] { r.final_centerlines = final_centerline(r.road, cp); });
  record("final_centerline", "vertices", r.road.size(), vertex_count(r.final_centerlines), t);

  double total = 0.0;
  for (const auto& s : r.stages) total += s.elapsed_s;
  r.stats = run_stats(input.size(), r.road.size(), total);
}

std::string stages_json(const ExtractResult& result, bool include_timing) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const auto& s : result.stages) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["output_unit"] = s.output_unit;
    j["input_points"] = s.input_points;
    j["output_points"] = s.output_points;
    if (include_timing) j["elapsed_s"] = s.elapsed_s;
    stages.push_back(std::move(j));
  }
  nlohmann::ordered_json summary;
  summary["original_points"] = result.stats.original_points;
  summary["kept_points"] = result.stats.kept_points;
  summary["reduction"] = result.stats.reduction;
  if (include_timing) summary["elapsed_s"] = result.stats.elapsed_s;
  nlohmann::ordered_json doc;
  doc["stages"] = std::move(stages);
  doc["summary"] = std::move(summary);
  return doc.dump(2) + "\n";
}

std::vector<std::string> write_extract_outputs(const ExtractResult& result, const std::filesystem::path& dir,
                                               bool include_timing) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  if (!result.ground.empty()) {
    write_ply(result.ground, dir / "ground.ply");
    written.emplace_back("ground.ply");
  }
  if (!result.road.empty()) {
    write_ply(result.road, dir / "road.ply");
    written.emplace_back("road.ply");
  }
  if (!result.skeleton.graph.branches.empty()) {
    write_raster_png(result.skeleton.graph.to_raster(), dir / "skeleton.png");
    write_text(dir / "skeleton.json", to_json(result.skeleton.graph) + "\n");
    written.insert(written.end(), {"skeleton.png", "skeleton.pgw", "skeleton.json"});
  }
  if (!result.final_centerlines.empty()) {
    write_text(dir / "centerlines.json", to_geojson(result.final_centerlines) + "\n");
    write_ply(centerline_points(result.final_centerlines), dir / "centerlines.ply");
    written.insert(written.end(), {"centerlines.json", "centerlines.ply"});
  }
  write_text(dir / "stages.json", stages_json(result, include_timing));
  written.emplace_back("stages.json");
  return written;
}

}  // namespace roadex
