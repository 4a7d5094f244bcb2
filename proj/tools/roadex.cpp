// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// roadex command-line tool: extract, evaluate, stitch, synth.
//
// Exit codes: 0 success, 2 I/O or file format, 3 configuration or invalid
// arguments, 4 pipeline-stage failure.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "roadex/evaluation.hpp"
#include "roadex/groundtruth.hpp"
#include "roadex/parallel.hpp"
#include "roadex/pipeline.hpp"
#include "roadex/ply.hpp"
#include "roadex/synth.hpp"

namespace {

enum Exit : int { kOk = 0, kIo = 2, kConfig = 3, kStage = 4 };

using roadex::ConfigError;

// Short flags for the most common pipeline parameters; anything else goes
// through --set key=value.
const std::vector<std::pair<const char*, const char*>> kFlagKeys{
    {"--seed", "seed"},
    {"--knn", "preprocess.knn"},
    {"--alpha", "preprocess.alpha"},
    {"--eps", "preprocess.dbscan_eps"},
    {"--min-pts", "preprocess.dbscan_min_pts"},
    {"--chunk-size", "ground.chunk_size"},
    {"--ransac-dist", "ground.ransac_distance"},
    {"--ransac-iters", "ground.ransac_iters"},
    {"--max-tilt", "ground.max_tilt"},
    {"--z-percentile", "ground.z_percentile"},
    {"--z-band", "ground.z_band"},
    {"--pixel-size", "raster.pixel_size"},
    {"--sigma", "raster.sigma"},
    {"--threshold", "raster.threshold"},
    {"--bridge-gap", "skeleton.max_bridge_gap"},
    {"--min-branch", "skeleton.min_branch_len"},
    {"--savgol-window", "centerline.savgol_window"},
    {"--savgol-order", "centerline.savgol_order"},
    {"--z-radius", "centerline.z_radius"},
    {"--half-width", "region.half_width"},
    {"--z-tolerance", "region.z_tolerance"},
    {"--sample-step", "region.sample_step"},
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw roadex::IoError(path, "cannot open for writing");
  out << text;
}

roadex::GpsBounds parse_bounds(const std::string& text) {
  std::array<double, 4> v{};
  std::istringstream in(text);
  char comma = 0;
  if (!(in >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3]) || !in.eof()) {
    throw ConfigError("--bounds", "expected latmin,lonmin,latmax,lonmax");
  }
  return {v[0], v[2], v[1], v[3]};
}

struct ExtractArgs {
  std::string input;
  std::string out = "roadex_out";
  std::string config;
  bool dump_config = false;
  bool no_timing = false;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;
};

int cmd_extract(const ExtractArgs& args, unsigned threads) {
  roadex::PipelineConfig config = args.config.empty() ? roadex::PipelineConfig{} : roadex::load_config(args.config);
  for (const auto& [key, value] : args.flags) roadex::set_config_value(config, key, value);
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
    roadex::set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (threads > 0) config.threads = threads;
  roadex::validate(config);
  if (args.dump_config) {
    std::cout << roadex::dump_config(config);
    return kOk;
  }
  if (args.input.empty()) throw ConfigError("INPUT", "an input PLY file is required");

  const roadex::PointCloud cloud = roadex::read_ply(args.input);
  spdlog::info("read {} points from {}", cloud.size(), args.input);

  roadex::ExtractResult result;
  std::string failed_stage;
  std::string error;
  try {
    roadex::run_extract(cloud, config, result, [](const roadex::StageRecord& s) {
      spdlog::info("{:<16} {:>9} -> {:>9} {:<8} {:.3f}s", s.name, s.input_points, s.output_points, s.output_unit,
                   s.elapsed_s);
    });
  } catch (const roadex::StageError& e) {
    failed_stage = e.stage();
    error = e.what();
  }

  const std::filesystem::path dir = args.out;
  const auto written = roadex::write_extract_outputs(result, dir, !args.no_timing);
  std::string manifest = "status: " + std::string(failed_stage.empty() ? "ok" : "failed") + "\n";
  if (!failed_stage.empty()) manifest += "failed_stage: " + failed_stage + "\nerror: " + error + "\n";
  manifest += "input: " + args.input + "\nartifacts:\n";
  for (const auto& name : written) manifest += "  - " + name + "\n";
  write_file(dir / "MANIFEST", manifest);

  if (!failed_stage.empty()) {
    spdlog::error("stage {} failed: {}", failed_stage, error);
    return kStage;
  }
  spdlog::info("road points {} of {} ({:.2f}% reduction); artifacts in {}", result.road.size(), cloud.size(),
               result.stats.reduction, dir.string());
  return kOk;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path, const roadex::IoUParams& params,
                 const std::string& overlay_path) {
  roadex::PointCloud pred = roadex::read_ply(pred_path);
  roadex::PointCloud truth;
  const bool mask = std::filesystem::path(truth_path).extension() == ".png";
  std::optional<roadex::Raster> mask_raster;
  if (mask) {
    mask_raster = roadex::read_raster_png(truth_path);
    truth = roadex::mask_to_points(*mask_raster);
    // Masks are planar: compare in XY only.
    roadex::PointCloud flat;
    flat.reserve(pred.size());
    for (const auto& p : pred) flat.push_back({p.x, p.y, 0.0f});
    pred = std::move(flat);
  } else {
    truth = roadex::read_ply(truth_path);
  }
  const roadex::IoUReport report = roadex::iou(pred, truth, params);
  std::cout << roadex::to_json(report) << "\n";
  if (!overlay_path.empty()) {
    if (!mask_raster) throw ConfigError("--overlay", "requires a PNG mask as TRUTH");
    roadex::write_overlay_png(roadex::overlay(*mask_raster, pred, mask_raster->georef()), overlay_path);
  }
  return kOk;
}

struct StitchArgs {
  std::string bounds;
  int zoom = 0;
  std::string tiles;
  std::string archive;
  std::string out;
  std::string mask;
  int label_rows = roadex::kDefaultLabelRows;
  int road_min = 240;
};

int cmd_stitch(const StitchArgs& a) {
  const roadex::GpsBounds bounds = parse_bounds(a.bounds);
  if (a.tiles.empty() == a.archive.empty()) throw ConfigError("--tiles", "give exactly one of --tiles or --archive");
  std::unique_ptr<roadex::TileSource> source;
  if (!a.tiles.empty()) {
    source = std::make_unique<roadex::DirectoryTileSource>(a.tiles);
  } else {
    source = std::make_unique<roadex::ArchiveTileSource>(a.archive);
  }
  roadex::StitchedMap map = roadex::stitch(bounds, a.zoom, *source);
  spdlog::info("stitched {}x{} tiles into {}x{} px", map.tile_cols, map.tile_rows, map.image.width(),
               map.image.height());
  map = roadex::crop_to_bounds(roadex::remove_label_rows(map, a.label_rows), bounds);
  const roadex::WorldFile wf = map.mapping.world_file();
  roadex::write_png(map.image, a.out);
  roadex::write_world_file(wf, roadex::world_file_path(a.out));
  if (!a.mask.empty()) {
    const auto c = static_cast<std::uint8_t>(a.road_min);
    const roadex::RoadMask road = roadex::extract_road_mask(map.image, {{{c, c, c}, {255, 255, 255}}});
    if (road.empty) spdlog::warn("no road-coloured pixels found; mask is empty");
    roadex::GrayImage img{road.mask.width(), road.mask.height(), {}};
    for (double v : road.mask.values()) img.data.push_back(v != 0.0 ? 255 : 0);
    roadex::write_png(img, a.mask);
    roadex::write_world_file(wf, roadex::world_file_path(a.mask));
  }
  return kOk;
}

struct SynthArgs {
  std::string kind = "straight";
  std::string out;
  std::string truth;
  std::string mask;
  std::string centerline;
  roadex::SceneSpec spec;
};

int cmd_synth(SynthArgs a) {
  const auto kind = roadex::parse_scene_kind(a.kind);
  if (!kind) throw ConfigError("--kind", "unknown scene kind '" + a.kind + "'");
  a.spec.kind = *kind;
  const roadex::LabelledCloud scene = roadex::generate(a.spec);
  roadex::write_ply(scene.cloud, a.out);
  spdlog::info("{} scene: {} points ({} road) -> {}", a.kind, scene.cloud.size(),
               scene.indices_of(roadex::Label::road).size(), a.out);
  if (!a.truth.empty()) roadex::write_ply(scene.select(roadex::Label::road), a.truth);
  if (!a.mask.empty()) roadex::write_raster_png(scene.truth_mask, a.mask);
  if (!a.centerline.empty()) {
    std::vector<roadex::Centerline3D> lines;
    for (const auto& l : scene.truth_centerlines) {
      roadex::Centerline3D c;
      c.closed = l.closed;
      for (const auto& v : l.vertices) c.vertices.push_back({v.x, v.y, roadex::road_height(a.spec, v.x, v.y)});
      lines.push_back(std::move(c));
    }
    write_file(a.centerline, roadex::to_geojson(lines) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("roadex"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

  CLI::App app{"Road surface and centreline extraction from LiDAR point clouds"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  bool quiet = false;
  app.add_option("--threads", threads, "Worker thread cap (0: all cores)");
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Run the extraction pipeline on a PLY cloud");
  extract->add_option("INPUT", ex.input, "Input PLY file");
  extract->add_option("-o,--out", ex.out, "Output directory")->capture_default_str();
  extract->add_option("-c,--config", ex.config, "Config file (key = value lines)");
  extract->add_flag("--dump-config", ex.dump_config, "Print the effective config and exit");
  extract->add_flag("--no-timing", ex.no_timing, "Omit elapsed times from stages.json");
  for (const auto& [flag, key] : kFlagKeys) {
    extract->add_option_function<std::string>(
        flag, [&ex, key = std::string(key)](const std::string& v) { ex.flags[key] = v; },
        std::string("Overrides ") + key);
  }
  extract->add_option("--set", ex.sets, "Override any config key: --set key=value");

  std::string pred, truth, overlay_path;
  roadex::IoUParams iou_params;
  auto* evaluate = app.add_subcommand("evaluate", "IoU between a predicted cloud and a truth cloud or mask");
  evaluate->add_option("PRED", pred, "Predicted road PLY")->required();
  evaluate->add_option("TRUTH", truth, "Truth PLY, or PNG mask with world-file sidecar")->required();
  evaluate->add_option("--voxel", iou_params.voxel, "Voxel size, metres")->capture_default_str();
  evaluate->add_option("--threshold", iou_params.threshold, "Match distance, metres")->capture_default_str();
  evaluate->add_option("--overlay", overlay_path, "Write a TP/FP/FN overlay PNG (mask truth only)");

  StitchArgs st;
  auto* stitch = app.add_subcommand("stitch", "Stitch map tiles into a cropped map and road mask");
  stitch->add_option("--bounds", st.bounds, "latmin,lonmin,latmax,lonmax")->required();
  stitch->add_option("--zoom", st.zoom, "Tile zoom level")->required();
  stitch->add_option("--tiles", st.tiles, "Tile directory laid out as {z}/{x}/{y}.png");
  stitch->add_option("--archive", st.archive, "Recorded tile archive");
  stitch->add_option("--out", st.out, "Output map PNG")->required();
  stitch->add_option("--mask", st.mask, "Output road mask PNG");
  stitch->add_option("--label-rows", st.label_rows, "Label band height per tile row")->capture_default_str();
  stitch->add_option("--road-min", st.road_min, "Minimum channel value of road pixels")
      ->check(CLI::Range(0, 255))
      ->capture_default_str();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic scene");
  synth->add_option("--kind", sy.kind, "straight|loop|intersection|ramp|drift")->capture_default_str();
  synth->add_option("--out", sy.out, "Scene PLY (intensity holds the label)")->required();
  synth->add_option("--truth", sy.truth, "Road-only PLY");
  synth->add_option("--mask", sy.mask, "Road footprint PNG");
  synth->add_option("--centerline", sy.centerline, "Truth centrelines as GeoJSON");
  synth->add_option("--seed", sy.spec.seed, "Random seed")->capture_default_str();
  synth->add_option("--width", sy.spec.road_width, "Road width, metres")->capture_default_str();
  synth->add_option("--extent", sy.spec.extent, "Scene side, metres")->capture_default_str();
  synth->add_option("--density", sy.spec.density, "Road points per m^2")->capture_default_str();
  synth->add_option("--buildings", sy.spec.building_count, "Building count")->capture_default_str();
  synth->add_option("--trees", sy.spec.tree_count, "Tree count")->capture_default_str();
  synth->add_option("--noise", sy.spec.noise_fraction, "Outlier fraction")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);
  roadex::set_thread_limit(threads);

  try {
    if (*extract) return cmd_extract(ex, threads);
    if (*evaluate) return cmd_evaluate(pred, truth, iou_params, overlay_path);
    if (*stitch) return cmd_stitch(st);
    if (*synth) return cmd_synth(sy);
  } catch (const roadex::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  } catch (const roadex::StageError& e) {
    spdlog::error("stage failed: {}", e.what());
    return kStage;
  } catch (const roadex::IoError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const roadex::ParseError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const roadex::TruncationError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const roadex::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const roadex::ParameterError& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const roadex::RangeError& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kStage;
  }
  return kOk;
}
