// Copyright 2026 the planecal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "planecal/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>

#include "planecal/calib_solver.hpp"
#include "planecal/dataset_io.hpp"
#include "planecal/errors.hpp"
#include "planecal/evaluation.hpp"
#include "planecal/synthetic.hpp"

namespace planecal {

namespace {

using nlohmann::json;

constexpr double kRad2Deg = 180.0 / std::numbers::pi;

/// Loads every manifest frame and runs both feature-extraction pipelines.
std::vector<FramePair> load_frame_pairs(const Manifest& manifest,
                                        std::uint64_t seed) {
  if (manifest.frames.empty()) {
    throw DataError("manifest lists no frames");
  }
  LidarExtractionConfig config;
  config.bounds = manifest.passthrough_bounds;

  std::vector<FramePair> frames;
  frames.reserve(manifest.frames.size());
  for (const ManifestFrame& mf : manifest.frames) {
    const PointCloud cloud = read_cloud(mf.cloud_path);
    const ImageLineSet lines = read_image_lines(mf.image_features_path);
    const LidarFrame lidar =
        extract_lidar_features(cloud, config, frame_seed(seed, mf.id));
    FramePair pair;
    pair.id = mf.id;
    pair.lidar_plane = lidar.plane;
    pair.lidar_edges = lidar.edges;
    pair.camera =
        build_camera_frame(lines, manifest.target, manifest.intrinsics);
    frames.push_back(std::move(pair));
  }
  return frames;
}

void print_transform(const RigidTransform& t) {
  std::printf("euler (phi, theta, psi) [deg]: %.6f %.6f %.6f\n",
              t.euler.x() * kRad2Deg, t.euler.y() * kRad2Deg,
              t.euler.z() * kRad2Deg);
  std::printf("translation [m]:               %.6f %.6f %.6f\n",
              t.translation.x(), t.translation.y(), t.translation.z());
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
  const SceneConfig config = read_scene_config(config_path);
  const std::string manifest =
      generate_dataset(config.scene, out_dir, config.cloud_format);
  std::printf("wrote %zu frames; manifest: %s\n", config.scene.poses.size(),
              manifest.c_str());
  return 0;
}

int run_calibrate(const std::string& manifest_path, const std::string& out_path,
                  const std::string& init_path, bool skip_stage2,
                  std::uint64_t seed) {
  const Manifest manifest = read_manifest(manifest_path);
  CalibrationProblem problem;
  problem.frames = load_frame_pairs(manifest, seed);
  if (!init_path.empty()) {
    problem.initial_guess = read_transform(init_path);
  }
  problem.config.run_stage2 = !skip_stage2;

  const CalibrationResult result = calibrate(problem);
  write_calibration_result(out_path, result);

  std::printf("status: %s\n", result.status.c_str());
  std::printf("stage 1: cost %.3e after %d iterations\n",
              result.stage1.final_cost, result.stage1.iterations);
  if (result.stage2) {
    std::printf("stage 2: cost %.3e after %d iterations\n",
                result.stage2->final_cost, result.stage2->iterations);
  }
  print_transform(result.transform);
  std::printf("result written to %s\n", out_path.c_str());
  return 0;
}

json reproj_report_to_json(const LineReprojReport& report) {
  json j;
  j["definition"] =
      "global_mean_px averages the point-to-line distance over every edge "
      "point; mean_of_frame_means_px averages the per-frame means";
  j["global_mean_px"] = report.global_mean_px;
  j["mean_of_frame_means_px"] = report.mean_of_frame_means_px;
  j["total_points"] = report.total_points;
  j["excluded_points"] = report.excluded_points;
  j["frames"] = json::array();
  for (const FrameReprojStats& f : report.frames) {
    json edges = json::array();
    for (const EdgeReprojStats& e : f.edges) {
      edges.push_back(json{{"label", to_string(e.label)},
                           {"points", e.points},
                           {"mean_px", e.mean_px}});
    }
    j["frames"].push_back(json{{"id", f.id},
                               {"points", f.points},
                               {"mean_px", f.mean_px},
                               {"edges", edges}});
  }
  return j;
}

int run_evaluate(const std::string& manifest_path, const std::string& calib_path,
                 const std::string& report_path, std::uint64_t seed) {
  const Manifest manifest = read_manifest(manifest_path);
  const RigidTransform transform = read_transform(calib_path);
  const std::vector<FramePair> frames = load_frame_pairs(manifest, seed);

  const LineReprojReport report =
      line_reprojection_error(frames, transform, manifest.intrinsics);
  json j = reproj_report_to_json(report);

  if (manifest.ground_truth) {
    const RigidTransform& gt = *manifest.ground_truth;
    const Mat3 dr = gt.rotation().transpose() * transform.rotation();
    const double angle =
        std::acos(std::clamp((dr.trace() - 1.0) / 2.0, -1.0, 1.0));
    const Vec3 euler_err = (transform.euler - gt.euler) * kRad2Deg;
    const Vec3 t_err = transform.translation - gt.translation;
    j["ground_truth_errors"] = json{
        {"euler_error_deg",
         json::array({euler_err.x(), euler_err.y(), euler_err.z()})},
        {"translation_error_m", json::array({t_err.x(), t_err.y(), t_err.z()})},
        {"rotation_angle_deg", angle * kRad2Deg},
        {"translation_norm_m", t_err.norm()}};
  }
  save_json(report_path, j);

  std::printf("line reprojection: %.6f px over %d points (%d excluded)\n",
              report.global_mean_px, report.total_points,
              report.excluded_points);
  std::printf("report written to %s\n", report_path.c_str());
  return 0;
}

int run_project(const std::string& manifest_path, const std::string& calib_path,
                FrameId frame_id, const std::string& out_path, int width,
                int height, std::uint64_t seed) {
  const Manifest manifest = read_manifest(manifest_path);
  const RigidTransform transform = read_transform(calib_path);

  const ManifestFrame* entry = nullptr;
  for (const ManifestFrame& f : manifest.frames) {
    if (f.id == frame_id) {
      entry = &f;
    }
  }
  if (entry == nullptr) {
    throw DataError("manifest has no frame with id " +
                    std::to_string(frame_id));
  }

  Manifest single = manifest;
  single.frames = {*entry};
  const std::vector<FramePair> frames = load_frame_pairs(single, seed);

  if (width <= 0 || height <= 0) {
    if (manifest.image_size) {
      width = manifest.image_size->first;
      height = manifest.image_size->second;
    } else {
      width = static_cast<int>(std::lround(2.0 * manifest.intrinsics.cx));
      height = static_cast<int>(std::lround(2.0 * manifest.intrinsics.cy));
    }
  }
  const SvgDocument doc = render_overlay(frames.front(), transform,
                                         manifest.intrinsics, width, height);
  std::ofstream out(out_path);
  if (!out) {
    throw DataError("cannot open '" + out_path + "' for writing");
  }
  out << to_svg(doc);
  if (!out) {
    throw DataError("failed while writing '" + out_path + "'");
  }
  std::printf("overlay written to %s\n", out_path.c_str());
  return 0;
}

int run_stereo_check(const std::string& left_path, const std::string& right_path,
                     const std::string& reference_path,
                     const std::string& report_path) {
  const RigidTransform left = read_transform(left_path);
  const RigidTransform right = read_transform(right_path);
  const RigidTransform reference = read_transform(reference_path);
  const StereoConsistencyReport report =
      stereo_consistency(left, right, reference);

  std::printf("euler error (alpha, beta, gamma) [deg]: %.6f %.6f %.6f\n",
              report.euler_error_deg.x(), report.euler_error_deg.y(),
              report.euler_error_deg.z());
  std::printf("translation error (X, Y, Z) [m]:        %.6f %.6f %.6f\n",
              report.translation_error_m.x(), report.translation_error_m.y(),
              report.translation_error_m.z());

  if (!report_path.empty()) {
    const json j = {
        {"euler_error_deg",
         json::array({report.euler_error_deg.x(), report.euler_error_deg.y(),
                      report.euler_error_deg.z()})},
        {"translation_error_m",
         json::array({report.translation_error_m.x(),
                      report.translation_error_m.y(),
                      report.translation_error_m.z()})}};
    save_json(report_path, j);
    std::printf("report written to %s\n", report_path.c_str());
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Extrinsic calibration between a scanning LIDAR and a pinhole camera "
      "from views of a square planar target"};
  app.require_subcommand(1);

  std::string sim_config, sim_out;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--config", sim_config, "Scene configuration JSON")
      ->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();

  std::string cal_manifest, cal_out, cal_init;
  bool cal_skip_stage2 = false;
  std::uint64_t cal_seed = kDefaultExtractionSeed;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Estimate the LIDAR-to-camera transform from a dataset");
  calibrate_cmd->add_option("--manifest", cal_manifest, "Dataset manifest JSON")
      ->required();
  calibrate_cmd->add_option("--out", cal_out, "Result JSON path")->required();
  calibrate_cmd->add_option("--init", cal_init,
                            "Initial transform JSON (default: identity)");
  calibrate_cmd->add_flag("--skip-stage2", cal_skip_stage2,
                          "Stop after the plane-based stage");
  calibrate_cmd->add_option("--seed", cal_seed, "Feature-extraction RNG seed");

  std::string eval_manifest, eval_calib, eval_report;
  std::uint64_t eval_seed = kDefaultExtractionSeed;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "Compute line-reprojection metrics for a calibration");
  evaluate_cmd->add_option("--manifest", eval_manifest, "Dataset manifest JSON")
      ->required();
  evaluate_cmd->add_option("--calib", eval_calib, "Calibration result JSON")
      ->required();
  evaluate_cmd->add_option("--report", eval_report, "Report JSON path")
      ->required();
  evaluate_cmd->add_option("--seed", eval_seed, "Feature-extraction RNG seed");

  std::string proj_manifest, proj_calib, proj_out;
  FrameId proj_frame = 0;
  int proj_width = 0, proj_height = 0;
  std::uint64_t proj_seed = kDefaultExtractionSeed;
  CLI::App* project_cmd = app.add_subcommand(
      "project", "Render an SVG overlay of projected LIDAR features");
  project_cmd->add_option("--manifest", proj_manifest, "Dataset manifest JSON")
      ->required();
  project_cmd->add_option("--calib", proj_calib, "Calibration result JSON")
      ->required();
  project_cmd->add_option("--frame", proj_frame, "Frame id")->required();
  project_cmd->add_option("--out", proj_out, "Output SVG path")->required();
  project_cmd->add_option("--width", proj_width, "Canvas width (pixels)");
  project_cmd->add_option("--height", proj_height, "Canvas height (pixels)");
  project_cmd->add_option("--seed", proj_seed, "Feature-extraction RNG seed");

  std::string st_left, st_right, st_reference, st_report;
  CLI::App* stereo_cmd = app.add_subcommand(
      "stereo-check",
      "Compare two calibrations against a reference stereo extrinsic");
  stereo_cmd->add_option("--left", st_left, "Left calibration JSON")
      ->required();
  stereo_cmd->add_option("--right", st_right, "Right calibration JSON")
      ->required();
  stereo_cmd->add_option("--reference", st_reference, "Reference transform JSON")
      ->required();
  stereo_cmd->add_option("--report", st_report, "Optional report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) {
      return run_simulate(sim_config, sim_out);
    }
    if (calibrate_cmd->parsed()) {
      return run_calibrate(cal_manifest, cal_out, cal_init, cal_skip_stage2,
                           cal_seed);
    }
    if (evaluate_cmd->parsed()) {
      return run_evaluate(eval_manifest, eval_calib, eval_report, eval_seed);
    }
    if (project_cmd->parsed()) {
      return run_project(proj_manifest, proj_calib, proj_frame, proj_out,
                         proj_width, proj_height, proj_seed);
    }
    if (stereo_cmd->parsed()) {
      return run_stereo_check(st_left, st_right, st_reference, st_report);
    }
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) {
    argv.push_back(a.c_str());
  }
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace planecal
