/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

// lumedepth: generate synthetic spotlight scenes, recover depth/albedo from
// a single image, and evaluate predictions.
//
//   lumedepth gen <scene.json> -o <dir>
//   lumedepth render <dir> -o out.ppm
//   lumedepth recover <image.ppm> --camera c.json --light l.json
//                     --config r.json -o <dir>
//   lumedepth eval <pred-dir> <gt-dir> -o report.json
//   lumedepth calib <obs-dir> --init l0.json -o light.json
//
// Exit codes: 0 success, 1 domain/numeric/file errors, 2 usage errors.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lume/calib.hpp"
#include "lume/errors.hpp"
#include "lume/geometry.hpp"
#include "lume/io.hpp"
#include "lume/losses.hpp"
#include "lume/metrics.hpp"
#include "lume/normals.hpp"
#include "lume/optim.hpp"
#include "lume/parallel.hpp"
#include "lume/photometry.hpp"
#include "lume/synth.hpp"

namespace {

struct Common {
  bool quiet = false;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_flag("--quiet", common.quiet, "suppress progress output");
  sub->add_option("--threads", common.threads, "worker thread cap (>= 1)")
      ->envname("LUMEDEPTH_THREADS")
      ->check(CLI::PositiveNumber);
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw lume::IoError(fmt::format("cannot open {} for reading", path));
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

std::string hex_hash(const std::string& bytes) {
  return fmt::format("{:016x}", lume::fnv1a64(bytes));
}

int run_gen(const std::string& scene_path, const std::string& out_dir,
            const Common& common) {
  const std::string bytes = read_file_bytes(scene_path);
  const lume::SceneSpec scene = lume::scene_from_json(nlohmann::json::parse(bytes));
  lume::Bundle bundle;
  bundle.data = lume::cast(scene);
  bundle.camera = scene.camera;
  bundle.light = scene.light;
  bundle.seed = scene.seed;
  bundle.spec_hash = hex_hash(bytes);
  lume::write_bundle(out_dir, bundle);
  if (!common.quiet)
    fmt::print("wrote {} ({}x{})\n", out_dir, scene.camera.width,
               scene.camera.height);
  return 0;
}

int run_render(const std::string& dir, const std::string& out_path,
               const Common& common) {
  const lume::Bundle bundle = lume::read_bundle(dir);
  const lume::VectorField rays = lume::build_ray_field(bundle.camera);
  const lume::ColorImage image =
      lume::render_image(bundle.light, rays, bundle.data.depth,
                         bundle.data.albedo, bundle.data.normals);
  lume::write_ppm(out_path, image);
  if (!common.quiet) fmt::print("wrote {}\n", out_path);
  return 0;
}

int run_recover(const std::string& image_path, const std::string& camera_path,
                const std::string& light_path, const std::string& config_path,
                const std::string& out_dir, const Common& common) {
  const lume::ColorImage observed = lume::read_ppm(image_path);
  const lume::CameraModel cam = lume::camera_from_json(lume::load_json(camera_path));
  const lume::LightModel light = lume::light_from_json(lume::load_json(light_path));
  const std::string config_bytes = read_file_bytes(config_path);
  const lume::RecoveryConfig config =
      lume::recovery_config_from_json(nlohmann::json::parse(config_bytes));

  const int stride = std::max(1, config.steps / 10);
  lume::StepCallback progress;
  if (!common.quiet)
    progress = [&](int step, const lume::LossBreakdown& losses) {
      if (step % stride == 0 || step == config.steps)
        fmt::print("step {}/{}  total={:.6g}  photo={:.6g}  smooth={:.6g}  "
                   "spec={:.6g}\n",
                   step, config.steps, losses.total, losses.photometric,
                   losses.smoothness, losses.specular);
    };
  const lume::RecoveryResult result = lume::recover(observed, light, cam,
                                                    config, progress);

  lume::Bundle bundle;
  bundle.data.image = result.rendered;
  bundle.data.depth = result.depth;
  bundle.data.normals = result.normals;
  bundle.data.albedo = result.albedo;
  bundle.camera = cam;
  bundle.light = light;
  bundle.spec_hash = hex_hash(config_bytes);
  lume::write_bundle(out_dir, bundle);
  lume::write_history_csv((std::filesystem::path(out_dir) / "history.csv").string(),
                          result.history);
  if (!common.quiet) fmt::print("wrote {}\n", out_dir);
  return 0;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir,
             const std::string& out_path, const Common& common) {
  const lume::Bundle pred = lume::read_bundle(pred_dir);
  const lume::Bundle gt = lume::read_bundle(gt_dir);
  const lume::MetricsReport report =
      lume::evaluate(pred.data.depth, gt.data.depth, pred.data.normals,
                     gt.data.normals, pred.data.image, gt.data.image);
  lume::save_json(out_path, lume::to_json(report));
  if (!common.quiet) {
    const std::vector<std::pair<std::string, lume::Real>> columns = {
        {"MAE", report.depth.mae},         {"MedAE", report.depth.medae},
        {"RMSE", report.depth.rmse},       {"RMSE_log", report.depth.rmse_log},
        {"Abs_Rel", report.depth.abs_rel}, {"Sq_Rel", report.depth.sq_rel},
        {"d<1.25", report.depth.delta1},   {"d<1.25^2", report.depth.delta2},
        {"d<1.25^3", report.depth.delta3}, {"Norm_MAE", report.normal_mae_deg},
        {"SSIM", report.ssim},             {"Image_MAE", report.image_mae}};
    fmt::print("scale: {:.6g}\n", report.scale);
    std::string header, values;
    for (const auto& [name, value] : columns) {
      const std::size_t width = std::max<std::size_t>(name.size(), 9) + 2;
      header += fmt::format("{:>{}}", name, width);
      values += fmt::format("{:>{}.4g}", value, width);
    }
    fmt::print("{}\n{}\n", header, values);
    fmt::print("wrote {}\n", out_path);
  }
  return 0;
}

int run_calib(const std::string& obs_dir, const std::string& init_path,
              const std::string& out_path, int max_iterations,
              bool position_only, const Common& common) {
  namespace fs = std::filesystem;
  std::vector<std::string> bundle_dirs;
  if (fs::exists(fs::path(obs_dir) / "meta.json")) {
    bundle_dirs.push_back(obs_dir);
  } else {
    if (!fs::is_directory(obs_dir))
      throw lume::IoError(fmt::format("{}: not a directory", obs_dir));
    for (const auto& entry : fs::directory_iterator(obs_dir))
      if (entry.is_directory() && fs::exists(entry.path() / "meta.json"))
        bundle_dirs.push_back(entry.path().string());
    std::sort(bundle_dirs.begin(), bundle_dirs.end());
    if (bundle_dirs.empty())
      throw lume::IoError(
          fmt::format("{}: no observation bundles found", obs_dir));
  }

  std::vector<lume::CalibObservation> observations;
  lume::CameraModel cam;
  for (std::size_t i = 0; i < bundle_dirs.size(); ++i) {
    lume::Bundle bundle = lume::read_bundle(bundle_dirs[i]);
    if (i == 0) cam = bundle.camera;
    observations.push_back({std::move(bundle.data.image),
                            std::move(bundle.data.depth),
                            std::move(bundle.data.normals),
                            std::move(bundle.data.albedo)});
  }

  const lume::LightModel init = lume::light_from_json(lume::load_json(init_path));
  lume::CalibOptions opts;
  opts.max_iterations = max_iterations;
  opts.fit_mu = !position_only;
  const auto [light, report] = lume::calibrate_light(observations, cam, init, opts);
  lume::save_json(out_path, lume::to_json(light));

  if (!common.quiet) {
    fmt::print("position: ({:.6g}, {:.6g}, {:.6g})  mu: {:.6g}\n",
               light.position.x(), light.position.y(), light.position.z(),
               light.mu);
    for (std::size_t i = 0; i < report.rms_gray_levels.size(); ++i)
      fmt::print("observation {}: RMS {:.4g} gray levels\n", i,
                 report.rms_gray_levels[i]);
    fmt::print("iterations: {}  converged: {}{}\n", report.iterations,
               report.converged ? "yes" : "no",
               report.conditioning_warning
                   ? "  (warning: weak geometry, mu and position may trade off)"
                   : "");
    fmt::print("wrote {}\n", out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-image depth and albedo recovery under a calibrated "
               "co-located spotlight"};
  app.require_subcommand(1);
  Common common;

  auto* gen = app.add_subcommand("gen", "ray-cast a synthetic scene bundle");
  std::string gen_scene, gen_out;
  gen->add_option("scene", gen_scene, "scene description (JSON)")->required();
  gen->add_option("-o,--output", gen_out, "output bundle directory")->required();
  add_common(gen, common);

  auto* render = app.add_subcommand("render", "re-render a bundle's image");
  std::string render_dir, render_out;
  render->add_option("bundle", render_dir, "bundle directory")->required();
  render->add_option("-o,--output", render_out, "output PPM path")->required();
  add_common(render, common);

  auto* recover = app.add_subcommand(
      "recover", "optimize depth and albedo against one image");
  std::string rec_image, rec_camera, rec_light, rec_config, rec_out;
  recover->add_option("image", rec_image, "observed image (PPM)")->required();
  recover->add_option("--camera", rec_camera, "camera intrinsics (JSON)")
      ->required();
  recover->add_option("--light", rec_light, "light model (JSON)")->required();
  recover->add_option("--config", rec_config, "recovery settings (JSON)")
      ->required();
  recover->add_option("-o,--output", rec_out, "output bundle directory")
      ->required();
  add_common(recover, common);

  auto* eval = app.add_subcommand("eval", "score a prediction bundle");
  std::string eval_pred, eval_gt, eval_out;
  eval->add_option("pred-dir", eval_pred, "prediction bundle")->required();
  eval->add_option("gt-dir", eval_gt, "ground-truth bundle")->required();
  eval->add_option("-o,--output", eval_out, "report JSON path")->required();
  add_common(eval, common);

  auto* calib = app.add_subcommand(
      "calib", "fit light position and spread from observations");
  std::string calib_obs, calib_init, calib_out;
  int calib_iters = 20000;
  bool calib_position_only = false;
  calib->add_option("obs-dir", calib_obs,
                    "observation bundle, or directory of bundles")
      ->required();
  calib->add_option("--init", calib_init, "initial light model (JSON)")
      ->required();
  calib->add_option("-o,--output", calib_out, "fitted light JSON path")
      ->required();
  calib->add_option("--max-iterations", calib_iters, "optimizer budget")
      ->check(CLI::PositiveNumber);
  calib->add_flag("--position-only", calib_position_only,
                  "hold mu at its initial value");
  add_common(calib, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    lume::set_thread_count(common.threads);
    if (gen->parsed()) return run_gen(gen_scene, gen_out, common);
    if (render->parsed()) return run_render(render_dir, render_out, common);
    if (recover->parsed())
      return run_recover(rec_image, rec_camera, rec_light, rec_config, rec_out,
                         common);
    if (eval->parsed()) return run_eval(eval_pred, eval_gt, eval_out, common);
    if (calib->parsed())
      return run_calib(calib_obs, calib_init, calib_out, calib_iters,
                       calib_position_only, common);
  } catch (const lume::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
