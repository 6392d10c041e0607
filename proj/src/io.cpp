/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/io.hpp"

#include <fmt/core.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "lume/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "file I/O assumes a little-endian host");

namespace lume {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot open {} for reading", path));
  return file;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot open {} for writing", path));
  return file;
}

// PFM header: magic token, ASCII width/height, scale. Tokens are separated
// by whitespace; the binary payload starts after exactly one whitespace
// byte following the scale.
struct PfmHeader {
  int channels = 0;
  Eigen::Index width = 0, height = 0;
};

PfmHeader read_pfm_header(std::ifstream& file, const std::string& path) {
  PfmHeader header;
  std::string magic;
  file >> magic;
  if (magic == "Pf")
    header.channels = 1;
  else if (magic == "PF")
    header.channels = 3;
  else
    throw IoError(fmt::format("{}: not a PFM file (magic '{}')", path, magic));
  long width = 0, height = 0;
  double scale = 0;
  if (!(file >> width >> height >> scale))
    throw IoError(fmt::format("{}: malformed PFM header", path));
  if (width < 1 || height < 1)
    throw IoError(fmt::format("{}: bad PFM dimensions {}x{}", path, width, height));
  if (scale > 0)
    throw IoError(fmt::format(
        "{}: big-endian PFM (positive scale {}) is not supported", path, scale));
  if (scale == 0) throw IoError(fmt::format("{}: PFM scale must be non-zero", path));
  file.get();  // the single whitespace byte before the payload
  header.width = width;
  header.height = height;
  return header;
}

std::vector<float> read_pfm_payload(std::ifstream& file, const std::string& path,
                                    const PfmHeader& header) {
  std::vector<float> data(static_cast<std::size_t>(header.width) * header.height *
                          header.channels);
  file.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (file.gcount() != static_cast<std::streamsize>(data.size() * sizeof(float)))
    throw IoError(fmt::format("{}: truncated PFM payload", path));
  return data;
}

void write_pfm_file(const std::string& path, int channels, Eigen::Index height,
                    Eigen::Index width,
                    const std::function<float(Eigen::Index, Eigen::Index, int)>& get) {
  std::ofstream file = open_output(path);
  file << (channels == 1 ? "Pf" : "PF") << "\n"
       << width << " " << height << "\n-1.0\n";
  std::vector<float> row(static_cast<std::size_t>(width) * channels);
  for (Eigen::Index v = height - 1; v >= 0; --v) {  // bottom-to-top
    for (Eigen::Index u = 0; u < width; ++u)
      for (int c = 0; c < channels; ++c)
        row[static_cast<std::size_t>(u) * channels + c] = get(v, u, c);
    file.write(reinterpret_cast<const char*>(row.data()),
               static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!file) throw IoError(fmt::format("failed writing {}", path));
}

// PPM token reader that skips whitespace and # comments.
std::string ppm_token(std::ifstream& file, const std::string& path) {
  std::string token;
  int c = file.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = file.get();
    c = file.get();
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = file.get();
  }
  if (token.empty()) throw IoError(fmt::format("{}: malformed PPM header", path));
  return token;
}

Real json_number(const nlohmann::json& j, const char* key, const char* context) {
  if (!j.contains(key))
    throw IoError(fmt::format("{}: missing key '{}'", context, key));
  if (!j[key].is_number())
    throw IoError(fmt::format("{}: key '{}' must be a number", context, key));
  return j[key].get<Real>();
}

Real json_number_or(const nlohmann::json& j, const char* key, Real fallback) {
  if (!j.contains(key)) return fallback;
  return j[key].get<Real>();
}

Vec3 json_vec3(const nlohmann::json& j, const char* key, const char* context) {
  if (!j.contains(key))
    throw IoError(fmt::format("{}: missing key '{}'", context, key));
  const auto& arr = j[key];
  if (!arr.is_array() || arr.size() != 3)
    throw IoError(fmt::format("{}: key '{}' must be a 3-element array", context, key));
  return {arr[0].get<Real>(), arr[1].get<Real>(), arr[2].get<Real>()};
}

Vec3 json_vec3_or(const nlohmann::json& j, const char* key, const Vec3& fallback,
                  const char* context) {
  if (!j.contains(key)) return fallback;
  return json_vec3(j, key, context);
}

AlbedoHS json_albedo(const nlohmann::json& j, const char* context) {
  AlbedoHS hs;
  hs.h = json_number(j, "h", context);
  hs.s = json_number(j, "s", context);
  return hs;
}

}  // namespace

ScalarField read_pfm_scalar(const std::string& path) {
  std::ifstream file = open_input(path);
  const PfmHeader header = read_pfm_header(file, path);
  if (header.channels != 1)
    throw IoError(fmt::format("{}: expected a 1-channel PFM, got 3 channels", path));
  const std::vector<float> data = read_pfm_payload(file, path, header);
  ScalarField field(header.height, header.width);
  for (Eigen::Index v = 0; v < header.height; ++v)
    for (Eigen::Index u = 0; u < header.width; ++u)
      field(header.height - 1 - v, u) =
          data[static_cast<std::size_t>(v) * header.width + u];
  return field;
}

VectorField read_pfm_vector(const std::string& path) {
  std::ifstream file = open_input(path);
  const PfmHeader header = read_pfm_header(file, path);
  if (header.channels != 3)
    throw IoError(fmt::format("{}: expected a 3-channel PFM, got 1 channel", path));
  const std::vector<float> data = read_pfm_payload(file, path, header);
  VectorField field(header.height, header.width);
  for (Eigen::Index v = 0; v < header.height; ++v)
    for (Eigen::Index u = 0; u < header.width; ++u)
      for (int c = 0; c < 3; ++c)
        field.ch[c](header.height - 1 - v, u) =
            data[(static_cast<std::size_t>(v) * header.width + u) * 3 + c];
  return field;
}

void write_pfm(const std::string& path, const ScalarField& field) {
  write_pfm_file(path, 1, field.rows(), field.cols(),
                 [&](Eigen::Index v, Eigen::Index u, int) {
                   return static_cast<float>(field(v, u));
                 });
}

void write_pfm(const std::string& path, const VectorField& field) {
  write_pfm_file(path, 3, field.rows(), field.cols(),
                 [&](Eigen::Index v, Eigen::Index u, int c) {
                   return static_cast<float>(field.ch[c](v, u));
                 });
}

ColorImage read_ppm(const std::string& path) {
  std::ifstream file = open_input(path);
  if (ppm_token(file, path) != "P6")
    throw IoError(fmt::format("{}: not a binary PPM (P6) file", path));
  const long width = std::stol(ppm_token(file, path));
  const long height = std::stol(ppm_token(file, path));
  const long maxval = std::stol(ppm_token(file, path));
  if (width < 1 || height < 1)
    throw IoError(fmt::format("{}: bad PPM dimensions {}x{}", path, width, height));
  if (maxval != 255)
    throw IoError(fmt::format("{}: PPM maxval must be 255, got {}", path, maxval));
  std::vector<unsigned char> data(static_cast<std::size_t>(width) * height * 3);
  file.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (file.gcount() != static_cast<std::streamsize>(data.size()))
    throw IoError(fmt::format("{}: truncated PPM payload", path));
  ColorImage image(height, width);
  for (Eigen::Index v = 0; v < height; ++v)
    for (Eigen::Index u = 0; u < width; ++u)
      for (int c = 0; c < 3; ++c)
        image.ch[c](v, u) =
            data[(static_cast<std::size_t>(v) * width + u) * 3 + c] / Real(255);
  return image;
}

void write_ppm(const std::string& path, const ColorImage& image) {
  std::ofstream file = open_output(path);
  file << "P6\n" << image.cols() << " " << image.rows() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.cols()) * 3);
  for (Eigen::Index v = 0; v < image.rows(); ++v) {
    for (Eigen::Index u = 0; u < image.cols(); ++u)
      for (int c = 0; c < 3; ++c)
        row[static_cast<std::size_t>(u) * 3 + c] = static_cast<unsigned char>(
            std::lround(std::clamp<Real>(image.ch[c](v, u), 0, 1) * 255));
    file.write(reinterpret_cast<const char*>(row.data()),
               static_cast<std::streamsize>(row.size()));
  }
  if (!file) throw IoError(fmt::format("failed writing {}", path));
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream file = open_input(path);
  try {
    return nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(fmt::format("{}: {}", path, e.what()));
  }
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream file = open_output(path);
  file << j.dump(2) << "\n";
  if (!file) throw IoError(fmt::format("failed writing {}", path));
}

CameraModel camera_from_json(const nlohmann::json& j) {
  CameraModel cam;
  cam.fx = json_number(j, "fx", "camera");
  cam.fy = json_number(j, "fy", "camera");
  cam.cx = json_number(j, "cx", "camera");
  cam.cy = json_number(j, "cy", "camera");
  cam.width = static_cast<int>(json_number(j, "width", "camera"));
  cam.height = static_cast<int>(json_number(j, "height", "camera"));
  cam.validate();
  return cam;
}

nlohmann::json to_json(const CameraModel& cam) {
  return {{"fx", cam.fx},         {"fy", cam.fy},       {"cx", cam.cx},
          {"cy", cam.cy},         {"width", cam.width}, {"height", cam.height}};
}

LightModel light_from_json(const nlohmann::json& j) {
  LightModel light;
  light.position = json_vec3_or(j, "position", Vec3::Zero(), "light");
  light.axis = json_vec3_or(j, "axis", Vec3(0, 0, 1), "light");
  light.mu = json_number_or(j, "mu", 0);
  light.sigma0 = json_number_or(j, "sigma0", 1);
  light.gain = json_number_or(j, "gain", 1);
  light.gamma = json_number_or(j, "gamma", 2.2);
  light.validate();
  return light;
}

nlohmann::json to_json(const LightModel& light) {
  return {{"position", {light.position.x(), light.position.y(), light.position.z()}},
          {"axis", {light.axis.x(), light.axis.y(), light.axis.z()}},
          {"mu", light.mu},
          {"sigma0", light.sigma0},
          {"gain", light.gain},
          {"gamma", light.gamma}};
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec scene;
  if (!j.contains("kind")) throw IoError("scene: missing key 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "plane")
    scene.kind = SceneKind::plane;
  else if (kind == "sphere")
    scene.kind = SceneKind::sphere;
  else if (kind == "tube")
    scene.kind = SceneKind::tube;
  else
    throw IoError(fmt::format("scene: unknown kind '{}'", kind));
  if (!j.contains("camera")) throw IoError("scene: missing key 'camera'");
  scene.camera = camera_from_json(j["camera"]);
  if (!j.contains("light")) throw IoError("scene: missing key 'light'");
  scene.light = light_from_json(j["light"]);
  scene.seed = j.value("seed", std::uint64_t{0});

  if (j.contains("plane")) {
    scene.plane_point = json_vec3(j["plane"], "point", "scene.plane");
    scene.plane_normal = json_vec3(j["plane"], "normal", "scene.plane");
  }
  if (j.contains("sphere")) {
    scene.sphere_center = json_vec3(j["sphere"], "center", "scene.sphere");
    scene.sphere_radius = json_number(j["sphere"], "radius", "scene.sphere");
  }
  if (j.contains("tube")) {
    const auto& tube = j["tube"];
    scene.tube_radius = json_number(tube, "radius", "scene.tube");
    scene.tube_length = json_number_or(tube, "length", scene.tube_length);
    if (tube.contains("axis_points")) {
      for (const auto& p : tube["axis_points"])
        scene.tube_axis.emplace_back(p[0].get<Real>(), p[1].get<Real>(),
                                     p[2].get<Real>());
    }
  }
  if (j.contains("albedo")) {
    const auto& albedo = j["albedo"];
    if (albedo.contains("base"))
      scene.texture.base = json_albedo(albedo["base"], "scene.albedo.base");
    if (albedo.contains("stripe"))
      scene.texture.stripe = json_albedo(albedo["stripe"], "scene.albedo.stripe");
    scene.texture.frequency = json_number_or(albedo, "frequency", 0);
    scene.texture.width = json_number_or(albedo, "width", 0.5);
  }
  scene.validate();
  return scene;
}

RecoveryConfig recovery_config_from_json(const nlohmann::json& j) {
  RecoveryConfig config;
  config.steps = static_cast<int>(json_number_or(j, "steps", config.steps));
  config.step_size = json_number_or(j, "step_size", config.step_size);
  config.weights.lambda_s = json_number_or(j, "lambda_s", config.weights.lambda_s);
  config.weights.lambda_sp = json_number_or(j, "lambda_sp", config.weights.lambda_sp);
  config.weights.th = json_number_or(j, "th", config.weights.th);
  config.init_depth = json_number_or(j, "init_depth", config.init_depth);
  if (j.contains("init_albedo"))
    config.init_albedo = json_albedo(j["init_albedo"], "config.init_albedo");
  if (j.contains("grad_mode")) {
    const std::string mode = j["grad_mode"].get<std::string>();
    if (mode == "analytic")
      config.grad_mode = GradMode::analytic;
    else if (mode == "finite-difference")
      config.grad_mode = GradMode::finite_difference;
    else
      throw IoError(fmt::format("config: unknown grad_mode '{}'", mode));
  }
  config.validate();
  return config;
}

nlohmann::json to_json(const MetricsReport& report) {
  return {{"scale", report.scale},
          {"mae", report.depth.mae},
          {"medae", report.depth.medae},
          {"rmse", report.depth.rmse},
          {"rmse_log", report.depth.rmse_log},
          {"abs_rel", report.depth.abs_rel},
          {"sq_rel", report.depth.sq_rel},
          {"delta1", report.depth.delta1},
          {"delta2", report.depth.delta2},
          {"delta3", report.depth.delta3},
          {"normal_mae_deg", report.normal_mae_deg},
          {"ssim", report.ssim},
          {"image_mae", report.image_mae}};
}

void write_bundle(const std::string& dir, const Bundle& bundle) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create directory {}: {}", dir, ec.message()));
  const fs::path base(dir);
  write_ppm((base / "image.ppm").string(), bundle.data.image);
  write_pfm((base / "depth.pfm").string(), bundle.data.depth);
  write_pfm((base / "normals.pfm").string(), bundle.data.normals);
  VectorField albedo3(bundle.data.albedo.rows(), bundle.data.albedo.cols());
  albedo3.ch[0] = bundle.data.albedo.ch[0];
  albedo3.ch[1] = bundle.data.albedo.ch[1];
  write_pfm((base / "albedo.pfm").string(), albedo3);
  nlohmann::json meta = {{"camera", to_json(bundle.camera)},
                         {"light", to_json(bundle.light)},
                         {"seed", bundle.seed},
                         {"spec_hash", bundle.spec_hash}};
  save_json((base / "meta.json").string(), meta);
}

Bundle read_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  Bundle bundle;
  const nlohmann::json meta = load_json((base / "meta.json").string());
  if (!meta.contains("camera")) throw IoError(dir + "/meta.json: missing key 'camera'");
  if (!meta.contains("light")) throw IoError(dir + "/meta.json: missing key 'light'");
  bundle.camera = camera_from_json(meta["camera"]);
  bundle.light = light_from_json(meta["light"]);
  bundle.seed = meta.value("seed", std::uint64_t{0});
  bundle.spec_hash = meta.value("spec_hash", std::string{});
  bundle.data.image = read_ppm((base / "image.ppm").string());
  bundle.data.depth = read_pfm_scalar((base / "depth.pfm").string());
  bundle.data.normals = read_pfm_vector((base / "normals.pfm").string());
  // PFM quantizes to float32; restore the exact unit length the rest of the
  // library requires of normal fields.
  for (Eigen::Index v = 0; v < bundle.data.normals.rows(); ++v)
    for (Eigen::Index u = 0; u < bundle.data.normals.cols(); ++u) {
      const Vec3 n = bundle.data.normals.at(v, u);
      if (n.norm() < 0.5)
        throw IoError(fmt::format("{}/normals.pfm: pixel ({}, {}) is not a "
                                  "unit vector",
                                  dir, u, v));
      bundle.data.normals.set(v, u, n.normalized());
    }
  const VectorField albedo3 = read_pfm_vector((base / "albedo.pfm").string());
  bundle.data.albedo.resize(albedo3.rows(), albedo3.cols());
  bundle.data.albedo.ch[0] = albedo3.ch[0];
  bundle.data.albedo.ch[1] = albedo3.ch[1];
  require_same_shape("bundle: image vs depth", bundle.data.image, bundle.data.depth);
  require_same_shape("bundle: image vs normals", bundle.data.image,
                     bundle.data.normals);
  require_same_shape("bundle: image vs albedo", bundle.data.image,
                     bundle.data.albedo);
  if (bundle.data.image.rows() != bundle.camera.height ||
      bundle.data.image.cols() != bundle.camera.width)
    throw ShapeError(fmt::format(
        "bundle: image is {} but the camera expects {}",
        shape_str(bundle.data.image.rows(), bundle.data.image.cols()),
        shape_str(bundle.camera.height, bundle.camera.width)));
  return bundle;
}

void write_history_csv(const std::string& path,
                       const std::vector<LossBreakdown>& history) {
  std::ofstream file = open_output(path);
  file << "step,photometric,smoothness,specular,total\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    file << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i + 1,
                        history[i].photometric, history[i].smoothness,
                        history[i].specular, history[i].total);
  if (!file) throw IoError(fmt::format("failed writing {}", path));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace lume
