/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include <doctest.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "lume/errors.hpp"
#include "lume/io.hpp"
#include "lume/normals.hpp"
#include "lume/synth.hpp"

using namespace lume;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory per test run, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lume-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out.good());
}

Real quantize32(Real x) { return static_cast<float>(x); }

}  // namespace

TEST_CASE("pfm byte layout is pinned") {
  TempDir tmp;

  SUBCASE("single pixel encodes header plus little-endian float") {
    ScalarField one(1, 1);
    one(0, 0) = 2.5;
    const std::string path = tmp.file("one.pfm");
    write_pfm(path, one);
    const std::string bytes = slurp(path);
    // 2.5f = 0x40200000, stored little-endian.
    const std::string expected =
        std::string("Pf\n1 1\n-1.0\n") + '\x00' + '\x00' + '\x20' + '\x40';
    CHECK(bytes == expected);
    const ScalarField back = read_pfm_scalar(path);
    CHECK(back(0, 0) == 2.5);
  }
  SUBCASE("rows are stored bottom-to-top") {
    ScalarField field(2, 1);
    field(0, 0) = 1.0;  // top row
    field(1, 0) = 2.0;  // bottom row
    const std::string path = tmp.file("rows.pfm");
    write_pfm(path, field);
    const std::string bytes = slurp(path);
    const std::string header = "Pf\n1 2\n-1.0\n";
    REQUIRE(bytes.size() == header.size() + 8);
    CHECK(bytes.substr(0, header.size()) == header);
    // First stored scanline must be the bottom row (2.0f = 0x40000000).
    CHECK(bytes[header.size() + 3] == '\x40');
    CHECK(bytes[header.size() + 7] == '\x3f');  // then 1.0f = 0x3f800000
    const ScalarField back = read_pfm_scalar(path);
    CHECK(back(0, 0) == 1.0);
    CHECK(back(1, 0) == 2.0);
  }
  SUBCASE("scalar round trip is float32-exact") {
    const ScalarField field = test::random_field(6, 5, 0.25, 80.0, 41);
    const std::string path = tmp.file("rt.pfm");
    write_pfm(path, field);
    const ScalarField back = read_pfm_scalar(path);
    for (Eigen::Index v = 0; v < field.rows(); ++v)
      for (Eigen::Index u = 0; u < field.cols(); ++u)
        CHECK(back(v, u) == quantize32(field(v, u)));
  }
  SUBCASE("vector round trip keeps channel interleaving straight") {
    VectorField field(3, 4);
    for (Eigen::Index v = 0; v < 3; ++v)
      for (Eigen::Index u = 0; u < 4; ++u)
        field.set(v, u, Vec3(v + 1, 10 * (u + 1), -5.5));
    const std::string path = tmp.file("vec.pfm");
    write_pfm(path, field);
    const VectorField back = read_pfm_vector(path);
    for (Eigen::Index v = 0; v < 3; ++v)
      for (Eigen::Index u = 0; u < 4; ++u)
        CHECK((back.at(v, u) - field.at(v, u)).norm() == 0.0);
  }
  SUBCASE("malformed inputs are rejected") {
    const std::string path = tmp.file("bad.pfm");
    spit(path, "P5\n1 1\n-1.0\nxxxx");
    CHECK_THROWS_AS(read_pfm_scalar(path), IoError);
    spit(path, std::string("Pf\n1 1\n1.0\n") + '\x00' + '\x00' + '\x20' +
                   '\x40');  // big-endian scale
    CHECK_THROWS_AS(read_pfm_scalar(path), IoError);
    spit(path, "Pf\n2 2\n-1.0\nshort");  // truncated payload
    CHECK_THROWS_AS(read_pfm_scalar(path), IoError);
    spit(path, std::string("PF\n1 1\n-1.0\n") + std::string(12, '\x00'));
    CHECK_THROWS_AS(read_pfm_scalar(path), IoError);  // channel mismatch
    CHECK_THROWS_AS(read_pfm_scalar(tmp.file("missing.pfm")), IoError);
  }
}

TEST_CASE("ppm quantization is pinned") {
  TempDir tmp;

  SUBCASE("encode rounds to the nearest 8-bit level") {
    ColorImage image(1, 2);
    image.ch[0](0, 0) = 0.5;  // -> round(127.5) = 128
    image.ch[1](0, 0) = 1.0;  // -> 255
    image.ch[2](0, 0) = 0.0;  // -> 0
    image.ch[0](0, 1) = 1.0 / 255.0;  // -> exactly 1
    const std::string path = tmp.file("q.ppm");
    write_ppm(path, image);
    const std::string bytes = slurp(path);
    const std::string header = "P6\n2 1\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.substr(0, header.size()) == header);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 0]) == 128);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 255);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 2]) == 0);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 3]) == 1);
    const ColorImage back = read_ppm(path);
    CHECK(back.ch[0](0, 0) == 128.0 / 255.0);
    CHECK(back.ch[1](0, 0) == 1.0);
    CHECK(back.ch[0](0, 1) == 1.0 / 255.0);
  }
  SUBCASE("write-read is idempotent on 8-bit data") {
    ColorImage image(4, 3);
    test::Uniform uniform(77);
    for (int c = 0; c < 3; ++c)
      for (Eigen::Index v = 0; v < 4; ++v)
        for (Eigen::Index u = 0; u < 3; ++u)
          image.ch[c](v, u) = std::floor(uniform(0, 256)) / 255.0;
    const std::string a = tmp.file("a.ppm");
    const std::string b = tmp.file("b.ppm");
    write_ppm(a, image);
    write_ppm(b, read_ppm(a));
    CHECK(slurp(a) == slurp(b));
  }
  SUBCASE("comments and alternate whitespace are tolerated on read") {
    const std::string path = tmp.file("c.ppm");
    spit(path, std::string("P6 # format\n# a comment line\n 1\t1 255 ") +
                   '\x80' + '\x00' + '\xff');
    const ColorImage image = read_ppm(path);
    CHECK(image.ch[0](0, 0) == 128.0 / 255.0);
    CHECK(image.ch[1](0, 0) == 0.0);
    CHECK(image.ch[2](0, 0) == 1.0);
  }
  SUBCASE("malformed inputs are rejected") {
    const std::string path = tmp.file("bad.ppm");
    spit(path, "P5\n1 1\n255\nxxx");
    CHECK_THROWS_AS(read_ppm(path), IoError);
    spit(path, std::string("P6\n1 1\n65535\n") + std::string(6, '\x00'));
    CHECK_THROWS_AS(read_ppm(path), IoError);  // only maxval 255 supported
    spit(path, "P6\n2 2\n255\nshort");
    CHECK_THROWS_AS(read_ppm(path), IoError);
  }
}

TEST_CASE("camera and light json round trips") {
  CameraModel cam = test::small_camera(9, 7, 31.5);
  cam.cx = 4.25;
  cam.cy = 3.5;
  const CameraModel cam2 = camera_from_json(to_json(cam));
  CHECK(cam2.fx == cam.fx);
  CHECK(cam2.fy == cam.fy);
  CHECK(cam2.cx == cam.cx);
  CHECK(cam2.cy == cam.cy);
  CHECK(cam2.width == cam.width);
  CHECK(cam2.height == cam.height);

  LightModel light;
  light.position = Vec3(1.5, -0.25, 0.75);
  light.axis = Vec3(0.1, 0.2, 1).normalized();
  light.mu = 1.8;
  light.sigma0 = 620.5;
  light.gain = 1.25;
  light.gamma = 2.2;
  const LightModel light2 = light_from_json(to_json(light));
  CHECK((light2.position - light.position).norm() == 0.0);
  CHECK((light2.axis - light.axis).norm() == 0.0);
  CHECK(light2.mu == light.mu);
  CHECK(light2.sigma0 == light.sigma0);
  CHECK(light2.gain == light.gain);
  CHECK(light2.gamma == light.gamma);

  SUBCASE("camera requires every field") {
    nlohmann::json j = to_json(cam);
    j.erase("fy");
    CHECK_THROWS_AS(camera_from_json(j), IoError);
  }
  SUBCASE("light fields default sensibly") {
    const LightModel d = light_from_json(nlohmann::json::object());
    CHECK(d.position.norm() == 0.0);
    CHECK((d.axis - Vec3(0, 0, 1)).norm() == 0.0);
    CHECK(d.mu == 0.0);
    CHECK(d.sigma0 == 1.0);
    CHECK(d.gain == 1.0);
    CHECK(d.gamma == 2.2);
  }
  SUBCASE("invalid light is rejected on parse") {
    nlohmann::json j = to_json(light);
    j["mu"] = -0.5;
    CHECK_THROWS_AS(light_from_json(j), DomainError);
  }
}

TEST_CASE("scene json parses every shape") {
  nlohmann::json j;
  j["camera"] = to_json(test::small_camera(16, 12, 24));
  j["light"] = to_json(test::simple_light());
  j["seed"] = 99;
  j["albedo"] = {{"base", {{"h", 0.1}, {"s", 0.5}}},
                 {"stripe", {{"h", 0.6}, {"s", 0.9}}},
                 {"frequency", 0.25},
                 {"width", 0.4}};

  SUBCASE("plane") {
    j["kind"] = "plane";
    j["plane"] = {{"point", {0, 0, 30}}, {"normal", {0, 0, -1}}};
    const SceneSpec scene = scene_from_json(j);
    CHECK(scene.kind == SceneKind::plane);
    CHECK(scene.seed == 99);
    CHECK(scene.plane_point.z() == 30.0);
    CHECK(scene.texture.base.h == 0.1);
    CHECK(scene.texture.stripe.s == 0.9);
    CHECK(scene.texture.frequency == 0.25);
    CHECK(scene.texture.width == 0.4);
  }
  SUBCASE("sphere") {
    j["kind"] = "sphere";
    j["sphere"] = {{"center", {1, 2, 60}}, {"radius", 12.5}};
    const SceneSpec scene = scene_from_json(j);
    CHECK(scene.kind == SceneKind::sphere);
    CHECK(scene.sphere_center.y() == 2.0);
    CHECK(scene.sphere_radius == 12.5);
  }
  SUBCASE("tube") {
    j["kind"] = "tube";
    j["tube"] = {{"radius", 8.0},
                 {"axis_points", {{0, 0, 20}, {0, 5, 60}, {4, 5, 90}}}};
    const SceneSpec scene = scene_from_json(j);
    CHECK(scene.kind == SceneKind::tube);
    CHECK(scene.tube_radius == 8.0);
    REQUIRE(scene.tube_axis.size() == 3);
    CHECK(scene.tube_axis[1].y() == 5.0);
    CHECK(scene.tube_axis[2].x() == 4.0);
  }
  SUBCASE("unknown kind is rejected") {
    j["kind"] = "torus";
    CHECK_THROWS_AS(scene_from_json(j), IoError);
  }
  SUBCASE("missing camera is rejected") {
    j["kind"] = "plane";
    j["plane"] = {{"point", {0, 0, 30}}, {"normal", {0, 0, -1}}};
    j.erase("camera");
    CHECK_THROWS_AS(scene_from_json(j), IoError);
  }
}

TEST_CASE("recovery config json") {
  nlohmann::json j;
  j["steps"] = 50;
  j["step_size"] = 0.02;
  j["lambda_s"] = 0.3;
  j["lambda_sp"] = 0.7;
  j["th"] = 0.95;
  j["init_depth"] = 40.0;
  j["init_albedo"] = {{"h", 0.25}, {"s", 0.6}};
  j["grad_mode"] = "finite-difference";
  const RecoveryConfig config = recovery_config_from_json(j);
  CHECK(config.steps == 50);
  CHECK(config.step_size == 0.02);
  CHECK(config.weights.lambda_s == 0.3);
  CHECK(config.weights.lambda_sp == 0.7);
  CHECK(config.weights.th == 0.95);
  CHECK(config.init_depth == 40.0);
  CHECK(config.init_albedo.h == 0.25);
  CHECK(config.init_albedo.s == 0.6);
  CHECK(config.grad_mode == GradMode::finite_difference);

  SUBCASE("defaults apply when keys are absent") {
    const RecoveryConfig d =
        recovery_config_from_json(nlohmann::json::object());
    CHECK(d.steps == 20);
    CHECK(d.grad_mode == GradMode::analytic);
    CHECK(d.weights.lambda_s == 0.1);
    CHECK(d.weights.lambda_sp == 1.0);
    CHECK(d.weights.th == 0.98);
  }
  SUBCASE("bad grad mode is rejected") {
    j["grad_mode"] = "symbolic";
    CHECK_THROWS_AS(recovery_config_from_json(j), IoError);
  }
}

TEST_CASE("metrics report json carries all thirteen numbers") {
  MetricsReport report;
  report.scale = 0.5;
  report.depth.mae = 1;
  report.depth.medae = 2;
  report.depth.rmse = 3;
  report.depth.rmse_log = 4;
  report.depth.abs_rel = 5;
  report.depth.sq_rel = 6;
  report.depth.delta1 = 0.7;
  report.depth.delta2 = 0.8;
  report.depth.delta3 = 0.9;
  report.normal_mae_deg = 10;
  report.ssim = 0.11;
  report.image_mae = 0.12;
  const nlohmann::json j = to_json(report);
  CHECK(j.at("scale") == 0.5);
  CHECK(j.at("mae") == 1.0);
  CHECK(j.at("medae") == 2.0);
  CHECK(j.at("rmse") == 3.0);
  CHECK(j.at("rmse_log") == 4.0);
  CHECK(j.at("abs_rel") == 5.0);
  CHECK(j.at("sq_rel") == 6.0);
  CHECK(j.at("delta1") == 0.7);
  CHECK(j.at("delta2") == 0.8);
  CHECK(j.at("delta3") == 0.9);
  CHECK(j.at("normal_mae_deg") == 10.0);
  CHECK(j.at("ssim") == 0.11);
  CHECK(j.at("image_mae") == 0.12);
}

TEST_CASE("bundle directory round trip") {
  TempDir tmp;
  const CameraModel cam = test::small_camera(12, 10, 14);
  SceneSpec scene;
  scene.kind = SceneKind::sphere;
  scene.sphere_center = Vec3(0, 0, 40);
  scene.sphere_radius = 25;
  scene.camera = cam;
  scene.light = test::simple_light();
  scene.light.sigma0 = 900;
  scene.light.gamma = 2.2;
  scene.texture.base = {0.08, 0.5};
  scene.texture.stripe = {0.55, 0.8};
  scene.texture.frequency = 0.21;
  scene.texture.width = 0.5;
  scene.seed = 5;

  Bundle bundle;
  bundle.data = cast(scene);
  bundle.camera = cam;
  bundle.light = scene.light;
  bundle.seed = 5;
  bundle.spec_hash = "00000000deadbeef";
  const std::string dir = tmp.file("bundle");
  write_bundle(dir, bundle);

  CHECK(fs::exists(fs::path(dir) / "image.ppm"));
  CHECK(fs::exists(fs::path(dir) / "depth.pfm"));
  CHECK(fs::exists(fs::path(dir) / "normals.pfm"));
  CHECK(fs::exists(fs::path(dir) / "albedo.pfm"));
  CHECK(fs::exists(fs::path(dir) / "meta.json"));

  const Bundle back = read_bundle(dir);
  CHECK(back.seed == 5);
  CHECK(back.spec_hash == "00000000deadbeef");
  CHECK(back.camera.width == cam.width);
  CHECK(back.light.sigma0 == 900.0);
  for (Eigen::Index v = 0; v < cam.height; ++v)
    for (Eigen::Index u = 0; u < cam.width; ++u) {
      CHECK(back.data.depth(v, u) == quantize32(bundle.data.depth(v, u)));
      // Normals come back renormalized after float32 quantization.
      CHECK(back.data.normals.at(v, u).norm() ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK((back.data.normals.at(v, u) - bundle.data.normals.at(v, u)).norm() <
            1e-6);
      CHECK(back.data.albedo.ch[0](v, u) ==
            quantize32(bundle.data.albedo.ch[0](v, u)));
      for (int c = 0; c < 3; ++c) {
        const Real q =
            std::lround(std::clamp<Real>(bundle.data.image.ch[c](v, u), 0, 1) *
                        255.0) /
            255.0;
        CHECK(back.data.image.ch[c](v, u) == q);
      }
    }

  SUBCASE("corrupt normals are rejected") {
    VectorField zeros(cam.height, cam.width);
    write_pfm((fs::path(dir) / "normals.pfm").string(), zeros);
    CHECK_THROWS_AS(read_bundle(dir), IoError);
  }
  SUBCASE("shape mismatch between files is rejected") {
    write_pfm((fs::path(dir) / "depth.pfm").string(), ScalarField::Ones(3, 3));
    CHECK_THROWS_AS(read_bundle(dir), ShapeError);
  }
  SUBCASE("missing metadata is rejected") {
    fs::remove(fs::path(dir) / "meta.json");
    CHECK_THROWS_AS(read_bundle(dir), IoError);
  }
}

TEST_CASE("history csv format") {
  TempDir tmp;
  std::vector<LossBreakdown> history(2);
  history[0] = {0.5, 0.25, 0.125, 0.875};
  history[1] = {0.25, 0.125, 0.0625, 0.4375};
  const std::string path = tmp.file("history.csv");
  write_history_csv(path, history);
  const std::string text = slurp(path);
  CHECK(text ==
        "step,photometric,smoothness,specular,total\n"
        "1,0.5,0.25,0.125,0.875\n"
        "2,0.25,0.125,0.0625,0.4375\n");
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
}
