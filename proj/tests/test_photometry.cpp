/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lume/errors.hpp"
#include "lume/normals.hpp"
#include "lume/parallel.hpp"
#include "lume/photometry.hpp"

using namespace lume;

TEST_CASE("light model validation") {
  LightModel light = test::simple_light();
  CHECK_NOTHROW(light.validate());
  LightModel bad = light;
  bad.axis = Vec3(0, 0, 1.001);
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = light;
  bad.mu = -0.1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = light;
  bad.sigma0 = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = light;
  bad.gain = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = light;
  bad.gamma = 0.99;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("radial attenuation") {
  LightModel light = test::simple_light();

  SUBCASE("zero spread passes everything") {
    CHECK(radial_attenuation(light, 1.0) == 1.0);
  }
  SUBCASE("on-axis is 1 for any spread") {
    light.mu = 17.0;
    CHECK(radial_attenuation(light, 0.0) == 1.0);
  }
  SUBCASE("mu=2 at 60 degrees gives e^-1") {
    light.mu = 2.0;
    CHECK(radial_attenuation(light, M_PI / 3) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-15));
  }
  SUBCASE("angle domain is [0, pi]") {
    CHECK_THROWS_AS(radial_attenuation(light, -0.01), DomainError);
    CHECK_THROWS_AS(radial_attenuation(light, M_PI + 0.01), DomainError);
  }
  SUBCASE("strictly decreasing when mu > 0") {
    light.mu = 1.0;
    Real prev = radial_attenuation(light, 0.0);
    for (Real psi = 0.2; psi < M_PI; psi += 0.2) {
      const Real cur = radial_attenuation(light, psi);
      CHECK(cur < prev);
      CHECK(cur > 0);
      prev = cur;
    }
  }
}

TEST_CASE("off-axis angle") {
  LightModel light = test::simple_light();

  CHECK(off_axis_angle(light, Vec3(0, 0, 5)) == 0.0);
  CHECK(off_axis_angle(light, Vec3(5, 0, 0)) ==
        doctest::Approx(M_PI / 2).epsilon(1e-15));

  SUBCASE("offset light, hand-derived angle") {
    light.position = Vec3(0.01, 0, 0);
    CHECK(off_axis_angle(light, Vec3(1, 0, 1)) ==
          doctest::Approx(0.7803730800666359).epsilon(1e-14));
  }
  SUBCASE("coincident point is degenerate") {
    CHECK_THROWS_AS(off_axis_angle(light, Vec3(0, 0, 0)), DomainError);
    CHECK_THROWS_AS(off_axis_angle(light, Vec3(0, 0, 1e-13)), DomainError);
  }
}

TEST_CASE("irradiance geometry") {
  LightModel light = test::simple_light();

  CHECK(irradiance_geometry(light, Vec3(0, 0, 1), Vec3(0, 0, -1)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(irradiance_geometry(light, Vec3(0, 0, 2), Vec3(0, 0, -1)) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(irradiance_geometry(light, Vec3(0, 0, 1), Vec3(0, 0, 1)) == 0.0);

  SUBCASE("full model against an independently computed value") {
    light.position = Vec3(0.01, -0.02, 0);
    light.mu = 1.7;
    light.sigma0 = 2.5;
    const Vec3 x(0.3, 0.2, 1.5);
    const Vec3 n = Vec3(-0.2, 0.1, -1).normalized();
    CHECK(irradiance_geometry(light, x, n) ==
          doctest::Approx(0.9713230168466985).epsilon(1e-13));
  }
  SUBCASE("normal must be unit") {
    CHECK_THROWS_AS(
        irradiance_geometry(light, Vec3(0, 0, 1), Vec3(0, 0, -1.001)),
        DomainError);
  }
}

TEST_CASE("hsv to rgb matches the reference hexcone table") {
  // Expected values computed with a reference HSV implementation.
  const struct {
    Real h, s, r, g, b;
  } table[] = {
      {0.0, 0.0, 1.0, 1.0, 1.0},
      {1.0 / 3.0, 1.0, 0.0, 1.0, 0.0},
      {0.05, 0.6, 1.0, 0.58, 0.4},
      {0.12, 0.3, 1.0, 0.916, 0.7},
      {0.5, 1.0, 0.0, 1.0, 1.0},
      {0.63, 0.77, 0.23, 0.3994, 1.0},
      {0.85, 0.25, 1.0, 0.75, 0.975},
      {0.999, 1.0, 1.0, 0.0, 0.006000000000000227},
      {0.25, 0.5, 0.75, 1.0, 0.5},
      {2.0 / 3.0, 0.9, 0.1, 0.1, 1.0},
  };
  for (const auto& row : table) {
    CAPTURE(row.h);
    CAPTURE(row.s);
    const Vec3 rgb = hsv_to_rgb({row.h, row.s});
    CHECK(rgb.x() == doctest::Approx(row.r).epsilon(1e-12));
    CHECK(rgb.y() == doctest::Approx(row.g).epsilon(1e-12));
    CHECK(rgb.z() == doctest::Approx(row.b).epsilon(1e-12));
  }
  CHECK_THROWS_AS(hsv_to_rgb({1.0, 0.5}), DomainError);   // hue wraps below 1
  CHECK_THROWS_AS(hsv_to_rgb({0.5, -0.1}), DomainError);
  CHECK_THROWS_AS(hsv_to_rgb({0.5, 1.1}), DomainError);
}

TEST_CASE("hsv jacobian matches central differences") {
  // Probe away from sector boundaries where the hexcone map is smooth.
  const Real hs[][2] = {{0.05, 0.6}, {0.3, 0.2}, {0.45, 0.9},
                        {0.58, 0.5}, {0.75, 0.3}, {0.95, 0.8}};
  const Real h_step = 1e-6;
  for (const auto& probe : hs) {
    CAPTURE(probe[0]);
    const Eigen::Matrix<Real, 3, 2> jac =
        hsv_to_rgb_jacobian({probe[0], probe[1]});
    const Vec3 dh = (hsv_to_rgb({probe[0] + h_step, probe[1]}) -
                     hsv_to_rgb({probe[0] - h_step, probe[1]})) /
                    (2 * h_step);
    const Vec3 ds = (hsv_to_rgb({probe[0], probe[1] + h_step}) -
                     hsv_to_rgb({probe[0], probe[1] - h_step})) /
                    (2 * h_step);
    for (int i = 0; i < 3; ++i) {
      CHECK(jac(i, 0) == doctest::Approx(dh[i]).epsilon(1e-6));
      CHECK(jac(i, 1) == doctest::Approx(ds[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("shade_pixel full-model oracle") {
  LightModel light;
  light.position = Vec3(0.01, -0.02, 0);
  light.axis = Vec3(0, 0, 1);
  light.mu = 1.7;
  light.sigma0 = 2.5;
  light.gain = 1.3;
  light.gamma = 2.2;
  const Vec3 ray(0.1944611170656493, 0.12964074471043288, 0.9723055853282466);
  const Real depth = 1.5427248620541512;
  const Vec3 n = Vec3(-0.2, 0.1, -1).normalized();
  const Vec3 rho(0.9, 0.5, 0.2);

  const ShadeParts parts = shade_pixel(light, ray, depth, rho, n);
  CHECK(parts.radiance.x() ==
        doctest::Approx(1.1364479297106374).epsilon(1e-13));
  CHECK(parts.radiance.y() ==
        doctest::Approx(0.6313599609503541).epsilon(1e-13));
  CHECK(parts.radiance.z() ==
        doctest::Approx(0.25254398438014164).epsilon(1e-13));
  CHECK(parts.color.x() == 1.0);  // saturates post-gamma
  CHECK(parts.color.y() == doctest::Approx(0.8113660561832925).epsilon(1e-13));
  CHECK(parts.color.z() == doctest::Approx(0.5349768789468098).epsilon(1e-13));
}

TEST_CASE("gamma maps a quarter to the tabulated power") {
  LightModel light = test::simple_light();
  light.gamma = 2.2;
  // Frontal unit-distance geometry scaled so the radiance is exactly 0.25.
  const Vec3 ray(0, 0, 1);
  const ShadeParts parts =
      shade_pixel(light, ray, 2.0, Vec3(1, 1, 1), Vec3(0, 0, -1));
  CHECK(parts.radiance.x() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(parts.color.x() ==
        doctest::Approx(0.5325205447199813).epsilon(1e-14));
}

TEST_CASE("gamma slope is the power-law derivative on the open interval") {
  LightModel light = test::simple_light();
  light.gamma = 2.2;
  ShadeParts parts;
  parts.radiance = Vec3(0.25, 0.0, 1.5);
  parts.color = Vec3(std::pow(0.25, 1 / 2.2), 0.0, 1.0);
  const Vec3 slope = gamma_slope(light, parts);
  CHECK(slope.x() == doctest::Approx(0.9682191722181479).epsilon(1e-14));
  CHECK(slope.y() == 0.0);  // clamped below
  CHECK(slope.z() == 0.0);  // clamped above
}

TEST_CASE("irradiance gradient matches finite differences of the raw formula") {
  // Independent oracle: evaluate Eq.-style irradiance directly and
  // differentiate numerically in x, n (unconstrained), and mu.
  LightModel light;
  light.position = Vec3(0.3, -0.2, 0.1);
  light.axis = Vec3(0, 0, 1);
  light.mu = 1.3;
  light.sigma0 = 2.0;
  light.gamma = 1;

  const auto raw = [&](const Vec3& x, const Vec3& n, Real mu) {
    const Vec3 w = x - light.position;
    const Real dist = w.norm();
    const Vec3 w_hat = w / dist;
    const Real cos_psi = light.axis.dot(w_hat);
    const Real atten = std::exp(-mu * (1 - cos_psi));
    const Real cos_theta = (-w_hat).dot(n);
    return light.sigma0 / (dist * dist) * atten * std::max<Real>(0, cos_theta);
  };

  const Vec3 xs[] = {Vec3(0.5, 0.4, 2.0), Vec3(-0.3, 0.1, 1.2),
                     Vec3(0.9, -0.7, 3.0)};
  const Vec3 ns[] = {Vec3(-0.1, 0.2, -1).normalized(),
                     Vec3(0.3, -0.1, -0.9).normalized(),
                     Vec3(0.05, 0.02, -1).normalized()};
  for (int k = 0; k < 3; ++k) {
    CAPTURE(k);
    const Vec3 x = xs[k];
    const Vec3 n = ns[k];
    const Vec3 ray = x.normalized();
    const ShadeParts parts =
        shade_pixel(light, ray, x.norm(), Vec3(1, 1, 1), n);
    const IrradianceGrad grad = irradiance_gradient(light, parts);

    const Real step = 1e-6;
    for (int i = 0; i < 3; ++i) {
      Vec3 dx = Vec3::Zero();
      dx[i] = step;
      const Real fd_x = (raw(x + dx, n, light.mu) - raw(x - dx, n, light.mu)) /
                        (2 * step);
      CHECK(grad.d_x[i] == doctest::Approx(fd_x).epsilon(1e-6));
      const Real fd_n = (raw(x, n + dx, light.mu) - raw(x, n - dx, light.mu)) /
                        (2 * step);
      CHECK(grad.d_n[i] == doctest::Approx(fd_n).epsilon(1e-6));
    }
    const Real fd_mu =
        (raw(x, n, light.mu + step) - raw(x, n, light.mu - step)) / (2 * step);
    CHECK(grad.d_mu == doctest::Approx(fd_mu).epsilon(1e-6));
  }
}

TEST_CASE("render_image validates and parallelizes deterministically") {
  const CameraModel cam = test::small_camera(9, 7, 8);
  const VectorField rays = build_ray_field(cam);
  const ScalarField depth = test::random_field(7, 9, 1.0, 3.0, 11);
  AlbedoField albedo(7, 9);
  albedo.ch[0] = test::random_field(7, 9, 0.0, 0.99, 12);
  albedo.ch[1] = test::random_field(7, 9, 0.0, 1.0, 13);
  LightModel light = test::simple_light();
  light.mu = 1.0;
  const NormalMap normals = normals_six_neighbor(depth, rays);

  set_thread_count(1);
  const ColorImage serial = render_image(light, rays, depth, albedo, normals);
  set_thread_count(4);
  const ColorImage parallel = render_image(light, rays, depth, albedo, normals);
  set_thread_count(1);
  for (int c = 0; c < 3; ++c)
    CHECK((serial.ch[c] == parallel.ch[c]).all());

  SUBCASE("shape mismatch rejected") {
    const ScalarField wrong = ScalarField::Constant(6, 9, 1.0);
    CHECK_THROWS_AS(render_image(light, rays, wrong, albedo, normals),
                    ShapeError);
  }
  SUBCASE("gamma one returns clamped radiance exactly") {
    for (Eigen::Index v = 0; v < 7; ++v)
      for (Eigen::Index u = 0; u < 9; ++u) {
        const Vec3 rho = hsv_to_rgb(AlbedoHS{albedo.ch[0](v, u), albedo.ch[1](v, u)});
        const ShadeParts parts =
            shade_pixel(light, rays.at(v, u), depth(v, u), rho, normals.at(v, u));
        for (int c = 0; c < 3; ++c) {
          CHECK(serial.ch[c](v, u) ==
                std::min<Real>(1.0, std::max<Real>(0.0, parts.radiance[c])));
        }
      }
  }
}
