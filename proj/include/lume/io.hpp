/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lume/geometry.hpp"
#include "lume/losses.hpp"
#include "lume/metrics.hpp"
#include "lume/optim.hpp"
#include "lume/photometry.hpp"
#include "lume/synth.hpp"
#include "lume/types.hpp"

namespace lume {

// --- Portable Float Map ---------------------------------------------------
// Header "Pf" (1 channel) or "PF" (3 channels), ASCII width/height, scale
// line -1.0 (little-endian), rows bottom-to-top, 32-bit floats. A positive
// scale (big-endian payload) is rejected. Write-then-read is bitwise exact
// for float32-representable values.

ScalarField read_pfm_scalar(const std::string& path);
VectorField read_pfm_vector(const std::string& path);
void write_pfm(const std::string& path, const ScalarField& field);
void write_pfm(const std::string& path, const VectorField& field);

// --- Portable Pixmap (binary P6, maxval 255) -------------------------------
// Encode c -> round(c * 255), decode v -> v / 255.

ColorImage read_ppm(const std::string& path);
void write_ppm(const std::string& path, const ColorImage& image);

// --- JSON -------------------------------------------------------------------

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

CameraModel camera_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CameraModel& cam);

LightModel light_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LightModel& light);

SceneSpec scene_from_json(const nlohmann::json& j);
RecoveryConfig recovery_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MetricsReport& report);

// --- Scene bundles ----------------------------------------------------------
// One directory holding image.ppm, depth.pfm, normals.pfm, albedo.pfm (hue,
// saturation, zero) and meta.json (camera, light, seed, spec hash).

struct Bundle {
  GroundTruthBundle data;
  CameraModel camera;
  LightModel light;
  std::uint64_t seed = 0;
  std::string spec_hash;  ///< FNV-1a 64 of the generating scene JSON, hex
};

void write_bundle(const std::string& dir, const Bundle& bundle);
Bundle read_bundle(const std::string& dir);

/// Loss history as "step,photometric,smoothness,specular,total" rows.
void write_history_csv(const std::string& path,
                       const std::vector<LossBreakdown>& history);

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace lume
