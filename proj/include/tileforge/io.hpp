#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "tileforge/wang_core.hpp"

namespace tileforge {

/// Parses and normalizes a tile-set description. Unused colors are dropped
/// and the remaining ids renumbered in their original order.
TileSet validate_tileset(const nlohmann::json& spec);
nlohmann::json to_json(const TileSet& ts);

nlohmann::json to_json(const PatchTiling& p);
PatchTiling patch_from_json(const nlohmann::json& j);

/// Binary P6 image, `scale` pixels per cell, top row first. Tile colors come
/// from a fixed hash of the tile index; holes are black.
std::string render_ppm(const PatchTiling& p, int scale = 4);

/// 64-bit FNV-1a, used for input fingerprints in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace tileforge
