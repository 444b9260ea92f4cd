#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileforge/wang_core.hpp"

namespace tileforge {

/// An N x N conflict-free block of tiles. The body's region is [0,N)^2.
struct MacroTile {
  int n = 0;
  PatchTiling body;

  friend bool operator==(const MacroTile&, const MacroTile&) = default;
};

/// Side color sequences of a macro-tile: left/right read bottom to top,
/// top/bottom read left to right.
struct MacroColors {
  std::vector<ColorId> left, right, top, bottom;
  friend bool operator==(const MacroColors&, const MacroColors&) = default;
};

MacroColors macro_colors(const MacroTile& mt, const TileSet& ts);

/// Checks that a body is a valid N x N block for `ts`.
void validate_macrotile(const MacroTile& mt, const TileSet& ts);

/// S : rho -> macro-tiles over tau.
struct SimulationMap {
  TileSet rho;
  TileSet tau;
  int n = 1;
  std::vector<MacroTile> map;  // indexed by rho tile
};

struct SimulationReport {
  bool injective = false;
  bool match_equivalent = false;
  bool unique_splitting = false;
  /// Number of tau-tilings of the (kN) x (kN) window that were examined.
  std::size_t window_tilings = 0;
  /// First failing witness for whichever condition failed, human readable.
  std::string detail;

  bool all() const { return injective && match_equivalent && unique_splitting; }
};

struct SimulationCheckOptions {
  int window = 2;
  /// Placement budget for the window enumeration; exceeding it throws
  /// WindowSearchExploded.
  std::uint64_t node_cap = 20'000'000;
};

SimulationReport check_simulation(const SimulationMap& sm, const SimulationCheckOptions& opts = {});

/// Checks only conditions (1) and (2); used when the window search is out of reach.
SimulationReport check_simulation_local(const SimulationMap& sm);

/// Grid offsets in [0,N)^2 at which every fully contained block of `t` is an
/// S-image (by exact body equality).
std::vector<std::pair<int, int>> splitting_offsets(const SimulationMap& sm, const PatchTiling& t);

struct MacroTileList {
  std::vector<MacroTile> tiles;
  bool cap_exceeded = false;
};

MacroTileList enumerate_macrotiles(const TileSet& ts, int n, std::size_t cap);

/// Replaces each rho tile of a rho-tiling by its S-image.
PatchTiling lift(const SimulationMap& sm, const PatchTiling& rho_tiling);

/// Inverse of lift on aligned windows: blocks are recognized by body
/// equality. Returns nullopt if some block is not an S-image.
std::optional<PatchTiling> project(const SimulationMap& sm, const PatchTiling& tau_tiling, int ox, int oy);

/// Example 2: the single white tile of example1 mapped to the canonical
/// coordinate block of example2(N).
SimulationMap example2_simulation(int n);
/// Example 1: the white tile mapped to an all-white N x N block of itself.
SimulationMap example1_simulation(int n);

nlohmann::json to_json(const SimulationMap& sm);
SimulationMap simulation_map_from_json(const nlohmann::json& j);

}  // namespace tileforge
