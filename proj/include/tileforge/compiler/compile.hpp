#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tileforge/compiler/layout.hpp"
#include "tileforge/compiler/machine.hpp"
#include "tileforge/macro_sim.hpp"

namespace tileforge {

/// One cell of the machine's time-space diagram inside the zone.
struct ZoneCell {
  int ro = kBlank;
  int work = 0;
  int head = -1;  // state index, or -1 when the head is elsewhere
  bool border = false;

  static ZoneCell outside() { return ZoneCell{kBlank, 0, -1, true}; }
  friend bool operator==(const ZoneCell&, const ZoneCell&) = default;
};

enum class CellLayer { Inert, Wire, Zone };

/// Decoded content of a compiled tile.
struct TileInfo {
  int x = 0;
  int y = 0;
  CellLayer layer = CellLayer::Inert;
  int wire = -1;  // index into Layout::wires
  int bit = 0;
  /// Zone coordinates and the 3-cell window (left, center, right) at time zt.
  int zx = 0;
  int zt = 0;
  ZoneCell window[3];
  /// Letter layer: father letter and the resulting own letter, or -1.
  int father = -1;
  int own = -1;
};

struct CompiledTileSet {
  TileSet tiles;
  CheckerMachine machine;
  Layout layout;
  /// Letter layer parameters when present (also for letter-only sets).
  std::optional<LetterLayer> letters;
  std::vector<TileInfo> decode;

  int n() const { return layout.n; }
  /// Tile id for a decoded content; throws OutOfDomain if no such tile was emitted.
  TileId encode(const TileInfo& info) const;
  std::string key(const TileInfo& info) const;

  std::map<std::string, TileId> index;
};

/// Emits coordinate, border-bit, wire, zone and inert tiles (and letter
/// components when the machine carries a letter layer).
CompiledTileSet compile(const CheckerMachine& m, const Layout& layout);
/// Same with an explicit letter layer, which may be wider than the machine's
/// side strings (letter-only sets use a machine with no inputs).
CompiledTileSet compile(const CheckerMachine& m, const Layout& layout, const std::optional<LetterLayer>& letters);

/// Deterministic macro-tile for the given side strings: runs the machine and
/// writes its time-space diagram into the zone.
MacroTile assemble_macrotile(const CompiledTileSet& cts, const SideBits& sides);

/// Side strings of a macro-tile as seen on its border (bit layer only).
SideBits read_side_bits(const CompiledTileSet& cts, const MacroTile& mt);

struct CompiledSimulationReport {
  /// False when some rho tile has no macro-tile (the map S is not total).
  bool total = false;
  std::string failure;
  SimulationReport report;
  bool splitting_checked = false;
};

using ColorEncoder = std::function<std::vector<int>(ColorId)>;

/// Builds S : rho -> macro-tiles through assemble_macrotile and checks
/// injectivity and match-equivalence; window splitting is attempted with a
/// node cap and reported as skipped when it is exceeded. The default
/// encoder writes color ids in binary, least significant bit first.
CompiledSimulationReport simulate_check_compiled(const CompiledTileSet& cts, const TileSet& rho,
                                                 const ColorEncoder& encode = {},
                                                 std::uint64_t window_node_cap = 2'000'000);

/// Default k-bit encoding of a color id.
std::vector<int> binary_code(ColorId c, int k);

}  // namespace tileforge
