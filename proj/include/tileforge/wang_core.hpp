#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tileforge/error.hpp"

namespace tileforge {

/// Index into a tile set's color table.
using ColorId = int;
/// Index into a tile set's tile list; tiles are identified by index, not by
/// their color quadruple, so labeled copies with equal colors are distinct.
using TileId = int;

inline constexpr TileId kHole = -1;

struct Tile {
  ColorId left = 0;
  ColorId right = 0;
  ColorId top = 0;
  ColorId bottom = 0;
  std::string label;

  friend bool operator==(const Tile&, const Tile&) = default;
};

enum class Part : char { None = 0, A = 'A', B = 'B' };

struct TileSet {
  std::string name;
  std::vector<std::string> colors;
  std::vector<Tile> tiles;
  /// Empty, or one entry per tile.
  std::vector<Part> parts;

  int color_count() const { return static_cast<int>(colors.size()); }
  int size() const { return static_cast<int>(tiles.size()); }
  Part part(TileId t) const { return parts.empty() ? Part::None : parts[static_cast<std::size_t>(t)]; }
};

/// Axis-aligned rectangle of grid cells. x grows rightward, y grows upward.
struct Region {
  int x0 = 0;
  int y0 = 0;
  int width = 1;
  int height = 1;

  std::size_t cell_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(int x, int y) const { return x >= x0 && y >= y0 && x < x0 + width && y < y0 + height; }
  /// Row-major offset from the bottom-left corner.
  std::size_t offset(int x, int y) const {
    return static_cast<std::size_t>(y - y0) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x - x0);
  }

  friend bool operator==(const Region&, const Region&) = default;
};

/// Assignment of tiles (or holes) to the cells of a region.
struct PatchTiling {
  Region region;
  std::vector<TileId> cells;

  PatchTiling() = default;
  explicit PatchTiling(Region r, TileId fill = kHole) : region(r), cells(r.cell_count(), fill) {}

  TileId at(int x, int y) const { return cells[region.offset(x, y)]; }
  TileId& at(int x, int y) { return cells[region.offset(x, y)]; }
  bool is_hole(int x, int y) const { return at(x, y) == kHole; }

  friend bool operator==(const PatchTiling&, const PatchTiling&) = default;
};

struct PeriodVector {
  int dx = 0;
  int dy = 0;

  PeriodVector() = default;
  PeriodVector(int dx_, int dy_) : dx(dx_), dy(dy_) {
    if (dx == 0 && dy == 0) throw Error(ErrorCode::InvalidArgument, "period vector must be nonzero");
  }
};

enum class Side { Left, Right, Top, Bottom };

/// A mismatch between a cell and its right or upper neighbor.
struct Violation {
  int x = 0;
  int y = 0;
  int nx = 0;
  int ny = 0;
  Side side = Side::Right;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every adjacent non-hole pair whose shared edge colors differ. Edges touching
/// a hole are never reported.
std::vector<Violation> check_patch(const PatchTiling& t, const TileSet& ts);

// ---------------------------------------------------------------------------
// Exhaustive search

enum class FillMode { First, Count, Enumerate };

/// Optional color constraints on the outer edges of a region. Each vector is
/// either empty (unconstrained) or has one entry per cell along that edge:
/// left/right are indexed bottom to top, top/bottom left to right.
struct Boundary {
  std::vector<std::optional<ColorId>> left;
  std::vector<std::optional<ColorId>> right;
  std::vector<std::optional<ColorId>> top;
  std::vector<std::optional<ColorId>> bottom;
};

struct FillOptions {
  FillMode mode = FillMode::First;
  std::size_t cap = 1;
  Boundary boundary;
  /// Region-sized mask; true cells are holes (left unconstrained and unfilled).
  std::vector<bool> holes;
  /// Optional per-cell restriction on the tiles that may be placed.
  std::function<bool(int x, int y, TileId t)> cell_filter;
  /// Torus closure: right edge of the last column matches the left edge of
  /// the first column (wrap_x), and likewise for rows (wrap_y).
  bool wrap_x = false;
  bool wrap_y = false;
  /// Abort with WindowSearchExploded after this many placements (0 = no cap).
  std::uint64_t node_cap = 0;
  int jobs = 1;
};

struct FillResult {
  std::size_t count = 0;
  /// True when the count stopped at the cap ("at least cap" solutions).
  bool capped = false;
  std::vector<PatchTiling> solutions;
  std::uint64_t nodes = 0;
};

/// Backtracking over cells in row-major order (bottom row first). First mode
/// throws NoSolution when the region cannot be tiled.
FillResult fill_region(const TileSet& ts, const Region& r, const FillOptions& opts = {});

/// Calls `visit` on each solution in canonical order until it returns false.
/// Returns the number of placements made.
std::uint64_t for_each_tiling(const TileSet& ts, const Region& r, const FillOptions& opts,
                              const std::function<bool(const PatchTiling&)>& visit);

std::optional<PatchTiling> torus_tiling(const TileSet& ts, int m);

std::optional<int> min_torus_period(const TileSet& ts, int m_max);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

bool operator<(const Rational& a, const Rational& b);

/// Exact minimum and maximum fraction of A-tagged tiles over all tilings of
/// the n x n square.
std::pair<Rational, Rational> density_bounds(const TileSet& ts, int n);

// ---------------------------------------------------------------------------
// Built-in tile sets

TileSet example1();
/// N^2 coordinate tiles; tile (i,j) has left/bottom color (i,j), right color
/// (i+1,j) and top color (i,j+1), all mod N.
TileSet example2(int n);
TileSet chessboard();
/// Coordinates mod N carrying Thue-Morse letters: each tile knows its father
/// letter and shows the letter of s^log2(N)(father) at its position.
TileSet thue_morse_block(int n);

/// Accepts "example1", "chessboard", "example2(N)", "example2:N",
/// "thue_morse_block(N)".
TileSet builtin(const std::string& name);

/// Color id of the Example-2 color (i,j).
inline ColorId example2_color(int n, int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); }

/// Sets the partition tags: tiles in `a_tiles` get A, every other tile B.
void set_partition(TileSet& ts, const std::vector<TileId>& a_tiles);

}  // namespace tileforge
