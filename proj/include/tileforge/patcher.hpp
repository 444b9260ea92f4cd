#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tileforge/islands.hpp"
#include "tileforge/wang_core.hpp"

namespace tileforge {

/// Tiles of `derived` are the valid (2r+1) x (2r+1) windows of `base`.
/// A right edge carries the window's rightmost 2r columns, a left edge its
/// leftmost 2r columns (rows likewise), so neighbours agree on the overlap.
struct RobustifiedSet {
  TileSet base;
  int r = 2;
  TileSet derived;
  /// windows[t] lists the base tiles of derived tile t, row-major from the
  /// bottom-left corner.
  std::vector<std::vector<TileId>> windows;
  /// delta[t]: the centre tile of window t.
  std::vector<TileId> delta;
  int c1 = 2;
  int c2 = 3;

  int side() const { return 2 * r + 1; }
};

/// Throws NoWindows when base has no (2r+1)^2 tiling.
RobustifiedSet robustify(const TileSet& base, int r = 2, std::size_t window_cap = 1'000'000);

/// Projects a derived tiling to the base set cell by cell; holes stay holes.
PatchTiling project_delta(const RobustifiedSet& rs, const PatchTiling& derived);
/// The derived tiling of the cells whose full window lies inside `base`
/// (shrinks the region by r on every side). Throws NoWindows when a window
/// is not a valid base tiling.
PatchTiling induce(const RobustifiedSet& rs, const PatchTiling& base);

/// True iff every tiling of the outer x outer square minus its centred
/// inner x inner hole extends to the whole square in exactly one way.
/// Throws SearchCap after `cap` annulus tilings.
bool check_robust_annulus(const TileSet& ts, int outer, int inner, std::size_t cap = 1'000'000);
/// The annulus check on rs.derived with outer 2r+1 and inner 2r-1.
bool check_r_robust(const RobustifiedSet& rs, std::size_t cap = 1'000'000);

struct HoleSpec {
  /// One or two rectangular holes.
  std::vector<Region> holes;
  int c1 = 2;
  int c2 = 3;
};

/// Cells of `after` that differ from `before` (same region), as 0/1.
std::vector<std::uint8_t> diff_mask(const PatchTiling& before, const PatchTiling& after);

/// Fills the holes of `spec` (every cell of each hole rectangle is refilled,
/// whatever it holds). First tries the hole cells alone; failing that,
/// re-tiles the c1*Delta box around the hole. Holes closer than
/// c2 * max(Delta) are handled together. Throws ContextDamaged when the c2*Delta
/// context has holes or mismatches, NoExtension when no filling exists.
PatchTiling fill_hole(const PatchTiling& t, const TileSet& ts, const HoleSpec& spec);

struct PatchResult {
  PatchTiling tiling;
  std::vector<std::uint8_t> changed;
  std::size_t changed_count = 0;
  int max_rank = 0;

  double changed_fraction() const {
    return changed.empty() ? 0.0 : static_cast<double>(changed_count) / static_cast<double>(changed.size());
  }
};

/// For a tiling by a set of monochrome tiles (the chessboard set), rank by
/// rank replaces the gamma_k box around each island with the majority tile of
/// the ring just outside it. Throws ResidualErrors when the decomposition
/// leaves survivors.
PatchResult percolation_patch(const DirtySet& e, const PatchTiling& t, const Schedule& s,
                              const TileSet& ts = chessboard());

/// alpha_1 = 1, beta_k = 4 c2 alpha_k + 1, alpha_n = 8 sum_{k<n} beta_k + 1.
Schedule correction_schedule(int ranks, int c2 = 3);

/// Heals the holes at E rank by rank with fill_hole over each island's
/// bounding box. Requires beta_k > 4 c2 alpha_k. Throws ResidualErrors, or
/// NoExtension naming the island and rank.
PatchResult correct_errors(const DirtySet& e, const PatchTiling& t, const Schedule& s, const RobustifiedSet& rs);

}  // namespace tileforge
