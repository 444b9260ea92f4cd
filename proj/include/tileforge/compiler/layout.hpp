#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tileforge/compiler/machine.hpp"

namespace tileforge {

using Cell = std::pair<int, int>;

/// One side bit's route from its border cell to the cell adjacent to the
/// computation zone where the bit is handed over.
struct WirePath {
  Side side = Side::Left;
  int bit = 0;
  std::vector<Cell> cells;

  friend bool operator==(const WirePath&, const WirePath&) = default;
};

struct Zone {
  int x0 = 0, y0 = 0, w = 0, h = 0;
  bool contains(int x, int y) const { return x >= x0 && y >= y0 && x < x0 + w && y < y0 + h; }
  friend bool operator==(const Zone&, const Zone&) = default;
};

struct Layout {
  int n = 0;
  int k = 0;
  int program_length = 0;
  /// Absent only for machines with no inputs that accept immediately.
  std::optional<Zone> zone;
  std::vector<WirePath> wires;

  /// First of the k centered cells on each side.
  int center() const { return (n - k) / 2; }

  friend bool operator==(const Layout&, const Layout&) = default;
};

struct ZoneSize {
  int w = 0;
  int h = 0;
};

/// Zone dimensions for a machine: width covers inputs, program and the
/// scratch space used by accepting runs (at least 4 cells of slack); height
/// is the longest accepting run plus one row.
ZoneSize zone_size(const CheckerMachine& m, int step_cap = 100000);

/// Canonical layout: zone centered, wires routed along fixed staircase
/// channels. Throws LayoutInfeasible when N is too small.
Layout plan_layout(int n, const CheckerMachine& m);
/// Same, with the side width stated explicitly (must match the machine).
Layout plan_layout(int n, int k, const CheckerMachine& m);

/// Structural checks on a layout (disjointness, containment, entries).
/// Throws LayoutInfeasible with the first problem found.
void validate_layout(const Layout& l);

/// Smallest N <= n_max for which plan_layout succeeds.
std::optional<int> smallest_feasible_n(const CheckerMachine& m, int n_max = 256);

nlohmann::json to_json(const Layout& l);
Layout layout_from_json(const nlohmann::json& j);

}  // namespace tileforge
