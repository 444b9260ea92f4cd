#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileforge/wang_core.hpp"
#include "tileforge/zoom_geometry.hpp"

namespace tileforge {

struct GridPoint {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

/// l-infinity distance.
inline std::int64_t dist(GridPoint a, GridPoint b) {
  const std::int64_t dx = a.x > b.x ? std::int64_t{a.x} - b.x : std::int64_t{b.x} - a.x;
  const std::int64_t dy = a.y > b.y ? std::int64_t{a.y} - b.y : std::int64_t{b.y} - a.y;
  return dx > dy ? dx : dy;
}
std::int64_t diameter(const std::vector<GridPoint>& pts);

enum class IslandMode { Island, BiIsland };

/// How components near the window edge are treated. Windowed: a component is
/// classified only when its beta-neighbourhood lies inside the window, since
/// unseen dirty points could sit just outside. Finite: the window is the whole
/// world and everything outside it is clean.
enum class BoundaryPolicy { Windowed, Finite };

/// Ranks are 1-based: alpha[k-1] is alpha_k.
struct Schedule {
  IslandMode mode = IslandMode::Island;
  std::vector<BigInt> alpha, beta;
  /// Empty, or one entry per rank.
  std::vector<BigInt> gamma;

  int max_rank() const { return static_cast<int>(alpha.size()); }
  /// Values clamped for geometry; anything past 2^40 exceeds every window.
  std::int64_t alpha_at(int k) const;
  std::int64_t beta_at(int k) const;
  std::int64_t gamma_at(int k) const;
};

/// alpha_1 = 1, beta_k = 2 alpha_k, alpha_n = 8 sum_{k<n} beta_k + 1; gamma = alpha.
Schedule island_schedule(int ranks);
/// alpha_k = 26 L_{k-1}, beta_k = 2 L_k; gamma = alpha.
Schedule bi_island_schedule(const ZoomSchedule& z, int ranks);

struct ScheduleRank {
  int k = 0;
  BigInt lhs;  // 8 (or 12) * sum_{j<k} beta_j
  BigInt rhs;  // alpha_k
  bool inequality = false;
  /// log beta_{k+1} / log beta_k; absent for the last rank and for rank 1,
  /// whose ratio does not bear on convergence of sum log beta_i / r^i.
  std::optional<double> growth;
  bool growth_ok = true;
};

struct ScheduleReport {
  std::vector<ScheduleRank> ranks;
  bool ordered = true;  // alpha_k <= beta_k and gamma_k >= alpha_k
  bool inequalities = true;
  bool growth = true;
  double growth_limit = 2;
  bool ok() const { return ordered && inequalities && growth; }
};

ScheduleReport validate_schedule(const Schedule& s);

struct DirtySet {
  Region window;
  /// Sorted, unique, inside the window.
  std::vector<GridPoint> points;

  /// Sorts, removes duplicates, throws OutOfDomain for points outside.
  void normalize();
};

struct Island {
  std::vector<GridPoint> points;
  /// Set for bi-islands whose diameter exceeds alpha: points = part0 + part1.
  std::vector<GridPoint> part0, part1;
  bool is_split() const { return !part1.empty(); }
};

struct RankIslands {
  std::vector<Island> islands;
  std::vector<GridPoint> survivors;
  /// Survivors whose bi-island split could not be decided within the cap.
  std::vector<GridPoint> flagged;
};

/// Largest component for the exhaustive bi-island split search.
inline constexpr std::size_t kSplitBruteForceCap = 16;

RankIslands find_rank_islands(const DirtySet& e, std::int64_t alpha, std::int64_t beta, IslandMode mode,
                              BoundaryPolicy policy = BoundaryPolicy::Windowed);

struct Decomposition {
  Region window;
  IslandMode mode = IslandMode::Island;
  /// ranks[k-1] holds the rank-k islands.
  std::vector<std::vector<Island>> ranks;
  std::vector<GridPoint> residual;
  std::vector<GridPoint> flagged;
  /// |E_k| for k = 0..K.
  std::vector<std::size_t> remaining;

  bool cleaned() const { return residual.empty(); }
  /// Smallest k with E_k empty, or -1.
  int cleaned_at() const;
};

Decomposition clean(const DirtySet& e, const Schedule& s, BoundaryPolicy policy = BoundaryPolicy::Windowed);

/// Cells of the window within beta_k of a rank-k island (row-major, 0/1).
std::vector<std::uint8_t> affected_mask(const Decomposition& d, const Schedule& s, int k);

struct SoundnessReport {
  bool ok = true;
  std::string detail;
};

/// Re-checks every island against the definition by brute force.
SoundnessReport check_decomposition(const DirtySet& e, const Schedule& s, const Decomposition& d);

/// Each cell independently with probability eps, from a counter-based hash of
/// (seed, row-major cell index).
DirtySet sample_bernoulli(double eps, const Region& window, std::uint64_t seed);

struct TrialStats {
  int trial = 0;
  std::uint64_t seed = 0;
  bool cleaned = false;
  int max_rank = -1;  // rank by which E was exhausted
  std::size_t survivors = 0;
  std::vector<std::size_t> remaining;
};

struct MonteCarloStats {
  std::vector<TrialStats> trials;
  /// Mean |E_k| / area for k = 0..K.
  std::vector<double> survival;
  int cleaned_by(int rank) const;
};

/// Trial t uses seed + t and the finite boundary policy.
MonteCarloStats monte_carlo_sparsity(double eps, const Schedule& s, const Region& window, int trials,
                                     std::uint64_t seed, int jobs = 1);

/// Cells of the window covered by the union of gamma_k-neighbourhoods of the
/// rank-k islands. Extended neighbourhoods also cover, in every column, the
/// cells between the lowest and highest covered cell of the same island.
/// Throws ExtendedRequiresBiIslands for island-mode decompositions.
std::size_t neighborhoods_cells(const Decomposition& d, const std::vector<std::int64_t>& gamma, bool extended);
double neighborhoods_density(const Decomposition& d, const std::vector<std::int64_t>& gamma, bool extended);

nlohmann::json to_json(const DirtySet& e);
DirtySet dirty_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Decomposition& d);
std::string stats_csv(const MonteCarloStats& st);

}  // namespace tileforge
