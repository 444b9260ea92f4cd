#include <doctest.h>

#include <random>

#include "tileforge/macro_sim.hpp"

using namespace tileforge;

TEST_CASE("macro_colors read sides in the stated order") {
  SimulationMap sm = example2_simulation(4);
  MacroColors mc = macro_colors(sm.map[0], sm.tau);
  for (int j = 0; j < 4; ++j) {
    CHECK(mc.left[static_cast<std::size_t>(j)] == example2_color(4, 0, j));
    CHECK(mc.bottom[static_cast<std::size_t>(j)] == example2_color(4, j, 0));
    CHECK(mc.right[static_cast<std::size_t>(j)] == example2_color(4, 0, j));  // (N mod N, j)
  }
  CHECK(sm.tau.colors[static_cast<std::size_t>(mc.left[3])] == "(0,3)");

  MacroTile black{1, PatchTiling(Region{0, 0, 1, 1}, 0)};
  MacroColors b = macro_colors(black, chessboard());
  CHECK(b.left == std::vector<ColorId>{0});
  CHECK(b.right == b.left);
  CHECK(b.top == b.left);
  CHECK(b.bottom == b.left);

  // Placing a macro-tile to the right of itself matches iff its right
  // sequence equals its left sequence (direct read-off).
  PatchTiling pair(Region{0, 0, 8, 4});
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) pair.at(x, y) = sm.map[0].body.at(x % 4, y);
  CHECK(check_patch(pair, sm.tau).empty() == (mc.right == mc.left));
}

TEST_CASE("check_simulation on the paper examples") {
  for (int n : {2, 3}) {
    auto rep = check_simulation(example2_simulation(n));
    CHECK(rep.injective);
    CHECK(rep.match_equivalent);
    CHECK(rep.unique_splitting);
    CHECK(rep.window_tilings == static_cast<std::size_t>(n * n));
  }
  auto ex1 = check_simulation(example1_simulation(2));
  CHECK(ex1.injective);
  CHECK(ex1.match_equivalent);
  CHECK_FALSE(ex1.unique_splitting);

  SimulationMap dup = example2_simulation(2);
  dup.rho = chessboard();
  dup.map.push_back(dup.map[0]);
  auto d = check_simulation_local(dup);
  CHECK_FALSE(d.injective);

  SimulationCheckOptions tight;
  tight.node_cap = 3;
  CHECK_THROWS_WITH_AS(check_simulation(example2_simulation(3), tight), doctest::Contains("WindowSearchExploded"), Error);
}

TEST_CASE("enumerate_macrotiles") {
  CHECK(enumerate_macrotiles(chessboard(), 2, 100).tiles.size() == 2);
  CHECK(enumerate_macrotiles(example2(2), 2, 100).tiles.size() == 4);
  CHECK(enumerate_macrotiles(example1(), 3, 100).tiles.size() == 1);
  auto capped = enumerate_macrotiles(example2(3), 3, 2);
  CHECK(capped.tiles.size() == 2);
  CHECK(capped.cap_exceeded);
}

TEST_CASE("lift then project is the identity for a passing map") {
  SimulationMap sm = example2_simulation(3);
  for (int k = 1; k <= 3; ++k) {
    PatchTiling rho(Region{0, 0, k, k}, 0);
    PatchTiling tau = lift(sm, rho);
    CHECK(check_patch(tau, sm.tau).empty());
    auto back = project(sm, tau, 0, 0);
    REQUIRE(back);
    CHECK(back->cells == rho.cells);
  }
}

TEST_CASE("coordinate sets only admit periods divisible by N") {
  for (int n = 2; n <= 4; ++n)
    for (int m = 1; m <= 12; ++m) CHECK(torus_tiling(example2(n), m).has_value() == (m % n == 0));
}

TEST_CASE("simulation map JSON round trip") {
  SimulationMap sm = example2_simulation(2);
  SimulationMap back = simulation_map_from_json(to_json(sm));
  CHECK(back.n == 2);
  CHECK(back.map[0] == sm.map[0]);
  CHECK(back.tau.tiles == sm.tau.tiles);
}
