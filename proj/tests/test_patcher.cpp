#include <doctest.h>

#include <random>

#include "tileforge/error.hpp"
#include "tileforge/patcher.hpp"

using namespace tileforge;

namespace {

// Example-2 tiling of a region, shifted by (ox, oy).
PatchTiling example2_tiling(int n, const Region& r, int ox = 0, int oy = 0) {
  PatchTiling t(r);
  for (int y = r.y0; y < r.y0 + r.height; ++y)
    for (int x = r.x0; x < r.x0 + r.width; ++x) t.at(x, y) = example2_color(n, x + ox, y + oy);
  return t;
}

TileSet twins() {
  TileSet ts;
  ts.name = "twins";
  ts.colors = {"c"};
  ts.tiles = {Tile{0, 0, 0, 0, "a"}, Tile{0, 0, 0, 0, "b"}};
  return ts;
}

void punch(PatchTiling& t, const Region& h) {
  for (int y = h.y0; y < h.y0 + h.height; ++y)
    for (int x = h.x0; x < h.x0 + h.width; ++x) t.at(x, y) = kHole;
}

bool mask_inside(const std::vector<std::uint8_t>& m, const Region& w, const Region& box) {
  for (int y = w.y0; y < w.y0 + w.height; ++y)
    for (int x = w.x0; x < w.x0 + w.width; ++x)
      if (m[w.offset(x, y)] && !box.contains(x, y)) return false;
  return true;
}

}  // namespace

TEST_CASE("robustify") {
  const auto cb = robustify(chessboard(), 2);
  CHECK(cb.derived.size() == 2);
  CHECK(cb.delta == std::vector<TileId>{0, 1});
  const auto e2 = robustify(example2(3), 2);
  CHECK(e2.derived.size() == 9);
  CHECK(e2.c1 == 2);
  CHECK(e2.c2 == 3);
  CHECK_THROWS_WITH_AS(robustify(twins(), 2, 100), doctest::Contains("SearchCap"), Error);

  TileSet dead;
  dead.colors = {"a", "b"};
  dead.tiles = {Tile{0, 1, 0, 0, "x"}};
  CHECK_THROWS_WITH_AS(robustify(dead, 1), doctest::Contains("NoWindows"), Error);
}

TEST_CASE("delta projection and induced tilings") {
  for (const TileSet& base : {chessboard(), example2(3), example2(2)}) {
    const auto rs = robustify(base, 2);
    FillOptions o;
    o.mode = FillMode::Enumerate;
    o.cap = 100000;
    const auto all = fill_region(rs.derived, Region{0, 0, 3, 3}, o);
    REQUIRE(all.count > 0);
    for (const auto& p : all.solutions) REQUIRE(check_patch(project_delta(rs, p), base).empty());
    // Every base tiling of a 7x7 square induces a valid derived 3x3 tiling
    // whose projection is the base's inner square.
    const auto big = fill_region(base, Region{0, 0, 7, 7}, o);
    for (const auto& p : big.solutions) {
      const auto d = induce(rs, p);
      REQUIRE(check_patch(d, rs.derived).empty());
      const auto back = project_delta(rs, d);
      for (int y = 2; y < 5; ++y)
        for (int x = 2; x < 5; ++x) REQUIRE(back.at(x, y) == p.at(x, y));
    }
  }
}

TEST_CASE("robustness checks") {
  CHECK(check_r_robust(robustify(chessboard(), 2)));
  CHECK(check_r_robust(robustify(example2(3), 2)));
  // A monochrome ring forces a monochrome centre, so the raw chessboard set
  // passes the same check.
  CHECK(check_robust_annulus(chessboard(), 5, 3));
  // Indistinguishable twins never extend uniquely.
  CHECK_FALSE(check_robust_annulus(twins(), 5, 3));
  CHECK_THROWS_WITH_AS(check_robust_annulus(chessboard(), 5, 3, 1), doctest::Contains("SearchCap"), Error);
  CHECK_THROWS_AS(check_robust_annulus(chessboard(), 5, 2), Error);
}

TEST_CASE("fill_hole") {
  const Region w{0, 0, 25, 25};
  PatchTiling black(w, 0);
  PatchTiling t = black;
  const Region hole{11, 11, 3, 3};
  punch(t, hole);
  const auto filled = fill_hole(t, chessboard(), HoleSpec{{hole}, 2, 3});
  CHECK(filled == black);
  CHECK(mask_inside(diff_mask(t, filled), w, hole));

  PatchTiling half = t;
  for (int y = 0; y < 25; ++y)
    for (int x = 13; x < 25; ++x)
      if (!half.is_hole(x, y)) half.at(x, y) = 1;
  CHECK_THROWS_WITH_AS(fill_hole(half, chessboard(), HoleSpec{{hole}, 2, 3}), doctest::Contains("ContextDamaged"), Error);

  PatchTiling damaged = t;
  damaged.at(2, 2) = kHole;
  CHECK_THROWS_WITH_AS(fill_hole(damaged, chessboard(), HoleSpec{{hole}, 2, 3}), doctest::Contains("ContextDamaged"), Error);

  // Robustified example 2: the derived tiling is pinned down by its context.
  const auto rs = robustify(example2(3), 2);
  const Region big{0, 0, 44, 44};
  const PatchTiling truth = induce(rs, example2_tiling(3, big, 1, 2));
  const Region tr = truth.region;
  const Region h4{18, 19, 4, 4};
  PatchTiling holed = truth;
  punch(holed, h4);
  const auto healed = fill_hole(holed, rs.derived, HoleSpec{{h4}, 2, 3});
  CHECK(healed == truth);
  CHECK(mask_inside(diff_mask(holed, healed), tr, Region{h4.x0 - 8, h4.y0 - 8, 20, 20}));

  // Two holes: far apart handled independently, close ones together.
  for (const Region second : {Region{4, 4, 2, 2}, Region{23, 19, 2, 3}}) {
    PatchTiling two = holed;
    punch(two, second);
    CHECK(fill_hole(two, rs.derived, HoleSpec{{h4, second}, 2, 3}) == truth);
  }
  CHECK_THROWS_AS(fill_hole(t, chessboard(), HoleSpec{{}, 2, 3}), Error);
  CHECK_THROWS_AS(fill_hole(t, chessboard(), HoleSpec{{Region{24, 24, 3, 3}}, 2, 3}), Error);
}

TEST_CASE("percolation_patch") {
  const Region w{0, 0, 64, 64};
  const Schedule s = island_schedule(3);
  const PatchTiling white(w, 1);

  auto id = percolation_patch(DirtySet{w, {}}, white, s);
  CHECK(id.tiling == white);
  CHECK(id.changed_count == 0);

  PatchTiling one = white;
  one.at(30, 30) = kHole;
  auto r = percolation_patch(DirtySet{w, {{30, 30}}}, one, s);
  CHECK(r.tiling == white);
  CHECK(r.changed_count == 1);

  // A pocket of the other colour enclosed by dirty cells is absorbed.
  PatchTiling pocket = white;
  DirtySet ring{w, {}};
  for (int y = 19; y <= 21; ++y)
    for (int x = 19; x <= 21; ++x)
      if (x != 20 || y != 20) ring.points.push_back({x, y}), pocket.at(x, y) = kHole;
  pocket.at(20, 20) = 0;
  ring.normalize();
  r = percolation_patch(ring, pocket, s);
  CHECK(r.tiling == white);
  CHECK(check_patch(r.tiling, chessboard()).empty());

  const auto e = sample_bernoulli(0.001, Region{0, 0, 256, 256}, 3);
  PatchTiling holed(Region{0, 0, 256, 256}, 0);
  for (const auto& p : e.points) holed.at(p.x, p.y) = kHole;
  auto big = percolation_patch(e, holed, s);
  CHECK(check_patch(big.tiling, chessboard()).empty());
  CHECK(std::count(big.tiling.cells.begin(), big.tiling.cells.end(), kHole) == 0);
  CHECK(big.changed_fraction() <= 0.05);
  auto again = percolation_patch(e, big.tiling, s);
  CHECK(again.changed_count == 0);

  const auto dense = sample_bernoulli(0.3, w, 1);
  PatchTiling dh(w, 0);
  for (const auto& p : dense.points) dh.at(p.x, p.y) = kHole;
  CHECK_THROWS_WITH_AS(percolation_patch(dense, dh, island_schedule(1)), doctest::Contains("ResidualErrors"), Error);
}

TEST_CASE("correct_errors") {
  const auto rs = robustify(chessboard(), 2);
  const Region w{0, 0, 160, 60};
  const PatchTiling clean_t(w, 1);
  const Schedule s = correction_schedule(2);
  CHECK(s.beta[0] == 13);

  CHECK(correct_errors(DirtySet{w, {}}, clean_t, s, rs).tiling == clean_t);

  PatchTiling one = clean_t;
  one.at(30, 30) = kHole;
  auto r = correct_errors(DirtySet{w, {{30, 30}}}, one, s, rs);
  CHECK(r.tiling == clean_t);
  CHECK(mask_inside(r.changed, w, Region{28, 28, 5, 5}));

  PatchTiling two = clean_t;
  two.at(20, 20) = kHole;
  two.at(120, 20) = kHole;
  r = correct_errors(DirtySet{w, {{20, 20}, {120, 20}}}, two, s, rs);
  CHECK(r.tiling == clean_t);
  CHECK(r.changed_count == 2);

  // A corrupted robustified example-2 tiling with random holes.
  const auto e2 = robustify(example2(3), 2);
  const Region big{0, 0, 100, 100};
  const PatchTiling truth = induce(e2, example2_tiling(3, Region{-2, -2, 104, 104}));
  const auto e = sample_bernoulli(0.002, big, 21);
  PatchTiling holed = truth;
  for (const auto& p : e.points) holed.at(p.x, p.y) = kHole;
  const Schedule s3 = correction_schedule(3);
  r = correct_errors(e, holed, s3, e2);
  CHECK(r.tiling == truth);
  CHECK(check_patch(r.tiling, e2.derived).empty());
  CHECK(correct_errors(e, r.tiling, s3, e2).changed_count == 0);

  CHECK_THROWS_AS(correct_errors(DirtySet{w, {}}, clean_t, island_schedule(2), rs), Error);
}
