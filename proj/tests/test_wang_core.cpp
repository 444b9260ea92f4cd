#include <doctest.h>

#include <random>

#include "tileforge/io.hpp"
#include "tileforge/wang_core.hpp"

using namespace tileforge;

namespace {

// Independent oracle: enumerate every assignment of tiles to a w x h grid and
// count the ones where all shared edges agree.
std::size_t brute_count(const TileSet& ts, int w, int h, bool wrap = false) {
  const int n = w * h;
  const int k = ts.size();
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::size_t count = 0;
  for (;;) {
    bool ok = true;
    for (int y = 0; y < h && ok; ++y) {
      for (int x = 0; x < w && ok; ++x) {
        const Tile& t = ts.tiles[static_cast<std::size_t>(a[static_cast<std::size_t>(y * w + x)])];
        if (x + 1 < w || wrap) {
          const Tile& r = ts.tiles[static_cast<std::size_t>(a[static_cast<std::size_t>(y * w + (x + 1) % w)])];
          ok = ok && t.right == r.left;
        }
        if (y + 1 < h || wrap) {
          const Tile& u = ts.tiles[static_cast<std::size_t>(a[static_cast<std::size_t>(((y + 1) % h) * w + x)])];
          ok = ok && t.top == u.bottom;
        }
      }
    }
    count += ok;
    int i = 0;
    while (i < n && ++a[static_cast<std::size_t>(i)] == k) a[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return count;
}

TileSet random_tileset(std::mt19937_64& rng, int colors, int tiles) {
  TileSet ts;
  ts.name = "random";
  for (int c = 0; c < colors; ++c) ts.colors.push_back("c" + std::to_string(c));
  std::uniform_int_distribution<int> col(0, colors - 1);
  for (int i = 0; i < tiles; ++i)
    ts.tiles.push_back(Tile{col(rng), col(rng), col(rng), col(rng), "t" + std::to_string(i)});
  return ts;
}

FillOptions count_opts(std::size_t cap = 1u << 30) {
  FillOptions o;
  o.mode = FillMode::Count;
  o.cap = cap;
  return o;
}

}  // namespace

TEST_CASE("validate_tileset normalizes and rejects bad specs") {
  nlohmann::json chess = {{"name", "chess"},
                          {"colors", {"black", "white"}},
                          {"tiles", {{{"l", 0}, {"r", 0}, {"t", 0}, {"b", 0}}, {{"l", 1}, {"r", 1}, {"t", 1}, {"b", 1}}}}};
  TileSet ts = validate_tileset(chess);
  CHECK(ts.size() == 2);
  CHECK(ts.color_count() == 2);

  nlohmann::json bad = chess;
  bad["tiles"][1]["r"] = 5;
  CHECK_THROWS_WITH_AS(validate_tileset(bad), doctest::Contains("ColorOutOfRange"), Error);

  nlohmann::json dup = chess;
  dup["tiles"].push_back(dup["tiles"][0]);
  CHECK_THROWS_WITH_AS(validate_tileset(dup), doctest::Contains("DuplicateTile"), Error);

  // Same colors with different labels are distinct tiles.
  nlohmann::json labeled = dup;
  labeled["tiles"][2]["label"] = "copy";
  CHECK(validate_tileset(labeled).size() == 3);

  nlohmann::json missing = chess;
  missing["tiles"][0].erase("t");
  CHECK_THROWS_WITH_AS(validate_tileset(missing), doctest::Contains("MalformedSpec"), Error);

  // Unused colors are compacted away.
  nlohmann::json sparse = {{"colors", {"unused", "a"}}, {"tiles", {{{"l", 1}, {"r", 1}, {"t", 1}, {"b", 1}}}}};
  TileSet s = validate_tileset(sparse);
  CHECK(s.colors == std::vector<std::string>{"a"});
  CHECK(s.tiles[0].left == 0);

  TileSet e2 = validate_tileset(to_json(example2(4)));
  CHECK(e2.size() == 16);
  CHECK(e2.tiles == example2(4).tiles);
}

TEST_CASE("check_patch reports exactly the mismatched edges") {
  TileSet cb = chessboard();
  PatchTiling p(Region{0, 0, 2, 1}, 0);
  CHECK(check_patch(p, cb).empty());
  p.at(1, 0) = 1;
  auto v = check_patch(p, cb);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == Violation{0, 0, 1, 0, Side::Right});
  p.at(1, 0) = kHole;
  CHECK(check_patch(p, cb).empty());

  // Translate the canonical Example-2 coordinate pattern by (1,0).
  const int n = 4;
  TileSet e2 = example2(n);
  PatchTiling q(Region{0, 0, 3, 3});
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) q.at(x, y) = ((x + 1) % n) * n + y % n;
  CHECK(check_patch(q, e2).empty());
}

TEST_CASE("fill_region counts match the paper examples") {
  CHECK(fill_region(chessboard(), Region{0, 0, 2, 2}, count_opts()).count == 2);
  CHECK(fill_region(example2(2), Region{0, 0, 2, 2}, count_opts()).count == 4);
  CHECK(fill_region(example1(), Region{3, -2, 5, 4}, count_opts()).count == 1);
  CHECK(brute_count(chessboard(), 2, 2) == 2);
  CHECK(brute_count(example2(2), 2, 2) == 4);
}

TEST_CASE("fill_region count equals brute force on random small sets") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 60; ++trial) {
    const int colors = 1 + static_cast<int>(rng() % 3);
    const int tiles = 1 + static_cast<int>(rng() % 4);
    TileSet ts = random_tileset(rng, colors, tiles);
    const int w = 1 + static_cast<int>(rng() % 3);
    const int h = 1 + static_cast<int>(rng() % 3);
    FillOptions o = count_opts();
    auto res = fill_region(ts, Region{0, 0, w, h}, o);
    CHECK(res.count == brute_count(ts, w, h));
    o.jobs = 3;
    CHECK(fill_region(ts, Region{0, 0, w, h}, o).count == res.count);

    FillOptions wrap = count_opts();
    wrap.wrap_x = wrap.wrap_y = true;
    CHECK(fill_region(ts, Region{0, 0, w, h}, wrap).count == brute_count(ts, w, h, true));

    FillOptions en;
    en.mode = FillMode::Enumerate;
    en.cap = 1000;
    auto all = fill_region(ts, Region{0, 0, w, h}, en);
    for (const auto& s : all.solutions) CHECK(check_patch(s, ts).empty());
    en.jobs = 4;
    CHECK(fill_region(ts, Region{0, 0, w, h}, en).solutions == all.solutions);
  }
}

TEST_CASE("fill_region honors boundaries, holes, and caps") {
  TileSet cb = chessboard();
  FillOptions o = count_opts();
  o.boundary.left = {1, std::nullopt};
  CHECK(fill_region(cb, Region{0, 0, 2, 2}, o).count == 1);

  FillOptions holes = count_opts();
  holes.holes = {false, true, true, false};
  // Two unconnected cells each choose a color freely.
  CHECK(fill_region(cb, Region{0, 0, 2, 2}, holes).count == 4);

  FillOptions capped = count_opts(3);
  auto r = fill_region(example1(), Region{0, 0, 1, 1}, capped);
  CHECK(r.count == 1);
  CHECK_FALSE(r.capped);
  auto r2 = fill_region(example2(3), Region{0, 0, 2, 2}, capped);
  CHECK(r2.count == 3);
  CHECK(r2.capped);

  FillOptions first;
  first.boundary.left = {0};
  first.boundary.right = {1};
  CHECK_THROWS_WITH_AS(fill_region(cb, Region{0, 0, 1, 1}, first), doctest::Contains("NoSolution"), Error);

  FillOptions tiny = count_opts();
  tiny.node_cap = 5;
  CHECK_THROWS_WITH_AS(fill_region(example2(4), Region{0, 0, 4, 4}, tiny), doctest::Contains("WindowSearchExploded"),
                       Error);
}

TEST_CASE("torus tilings and periods") {
  auto t1 = torus_tiling(chessboard(), 1);
  REQUIRE(t1);
  CHECK(t1->at(0, 0) == 0);

  auto t4 = torus_tiling(example2(4), 4);
  REQUIRE(t4);
  CHECK(check_patch(*t4, example2(4)).empty());
  CHECK(t4->at(0, 0) == 0);  // canonical: (0,0) at the origin, coordinates increase
  CHECK(t4->at(3, 2) == 3 * 4 + 2);
  CHECK_FALSE(torus_tiling(example2(4), 3));

  CHECK(min_torus_period(chessboard(), 5) == 1);
  CHECK(min_torus_period(example2(4), 6) == 4);
  CHECK(min_torus_period(example2(3), 6) == 3);
  CHECK_FALSE(min_torus_period(example2(5), 4));

  // Unrolling a torus patch tiles any multiple of it.
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    TileSet ts = random_tileset(rng, 2, 3);
    for (int m = 1; m <= 2; ++m) {
      auto t = torus_tiling(ts, m);
      if (!t) continue;
      PatchTiling big(Region{0, 0, 3 * m, 3 * m});
      for (int y = 0; y < 3 * m; ++y)
        for (int x = 0; x < 3 * m; ++x) big.at(x, y) = t->at(x % m, y % m);
      CHECK(check_patch(big, ts).empty());
      FillOptions f;
      CHECK_NOTHROW(fill_region(ts, Region{0, 0, 3 * m, 3 * m}, f));
    }
  }
}

TEST_CASE("density_bounds exact rationals") {
  TileSet cb = chessboard();
  set_partition(cb, {0});
  auto [lo, hi] = density_bounds(cb, 2);
  CHECK(lo == Rational{0, 1});
  CHECK(hi == Rational{1, 1});

  TileSet e2 = example2(2);
  set_partition(e2, {0});
  auto d2 = density_bounds(e2, 2);
  CHECK(d2.first == Rational{1, 4});
  CHECK(d2.second == Rational{1, 4});
  auto d3 = density_bounds(e2, 3);
  CHECK(d3.first == Rational{1, 9});
  CHECK(d3.second == Rational{4, 9});

  // Cross-check against brute enumeration on random sets for n <= 3.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    TileSet ts = random_tileset(rng, 2, 3);
    set_partition(ts, {0});
    for (int n = 1; n <= 3; ++n) {
      FillOptions en;
      en.mode = FillMode::Enumerate;
      en.cap = 1u << 30;
      auto all = fill_region(ts, Region{0, 0, n, n}, en);
      if (all.solutions.empty()) {
        CHECK_THROWS_AS(density_bounds(ts, n), Error);
        continue;
      }
      long lo_a = n * n, hi_a = 0;
      for (const auto& s : all.solutions) {
        long a = 0;
        for (int c : s.cells) a += c == 0;
        lo_a = std::min(lo_a, a);
        hi_a = std::max(hi_a, a);
      }
      auto d = density_bounds(ts, n);
      CHECK(d.first == Rational::make(lo_a, n * n));
      CHECK(d.second == Rational::make(hi_a, n * n));
      CHECK_FALSE(d.second < d.first);
    }
  }
}

TEST_CASE("builtin tile sets") {
  CHECK(builtin("chessboard").size() == 2);
  CHECK(builtin("chessboard").color_count() == 2);
  CHECK(builtin("example2(4)").size() == 16);
  CHECK(builtin("example2:4").size() == 16);
  CHECK(builtin("example1").size() == 1);
  CHECK_THROWS_WITH_AS(builtin("penrose"), doctest::Contains("UnknownName"), Error);

  // thue_morse_block(N): each N x N macro-tile realizes s^n(father).
  TileSet tm = builtin("thue_morse_block(4)");
  CHECK(tm.size() == 32);
  auto t = torus_tiling(tm, 4);
  REQUIRE(t);
  CHECK(check_patch(*t, tm).empty());
}

TEST_CASE("patch serialization and ppm rendering are deterministic") {
  PatchTiling p(Region{1, 2, 2, 2}, 0);
  p.at(2, 3) = kHole;
  CHECK(patch_from_json(to_json(p)) == p);
  const std::string a = render_ppm(p, 2);
  CHECK(a == render_ppm(p, 2));
  CHECK(a.rfind("P6\n4 4\n255\n", 0) == 0);
  CHECK(a.size() == std::string("P6\n4 4\n255\n").size() + 4 * 4 * 3);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
