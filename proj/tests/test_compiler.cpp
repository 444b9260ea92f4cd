#include <doctest.h>

#include <fstream>
#include <set>

#include "tileforge/compiler/compile.hpp"
#include "tileforge/compiler/substitution_layer.hpp"
#include "tileforge/io.hpp"

using namespace tileforge;

namespace {

SideBits quad(int l, int r, int t, int b) { return SideBits{{l}, {r}, {t}, {b}}; }

std::string supp(const TileSet& ts, ColorId c) {
  const std::string& s = ts.colors[static_cast<std::size_t>(c)];
  const auto a = s.find('|');
  const auto b = s.find('|', a + 1);
  return s.substr(a + 1, b == std::string::npos ? std::string::npos : b - a - 1);
}

// Counts N x N tilings where every cell holds a tile compiled for that cell.
std::size_t aligned_macrotile_count(const CompiledTileSet& cts) {
  FillOptions o;
  o.mode = FillMode::Count;
  o.cap = 1000;
  o.cell_filter = [&](int x, int y, TileId t) {
    const TileInfo& info = cts.decode[static_cast<std::size_t>(t)];
    return info.x == x && info.y == y;
  };
  return fill_region(cts.tiles, Region{0, 0, cts.n(), cts.n()}, o).count;
}

CheckerMachine parity2_machine() {
  return machine_from_predicate("PARITY2", 2, [](const SideBits& s) {
    int p = 0;
    for (const auto* v : {&s.left, &s.right, &s.top, &s.bottom})
      for (int b : *v) p ^= b;
    return p == 0 && s.left[0] == s.right[0];
  });
}

}  // namespace

TEST_CASE("machines") {
  auto eq1 = eq1_machine();
  CHECK(eq1.state_count() == 4);
  int accepted = 0;
  for (const auto& s : all_side_inputs(1)) {
    const bool eq = s.left == s.right && s.right == s.top && s.top == s.bottom;
    CHECK(machine_accepts(eq1, s) == eq);
    accepted += eq;
  }
  CHECK(accepted == 2);

  auto built = machine_from_predicate("EQ1'", 1, [](const SideBits& s) {
    return s.left == s.right && s.right == s.top && s.top == s.bottom;
  });
  for (const auto& s : all_side_inputs(1)) CHECK(machine_accepts(built, s) == machine_accepts(eq1, s));

  auto p2 = parity2_machine();
  for (const auto& s : all_side_inputs(2)) {
    int p = 0;
    for (const auto* v : {&s.left, &s.right, &s.top, &s.bottom})
      for (int b : *v) p ^= b;
    CHECK(machine_accepts(p2, s) == (p == 0 && s.left[0] == s.right[0]));
  }
  CHECK_FALSE(machine_accepts(reject_all_machine(1), quad(0, 0, 0, 0)));

  auto back = machine_from_json(to_json(eq1));
  CHECK(back.delta.size() == eq1.delta.size());
  CHECK(to_json(back) == to_json(eq1));
}

TEST_CASE("plan_layout") {
  Layout l = plan_layout(16, 1, eq1_machine());
  REQUIRE(l.zone);
  CHECK(l.zone->w == 8);
  CHECK(l.zone->h == 6);
  CHECK(l.wires.size() == 4);

  std::ifstream in(std::string(TILEFORGE_GOLDEN_DIR) + "/layout_n16_k1.json");
  REQUIRE(in);
  const Layout golden = layout_from_json(nlohmann::json::parse(in));
  CHECK(golden == l);
  // Hand-routed left wire of the golden layout.
  CHECK(l.wires[0].cells == std::vector<Cell>{{0, 7}, {1, 7}, {1, 6}, {1, 5}, {1, 4}, {2, 4}, {3, 4}, {4, 4}});

  std::set<Cell> seen;
  bool disjoint = true;
  for (const auto& w : l.wires)
    for (const auto& c : w.cells) disjoint = disjoint && seen.insert(c).second;
  CHECK(disjoint);

  CHECK_THROWS_WITH_AS(plan_layout(4, 3, machine_from_predicate("any", 3, [](const SideBits&) { return true; })),
                       doctest::Contains("LayoutInfeasible"), Error);
  CHECK_THROWS_WITH_AS(plan_layout(10, eq1_machine()), doctest::Contains("LayoutInfeasible"), Error);
  CHECK(smallest_feasible_n(eq1_machine()) == 12);

  Layout broken = l;
  broken.wires[1].cells.push_back(broken.wires[0].cells[3]);
  CHECK_THROWS_AS(validate_layout(broken), Error);
}

TEST_CASE("compile and assemble EQ1") {
  const auto m = eq1_machine();
  const CompiledTileSet cts = compile(m, plan_layout(16, m));
  const int n = 16;
  for (int v = 0; v < 16; ++v) {
    const SideBits s = quad(v & 1, (v >> 1) & 1, (v >> 2) & 1, (v >> 3) & 1);
    const bool eq = v == 0 || v == 15;
    if (!eq) {
      CHECK_THROWS_WITH_AS(assemble_macrotile(cts, s), doctest::Contains("RejectedByProgram"), Error);
      continue;
    }
    const MacroTile mt = assemble_macrotile(cts, s);
    CHECK(check_patch(mt.body, cts.tiles).empty());
    CHECK(read_side_bits(cts, mt) == s);
    // Bit layer on the border: the bit at the centered cell, neutral elsewhere.
    const MacroColors mc = macro_colors(mt, cts.tiles);
    const int c0 = cts.layout.center();
    for (int i = 0; i < n; ++i) {
      const std::string expect = i == c0 ? "b" + std::to_string(v & 1) : "N";
      CHECK(supp(cts.tiles, mc.left[static_cast<std::size_t>(i)]) == expect);
      CHECK(supp(cts.tiles, mc.right[static_cast<std::size_t>(i)]) == expect);
      CHECK(supp(cts.tiles, mc.top[static_cast<std::size_t>(i)]) == expect);
      CHECK(supp(cts.tiles, mc.bottom[static_cast<std::size_t>(i)]) == expect);
    }
    // Every wire cell shows its bit on exactly the two path-adjacent sides.
    for (TileId t : mt.body.cells) {
      const TileInfo& info = cts.decode[static_cast<std::size_t>(t)];
      if (info.layer != CellLayer::Wire) continue;
      const Tile& tile = cts.tiles.tiles[static_cast<std::size_t>(t)];
      int with_bit = 0;
      for (ColorId c : {tile.left, tile.right, tile.top, tile.bottom}) {
        const std::string s2 = supp(cts.tiles, c);
        if (s2 != "N") {
          CHECK(s2 == "b" + std::to_string(info.bit));
          ++with_bit;
        }
      }
      CHECK(with_bit == 2);
    }
  }
}

TEST_CASE("compiled EQ1 admits exactly the accepted macro-tiles") {
  const auto m = eq1_machine();
  const int n = *smallest_feasible_n(m);
  const CompiledTileSet cts = compile(m, plan_layout(n, m));
  CHECK(aligned_macrotile_count(cts) == 2);

  const auto rej = reject_all_machine(1);
  const CompiledTileSet none = compile(rej, plan_layout(16, rej));
  CHECK(aligned_macrotile_count(none) == 0);
  for (const auto& s : all_side_inputs(1)) CHECK_THROWS_AS(assemble_macrotile(none, s), Error);
}

TEST_CASE("layer decode is a bijection and compile is deterministic") {
  const auto m = parity2_machine();
  const auto l = plan_layout(*smallest_feasible_n(m), m);
  const CompiledTileSet a = compile(m, l);
  const CompiledTileSet b = compile(m, l);
  CHECK(to_json(a.tiles) == to_json(b.tiles));
  std::set<std::string> keys;
  for (TileId t = 0; t < a.tiles.size(); ++t) {
    const TileInfo& info = a.decode[static_cast<std::size_t>(t)];
    CHECK(a.encode(info) == t);
    keys.insert(a.key(info));
  }
  CHECK(keys.size() == static_cast<std::size_t>(a.tiles.size()));
}

TEST_CASE("assembled bodies are valid for every bundled machine and input") {
  std::vector<CheckerMachine> machines{eq1_machine(), parity2_machine(), accept_all_machine(1), reject_all_machine(2)};
  for (const auto& m : machines) {
    const CompiledTileSet cts = compile(m, plan_layout(*smallest_feasible_n(m), m));
    for (const auto& s : all_side_inputs(m.input_bits)) {
      const bool acc = machine_accepts(m, s);
      if (!acc) {
        CHECK_THROWS_AS(assemble_macrotile(cts, s), Error);
        continue;
      }
      const MacroTile mt = assemble_macrotile(cts, s);
      CHECK(check_patch(mt.body, cts.tiles).empty());
      CHECK(read_side_bits(cts, mt) == s);
    }
  }
}

TEST_CASE("simulate_check_compiled") {
  const auto m = eq1_machine();
  const CompiledTileSet cts = compile(m, plan_layout(16, m));
  TileSet rho = chessboard();
  auto rep = simulate_check_compiled(cts, rho, {}, 50'000);
  CHECK(rep.total);
  CHECK(rep.report.injective);
  CHECK(rep.report.match_equivalent);

  TileSet only_black = rho;
  only_black.tiles.pop_back();
  auto one = simulate_check_compiled(cts, only_black, {}, 50'000);
  CHECK(one.total);
  CHECK(one.report.match_equivalent);

  const auto rej = reject_all_machine(1);
  auto bad = simulate_check_compiled(compile(rej, plan_layout(16, rej)), rho);
  CHECK_FALSE(bad.total);

  // Lifting a 2x2 rho-tiling gives a valid 2N x 2N tiling.
  SimulationMap sm{rho, cts.tiles, 16, {}};
  sm.map.push_back(assemble_macrotile(cts, quad(0, 0, 0, 0)));
  sm.map.push_back(assemble_macrotile(cts, quad(1, 1, 1, 1)));
  for (TileId t : {0, 1}) {
    PatchTiling p(Region{0, 0, 2, 2}, t);
    CHECK(check_patch(lift(sm, p), cts.tiles).empty());
  }
  // Mixed colors do not lift (the rho tiling itself is invalid).
  PatchTiling mixed(Region{0, 0, 2, 1});
  mixed.at(0, 0) = 0;
  mixed.at(1, 0) = 1;
  CHECK_FALSE(check_patch(lift(sm, mixed), cts.tiles).empty());
}

TEST_CASE("substitution letter layers") {
  const auto ex3 = compile_substitution(example3_rule(), 1);
  CHECK(ex3.n() == 2);
  for (Letter a : {0, 1}) CHECK(project_letters(ex3, letter_macrotile(ex3, a)) == (LetterPattern{{0, 1}, {1, 0}}));

  const auto tm = compile_substitution(thue_morse_rule(), 2);
  CHECK(tm.n() == 4);
  CHECK(tm.tiles.size() == thue_morse_block(4).size());
  for (Letter a : {0, 1}) {
    const MacroTile mt = letter_macrotile(tm, a);
    CHECK(check_patch(mt.body, tm.tiles).empty());
    CHECK(project_letters(tm, mt) == iterate(thue_morse_rule(), a, 2));
  }
  // Exactly one aligned macro-tile per father letter.
  CHECK(aligned_macrotile_count(tm) == 2);

  CHECK_THROWS_WITH_AS(add_substitution_layer(eq1_machine(), thue_morse_rule(), 3, 16), doctest::Contains("ZoomMismatch"),
                       Error);

  // Example 3 rule on top of EQ1: accepts exactly EQ1-consistent inputs with one shared letter.
  const auto lm = add_substitution_layer(eq1_machine(), example3_rule(), 1, 2);
  CHECK(lm.input_bits == 2);
  for (const auto& s : all_side_inputs(2)) {
    const bool base = s.left[0] == s.right[0] && s.right[0] == s.top[0] && s.top[0] == s.bottom[0];
    const bool letters = s.left[1] == s.right[1] && s.right[1] == s.top[1] && s.top[1] == s.bottom[1];
    CHECK(machine_accepts(lm, s) == (base && letters));
  }
}

TEST_CASE("full letter-layer compile path") {
  struct Case {
    SubstitutionRule rule;
    int iterations;
    int n;
  };
  for (const Case& c : {Case{thue_morse_rule(), 5, 32}, Case{example3_rule(), 4, 16}}) {
    const auto m = add_substitution_layer(accept_all_machine(0), c.rule, c.iterations, c.n);
    const CompiledTileSet cts = compile(m, plan_layout(c.n, m));
    for (Letter a : {0, 1}) {
      const MacroTile mt = assemble_macrotile(cts, SideBits{{a}, {a}, {a}, {a}});
      CHECK(check_patch(mt.body, cts.tiles).empty());
      CHECK(project_letters(cts, mt) == iterate(c.rule, a, c.iterations));
    }
    CHECK_THROWS_AS(assemble_macrotile(cts, SideBits{{0}, {1}, {0}, {0}}), Error);
  }
  const auto bad = add_substitution_layer(accept_all_machine(0), thue_morse_rule(), 5, 32);
  CHECK_THROWS_WITH_AS(compile(bad, plan_layout(32, bad), LetterLayer{thue_morse_rule(), 4, 0, 1}),
                       doctest::Contains("ZoomMismatch"), Error);
}
