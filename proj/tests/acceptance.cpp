// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path-to-tileforge> <work-dir>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tileforge/compiler/compile.hpp"
#include "tileforge/compiler/substitution_layer.hpp"
#include "tileforge/error.hpp"
#include "tileforge/islands.hpp"
#include "tileforge/macro_sim.hpp"
#include "tileforge/patcher.hpp"
#include "tileforge/rs_field.hpp"
#include "tileforge/substitution.hpp"
#include "tileforge/zoom_geometry.hpp"

using namespace tileforge;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string g_cli;
fs::path g_work;

// 1. Shift agreement of a_n for n <= 16, checked directly here.
Outcome lemma_suite() {
  for (int n = 2; n <= 16; ++n) {
    const std::string a = tm_words(n).first;
    const std::size_t need = std::size_t{1} << (n - 2);
    for (std::size_t u = 1; u <= (std::size_t{1} << n) / 4; ++u) {
      const Agreement g = shift_agreement(a, u);
      if (g.agree < need || g.disagree < need)
        return {false, "n=" + std::to_string(n) + " u=" + std::to_string(u)};
    }
  }
  if (folklore_lemma_counterexample(16)) return {false, "library search reports a counterexample"};
  return {true, "n<=16, all u"};
}

// 2. Mismatch fraction of the 2D Thue-Morse field for every |T| <= 8.
Outcome tm_2d() {
  const Region win{0, 0, 4096, 4096};
  double lo = 1.0, hi = 0.0;
  for (int dy = -8; dy <= 8; ++dy)
    for (int dx = -8; dx <= 8; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const double f = tm_aperiodicity(PeriodVector(dx, dy), win).fraction();
      lo = std::min(lo, f);
      hi = std::max(hi, f);
      if (f < 0.24 || f > 0.76) return {false, "T=(" + std::to_string(dx) + "," + std::to_string(dy) + ") f=" + std::to_string(f)};
    }
  // Cell-by-cell counts through tm_cell must equal the factorized ones.
  const Region dom{-8, -8, 4096 + 16, 4096 + 16};
  const LetterField field = [](std::int64_t x, std::int64_t y) { return tm_cell(x, y); };
  for (const auto& [dx, dy] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}, {-3, 5}, {8, -8}, {7, 2}, {-1, 0}, {4, 4}}) {
    const PeriodVector t(dx, dy);
    if (aperiodicity_measure(field, dom, t, win).mismatches != tm_aperiodicity(t, win).mismatches)
      return {false, "direct and factorized counts differ"};
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "288 shifts, fraction in [%.4f, %.4f]", lo, hi);
  return {true, buf};
}

// 3. Simulation conditions of the built-in examples.
Outcome simulations() {
  SimulationCheckOptions o;
  o.window = 2;
  for (int n : {2, 3, 4}) {
    const auto r = check_simulation(example2_simulation(n), o);
    if (!r.all()) return {false, "example2 N=" + std::to_string(n) + ": " + r.detail};
  }
  const auto e1 = check_simulation(example1_simulation(2), o);
  if (e1.unique_splitting) return {false, "example1 splitting reported unique"};
  return {true, "example2 N=2,3,4 pass; example1 splitting not unique"};
}

// 4. EQ1 compiled at its smallest feasible layout.
Outcome compiler() {
  const CheckerMachine m = eq1_machine();
  const auto n = smallest_feasible_n(m);
  if (!n) return {false, "no feasible layout"};
  const CompiledTileSet cts = compile(m, plan_layout(*n, m));
  int accepted = 0;
  for (int mask = 0; mask < 16; ++mask) {
    const SideBits s{{mask & 1}, {(mask >> 1) & 1}, {(mask >> 2) & 1}, {(mask >> 3) & 1}};
    const bool equal = mask == 0 || mask == 15;
    bool built = true;
    MacroTile mt;
    try {
      mt = assemble_macrotile(cts, s);
    } catch (const Error&) {
      built = false;
    }
    if (built != equal) return {false, "quadruple " + std::to_string(mask) + " mishandled"};
    if (built) {
      ++accepted;
      if (!check_patch(mt.body, cts.tiles).empty()) return {false, "assembled body has violations"};
    }
  }
  SimulationMap sm{chessboard(), cts.tiles, *n, {}};
  sm.map.push_back(assemble_macrotile(cts, SideBits{{0}, {0}, {0}, {0}}));
  sm.map.push_back(assemble_macrotile(cts, SideBits{{1}, {1}, {1}, {1}}));
  for (TileId t : {0, 1}) {
    const PatchTiling lifted = lift(sm, PatchTiling(Region{0, 0, 2, 2}, t));
    if (lifted.region.width != 2 * *n || !check_patch(lifted, cts.tiles).empty()) return {false, "lifted tiling invalid"};
  }
  return {true, "N=" + std::to_string(*n) + ", " + std::to_string(cts.tiles.size()) + " tiles, " +
                    std::to_string(accepted) + "/16 accepted"};
}

// 5. Letter projections of compiled substitution layers.
Outcome substitution_layer() {
  const CompiledTileSet ex3 = compile_substitution(example3_rule(), 1);
  if (ex3.n() != 2) return {false, "example3 zoom is not 2"};
  for (Letter a : {0, 1})
    if (project_letters(ex3, letter_macrotile(ex3, a)) != iterate(example3_rule(), a, 1)) return {false, "example3 projection"};
  const CompiledTileSet tm = compile_substitution(thue_morse_rule(), 2);
  if (tm.n() != 4) return {false, "thue-morse zoom is not 4"};
  for (Letter a : {0, 1})
    if (project_letters(tm, letter_macrotile(tm, a)) != iterate(thue_morse_rule(), a, 2)) return {false, "thue-morse projection"};
  return {true, "example3 N=2 and thue-morse N=4 exact"};
}

// 6. Streaming checksums and erasure decoding over GF(2^8).
Outcome reed_solomon() {
  const RSCode code = make_code(build_field(8), 20, 6);
  std::mt19937_64 rng(6);
  std::vector<std::vector<Elem>> samples;
  for (int t = 0; t < 200; ++t) {
    std::vector<Elem> v(20);
    for (auto& e : v) e = static_cast<Elem>(rng() & 0xff);
    std::vector<std::pair<Elem, Elem>> st;
    for (std::size_t i = 0; i < v.size(); ++i) st.emplace_back(code.points[i], v[i]);
    if (to_hex(code.field, rs_stream_checksums(code, st)) != to_hex(code.field, rs_checksums(code, v)))
      return {false, "stream mismatch on instance " + std::to_string(t)};
    samples.push_back(std::move(v));
  }
  for (int t = 0; t < 100; ++t) {
    const auto& v = samples[static_cast<std::size_t>(t)];
    std::vector<std::size_t> idx(20);
    for (std::size_t i = 0; i < 20; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::optional<Elem>> known(v.begin(), v.end());
    for (int i = 0; i < 6; ++i) known[idx[static_cast<std::size_t>(i)]].reset();
    if (rs_erasure_decode(code, known, rs_checksums(code, v)) != v) return {false, "decode failed on pattern " + std::to_string(t)};
  }
  std::vector<std::optional<Elem>> seven(samples[0].begin(), samples[0].end());
  for (std::size_t i = 0; i < 7; ++i) seven[i * 2].reset();
  try {
    rs_erasure_decode(code, seven, rs_checksums(code, samples[0]));
    return {false, "7 erasures accepted"};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooManyErasures) return {false, std::string("7 erasures: ") + e.what()};
  }
  return {true, "200 streams, 100 decodes, 7-erasure rejected"};
}

// 7. Island decompositions of sparse random sets.
Outcome islands() {
  const Schedule s = island_schedule(3);
  const Region w{0, 0, 512, 512};
  const std::uint64_t base = 7;
  for (int t = 0; t < 50; ++t) {
    const DirtySet e = sample_bernoulli(0.0005, w, base + static_cast<std::uint64_t>(t));
    const auto rep = check_decomposition(e, s, clean(e, s, BoundaryPolicy::Finite));
    if (!rep.ok) return {false, "trial " + std::to_string(t) + ": " + rep.detail};
  }
  const int cleaned = monte_carlo_sparsity(0.0005, s, w, 50, base, 1).cleaned_by(3);
  return {cleaned >= 48, "sound 50/50, cleaned by rank 3: " + std::to_string(cleaned) + "/50"};
}

// 8. Bi-island schedule from the variable zoom Q=16, c=2.5.
Outcome bi_schedule() {
  const Schedule s = bi_island_schedule(ZoomSchedule::powers(16, "2.5"), 6);
  const ScheduleReport r = validate_schedule(s);
  return {r.ok() && s.max_rank() == 6, std::string("ordered=") + (r.ordered ? "1" : "0") + " sum=" + (r.inequalities ? "1" : "0") +
                                           " growth=" + (r.growth ? "1" : "0")};
}

PatchTiling punched(PatchTiling t, const std::vector<Region>& holes) {
  for (const Region& h : holes)
    for (int y = h.y0; y < h.y0 + h.height; ++y)
      for (int x = h.x0; x < h.x0 + h.width; ++x) t.at(x, y) = kHole;
  return t;
}

// Declared neighbourhood of a hole: its box widened by c1 * max side.
bool confined(const std::vector<std::uint8_t>& mask, const Region& w, const std::vector<Region>& holes, int c1) {
  for (int y = w.y0; y < w.y0 + w.height; ++y)
    for (int x = w.x0; x < w.x0 + w.width; ++x) {
      if (!mask[w.offset(x, y)]) continue;
      bool inside = false;
      for (const Region& h : holes) {
        const int d = c1 * std::max(h.width, h.height);
        inside = inside || Region{h.x0 - d, h.y0 - d, h.width + 2 * d, h.height + 2 * d}.contains(x, y);
      }
      if (!inside) return false;
    }
  return true;
}

PatchTiling example2_plane(int n, const Region& r) {
  PatchTiling t(r);
  for (int y = r.y0; y < r.y0 + r.height; ++y)
    for (int x = r.x0; x < r.x0 + r.width; ++x) t.at(x, y) = example2_color(n, x, y);
  return t;
}

// 9. Robustness and hole filling.
Outcome robustification() {
  const RobustifiedSet chess = robustify(chessboard(), 2);
  const RobustifiedSet ex2 = robustify(example2(3), 2);
  if (!check_r_robust(chess)) return {false, "robustify(chessboard,2) not robust"};
  if (!check_r_robust(ex2)) return {false, "robustify(example2(3),2) not robust"};

  struct Case {
    std::string name;
    PatchTiling truth;
    const TileSet* ts;
    std::vector<Region> holes;
  };
  const PatchTiling black(Region{0, 0, 25, 25}, 0);
  const PatchTiling chess_truth = induce(chess, PatchTiling(Region{-2, -2, 44, 44}, 1));
  const PatchTiling ex2_truth = induce(ex2, example2_plane(3, Region{-2, -2, 48, 48}));
  const std::vector<Case> cases = {
      {"chessboard 3x3", black, nullptr, {Region{11, 11, 3, 3}}},
      {"robust chessboard 4x4", chess_truth, &chess.derived, {Region{18, 18, 4, 4}}},
      {"robust example2 4x4", ex2_truth, &ex2.derived, {Region{18, 19, 4, 4}}},
      {"robust example2 far pair", ex2_truth, &ex2.derived, {Region{18, 19, 4, 4}, Region{4, 4, 2, 2}}},
      {"robust example2 near pair", ex2_truth, &ex2.derived, {Region{18, 19, 4, 4}, Region{23, 19, 2, 3}}},
  };
  const TileSet cb = chessboard();
  for (const Case& c : cases) {
    const PatchTiling holed = punched(c.truth, c.holes);
    const HoleSpec spec{c.holes, 2, 3};
    const PatchTiling filled = fill_hole(holed, c.ts ? *c.ts : cb, spec);
    if (!check_patch(filled, c.ts ? *c.ts : cb).empty()) return {false, c.name + ": violations"};
    if (!confined(diff_mask(holed, filled), holed.region, c.holes, spec.c1)) return {false, c.name + ": change outside neighbourhood"};
  }
  return {true, "both sets 2-robust, " + std::to_string(cases.size()) + " hole cases confined"};
}

// 10. Percolation patch on a monochrome tiling with random holes.
Outcome percolation() {
  const Region w{0, 0, 512, 512};
  const DirtySet e = sample_bernoulli(0.001, w, 11);
  PatchTiling t(w, 1);
  for (const auto& p : e.points) t.at(p.x, p.y) = kHole;
  const Schedule s = island_schedule(3);
  const PatchResult r = percolation_patch(e, t, s);
  const std::size_t bad = check_patch(r.tiling, chessboard()).size();
  const PatchResult again = percolation_patch(e, r.tiling, s);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu dirty, changed %.5f, violations %zu, second pass %zu", e.points.size(), r.changed_fraction(), bad,
                again.changed_count);
  return {bad == 0 && r.changed_fraction() <= 0.05 && again.changed_count == 0, buf};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 11. CLI runs are byte-identical for --jobs 1 and --jobs 8 and emit manifests.
Outcome reproducibility() {
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"fill", "tile fill --set chessboard --w 2 --h 2 --count"},
      {"lemma", "subst lemma --n 12"},
      {"rs", "rs roundtrip --t 8 --n 20 --D 6 --trials 200 --seed 5"},
      {"aper", "subst aperiodicity --dx 3 --dy 1 --size 256 --direct"},
      {"mc", "islands montecarlo --eps 0.0005 --size 512 --trials 20 --seed 7 --format csv"},
      {"perc", "patch percolation --eps 0.001 --size 512 --seed 11"},
      {"budget", "zoom budget --Q 16 --c 2.5 --k 2 --D 6"},
      {"schedule", "islands schedule --mode bi --ranks 6"},
  };
  fs::create_directories(g_work);
  for (const auto& [name, args] : runs) {
    std::string outputs[2], manifests[2];
    const int jobs[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
      const fs::path out = g_work / (name + ".out");
      const fs::path man = out.string() + ".manifest.json";
      fs::remove(out);
      fs::remove(man);
      const std::string cmd = "\"" + g_cli + "\" " + args + " --jobs " + std::to_string(jobs[i]) + " --out \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) return {false, name + ": command failed"};
      if (!fs::exists(man)) return {false, name + ": no manifest"};
      outputs[i] = slurp(out);
      manifests[i] = slurp(man);
    }
    if (outputs[0] != outputs[1]) return {false, name + ": outputs differ"};
    if (manifests[0] != manifests[1]) return {false, name + ": manifests differ"};
  }
  const std::string fill = slurp(g_work / "fill.out"), lemma = slurp(g_work / "lemma.out"), rs = slurp(g_work / "rs.out");
  if (fill != "2\n" || lemma != "PASS\n" || rs != "OK\n") return {false, "unexpected example output"};
  return {true, std::to_string(runs.size()) + " commands identical with manifests"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <tileforge> <work-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_work = argv[2];

  struct Criterion {
    int id;
    std::string name;
    double limit_s;  // 0 means no time limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "shift-agreement lemma", 30, lemma_suite},
      {2, "thue-morse 2D aperiodicity", 60, tm_2d},
      {3, "simulation checks", 60, simulations},
      {4, "compiler end-to-end", 120, compiler},
      {5, "substitution layer", 0, substitution_layer},
      {6, "reed-solomon", 10, reed_solomon},
      {7, "islands", 120, islands},
      {8, "bi-island schedule", 0, bi_schedule},
      {9, "robustification", 120, robustification},
      {10, "percolation patch", 60, percolation},
      {11, "reproducibility", 0, reproducibility},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && s > c.limit_s) {
      o.ok = false;
      o.detail += " (over time limit)";
    }
    failed += o.ok ? 0 : 1;
    std::printf("[%s] %2d %-28s %7.2fs  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
