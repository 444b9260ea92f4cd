#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileforge/compiler/compile.hpp"
#include "tileforge/compiler/fixed_point.hpp"
#include "tileforge/compiler/substitution_layer.hpp"
#include "tileforge/error.hpp"
#include "tileforge/io.hpp"
#include "tileforge/islands.hpp"
#include "tileforge/macro_sim.hpp"
#include "tileforge/patcher.hpp"
#include "tileforge/rs_field.hpp"
#include "tileforge/substitution.hpp"
#include "tileforge/wang_core.hpp"
#include "tileforge/zoom_geometry.hpp"

using namespace tileforge;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  int jobs = 1;
};

/// Input files read by a command, for the manifest.
std::map<std::string, std::string> g_inputs;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  g_inputs[path] = hex64(fnv1a64(ss.str()));
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedSpec, path + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump() + "\n"; }

TileSet load_set(const std::string& name, const std::string& file) {
  if (!file.empty()) return validate_tileset(read_json(file));
  if (name.empty()) throw CLI::ValidationError("--set or --in", "a tile set is required");
  return builtin(name);
}

CheckerMachine load_machine(const std::string& name) {
  if (name == "eq1") return eq1_machine();
  auto param = [&](const std::string& prefix) -> std::optional<int> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    return std::stoi(name.substr(prefix.size()));
  };
  if (auto k = param("reject_all:")) return reject_all_machine(*k);
  if (auto k = param("accept_all:")) return accept_all_machine(*k);
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json") return machine_from_json(read_json(name));
  throw Error(ErrorCode::UnknownName, "machine '" + name + "' (eq1, reject_all:K, accept_all:K or a .json file)");
}

SubstitutionRule load_rule(const std::string& name) {
  if (name == "tm" || name == "thue_morse") return thue_morse_rule();
  if (name == "ex3" || name == "example3") return example3_rule();
  return rule_from_json(read_json(name));
}

std::vector<int> parse_bits(const std::string& s) {
  std::vector<int> v;
  for (char c : s) {
    if (c != '0' && c != '1') throw Error(ErrorCode::InvalidArgument, "bit strings use 0 and 1 only");
    v.push_back(c - '0');
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

Region square(int size) { return Region{0, 0, size, size}; }

Schedule make_schedule(const std::string& mode, int ranks, std::int64_t q, const std::string& c) {
  if (mode == "island") return island_schedule(ranks);
  if (mode == "bi") return bi_island_schedule(ZoomSchedule::powers(q, c), ranks);
  if (mode == "correct") return correction_schedule(ranks);
  throw Error(ErrorCode::InvalidArgument, "mode must be island, bi or correct");
}

json big(const BigInt& v) { return v.str(); }

json mismatch_json(const MismatchCount& m) {
  return {{"mismatches", m.mismatches}, {"total", m.total}, {"fraction", m.fraction()}};
}

std::string mask_ppm(const Region& r, const std::vector<std::uint8_t>& mask) {
  std::string s = "P6\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n255\n";
  for (int y = r.height - 1; y >= 0; --y)
    for (int x = 0; x < r.width; ++x) {
      const char v = mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(x)] ? '\xff' : '\0';
      s += v;
      s += v;
      s += v;
    }
  return s;
}

/// A full tiling of `window` by robustify(base): periodic base tiling, then windows.
PatchTiling robust_tiling(const RobustifiedSet& rs, const Region& window) {
  const auto period = min_torus_period(rs.base, 8);
  if (!period) throw Error(ErrorCode::NoSolution, rs.base.name + " has no torus tiling of period <= 8");
  const auto torus = *torus_tiling(rs.base, *period);
  const int r = rs.r;
  PatchTiling base(Region{window.x0 - r, window.y0 - r, window.width + 2 * r, window.height + 2 * r});
  for (int y = base.region.y0; y < base.region.y0 + base.region.height; ++y)
    for (int x = base.region.x0; x < base.region.x0 + base.region.width; ++x)
      base.at(x, y) = torus.at(((x % *period) + *period) % *period, ((y % *period) + *period) % *period);
  return induce(rs, base);
}

struct Output {
  std::string bytes;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wang tile and self-simulation workbench", "tileforge"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", g.out, "Write the primary result here instead of stdout");
  app.add_option("--format", g.format, "json, ppm or csv")->check(CLI::IsMember({"json", "ppm", "csv"}))->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", kVersion);

  std::function<Output()> action;
  std::string command;
  auto on = [&](CLI::App* sub, std::function<Output()> f) {
    sub->callback([&command, &action, sub, f] {
      command = sub->get_parent()->get_name() + " " + sub->get_name();
      action = f;
    });
  };

  // Shared option storage.
  std::string set_name, in_file, tiling_file, machine = "eq1", rule = "tm", mode = "island", policy = "windowed";
  std::string sides, pi = "printer", values, known, checks, gamma_list, a_tiles, c_str = "2.5", holes_spec;
  int w = 4, h = 4, n = 4, m = 4, k = 1, window = 2, it = 2, letter = 0, t_deg = 8, rs_n = 20, rs_d = 6, trials = 50;
  int ranks = 3, size = 512, dx = 1, dy = 0, depth = 3, level = 1, radius = 2, d_count = 6;
  std::int64_t steps = 1000, q = 16, column = 0, ypos = 0, fixed_n = 0, alphabet = 1;
  std::size_t cap = 1'000'000;
  double eps = 0.001;
  bool count = false, enumerate = false, wrap_x = false, wrap_y = false, extended = false, full = false;

  auto set_opts = [&](CLI::App* s) {
    s->add_option("--set", set_name, "Built-in tile set");
    s->add_option("--in", in_file, "Tile set JSON file");
  };

  // tileset
  auto* tileset = app.add_subcommand("tileset", "Inspect tile sets");
  tileset->require_subcommand(1);
  auto* ts_show = tileset->add_subcommand("show", "Print a tile set as JSON");
  set_opts(ts_show);
  on(ts_show, [&] { return Output{dump(to_json(load_set(set_name, in_file)))}; });
  auto* ts_val = tileset->add_subcommand("validate", "Validate a tile set file");
  ts_val->add_option("--in", in_file)->required();
  on(ts_val, [&] { return Output{dump(to_json(validate_tileset(read_json(in_file))))}; });

  // tile
  auto* tile = app.add_subcommand("tile", "Search tilings");
  tile->require_subcommand(1);
  auto* fill = tile->add_subcommand("fill", "Tile a rectangle");
  fill->set_help_flag("--help", "Print this help message and exit");
  set_opts(fill);
  fill->add_option("--w", w)->required();
  fill->add_option("--h", h)->required();
  fill->add_flag("--count", count, "Print the number of tilings");
  fill->add_flag("--enumerate", enumerate, "Print every tiling up to --cap");
  fill->add_option("--cap", cap);
  fill->add_flag("--wrap-x", wrap_x);
  fill->add_flag("--wrap-y", wrap_y);
  on(fill, [&] {
    const TileSet ts = load_set(set_name, in_file);
    FillOptions o;
    o.mode = count ? FillMode::Count : enumerate ? FillMode::Enumerate : FillMode::First;
    o.cap = o.mode == FillMode::First ? 1 : cap;
    o.wrap_x = wrap_x;
    o.wrap_y = wrap_y;
    o.jobs = g.jobs;
    const FillResult r = fill_region(ts, Region{0, 0, w, h}, o);
    if (count) return Output{std::to_string(r.count) + (r.capped ? "+" : "") + "\n"};
    if (enumerate) {
      json arr = json::array();
      for (const auto& s : r.solutions) arr.push_back(to_json(s));
      return Output{dump({{"count", r.count}, {"capped", r.capped}, {"tilings", arr}})};
    }
    if (g.format == "ppm") return Output{render_ppm(r.solutions.front())};
    return Output{dump(to_json(r.solutions.front()))};
  });
  auto* check = tile->add_subcommand("check", "List mismatched edges of a tiling");
  set_opts(check);
  check->add_option("--tiling", tiling_file)->required();
  on(check, [&] {
    const TileSet ts = load_set(set_name, in_file);
    const auto v = check_patch(patch_from_json(read_json(tiling_file)), ts);
    json arr = json::array();
    for (const auto& e : v) arr.push_back({e.x, e.y, e.nx, e.ny});
    return Output{dump({{"violations", v.size()}, {"edges", arr}})};
  });
  auto* torus = tile->add_subcommand("torus", "Find an m x m periodic tiling");
  set_opts(torus);
  torus->add_option("--m", m)->required();
  on(torus, [&] {
    const auto t = torus_tiling(load_set(set_name, in_file), m);
    if (!t) throw Error(ErrorCode::NoSolution, "no " + std::to_string(m) + "-periodic tiling");
    if (g.format == "ppm") return Output{render_ppm(*t)};
    return Output{dump(to_json(*t))};
  });
  auto* period = tile->add_subcommand("period", "Smallest torus period");
  set_opts(period);
  period->add_option("--max", m)->required();
  on(period, [&] {
    const auto p = min_torus_period(load_set(set_name, in_file), m);
    return Output{dump({{"min_period", p ? json(*p) : json(nullptr)}})};
  });
  auto* density = tile->add_subcommand("density", "Exact A-density bounds on the n x n square");
  set_opts(density);
  density->add_option("--n", n)->required();
  density->add_option("--a", a_tiles, "Comma-separated ids of A tiles")->required();
  on(density, [&] {
    TileSet ts = load_set(set_name, in_file);
    std::vector<TileId> ids;
    for (const auto& s : split(a_tiles, ',')) ids.push_back(std::stoi(s));
    set_partition(ts, ids);
    const auto [lo, hi] = density_bounds(ts, n);
    auto r = [](const Rational& x) { return std::to_string(x.num) + "/" + std::to_string(x.den); };
    return Output{dump({{"min", r(lo)}, {"max", r(hi)}})};
  });

  // simcheck
  auto* simcheck = app.add_subcommand("simcheck", "Check simulation conditions");
  simcheck->require_subcommand(1);
  auto report_json = [](const SimulationReport& r) {
    return json{{"injective", r.injective},
                {"match_equivalent", r.match_equivalent},
                {"unique_splitting", r.unique_splitting},
                {"window_tilings", r.window_tilings},
                {"detail", r.detail}};
  };
  for (const std::string ex : {"example1", "example2"}) {
    auto* s = simcheck->add_subcommand(ex, "Built-in simulation of " + ex);
    s->add_option("--n", n)->required();
    s->add_option("--window", window);
    on(s, [&, ex] {
      const SimulationMap sm = ex == "example1" ? example1_simulation(n) : example2_simulation(n);
      SimulationCheckOptions o;
      o.window = window;
      return Output{dump(report_json(check_simulation(sm, o)))};
    });
  }
  auto* simfile = simcheck->add_subcommand("map", "Simulation map from a JSON file");
  simfile->add_option("--in", in_file)->required();
  simfile->add_option("--window", window);
  on(simfile, [&] {
    SimulationCheckOptions o;
    o.window = window;
    return Output{dump(report_json(check_simulation(simulation_map_from_json(read_json(in_file)), o)))};
  });

  // compile
  auto* comp = app.add_subcommand("compile", "Compile checker machines into tile sets");
  comp->require_subcommand(1);
  auto* c_layout = comp->add_subcommand("layout", "Canonical layout");
  c_layout->add_option("--machine", machine);
  c_layout->add_option("--n", n)->required();
  on(c_layout, [&] { return Output{dump(to_json(plan_layout(n, load_machine(machine))))}; });
  auto* c_small = comp->add_subcommand("smallest", "Smallest feasible zoom");
  c_small->add_option("--machine", machine);
  on(c_small, [&] {
    const auto s = smallest_feasible_n(load_machine(machine));
    if (!s) throw Error(ErrorCode::LayoutInfeasible, "no feasible zoom up to 256");
    return Output{std::to_string(*s) + "\n"};
  });
  auto* c_tiles = comp->add_subcommand("tiles", "Compile and summarise (or dump) the tile set");
  c_tiles->add_option("--machine", machine);
  c_tiles->add_option("--n", n)->required();
  c_tiles->add_flag("--full", full, "Dump the whole tile set");
  on(c_tiles, [&] {
    const CheckerMachine mc = load_machine(machine);
    const CompiledTileSet cts = compile(mc, plan_layout(n, mc));
    if (full) return Output{dump(to_json(cts.tiles))};
    return Output{dump({{"machine", mc.name},
                        {"n", cts.n()},
                        {"tiles", cts.tiles.size()},
                        {"colors", cts.tiles.color_count()},
                        {"layout", to_json(cts.layout)}})};
  });
  auto* c_asm = comp->add_subcommand("assemble", "Assemble the macro-tile for given side strings");
  c_asm->add_option("--machine", machine);
  c_asm->add_option("--n", n)->required();
  c_asm->add_option("--sides", sides, "left,right,top,bottom bit strings")->required();
  on(c_asm, [&] {
    const CheckerMachine mc = load_machine(machine);
    const CompiledTileSet cts = compile(mc, plan_layout(n, mc));
    const auto parts = split(sides, ',');
    if (parts.size() != 4) throw CLI::ValidationError("--sides", "expects four comma-separated bit strings");
    const MacroTile mt = assemble_macrotile(cts, SideBits{parse_bits(parts[0]), parse_bits(parts[1]), parse_bits(parts[2]), parse_bits(parts[3])});
    if (g.format == "ppm") return Output{render_ppm(mt.body)};
    return Output{dump({{"n", mt.n}, {"violations", check_patch(mt.body, cts.tiles).size()}, {"body", to_json(mt.body)}})};
  });
  auto* c_sim = comp->add_subcommand("simulate", "Check that the compiled set simulates rho");
  c_sim->add_option("--machine", machine);
  c_sim->add_option("--n", n)->required();
  set_opts(c_sim);
  on(c_sim, [&] {
    const CheckerMachine mc = load_machine(machine);
    const CompiledTileSet cts = compile(mc, plan_layout(n, mc));
    const auto r = simulate_check_compiled(cts, load_set(set_name, in_file));
    json j = report_json(r.report);
    j["total"] = r.total;
    j["failure"] = r.failure;
    j["splitting_checked"] = r.splitting_checked;
    return Output{dump(j)};
  });
  auto* c_sub = comp->add_subcommand("subst", "Compile a substitution rule into a letter tile set");
  c_sub->add_option("--rule", rule);
  c_sub->add_option("--it", it);
  on(c_sub, [&] {
    const SubstitutionRule s = load_rule(rule);
    const CompiledTileSet cts = compile_substitution(s, it);
    json proj = json::array();
    for (Letter a = 0; a < s.size(); ++a) {
      const LetterPattern p = project_letters(cts, letter_macrotile(cts, a));
      proj.push_back({{"letter", s.alphabet[static_cast<std::size_t>(a)]},
                      {"projection", to_json(p)},
                      {"matches_iterate", p == iterate(s, a, it)}});
    }
    return Output{dump({{"n", cts.n()}, {"tiles", cts.tiles.size()}, {"letters", proj}})};
  });
  auto* c_fp = comp->add_subcommand("fixedpoint", "Self-referential program for a transformer");
  c_fp->add_option("--pi", pi, "identity, printer, comment:X or const:PROGRAM");
  c_fp->add_option("--steps", steps);
  on(c_fp, [&] {
    const std::string p = fixed_point_program(pi);
    const ProgramRun r = run_program(p, steps);
    return Output{dump({{"program", p},
                        {"gettext_is_self", get_text(p) == p},
                        {"output", r.output},
                        {"steps", r.steps},
                        {"halted", r.halted},
                        {"exhausted", r.exhausted}})};
  });

  // subst
  auto* subst = app.add_subcommand("subst", "Substitutions and Thue-Morse");
  subst->require_subcommand(1);
  auto* lemma = subst->add_subcommand("lemma", "Check the shift-agreement lemma for all n up to --n");
  lemma->add_option("--n", n)->required();
  on(lemma, [&] {
    const auto bad = folklore_lemma_counterexample(n);
    if (!bad) return Output{"PASS\n"};
    return Output{"FAIL n=" + std::to_string(bad->first) + " u=" + std::to_string(bad->second) + "\n"};
  });
  auto* words = subst->add_subcommand("words", "Thue-Morse words a_n, b_n");
  words->add_option("--n", n)->required();
  on(words, [&] {
    const auto [a, b] = tm_words(n);
    return Output{dump({{"a", a}, {"b", b}})};
  });
  auto* iter = subst->add_subcommand("iterate", "s^n(letter)");
  iter->add_option("--rule", rule);
  iter->add_option("--letter", letter);
  iter->add_option("--n", n)->required();
  on(iter, [&] {
    const LetterPattern p = iterate(load_rule(rule), letter, n);
    if (g.format == "ppm") return Output{render_pattern_ppm(p)};
    return Output{dump(to_json(p))};
  });
  auto* aper = subst->add_subcommand("aperiodicity", "Mismatch fraction of the 2D Thue-Morse field under a shift");
  aper->add_option("--dx", dx);
  aper->add_option("--dy", dy);
  aper->add_option("--size", size);
  aper->add_flag("--direct", full, "Count cell by cell instead of the factorized formula");
  on(aper, [&] {
    const PeriodVector t(dx, dy);
    const Region win = square(size);
    if (!full) return Output{dump(mismatch_json(tm_aperiodicity(t, win)))};
    const Region dom{-size, -size, 3 * size, 3 * size};
    auto f = [](std::int64_t x, std::int64_t y) { return tm_cell(x, y); };
    return Output{dump(mismatch_json(aperiodicity_measure(f, dom, t, win, g.jobs)))};
  });
  auto* compat = subst->add_subcommand("compatible", "Search a preimage chain for a pattern");
  compat->add_option("--rule", rule);
  compat->add_option("--pattern", in_file, "Pattern JSON: list of rows")->required();
  compat->add_option("--depth", depth);
  on(compat, [&] {
    const json j = read_json(in_file);
    const auto rows = j.get<std::vector<std::vector<int>>>();
    LetterPattern p(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int r = 0; r < p.rows; ++r) {
      if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != p.cols) throw Error(ErrorCode::MalformedSpec, "ragged pattern");
      for (int c = 0; c < p.cols; ++c) p.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    const auto res = check_compatible(p, load_rule(rule), depth);
    json pre = json::array();
    for (const auto& x : res.preimages) pre.push_back(to_json(x));
    return Output{dump({{"compatible", res.compatible}, {"offsets", res.offsets}, {"preimages", pre}, {"explored", res.explored}})};
  });

  // rs
  auto* rs = app.add_subcommand("rs", "Reed-Solomon checksums over GF(2^t)");
  rs->require_subcommand(1);
  auto code_opts = [&](CLI::App* s) {
    s->add_option("--t", t_deg);
    s->add_option("--n", rs_n);
    s->add_option("--D", rs_d);
    s->add_option("--code", in_file, "Code descriptor JSON");
  };
  auto load_code = [&] {
    if (!in_file.empty()) return code_from_json(read_json(in_file));
    return make_code(build_field(t_deg), rs_n, rs_d);
  };
  auto* rs_sum = rs->add_subcommand("checksum", "Checksums of a hex value vector");
  code_opts(rs_sum);
  rs_sum->add_option("--values", values)->required();
  on(rs_sum, [&] {
    const RSCode code = load_code();
    return Output{to_hex(code.field, rs_stream_checksums(code, [&] {
                    std::vector<std::pair<Elem, Elem>> st;
                    const auto v = from_hex(code.field, values);
                    if (v.size() != code.points.size()) throw Error(ErrorCode::DimensionMismatch, "expected n values");
                    for (std::size_t i = 0; i < v.size(); ++i) st.emplace_back(code.points[i], v[i]);
                    return st;
                  }())) + "\n"};
  });
  auto* rs_dec = rs->add_subcommand("decode", "Recover erased values ('x' digits mark an erased element)");
  code_opts(rs_dec);
  rs_dec->add_option("--known", known)->required();
  rs_dec->add_option("--checksums", checks)->required();
  on(rs_dec, [&] {
    const RSCode code = load_code();
    const std::size_t width = 2 * static_cast<std::size_t>((code.field.bits() + 7) / 8);
    if (known.size() % width != 0) throw Error(ErrorCode::MalformedSpec, "--known length is not a multiple of the element width");
    std::vector<std::optional<Elem>> kv;
    for (std::size_t i = 0; i < known.size(); i += width) {
      const std::string e = known.substr(i, width);
      if (e.find_first_not_of("xX") == std::string::npos) kv.emplace_back();
      else kv.emplace_back(from_hex(code.field, e).front());
    }
    return Output{to_hex(code.field, rs_erasure_decode(code, kv, from_hex(code.field, checks))) + "\n"};
  });
  auto* rs_rt = rs->add_subcommand("roundtrip", "Random streaming and erasure round trips");
  code_opts(rs_rt);
  rs_rt->add_option("--trials", trials);
  on(rs_rt, [&] {
    const RSCode code = load_code();
    std::mt19937_64 rng(g.seed);
    for (int tr = 0; tr < trials; ++tr) {
      std::vector<Elem> v(code.points.size());
      for (auto& e : v) e = static_cast<Elem>(rng() % code.field.size());
      std::vector<std::pair<Elem, Elem>> st;
      for (std::size_t i = 0; i < v.size(); ++i) st.emplace_back(code.points[i], v[i]);
      const auto direct = rs_checksums(code, v);
      if (rs_stream_checksums(code, st) != direct) return Output{"FAIL stream trial " + std::to_string(tr) + "\n"};
      std::vector<std::optional<Elem>> kv(v.begin(), v.end());
      std::vector<std::size_t> idx(v.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      const std::size_t erase = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(code.D()));
      for (std::size_t i = 0; i < erase; ++i) kv[idx[i]].reset();
      if (rs_erasure_decode(code, kv, direct) != v) return Output{"FAIL decode trial " + std::to_string(tr) + "\n"};
    }
    return Output{"OK\n"};
  });

  // islands
  auto* isl = app.add_subcommand("islands", "Island decompositions of dirty sets");
  isl->require_subcommand(1);
  auto sched_opts = [&](CLI::App* s) {
    s->add_option("--mode", mode, "island, bi or correct");
    s->add_option("--ranks", ranks);
    s->add_option("--Q", q);
    s->add_option("--c", c_str);
  };
  auto dirty_opts = [&](CLI::App* s) {
    s->add_option("--in", in_file, "Dirty set JSON; otherwise sampled with --eps and --seed");
    s->add_option("--eps", eps);
    s->add_option("--size", size);
  };
  auto load_dirty = [&] {
    if (!in_file.empty()) return dirty_from_json(read_json(in_file));
    return sample_bernoulli(eps, square(size), g.seed);
  };
  auto* i_sample = isl->add_subcommand("sample", "Bernoulli dirty set");
  dirty_opts(i_sample);
  on(i_sample, [&] { return Output{dump(to_json(load_dirty()))}; });
  auto* i_clean = isl->add_subcommand("clean", "Rank-by-rank decomposition");
  dirty_opts(i_clean);
  sched_opts(i_clean);
  i_clean->add_option("--policy", policy, "windowed or finite")->check(CLI::IsMember({"windowed", "finite"}));
  on(i_clean, [&] {
    const DirtySet e = load_dirty();
    const Schedule s = make_schedule(mode, ranks, q, c_str);
    const Decomposition d = clean(e, s, policy == "finite" ? BoundaryPolicy::Finite : BoundaryPolicy::Windowed);
    json j = to_json(d);
    j["sound"] = check_decomposition(e, s, d).ok;
    return Output{dump(j)};
  });
  auto* i_mc = isl->add_subcommand("montecarlo", "Seeded sparsity experiment");
  sched_opts(i_mc);
  i_mc->add_option("--eps", eps);
  i_mc->add_option("--size", size);
  i_mc->add_option("--trials", trials);
  on(i_mc, [&] {
    const auto st = monte_carlo_sparsity(eps, make_schedule(mode, ranks, q, c_str), square(size), trials, g.seed, g.jobs);
    if (g.format == "csv") return Output{stats_csv(st)};
    json rows = json::array();
    for (const auto& t : st.trials)
      rows.push_back({{"trial", t.trial}, {"seed", t.seed}, {"cleaned", t.cleaned}, {"max_rank", t.max_rank}, {"survivors", t.survivors}});
    json by = json::array();
    for (int r = 0; r <= ranks; ++r) by.push_back(st.cleaned_by(r));
    return Output{dump({{"trials", rows}, {"survival", st.survival}, {"cleaned_by_rank", by}})};
  });
  auto* i_den = isl->add_subcommand("density", "Covered fraction of gamma-neighbourhoods");
  dirty_opts(i_den);
  sched_opts(i_den);
  i_den->add_option("--gamma", gamma_list, "Comma-separated gamma per rank (default alpha)");
  i_den->add_flag("--extended", extended);
  on(i_den, [&] {
    const Schedule s = make_schedule(mode, ranks, q, c_str);
    const Decomposition d = clean(load_dirty(), s, BoundaryPolicy::Finite);
    std::vector<std::int64_t> gam;
    if (gamma_list.empty()) {
      for (int r = 1; r <= s.max_rank(); ++r) gam.push_back(s.gamma_at(r));
    } else {
      for (const auto& x : split(gamma_list, ',')) gam.push_back(std::stoll(x));
    }
    const std::size_t cells = neighborhoods_cells(d, gam, extended);
    return Output{dump({{"cells", cells}, {"density", static_cast<double>(cells) / static_cast<double>(d.window.cell_count())}})};
  });
  auto* i_sched = isl->add_subcommand("schedule", "Validate a schedule");
  sched_opts(i_sched);
  on(i_sched, [&] {
    const Schedule s = make_schedule(mode, ranks, q, c_str);
    const auto rep = validate_schedule(s);
    json rows = json::array();
    for (const auto& r : rep.ranks)
      rows.push_back({{"k", r.k},
                      {"alpha", big(s.alpha[static_cast<std::size_t>(r.k - 1)])},
                      {"beta", big(s.beta[static_cast<std::size_t>(r.k - 1)])},
                      {"lhs", big(r.lhs)},
                      {"inequality", r.inequality},
                      {"growth", r.growth ? json(*r.growth) : json(nullptr)},
                      {"growth_ok", r.growth_ok}});
    return Output{dump({{"ok", rep.ok()}, {"ordered", rep.ordered}, {"inequalities", rep.inequalities}, {"growth", rep.growth}, {"ranks", rows}})};
  });

  // patch
  auto* patch = app.add_subcommand("patch", "Hole filling and error correction");
  patch->require_subcommand(1);
  auto patch_out = [&](const PatchResult& r, const TileSet& ts) {
    if (g.format == "ppm") return Output{mask_ppm(r.tiling.region, r.changed)};
    return Output{dump({{"changed", r.changed_count},
                        {"changed_fraction", r.changed_fraction()},
                        {"max_rank", r.max_rank},
                        {"violations", check_patch(r.tiling, ts).size()},
                        {"tiling", to_json(r.tiling)}})};
  };
  auto* p_perc = patch->add_subcommand("percolation", "Patch a black/white tiling with holes at a dirty set");
  dirty_opts(p_perc);
  sched_opts(p_perc);
  p_perc->add_option("--tiling", tiling_file, "Input tiling; default all white with holes at the dirty set");
  on(p_perc, [&] {
    const DirtySet e = load_dirty();
    PatchTiling t(e.window, 1);
    if (!tiling_file.empty()) t = patch_from_json(read_json(tiling_file));
    for (const auto& p : e.points) t.at(p.x, p.y) = kHole;
    return patch_out(percolation_patch(e, t, make_schedule(mode, ranks, q, c_str)), chessboard());
  });
  auto* p_holes = patch->add_subcommand("holes", "Fill one or two rectangular holes");
  set_opts(p_holes);
  p_holes->add_option("--tiling", tiling_file)->required();
  p_holes->add_option("--hole", holes_spec, "x,y,w,h[;x,y,w,h]")->required();
  on(p_holes, [&] {
    const TileSet ts = load_set(set_name, in_file);
    HoleSpec spec;
    for (const auto& part : split(holes_spec, ';')) {
      const auto f = split(part, ',');
      if (f.size() != 4) throw CLI::ValidationError("--hole", "expects x,y,w,h");
      spec.holes.push_back(Region{std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3])});
    }
    PatchTiling t = patch_from_json(read_json(tiling_file));
    for (const auto& hr : spec.holes)
      for (int y = hr.y0; y < hr.y0 + hr.height; ++y)
        for (int x = hr.x0; x < hr.x0 + hr.width; ++x)
          if (t.region.contains(x, y)) t.at(x, y) = kHole;
    const PatchTiling out = fill_hole(t, ts, spec);
    if (g.format == "ppm") return Output{render_ppm(out)};
    return Output{dump({{"changed", std::count(diff_mask(t, out).begin(), diff_mask(t, out).end(), 1)}, {"tiling", to_json(out)}})};
  });
  auto* p_rob = patch->add_subcommand("robust", "Robustify a tile set and test robustness");
  set_opts(p_rob);
  p_rob->add_option("--r", radius);
  on(p_rob, [&] {
    const RobustifiedSet r = robustify(load_set(set_name, in_file), radius);
    return Output{dump({{"base", r.base.name}, {"r", r.r}, {"tiles", r.derived.size()}, {"robust", check_r_robust(r)}, {"c1", r.c1}, {"c2", r.c2}})};
  });
  auto* p_cor = patch->add_subcommand("correct", "Heal random holes in a robustified tiling");
  set_opts(p_cor);
  p_cor->add_option("--r", radius);
  p_cor->add_option("--eps", eps);
  p_cor->add_option("--size", size);
  p_cor->add_option("--ranks", ranks);
  on(p_cor, [&] {
    const RobustifiedSet r = robustify(load_set(set_name, in_file), radius);
    const Region win = square(size);
    const PatchTiling truth = robust_tiling(r, win);
    const DirtySet e = sample_bernoulli(eps, win, g.seed);
    PatchTiling t = truth;
    for (const auto& p : e.points) t.at(p.x, p.y) = kHole;
    const PatchResult res = correct_errors(e, t, correction_schedule(ranks, r.c2), r);
    Output o = patch_out(res, r.derived);
    if (g.format != "ppm") {
      json j = json::parse(o.bytes);
      j["dirty"] = e.points.size();
      j["restored"] = res.tiling == truth;
      j.erase("tiling");
      o.bytes = dump(j);
    }
    return o;
  });

  // zoom
  auto* zoom = app.add_subcommand("zoom", "Variable zoom arithmetic");
  zoom->require_subcommand(1);
  auto zoom_opts = [&](CLI::App* s) {
    s->add_option("--Q", q);
    s->add_option("--c", c_str);
    s->add_option("--fixed", fixed_n, "Constant zoom instead of Q^floor(c^k)");
  };
  auto load_zoom = [&] { return fixed_n > 0 ? ZoomSchedule::fixed(fixed_n) : ZoomSchedule::powers(q, c_str); };
  auto* z_val = zoom->add_subcommand("values", "N_k and L_k for k = 0..K");
  zoom_opts(z_val);
  z_val->add_option("--k", k);
  on(z_val, [&] {
    const ZoomSchedule z = load_zoom();
    json rows = json::array();
    for (int i = 0; i <= k; ++i) rows.push_back({{"k", i}, {"N", big(z.N(i))}, {"L", big(z.L(i))}});
    return Output{dump({{"schedule", z.describe()}, {"rows", rows}})};
  });
  auto* z_del = zoom->add_subcommand("delegate", "Delegated bit, zone and check group of a macro-tile");
  zoom_opts(z_del);
  z_del->add_option("--level", level);
  z_del->add_option("--column", column);
  z_del->add_option("--y", ypos);
  on(z_del, [&] {
    const ZoomSchedule z = load_zoom();
    const MacroCoord mc = macro_coord(z, level, column, ypos);
    const Interval zone = responsibility_zone(z, level, column);
    json j = {{"zone", {big(zone.lo), big(zone.hi)}}};
    if (const auto b = delegated_bit(z, mc)) {
      const Interval grp = check_group(z, mc);
      j["bit"] = big(*b);
      j["group"] = {big(grp.lo), big(grp.hi)};
    } else {
      j["bit"] = nullptr;
    }
    return Output{dump(j)};
  });
  auto* z_bud = zoom->add_subcommand("budget", "Consciousness field sizes at level k");
  zoom_opts(z_bud);
  z_bud->add_option("--k", k);
  z_bud->add_option("--D", d_count);
  z_bud->add_option("--alphabet", alphabet);
  on(z_bud, [&] {
    const FieldBudget fb = consciousness_budget(load_zoom(), k, d_count, alphabet);
    return Output{dump({{"A", fb.a}, {"B", fb.b}, {"C", fb.c}, {"D", fb.d}, {"E", fb.e}, {"F", fb.f},
                        {"total", fb.total()}, {"budget", big(fb.budget)}, {"fits", fb.fits()}})};
  });
  auto* z_scan = zoom->add_subcommand("scan", "Scan the Thue-Morse word a_n for forbidden factors");
  z_scan->add_option("--n", n)->required();
  z_scan->add_option("--forbid", values, "Comma-separated factors")->required();
  on(z_scan, [&] {
    const auto v = scan_forbidden(tm_words(n).first, explicit_source(split(values, ',')), 1 << 20);
    json rows = json::array();
    for (const auto& f : v) rows.push_back({f.offset, f.factor});
    return Output{dump({{"violations", rows}})};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Output result = action();
    if (g.out.empty()) {
      std::cout << result.bytes << std::flush;
    } else {
      std::ofstream f(g.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + g.out);
      f << result.bytes;
    }
    // Manifest: argv without --jobs, which never affects results.
    json args = json::array();
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--jobs") {
        ++i;
        continue;
      }
      if (a.rfind("--jobs=", 0) == 0) continue;
      args.push_back(a);
    }
    json inputs = json::object();
    for (const auto& [path, hash] : g_inputs) inputs[path] = hash;
    const json manifest = {{"tool", "tileforge"},
                           {"version", kVersion},
                           {"subcommand", command},
                           {"args", args},
                           {"seed", g.seed},
                           {"format", g.format},
                           {"inputs", inputs},
                           {"output_fnv1a64", hex64(fnv1a64(result.bytes))}};
    if (g.out.empty()) {
      std::cerr << manifest.dump() << "\n";
    } else {
      std::ofstream mf(g.out + ".manifest.json", std::ios::binary);
      mf << manifest.dump(2) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
