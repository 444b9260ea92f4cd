#include "tileforge/compiler/layout.hpp"

#include <algorithm>
#include <set>

namespace tileforge {

ZoneSize zone_size(const CheckerMachine& m, int step_cap) {
  m.validate();
  const int k = m.input_bits;
  const int base = 4 * k + static_cast<int>(m.program.size());
  if (4 * k > 20) throw Error(ErrorCode::LayoutInfeasible, "side width too large to bound the zone by enumeration");
  const int width = base + std::min(step_cap, 4096) + 1;
  int max_steps = 0, max_col = 0;
  for (const SideBits& s : all_side_inputs(k)) {
    MachineRun run = run_machine(m, initial_track(m, s, width), width, step_cap);
    if (run.outcome == RunOutcome::OutOfTime || run.outcome == RunOutcome::OutOfSpace)
      throw Error(ErrorCode::LayoutInfeasible, "machine does not halt within " + std::to_string(step_cap) +
                                                   " steps and " + std::to_string(width) + " cells");
    if (run.outcome != RunOutcome::Accepted) continue;
    max_steps = std::max(max_steps, run.steps);
    max_col = std::max(max_col, run.max_head);
  }
  return ZoneSize{base + std::max(4, max_col + 1 - base), max_steps + 1};
}

namespace {

const char* side_name(Side s) {
  switch (s) {
    case Side::Left: return "L";
    case Side::Right: return "R";
    case Side::Top: return "T";
    case Side::Bottom: return "B";
  }
  return "?";
}

Side parse_side(const std::string& s) {
  if (s == "L") return Side::Left;
  if (s == "R") return Side::Right;
  if (s == "T") return Side::Top;
  if (s == "B") return Side::Bottom;
  throw Error(ErrorCode::MalformedSpec, "side must be L, R, T or B");
}

// Straight segments between consecutive waypoints, without repeating corners.
std::vector<Cell> trace(const std::vector<Cell>& waypoints) {
  std::vector<Cell> out{waypoints.front()};
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    auto [x, y] = out.back();
    const auto [tx, ty] = waypoints[i];
    if (x != tx && y != ty) throw Error(ErrorCode::LayoutInfeasible, "internal: diagonal wire segment");
    while (x != tx || y != ty) {
      x += (tx > x) - (tx < x);
      y += (ty > y) - (ty < y);
      out.emplace_back(x, y);
    }
  }
  return out;
}

Cell entry_cell(const Layout& l, Side side, int i) {
  const Zone& z = *l.zone;
  const int k = l.k;
  switch (side) {
    case Side::Left: return {z.x0 + InputColumns::left(k, i), z.y0 - 1};
    case Side::Bottom: return {z.x0 + InputColumns::bottom(k, i), z.y0 - 1};
    case Side::Right: return {z.x0 + InputColumns::right(k, i), z.y0 - 1};
    case Side::Top: return {z.x0 + InputColumns::top(k, i), z.y0 + z.h};
  }
  return {};
}

Cell start_cell(const Layout& l, Side side, int i) {
  const int c = l.center() + i;
  switch (side) {
    case Side::Left: return {0, c};
    case Side::Right: return {l.n - 1, c};
    case Side::Bottom: return {c, 0};
    case Side::Top: return {c, l.n - 1};
  }
  return {};
}

}  // namespace

void validate_layout(const Layout& l) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::LayoutInfeasible, why); };
  if (l.k < 0 || l.k > l.n) fail("side width exceeds N");
  if (!l.zone) {
    if (l.k != 0 || !l.wires.empty()) fail("zone-less layouts carry no wires");
    return;
  }
  const Zone& z = *l.zone;
  if (z.w < 4 * l.k + l.program_length) fail("zone narrower than inputs plus program");
  if (z.x0 < 1 || z.y0 < 1 || z.x0 + z.w > l.n - 1 || z.y0 + z.h > l.n - 1)
    fail("zone " + std::to_string(z.w) + "x" + std::to_string(z.h) + " does not fit strictly inside N=" +
         std::to_string(l.n));
  if (static_cast<int>(l.wires.size()) != 4 * l.k) fail("expected 4k wires");

  std::set<Cell> used;
  std::set<int> below_inputs, above_inputs;
  for (int i = 0; i < l.k; ++i) {
    below_inputs.insert(z.x0 + InputColumns::left(l.k, i));
    below_inputs.insert(z.x0 + InputColumns::bottom(l.k, i));
    below_inputs.insert(z.x0 + InputColumns::right(l.k, i));
    above_inputs.insert(z.x0 + InputColumns::top(l.k, i));
  }
  for (const WirePath& w : l.wires) {
    if (w.cells.empty()) fail("empty wire");
    if (w.cells.front() != start_cell(l, w.side, w.bit)) fail("wire does not start at its centered border cell");
    if (w.cells.back() != entry_cell(l, w.side, w.bit)) fail("wire does not end at its zone entry");
    for (std::size_t i = 0; i < w.cells.size(); ++i) {
      const auto [x, y] = w.cells[i];
      if (i > 0) {
        const auto [px, py] = w.cells[i - 1];
        if (std::abs(px - x) + std::abs(py - y) != 1) fail("wire path is not connected");
        if (x < 1 || y < 1 || x > l.n - 2 || y > l.n - 2) fail("wire touches the macro-tile border");
      }
      if (z.contains(x, y)) fail("wire enters the computation zone");
      if (!used.insert({x, y}).second)
        fail("wires overlap at (" + std::to_string(x) + "," + std::to_string(y) + ")");
      if (i + 1 < w.cells.size()) {
        // Cells hugging the zone must not sit under/over another wire's input column.
        if (y == z.y0 - 1 && below_inputs.count(x)) fail("wire crosses below an input column");
        if (y == z.y0 + z.h && above_inputs.count(x)) fail("wire crosses above an input column");
      }
    }
  }
}

Layout plan_layout(int n, int k, const CheckerMachine& m) {
  if (k != m.input_bits) throw Error(ErrorCode::InvalidArgument, "k does not match the machine's input width");
  return plan_layout(n, m);
}

Layout plan_layout(int n, const CheckerMachine& m) {
  m.validate();
  const int k = m.input_bits;
  if (n < 1) throw Error(ErrorCode::LayoutInfeasible, "N must be positive");
  if (k > n) throw Error(ErrorCode::LayoutInfeasible, "side width exceeds N");
  Layout l;
  l.n = n;
  l.k = k;
  l.program_length = static_cast<int>(m.program.size());
  if (k == 0 && m.program.empty() && m.start == m.accept) return l;

  const ZoneSize zs = zone_size(m);
  if (zs.w > n - 2 || zs.h > n - 2) throw Error(ErrorCode::LayoutInfeasible, "zone does not fit in N=" + std::to_string(n));
  Zone z{(n - zs.w) / 2, (n - zs.h) / 2, zs.w, zs.h};
  l.zone = z;
  const int c0 = l.center();
  auto col = [&](Side s, int i) { return entry_cell(l, s, i).first; };

  for (int i = 0; i < k; ++i) {
    const int row = z.y0 - k + i;
    l.wires.push_back({Side::Left, i,
                       trace({{0, c0 + i}, {1 + i, c0 + i}, {1 + i, row}, {col(Side::Left, i), row},
                              {col(Side::Left, i), z.y0 - 1}})});
  }
  for (int i = 0; i < k; ++i) {
    const bool jog_left = col(Side::Bottom, i) < c0 + i;
    const int row = jog_left ? z.y0 - 2 * k + i : z.y0 - k - 1 - i;
    l.wires.push_back({Side::Bottom, i,
                       trace({{c0 + i, 0}, {c0 + i, row}, {col(Side::Bottom, i), row}, {col(Side::Bottom, i), z.y0 - 1}})});
  }
  for (int i = 0; i < k; ++i) {
    const bool jog_left = col(Side::Top, i) < c0 + i;
    const int row = jog_left ? z.y0 + z.h + (k - 1 - i) : z.y0 + z.h + i;
    l.wires.push_back({Side::Top, i,
                       trace({{c0 + i, n - 1}, {c0 + i, row}, {col(Side::Top, i), row}, {col(Side::Top, i), z.y0 + z.h}})});
  }
  for (int i = 0; i < k; ++i) {
    const int row = z.y0 - k + i;
    l.wires.push_back({Side::Right, i,
                       trace({{n - 1, c0 + i}, {n - 2 - i, c0 + i}, {n - 2 - i, row}, {col(Side::Right, i), row},
                              {col(Side::Right, i), z.y0 - 1}})});
  }
  validate_layout(l);
  return l;
}

std::optional<int> smallest_feasible_n(const CheckerMachine& m, int n_max) {
  for (int n = 1; n <= n_max; ++n) {
    try {
      plan_layout(n, m);
      return n;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LayoutInfeasible) throw;
    }
  }
  return std::nullopt;
}

nlohmann::json to_json(const Layout& l) {
  nlohmann::json j;
  j["N"] = l.n;
  j["k"] = l.k;
  j["program_length"] = l.program_length;
  if (l.zone) j["zone"] = {{"x0", l.zone->x0}, {"y0", l.zone->y0}, {"w", l.zone->w}, {"h", l.zone->h}};
  else j["zone"] = nullptr;
  j["wires"] = nlohmann::json::array();
  for (const auto& w : l.wires) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& [x, y] : w.cells) path.push_back({x, y});
    j["wires"].push_back({{"side", side_name(w.side)}, {"bit", w.bit}, {"path", path}});
  }
  return j;
}

Layout layout_from_json(const nlohmann::json& j) {
  Layout l;
  try {
    l.n = j.at("N").get<int>();
    l.k = j.at("k").get<int>();
    l.program_length = j.value("program_length", 0);
    if (!j.at("zone").is_null()) {
      const auto& z = j["zone"];
      l.zone = Zone{z.at("x0").get<int>(), z.at("y0").get<int>(), z.at("w").get<int>(), z.at("h").get<int>()};
    }
    for (const auto& w : j.at("wires")) {
      WirePath p{parse_side(w.at("side").get<std::string>()), w.at("bit").get<int>(), {}};
      for (const auto& c : w.at("path")) p.cells.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
      l.wires.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, e.what());
  }
  validate_layout(l);
  return l;
}

}  // namespace tileforge
