#include "tileforge/compiler/compile.hpp"

#include <set>

namespace tileforge {

namespace {

std::string cell_code(const ZoneCell& c) {
  if (c.border) return "#";
  return std::to_string(c.ro) + "." + std::to_string(c.work) + "." + (c.head < 0 ? "_" : std::to_string(c.head));
}

Side toward(const Cell& from, const Cell& to) {
  if (to.first > from.first) return Side::Right;
  if (to.first < from.first) return Side::Left;
  if (to.second > from.second) return Side::Top;
  return Side::Bottom;
}

struct SupplementaryColors {
  std::string left = "N", right = "N", top = "N", bottom = "N";
  std::string& at(Side s) {
    switch (s) {
      case Side::Left: return left;
      case Side::Right: return right;
      case Side::Top: return top;
      case Side::Bottom: return bottom;
    }
    return left;
  }
};

/// Next cell of the time-space diagram, or nullopt if no valid successor
/// exists (undefined transition, or the head would leave the zone).
std::optional<ZoneCell> successor(const CheckerMachine& m, const ZoneCell w[3], int zx, int width) {
  const ZoneCell& c = w[1];
  ZoneCell next = c;
  if (c.head >= 0) {
    if (c.head == m.accept) return next;
    auto it = m.delta.find({c.head, c.ro, c.work});
    if (it == m.delta.end()) return std::nullopt;
    const Transition& tr = it->second;
    if (tr.move == Move::Left && zx == 0) return std::nullopt;
    if (tr.move == Move::Right && zx == width - 1) return std::nullopt;
    next.work = tr.write;
    next.head = tr.move == Move::Stay ? tr.next : -1;
    return next;
  }
  for (int side : {0, 2}) {
    const ZoneCell& nb = w[side];
    if (nb.border || nb.head < 0 || nb.head == m.accept) continue;
    auto it = m.delta.find({nb.head, nb.ro, nb.work});
    if (it == m.delta.end()) continue;
    const Move toward_center = side == 0 ? Move::Right : Move::Left;
    if (it->second.move == toward_center) next.head = it->second.next;
  }
  return next;
}

class Emitter {
 public:
  explicit Emitter(CompiledTileSet& cts) : cts_(cts) {}

  void emit(const TileInfo& info, const SupplementaryColors& supp) {
    const int n = cts_.layout.n;
    auto coord = [n](int x, int y) {
      return "(" + std::to_string(((x % n) + n) % n) + "," + std::to_string(((y % n) + n) % n) + ")";
    };
    auto letter = [&](bool internal) {
      if (info.father < 0) return std::string();
      return internal ? "|f" + std::to_string(info.father) : std::string("|-");
    };
    const int x = info.x, y = info.y;
    Tile t;
    t.left = color(coord(x, y) + "|" + supp.left + letter(x > 0));
    t.right = color(coord(x + 1, y) + "|" + supp.right + letter(x < n - 1));
    t.bottom = color(coord(x, y) + "|" + supp.bottom + letter(y > 0));
    t.top = color(coord(x, y + 1) + "|" + supp.top + letter(y < n - 1));
    t.label = cts_.key(info);
    const TileId id = cts_.tiles.size();
    if (!cts_.index.emplace(t.label, id).second)
      throw Error(ErrorCode::DuplicateTile, "internal: tile content emitted twice: " + t.label);
    cts_.tiles.tiles.push_back(std::move(t));
    cts_.decode.push_back(info);
  }

 private:
  ColorId color(const std::string& s) {
    auto [it, fresh] = ids_.emplace(s, cts_.tiles.color_count());
    if (fresh) cts_.tiles.colors.push_back(s);
    return it->second;
  }

  CompiledTileSet& cts_;
  std::map<std::string, ColorId> ids_;
};

struct ZoneColumns {
  std::set<int> below;  // fed from a wire entering under the zone
  std::set<int> above;
};

ZoneColumns zone_columns(int k) {
  ZoneColumns zc;
  for (int i = 0; i < k; ++i) {
    zc.below.insert(InputColumns::left(k, i));
    zc.below.insert(InputColumns::bottom(k, i));
    zc.below.insert(InputColumns::right(k, i));
    zc.above.insert(InputColumns::top(k, i));
  }
  return zc;
}

// Candidate zone cells at column zx, time t.
std::vector<ZoneCell> cell_domain(const CheckerMachine& m, const Zone& z, int zx, int t) {
  if (zx < 0 || zx >= z.w) return {ZoneCell::outside()};
  const int k = m.input_bits;
  const int p = static_cast<int>(m.program.size());
  std::vector<int> ro;
  if (zx < 4 * k) ro = {0, 1};
  else if (zx < 4 * k + p) ro = {m.program[static_cast<std::size_t>(zx - 4 * k)]};
  else ro = {kBlank};
  std::vector<int> heads{-1};
  if (t == 0) {
    if (zx == 0) heads = {m.start};
  } else if (zx <= t) {
    for (int q = 0; q < m.state_count(); ++q) heads.push_back(q);
  }
  const int works = t == 0 ? 1 : m.work_symbols;
  std::vector<ZoneCell> out;
  for (int r : ro)
    for (int w = 0; w < works; ++w)
      for (int h : heads) out.push_back(ZoneCell{r, w, h, false});
  return out;
}

void emit_all(CompiledTileSet& cts) {
  const Layout& l = cts.layout;
  const CheckerMachine& m = cts.machine;
  const int n = l.n;
  Emitter em(cts);

  std::map<Cell, std::pair<int, int>> wire_at;  // cell -> (wire, position)
  for (int w = 0; w < static_cast<int>(l.wires.size()); ++w)
    for (int p = 0; p < static_cast<int>(l.wires[static_cast<std::size_t>(w)].cells.size()); ++p)
      wire_at[l.wires[static_cast<std::size_t>(w)].cells[static_cast<std::size_t>(p)]] = {w, p};

  std::vector<int> fathers{-1};
  std::vector<LetterPattern> blocks;
  if (cts.letters) {
    fathers.clear();
    for (Letter a = 0; a < cts.letters->rule.size(); ++a) {
      fathers.push_back(a);
      blocks.push_back(iterate(cts.letters->rule, a, cts.letters->iterations));
    }
  }
  const ZoneColumns zc = zone_columns(l.k);

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      for (int f : fathers) {
        TileInfo base;
        base.x = x;
        base.y = y;
        base.father = f;
        if (f >= 0) base.own = blocks[static_cast<std::size_t>(f)].at(n - 1 - y, x);

        if (auto it = wire_at.find({x, y}); it != wire_at.end()) {
          const auto [w, p] = it->second;
          const WirePath& wire = l.wires[static_cast<std::size_t>(w)];
          const Side entry = p == 0 ? wire.side : toward({x, y}, wire.cells[static_cast<std::size_t>(p - 1)]);
          const bool last = p + 1 == static_cast<int>(wire.cells.size());
          const Side exit = last ? (wire.side == Side::Top ? Side::Bottom : Side::Top)
                                 : toward({x, y}, wire.cells[static_cast<std::size_t>(p + 1)]);
          for (int b = 0; b < 2; ++b) {
            if (f >= 0 && wire.bit >= cts.letters->base_bits && ((f >> (wire.bit - cts.letters->base_bits)) & 1) != b)
              continue;
            TileInfo info = base;
            info.layer = CellLayer::Wire;
            info.wire = w;
            info.bit = b;
            SupplementaryColors s;
            s.at(entry) = s.at(exit) = "b" + std::to_string(b);
            em.emit(info, s);
          }
          continue;
        }

        if (l.zone && l.zone->contains(x, y)) {
          const Zone& z = *l.zone;
          const int zx = x - z.x0, t = y - z.y0;
          const auto dl = cell_domain(m, z, zx - 1, t), dc = cell_domain(m, z, zx, t), dr = cell_domain(m, z, zx + 1, t);
          for (const ZoneCell& a : dl)
            for (const ZoneCell& c : dc)
              for (const ZoneCell& r : dr) {
                if ((a.head >= 0) + (c.head >= 0) + (r.head >= 0) > 1) continue;
                TileInfo info = base;
                info.layer = CellLayer::Zone;
                info.zx = zx;
                info.zt = t;
                info.window[0] = a;
                info.window[1] = c;
                info.window[2] = r;
                SupplementaryColors s;
                if (zx > 0) s.left = "p" + cell_code(a) + "/" + cell_code(c);
                if (zx < z.w - 1) s.right = "p" + cell_code(c) + "/" + cell_code(r);
                if (t == 0) {
                  if (zc.below.count(zx)) s.bottom = "b" + std::to_string(c.ro);
                } else {
                  s.bottom = "c" + cell_code(c);
                }
                if (t == z.h - 1) {
                  if (c.head >= 0 && c.head != m.accept) continue;
                  if (zc.above.count(zx)) s.top = "b" + std::to_string(c.ro);
                } else {
                  auto next = successor(m, info.window, zx, z.w);
                  if (!next) continue;
                  s.top = "c" + cell_code(*next);
                }
                em.emit(info, s);
              }
          continue;
        }

        em.emit(base, SupplementaryColors{});
      }
    }
  }
}

}  // namespace

std::string CompiledTileSet::key(const TileInfo& info) const {
  std::string k = std::to_string(info.x) + "," + std::to_string(info.y) + ":";
  switch (info.layer) {
    case CellLayer::Inert: k += "I"; break;
    case CellLayer::Wire: k += "W" + std::to_string(info.wire) + "=" + std::to_string(info.bit); break;
    case CellLayer::Zone:
      k += "Z" + cell_code(info.window[0]) + "," + cell_code(info.window[1]) + "," + cell_code(info.window[2]);
      break;
  }
  if (info.father >= 0) k += ":f" + std::to_string(info.father);
  return k;
}

TileId CompiledTileSet::encode(const TileInfo& info) const {
  auto it = index.find(key(info));
  if (it == index.end()) throw Error(ErrorCode::OutOfDomain, "no compiled tile for " + key(info));
  return it->second;
}

CompiledTileSet compile(const CheckerMachine& m, const Layout& layout) { return compile(m, layout, m.letters); }

CompiledTileSet compile(const CheckerMachine& m, const Layout& layout, const std::optional<LetterLayer>& letters) {
  m.validate();
  validate_layout(layout);
  if (layout.k != m.input_bits) throw Error(ErrorCode::LayoutInfeasible, "layout planned for a different side width");
  if (layout.program_length != static_cast<int>(m.program.size()))
    throw Error(ErrorCode::LayoutInfeasible, "layout planned for a different program length");
  if (!layout.zone && !(m.start == m.accept && m.input_bits == 0))
    throw Error(ErrorCode::LayoutInfeasible, "machine needs a computation zone");
  if (layout.zone) {
    const ZoneSize need = zone_size(m);
    if (layout.zone->w < need.w || layout.zone->h < need.h)
      throw Error(ErrorCode::LayoutInfeasible, "zone smaller than the machine needs");
  }
  if (letters) {
    letters->rule.validate();
    int size = 1;
    for (int i = 0; i < letters->iterations; ++i) size *= letters->rule.m;
    if (size != layout.n) throw Error(ErrorCode::ZoomMismatch, "N differs from m^iterations");
  }
  CompiledTileSet cts;
  cts.machine = m;
  cts.layout = layout;
  cts.letters = letters;
  cts.tiles.name = "compiled(" + m.name + ",N=" + std::to_string(layout.n) + ")";
  emit_all(cts);
  return cts;
}

MacroTile assemble_macrotile(const CompiledTileSet& cts, const SideBits& sides) {
  const Layout& l = cts.layout;
  const CheckerMachine& m = cts.machine;
  const int n = l.n;
  for (const auto* v : {&sides.left, &sides.right, &sides.top, &sides.bottom})
    if (static_cast<int>(v->size()) != l.k)
      throw Error(ErrorCode::DimensionMismatch, "side strings must have length " + std::to_string(l.k));

  std::vector<MachineRow> rows;
  std::vector<int> track;
  if (l.zone) {
    const Zone& z = *l.zone;
    track = initial_track(m, sides, z.w);
    MachineRun run = run_machine(m, track, z.w, z.h - 1, true);
    switch (run.outcome) {
      case RunOutcome::Rejected: throw Error(ErrorCode::RejectedByProgram, "machine rejects the side inputs");
      case RunOutcome::OutOfSpace: throw Error(ErrorCode::TimeBudgetExceeded, "machine needs more zone width");
      case RunOutcome::OutOfTime: throw Error(ErrorCode::TimeBudgetExceeded, "machine runs past the zone height");
      case RunOutcome::Accepted: break;
    }
    rows = std::move(run.trace);
    while (static_cast<int>(rows.size()) < z.h) rows.push_back(rows.back());
  } else if (m.start != m.accept) {
    throw Error(ErrorCode::RejectedByProgram, "machine without zone does not accept");
  }

  int father = -1;
  if (cts.letters) {
    if (cts.letters->base_bits + cts.letters->letter_bits > l.k)
      throw Error(ErrorCode::InvalidArgument, "letter-only sets are assembled with letter_macrotile");
    const int base = cts.letters->base_bits, bits = cts.letters->letter_bits;
    auto field = [&](const std::vector<int>& v) {
      int a = 0;
      for (int i = 0; i < bits; ++i) a |= v[static_cast<std::size_t>(base + i)] << i;
      return a;
    };
    father = field(sides.left);
    if (field(sides.right) != father || field(sides.top) != father || field(sides.bottom) != father ||
        father >= cts.letters->rule.size())
      throw Error(ErrorCode::RejectedByProgram, "letter fields disagree or name no letter");
  }

  std::map<Cell, std::pair<int, int>> wire_at;
  for (int w = 0; w < static_cast<int>(l.wires.size()); ++w)
    for (int p = 0; p < static_cast<int>(l.wires[static_cast<std::size_t>(w)].cells.size()); ++p)
      wire_at[l.wires[static_cast<std::size_t>(w)].cells[static_cast<std::size_t>(p)]] = {w, p};
  auto side_bit = [&](const WirePath& w) {
    const auto& v = w.side == Side::Left ? sides.left
                    : w.side == Side::Right ? sides.right
                    : w.side == Side::Top ? sides.top
                                          : sides.bottom;
    return v[static_cast<std::size_t>(w.bit)];
  };
  auto zone_cell = [&](int zx, int t) {
    if (zx < 0 || zx >= l.zone->w) return ZoneCell::outside();
    const MachineRow& r = rows[static_cast<std::size_t>(t)];
    return ZoneCell{track[static_cast<std::size_t>(zx)], r.work[static_cast<std::size_t>(zx)], r.head == zx ? r.state : -1,
                    false};
  };

  MacroTile mt{n, PatchTiling(Region{0, 0, n, n})};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      TileInfo info;
      info.x = x;
      info.y = y;
      info.father = father;
      if (auto it = wire_at.find({x, y}); it != wire_at.end()) {
        info.layer = CellLayer::Wire;
        info.wire = it->second.first;
        info.bit = side_bit(l.wires[static_cast<std::size_t>(info.wire)]);
      } else if (l.zone && l.zone->contains(x, y)) {
        info.layer = CellLayer::Zone;
        info.zx = x - l.zone->x0;
        info.zt = y - l.zone->y0;
        for (int d = 0; d < 3; ++d) info.window[d] = zone_cell(info.zx - 1 + d, info.zt);
      }
      mt.body.at(x, y) = cts.encode(info);
    }
  if (!check_patch(mt.body, cts.tiles).empty())
    throw Error(ErrorCode::InvalidArgument, "internal: assembled macro-tile has conflicts");
  return mt;
}

SideBits read_side_bits(const CompiledTileSet& cts, const MacroTile& mt) {
  const Layout& l = cts.layout;
  const int k = l.k, n = l.n, c0 = l.center();
  SideBits s;
  auto bit_at = [&](int x, int y) {
    const TileInfo& info = cts.decode[static_cast<std::size_t>(mt.body.at(x, y))];
    return info.layer == CellLayer::Wire ? info.bit : 0;
  };
  for (int i = 0; i < k; ++i) {
    s.left.push_back(bit_at(0, c0 + i));
    s.right.push_back(bit_at(n - 1, c0 + i));
    s.bottom.push_back(bit_at(c0 + i, 0));
    s.top.push_back(bit_at(c0 + i, n - 1));
  }
  return s;
}

std::vector<int> binary_code(ColorId c, int k) {
  if (c < 0 || (k < 31 && c >= (1 << k)))
    throw Error(ErrorCode::InvalidArgument, "color " + std::to_string(c) + " does not fit in " + std::to_string(k) + " bits");
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = (c >> i) & 1;
  return out;
}

CompiledSimulationReport simulate_check_compiled(const CompiledTileSet& cts, const TileSet& rho,
                                                 const ColorEncoder& encode, std::uint64_t window_node_cap) {
  const int k = cts.layout.k;
  auto code = [&](ColorId c) { return encode ? encode(c) : binary_code(c, k); };
  CompiledSimulationReport out;
  SimulationMap sm{rho, cts.tiles, cts.n(), {}};
  for (TileId t = 0; t < rho.size(); ++t) {
    const Tile& r = rho.tiles[static_cast<std::size_t>(t)];
    SideBits s{code(r.left), code(r.right), code(r.top), code(r.bottom)};
    try {
      sm.map.push_back(assemble_macrotile(cts, s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RejectedByProgram && e.code() != ErrorCode::TimeBudgetExceeded) throw;
      out.failure = "rho tile " + std::to_string(t) + " has no macro-tile: " + e.what();
      return out;
    }
  }
  out.total = true;
  out.report = check_simulation_local(sm);
  try {
    SimulationCheckOptions opts;
    opts.node_cap = window_node_cap;
    SimulationReport full = check_simulation(sm, opts);
    out.report.unique_splitting = full.unique_splitting;
    out.report.window_tilings = full.window_tilings;
    if (out.report.detail.empty()) out.report.detail = full.detail;
    out.splitting_checked = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::WindowSearchExploded) throw;
    out.splitting_checked = false;
  }
  return out;
}

}  // namespace tileforge
