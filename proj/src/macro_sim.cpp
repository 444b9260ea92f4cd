#include "tileforge/macro_sim.hpp"

#include <map>
#include <set>

#include "tileforge/io.hpp"

namespace tileforge {

MacroColors macro_colors(const MacroTile& mt, const TileSet& ts) {
  MacroColors mc;
  const int n = mt.n;
  auto tile = [&](int x, int y) -> const Tile& { return ts.tiles[static_cast<std::size_t>(mt.body.at(x, y))]; };
  for (int i = 0; i < n; ++i) {
    mc.left.push_back(tile(0, i).left);
    mc.right.push_back(tile(n - 1, i).right);
    mc.bottom.push_back(tile(i, 0).bottom);
    mc.top.push_back(tile(i, n - 1).top);
  }
  return mc;
}

void validate_macrotile(const MacroTile& mt, const TileSet& ts) {
  if (mt.n < 1 || !(mt.body.region == Region{0, 0, mt.n, mt.n}))
    throw Error(ErrorCode::MalformedSpec, "macro-tile body must cover [0,N)^2");
  for (TileId t : mt.body.cells)
    if (t < 0 || t >= ts.size()) throw Error(ErrorCode::MalformedSpec, "macro-tile body has an invalid tile index");
  if (!check_patch(mt.body, ts).empty()) throw Error(ErrorCode::MalformedSpec, "macro-tile body has color conflicts");
}

namespace {

void validate_map(const SimulationMap& sm) {
  if (sm.n < 1) throw Error(ErrorCode::InvalidArgument, "zoom factor must be >= 1");
  if (static_cast<int>(sm.map.size()) != sm.rho.size())
    throw Error(ErrorCode::MalformedSpec, "simulation map must have one macro-tile per rho tile");
  for (const auto& mt : sm.map) {
    if (mt.n != sm.n) throw Error(ErrorCode::MalformedSpec, "macro-tile size differs from N");
    validate_macrotile(mt, sm.tau);
  }
}

}  // namespace

SimulationReport check_simulation_local(const SimulationMap& sm) {
  validate_map(sm);
  SimulationReport rep;
  rep.injective = true;
  for (std::size_t a = 0; a < sm.map.size() && rep.injective; ++a)
    for (std::size_t b = a + 1; b < sm.map.size(); ++b)
      if (sm.map[a].body == sm.map[b].body) {
        rep.injective = false;
        rep.detail = "rho tiles " + std::to_string(a) + " and " + std::to_string(b) + " share a macro-tile";
        break;
      }

  std::vector<MacroColors> mc;
  for (const auto& mt : sm.map) mc.push_back(macro_colors(mt, sm.tau));
  rep.match_equivalent = true;
  for (std::size_t a = 0; a < sm.map.size() && rep.match_equivalent; ++a) {
    for (std::size_t b = 0; b < sm.map.size(); ++b) {
      const Tile& ra = sm.rho.tiles[a];
      const Tile& rb = sm.rho.tiles[b];
      const bool h_rho = ra.right == rb.left, h_tau = mc[a].right == mc[b].left;
      const bool v_rho = ra.top == rb.bottom, v_tau = mc[a].top == mc[b].bottom;
      if (h_rho != h_tau || v_rho != v_tau) {
        rep.match_equivalent = false;
        if (rep.detail.empty())
          rep.detail = "matching of rho tiles (" + std::to_string(a) + "," + std::to_string(b) + ") along the " +
                       (h_rho != h_tau ? "horizontal" : "vertical") + " axis is not preserved";
        break;
      }
    }
  }
  return rep;
}

std::vector<std::pair<int, int>> splitting_offsets(const SimulationMap& sm, const PatchTiling& t) {
  std::set<std::vector<TileId>> range;
  for (const auto& mt : sm.map) range.insert(mt.body.cells);
  const Region& r = t.region;
  const int n = sm.n;
  std::vector<std::pair<int, int>> out;
  std::vector<TileId> block(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int oy = 0; oy < n; ++oy) {
    for (int ox = 0; ox < n; ++ox) {
      bool ok = true;
      for (int by = r.y0 + oy; by + n <= r.y0 + r.height && ok; by += n) {
        for (int bx = r.x0 + ox; bx + n <= r.x0 + r.width && ok; bx += n) {
          for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) block[static_cast<std::size_t>(y * n + x)] = t.at(bx + x, by + y);
          ok = range.count(block) > 0;
        }
      }
      if (ok) out.emplace_back(ox, oy);
    }
  }
  return out;
}

SimulationReport check_simulation(const SimulationMap& sm, const SimulationCheckOptions& opts) {
  if (opts.window < 2) throw Error(ErrorCode::InvalidArgument, "window factor k must be >= 2");
  SimulationReport rep = check_simulation_local(sm);
  const int side = opts.window * sm.n;
  FillOptions fo;
  fo.node_cap = opts.node_cap;
  rep.unique_splitting = true;
  for_each_tiling(sm.tau, Region{0, 0, side, side}, fo, [&](const PatchTiling& t) {
    ++rep.window_tilings;
    auto offs = splitting_offsets(sm, t);
    if (offs.size() != 1) {
      rep.unique_splitting = false;
      if (rep.detail.empty())
        rep.detail = "a window tiling admits " + std::to_string(offs.size()) + " splitting offsets";
      return false;
    }
    return true;
  });
  return rep;
}

MacroTileList enumerate_macrotiles(const TileSet& ts, int n, std::size_t cap) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  if (cap < 1) throw Error(ErrorCode::InvalidArgument, "cap must be >= 1");
  MacroTileList out;
  for_each_tiling(ts, Region{0, 0, n, n}, FillOptions{}, [&](const PatchTiling& p) {
    if (out.tiles.size() >= cap) {
      out.cap_exceeded = true;
      return false;
    }
    out.tiles.push_back(MacroTile{n, p});
    return true;
  });
  return out;
}

PatchTiling lift(const SimulationMap& sm, const PatchTiling& rho_tiling) {
  const Region& r = rho_tiling.region;
  const int n = sm.n;
  PatchTiling out(Region{r.x0 * n, r.y0 * n, r.width * n, r.height * n});
  for (int y = r.y0; y < r.y0 + r.height; ++y)
    for (int x = r.x0; x < r.x0 + r.width; ++x) {
      const TileId t = rho_tiling.at(x, y);
      for (int dy = 0; dy < n; ++dy)
        for (int dx = 0; dx < n; ++dx)
          out.at(x * n + dx, y * n + dy) =
              t == kHole ? kHole : sm.map[static_cast<std::size_t>(t)].body.at(dx, dy);
    }
  return out;
}

std::optional<PatchTiling> project(const SimulationMap& sm, const PatchTiling& tau_tiling, int ox, int oy) {
  std::map<std::vector<TileId>, TileId> inverse;
  for (TileId i = 0; i < static_cast<TileId>(sm.map.size()); ++i) inverse.emplace(sm.map[static_cast<std::size_t>(i)].body.cells, i);
  const Region& r = tau_tiling.region;
  const int n = sm.n;
  const int bw = (r.width - ox) / n, bh = (r.height - oy) / n;
  if (bw < 1 || bh < 1) return std::nullopt;
  PatchTiling out(Region{0, 0, bw, bh});
  std::vector<TileId> block(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = 0; j < bh; ++j)
    for (int i = 0; i < bw; ++i) {
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
          block[static_cast<std::size_t>(y * n + x)] = tau_tiling.at(r.x0 + ox + i * n + x, r.y0 + oy + j * n + y);
      auto it = inverse.find(block);
      if (it == inverse.end()) return std::nullopt;
      out.at(i, j) = it->second;
    }
  return out;
}

SimulationMap example2_simulation(int n) {
  SimulationMap sm{example1(), example2(n), n, {}};
  PatchTiling body(Region{0, 0, n, n});
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) body.at(x, y) = x * n + y;
  sm.map.push_back(MacroTile{n, body});
  return sm;
}

SimulationMap example1_simulation(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  return SimulationMap{example1(), example1(), n, {MacroTile{n, PatchTiling(Region{0, 0, n, n}, 0)}}};
}

nlohmann::json to_json(const SimulationMap& sm) {
  nlohmann::json j;
  j["rho"] = to_json(sm.rho);
  j["tau"] = to_json(sm.tau);
  j["N"] = sm.n;
  j["map"] = nlohmann::json::array();
  for (const auto& mt : sm.map) j["map"].push_back(to_json(mt.body));
  return j;
}

SimulationMap simulation_map_from_json(const nlohmann::json& j) {
  SimulationMap sm;
  try {
    sm.rho = validate_tileset(j.at("rho"));
    sm.tau = validate_tileset(j.at("tau"));
    sm.n = j.at("N").get<int>();
    for (const auto& b : j.at("map")) sm.map.push_back(MacroTile{sm.n, patch_from_json(b)});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, e.what());
  }
  validate_map(sm);
  return sm;
}

}  // namespace tileforge
