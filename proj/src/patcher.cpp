#include "tileforge/patcher.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "tileforge/error.hpp"

namespace tileforge {

namespace {

std::string join_cells(const std::vector<TileId>& w, int side, int x0, int x1, int y0, int y1) {
  std::string s;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) s += std::to_string(w[static_cast<std::size_t>(y * side + x)]) + ",";
    s += "/";
  }
  return s;
}

Region expand(const Region& r, std::int64_t by, const Region& clip) {
  const std::int64_t x0 = std::max<std::int64_t>(clip.x0, r.x0 - by);
  const std::int64_t y0 = std::max<std::int64_t>(clip.y0, r.y0 - by);
  const std::int64_t x1 = std::min<std::int64_t>(std::int64_t{clip.x0} + clip.width, std::int64_t{r.x0} + r.width + by);
  const std::int64_t y1 = std::min<std::int64_t>(std::int64_t{clip.y0} + clip.height, std::int64_t{r.y0} + r.height + by);
  return Region{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0), static_cast<int>(y1 - y0)};
}

Region bbox(const Region& a, const Region& b) {
  const int x0 = std::min(a.x0, b.x0), y0 = std::min(a.y0, b.y0);
  const int x1 = std::max(a.x0 + a.width, b.x0 + b.width), y1 = std::max(a.y0 + a.height, b.y0 + b.height);
  return Region{x0, y0, x1 - x0, y1 - y0};
}

Region bbox(const std::vector<GridPoint>& pts) {
  int x0 = pts[0].x, y0 = pts[0].y, x1 = x0, y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  return Region{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

std::int64_t box_gap(const Region& a, const Region& b) {
  const std::int64_t gx = std::max<std::int64_t>({0, b.x0 - (a.x0 + a.width - 1), a.x0 - (b.x0 + b.width - 1)});
  const std::int64_t gy = std::max<std::int64_t>({0, b.y0 - (a.y0 + a.height - 1), a.y0 - (b.y0 + b.height - 1)});
  return std::max(gx, gy);
}

bool edge_ok(const TileSet& ts, TileId a, TileId b, bool horizontal) {
  const Tile& ta = ts.tiles[static_cast<std::size_t>(a)];
  const Tile& tb = ts.tiles[static_cast<std::size_t>(b)];
  return horizontal ? ta.right == tb.left : ta.top == tb.bottom;
}

// Re-tiles the cells of `frame` marked in `fill` (a t.region-sized mask),
// holding every other non-hole cell of the frame fixed.
std::optional<PatchTiling> refill(const PatchTiling& t, const TileSet& ts, const Region& frame,
                                  const std::vector<bool>& fill) {
  const Region& tr = t.region;
  FillOptions o;
  o.mode = FillMode::First;
  o.holes.assign(frame.cell_count(), false);
  for (int y = frame.y0; y < frame.y0 + frame.height; ++y)
    for (int x = frame.x0; x < frame.x0 + frame.width; ++x)
      if (!fill[tr.offset(x, y)] && t.is_hole(x, y)) o.holes[frame.offset(x, y)] = true;
  o.cell_filter = [&](int x, int y, TileId id) { return fill[tr.offset(x, y)] || t.at(x, y) == id; };
  try {
    const FillResult res = fill_region(ts, frame, o);
    PatchTiling out = t;
    const PatchTiling& sol = res.solutions.front();
    for (int y = frame.y0; y < frame.y0 + frame.height; ++y)
      for (int x = frame.x0; x < frame.x0 + frame.width; ++x)
        if (fill[tr.offset(x, y)]) out.at(x, y) = sol.at(x, y);
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoSolution) return std::nullopt;
    throw;
  }
}

}  // namespace

RobustifiedSet robustify(const TileSet& base, int r, std::size_t window_cap) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "robustification radius must be >= 1");
  RobustifiedSet rs;
  rs.base = base;
  rs.r = r;
  const int s = rs.side();
  FillOptions o;
  o.mode = FillMode::Enumerate;
  o.cap = window_cap + 1;
  FillResult res = fill_region(base, Region{0, 0, s, s}, o);
  if (res.count == 0) throw Error(ErrorCode::NoWindows, base.name + " has no " + std::to_string(s) + "x" + std::to_string(s) + " tiling");
  if (res.count > window_cap) throw Error(ErrorCode::SearchCap, "more than " + std::to_string(window_cap) + " windows");
  std::map<std::string, ColorId> ids;
  auto color = [&](const std::string& name) {
    auto [it, fresh] = ids.emplace(name, static_cast<ColorId>(ids.size()));
    if (fresh) rs.derived.colors.push_back(name);
    return it->second;
  };
  rs.derived.name = "robust(" + base.name + "," + std::to_string(r) + ")";
  for (const auto& sol : res.solutions) {
    const auto& w = sol.cells;
    Tile t;
    t.left = color("h:" + join_cells(w, s, 0, s - 1, 0, s));
    t.right = color("h:" + join_cells(w, s, 1, s, 0, s));
    t.bottom = color("v:" + join_cells(w, s, 0, s, 0, s - 1));
    t.top = color("v:" + join_cells(w, s, 0, s, 1, s));
    t.label = "w" + std::to_string(rs.windows.size());
    rs.derived.tiles.push_back(t);
    rs.windows.push_back(w);
    rs.delta.push_back(w[static_cast<std::size_t>(r * s + r)]);
  }
  return rs;
}

PatchTiling project_delta(const RobustifiedSet& rs, const PatchTiling& derived) {
  PatchTiling out(derived.region);
  for (std::size_t i = 0; i < derived.cells.size(); ++i)
    if (derived.cells[i] != kHole) out.cells[i] = rs.delta.at(static_cast<std::size_t>(derived.cells[i]));
  return out;
}

PatchTiling induce(const RobustifiedSet& rs, const PatchTiling& base) {
  const int r = rs.r, s = rs.side();
  const Region& b = base.region;
  if (b.width < s || b.height < s) throw Error(ErrorCode::InvalidArgument, "patch smaller than one window");
  std::map<std::vector<TileId>, TileId> index;
  for (std::size_t i = 0; i < rs.windows.size(); ++i) index.emplace(rs.windows[i], static_cast<TileId>(i));
  PatchTiling out(Region{b.x0 + r, b.y0 + r, b.width - 2 * r, b.height - 2 * r});
  std::vector<TileId> w(static_cast<std::size_t>(s * s));
  for (int y = out.region.y0; y < out.region.y0 + out.region.height; ++y)
    for (int x = out.region.x0; x < out.region.x0 + out.region.width; ++x) {
      bool hole = false;
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx) {
          const TileId id = base.at(x - r + dx, y - r + dy);
          hole = hole || id == kHole;
          w[static_cast<std::size_t>(dy * s + dx)] = id;
        }
      if (hole) continue;
      auto it = index.find(w);
      if (it == index.end()) throw Error(ErrorCode::NoWindows, "window at (" + std::to_string(x) + "," + std::to_string(y) + ") is not a valid tiling");
      out.at(x, y) = it->second;
    }
  return out;
}

bool check_robust_annulus(const TileSet& ts, int outer, int inner, std::size_t cap) {
  if (inner < 1 || outer <= inner || (outer - inner) % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "annulus needs outer > inner >= 1 with a centred hole");
  const Region sq{0, 0, outer, outer};
  const int m = (outer - inner) / 2;
  FillOptions ring;
  ring.mode = FillMode::Enumerate;
  ring.holes.assign(sq.cell_count(), false);
  for (int y = m; y < m + inner; ++y)
    for (int x = m; x < m + inner; ++x) ring.holes[sq.offset(x, y)] = true;
  std::size_t seen = 0;
  bool robust = true;
  for_each_tiling(ts, sq, ring, [&](const PatchTiling& a) {
    if (++seen > cap) throw Error(ErrorCode::SearchCap, "more than " + std::to_string(cap) + " annulus tilings");
    FillOptions ext;
    ext.mode = FillMode::Count;
    ext.cap = 2;
    ext.cell_filter = [&](int x, int y, TileId id) { return a.is_hole(x, y) || a.at(x, y) == id; };
    robust = fill_region(ts, sq, ext).count == 1;
    return robust;
  });
  return robust;
}

bool check_r_robust(const RobustifiedSet& rs, std::size_t cap) {
  return check_robust_annulus(rs.derived, rs.side(), rs.side() - 2, cap);
}

std::vector<std::uint8_t> diff_mask(const PatchTiling& before, const PatchTiling& after) {
  if (!(before.region == after.region)) throw Error(ErrorCode::DimensionMismatch, "tilings cover different regions");
  std::vector<std::uint8_t> m(before.cells.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = before.cells[i] != after.cells[i];
  return m;
}

PatchTiling fill_hole(const PatchTiling& t, const TileSet& ts, const HoleSpec& spec) {
  if (spec.holes.empty() || spec.holes.size() > 2) throw Error(ErrorCode::InvalidArgument, "hole spec needs one or two holes");
  if (spec.c1 < 1 || spec.c1 >= spec.c2) throw Error(ErrorCode::InvalidArgument, "need 1 <= c1 < c2");
  const Region& tr = t.region;
  for (const auto& h : spec.holes)
    if (h.width < 1 || h.height < 1 || !tr.contains(h.x0, h.y0) || !tr.contains(h.x0 + h.width - 1, h.y0 + h.height - 1))
      throw Error(ErrorCode::InvalidArgument, "hole outside the tiling");

  std::vector<std::vector<Region>> groups;
  auto delta = [](const Region& h) { return std::int64_t{std::max(h.width, h.height)}; };
  if (spec.holes.size() == 2 &&
      box_gap(spec.holes[0], spec.holes[1]) > spec.c2 * std::max(delta(spec.holes[0]), delta(spec.holes[1]))) {
    groups = {{spec.holes[0]}, {spec.holes[1]}};
  } else {
    groups = {spec.holes};
  }

  PatchTiling out = t;
  for (const auto& g : groups) {
    std::int64_t d = 0;
    Region box = g.front();
    std::vector<bool> mask(tr.cell_count(), false);
    for (const auto& h : g) {
      d = std::max(d, delta(h));
      box = bbox(box, h);
      for (int y = h.y0; y < h.y0 + h.height; ++y)
        for (int x = h.x0; x < h.x0 + h.width; ++x) mask[tr.offset(x, y)] = true;
    }
    const Region ctx = expand(box, spec.c2 * d, tr);
    for (int y = ctx.y0; y < ctx.y0 + ctx.height; ++y)
      for (int x = ctx.x0; x < ctx.x0 + ctx.width; ++x) {
        if (mask[tr.offset(x, y)]) continue;
        if (out.is_hole(x, y))
          throw Error(ErrorCode::ContextDamaged, "context cell (" + std::to_string(x) + "," + std::to_string(y) + ") is a hole");
        if (x + 1 < ctx.x0 + ctx.width && !mask[tr.offset(x + 1, y)] && !out.is_hole(x + 1, y) && !edge_ok(ts, out.at(x, y), out.at(x + 1, y), true))
          throw Error(ErrorCode::ContextDamaged, "context mismatch at (" + std::to_string(x) + "," + std::to_string(y) + ")");
        if (y + 1 < ctx.y0 + ctx.height && !mask[tr.offset(x, y + 1)] && !out.is_hole(x, y + 1) && !edge_ok(ts, out.at(x, y), out.at(x, y + 1), false))
          throw Error(ErrorCode::ContextDamaged, "context mismatch at (" + std::to_string(x) + "," + std::to_string(y) + ")");
      }

    // Nothing to do when the hole already holds a consistent filling.
    const Region frame = expand(box, 1, tr);
    bool complete = true;
    for (int y = frame.y0; y < frame.y0 + frame.height && complete; ++y)
      for (int x = frame.x0; x < frame.x0 + frame.width && complete; ++x) {
        if (out.is_hole(x, y)) {
          complete = !mask[tr.offset(x, y)];
          continue;
        }
        if (x + 1 < frame.x0 + frame.width && !out.is_hole(x + 1, y)) complete = edge_ok(ts, out.at(x, y), out.at(x + 1, y), true);
        if (complete && y + 1 < frame.y0 + frame.height && !out.is_hole(x, y + 1)) complete = edge_ok(ts, out.at(x, y), out.at(x, y + 1), false);
      }
    if (complete) continue;

    if (auto filled = refill(out, ts, frame, mask)) {
      out = std::move(*filled);
      continue;
    }
    const Region mod = expand(box, spec.c1 * d, tr);
    std::vector<bool> wide(tr.cell_count(), false);
    for (int y = mod.y0; y < mod.y0 + mod.height; ++y)
      for (int x = mod.x0; x < mod.x0 + mod.width; ++x) wide[tr.offset(x, y)] = true;
    auto filled = refill(out, ts, expand(mod, 1, tr), wide);
    if (!filled) throw Error(ErrorCode::NoExtension, "no filling within the c1*Delta neighbourhood");
    out = std::move(*filled);
  }
  return out;
}

PatchResult percolation_patch(const DirtySet& e, const PatchTiling& t, const Schedule& s, const TileSet& ts) {
  if (!(t.region == e.window)) throw Error(ErrorCode::DimensionMismatch, "tiling and dirty set windows differ");
  const Decomposition d = clean(e, s, BoundaryPolicy::Finite);
  if (!d.cleaned())
    throw Error(ErrorCode::ResidualErrors, std::to_string(d.residual.size()) + " dirty points survive the schedule");
  const Region& w = t.region;
  PatchResult res;
  res.tiling = t;
  PatchTiling& out = res.tiling;
  for (int k = 1; k <= s.max_rank(); ++k) {
    const std::int64_t g = s.gamma_at(k);
    for (const auto& isl : d.ranks[static_cast<std::size_t>(k - 1)]) {
      const Region box = expand(bbox(isl.points), g, w);
      const Region ring = expand(box, 1, w);
      std::map<TileId, std::size_t> votes;
      for (int y = ring.y0; y < ring.y0 + ring.height; ++y)
        for (int x = ring.x0; x < ring.x0 + ring.width; ++x)
          if (!box.contains(x, y) && !out.is_hole(x, y)) ++votes[out.at(x, y)];
      if (votes.empty())
        for (int y = box.y0; y < box.y0 + box.height; ++y)
          for (int x = box.x0; x < box.x0 + box.width; ++x)
            if (!out.is_hole(x, y)) ++votes[out.at(x, y)];
      TileId pick = 0;
      std::size_t best = 0;
      for (auto [id, n] : votes)
        if (n > best) pick = id, best = n;
      for (int y = box.y0; y < box.y0 + box.height; ++y)
        for (int x = box.x0; x < box.x0 + box.width; ++x) out.at(x, y) = pick;
    }
  }
  if (!check_patch(out, ts).empty())
    throw Error(ErrorCode::ContextDamaged, "tiling is inconsistent away from the dirty set");
  res.changed = diff_mask(t, out);
  res.changed_count = static_cast<std::size_t>(std::count(res.changed.begin(), res.changed.end(), 1));
  res.max_rank = d.cleaned_at();
  return res;
}

Schedule correction_schedule(int ranks, int c2) {
  Schedule s;
  BigInt sum = 0;
  for (int k = 1; k <= ranks; ++k) {
    const BigInt a = k == 1 ? BigInt(1) : 8 * sum + 1;
    s.alpha.push_back(a);
    s.beta.push_back(4 * c2 * a + 1);
    sum += s.beta.back();
  }
  s.gamma = s.alpha;
  return s;
}

PatchResult correct_errors(const DirtySet& e, const PatchTiling& t, const Schedule& s, const RobustifiedSet& rs) {
  if (!(t.region == e.window)) throw Error(ErrorCode::DimensionMismatch, "tiling and dirty set windows differ");
  for (int k = 1; k <= s.max_rank(); ++k)
    if (!(s.beta[static_cast<std::size_t>(k - 1)] > 4 * rs.c2 * s.alpha[static_cast<std::size_t>(k - 1)]))
      throw Error(ErrorCode::InvalidArgument, "schedule needs beta_k > 4 c2 alpha_k at rank " + std::to_string(k));
  const Decomposition d = clean(e, s, BoundaryPolicy::Finite);
  if (!d.cleaned())
    throw Error(ErrorCode::ResidualErrors, std::to_string(d.residual.size()) + " dirty points survive the schedule");
  PatchResult res;
  res.tiling = t;
  for (int k = 1; k <= s.max_rank(); ++k) {
    const std::int64_t reach = 2 * std::int64_t{rs.c1} * s.alpha_at(k);
    const auto& isls = d.ranks[static_cast<std::size_t>(k - 1)];
    for (std::size_t i = 0; i < isls.size(); ++i) {
      const HoleSpec spec{{bbox(isls[i].points)}, rs.c1, rs.c2};
      PatchTiling next;
      try {
        next = fill_hole(res.tiling, rs.derived, spec);
      } catch (const Error& ex) {
        if (ex.code() != ErrorCode::NoExtension) throw;
        throw Error(ErrorCode::NoExtension, "rank " + std::to_string(k) + " island " + std::to_string(i) + ": " + ex.what());
      }
      const auto m = diff_mask(res.tiling, next);
      const Region& w = t.region;
      for (int y = w.y0; y < w.y0 + w.height; ++y)
        for (int x = w.x0; x < w.x0 + w.width; ++x) {
          if (!m[w.offset(x, y)]) continue;
          std::int64_t best = reach + 1;
          for (const auto& p : isls[i].points) best = std::min(best, dist(p, GridPoint{x, y}));
          if (best > reach)
            throw Error(ErrorCode::NoExtension, "rank " + std::to_string(k) + " island " + std::to_string(i) +
                                                    ": change escapes the 2*c1*alpha_k neighbourhood");
        }
      res.tiling = std::move(next);
    }
  }
  res.changed = diff_mask(t, res.tiling);
  res.changed_count = static_cast<std::size_t>(std::count(res.changed.begin(), res.changed.end(), 1));
  res.max_rank = d.cleaned_at();
  return res;
}

}  // namespace tileforge
