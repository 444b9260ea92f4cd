#include "tileforge/islands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "tileforge/error.hpp"
#include "tileforge/rng.hpp"

namespace tileforge {

namespace {

constexpr std::int64_t kGeomCap = std::int64_t{1} << 40;

std::int64_t clamp_geom(const BigInt& v) { return v > kGeomCap ? kGeomCap : v.convert_to<std::int64_t>(); }

struct Box {
  std::int64_t x0, y0, x1, y1;  // inclusive
  std::int64_t diameter() const { return std::max(x1 - x0, y1 - y0); }
};

Box bounds(const std::vector<GridPoint>& pts) {
  Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    b.x0 = std::min<std::int64_t>(b.x0, p.x);
    b.y0 = std::min<std::int64_t>(b.y0, p.y);
    b.x1 = std::max<std::int64_t>(b.x1, p.x);
    b.y1 = std::max<std::int64_t>(b.y1, p.y);
  }
  return b;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

// Components of the "distance <= beta" graph, each sorted, ordered by first point.
std::vector<std::vector<GridPoint>> components(const std::vector<GridPoint>& pts, std::int64_t beta) {
  const std::int64_t cell = beta + 1;
  auto bucket = [cell](std::int64_t v) { return v >= 0 ? v / cell : -((-v + cell - 1) / cell); };
  std::unordered_map<std::int64_t, std::vector<int>> grid;
  auto key = [](std::int64_t bx, std::int64_t by) { return bx * 4000037LL + by; };
  for (std::size_t i = 0; i < pts.size(); ++i) grid[key(bucket(pts[i].x), bucket(pts[i].y))].push_back(static_cast<int>(i));
  UnionFind uf(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::int64_t bx = bucket(pts[i].x), by = bucket(pts[i].y);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find(key(bx + dx, by + dy));
        if (it == grid.end()) continue;
        for (int j : it->second)
          if (static_cast<std::size_t>(j) > i && dist(pts[i], pts[static_cast<std::size_t>(j)]) <= beta) uf.unite(static_cast<int>(i), j);
      }
  }
  std::vector<std::vector<GridPoint>> out;
  std::vector<int> slot(pts.size(), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int r = uf.find(static_cast<int>(i));
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(pts[i]);
  }
  return out;
}

// Split along one axis: points with coordinate <= t versus > t.
bool axis_split(const std::vector<GridPoint>& c, std::int64_t alpha, bool by_x, Island& out) {
  std::vector<GridPoint> s = c;
  auto coord = [by_x](const GridPoint& p) { return by_x ? p.x : p.y; };
  std::sort(s.begin(), s.end(), [&](const GridPoint& a, const GridPoint& b) { return coord(a) < coord(b); });
  const std::size_t n = s.size();
  std::vector<Box> pre(n), suf(n);
  for (std::size_t i = 0; i < n; ++i) {
    Box b{s[i].x, s[i].y, s[i].x, s[i].y};
    if (i) b = Box{std::min(pre[i - 1].x0, b.x0), std::min(pre[i - 1].y0, b.y0), std::max(pre[i - 1].x1, b.x1), std::max(pre[i - 1].y1, b.y1)};
    pre[i] = b;
  }
  for (std::size_t i = n; i-- > 0;) {
    Box b{s[i].x, s[i].y, s[i].x, s[i].y};
    if (i + 1 < n) b = Box{std::min(suf[i + 1].x0, b.x0), std::min(suf[i + 1].y0, b.y0), std::max(suf[i + 1].x1, b.x1), std::max(suf[i + 1].y1, b.y1)};
    suf[i] = b;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (coord(s[i]) == coord(s[i + 1])) continue;
    if (pre[i].diameter() <= alpha && suf[i + 1].diameter() <= alpha) {
      out.part0.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(i + 1));
      out.part1.assign(s.begin() + static_cast<std::ptrdiff_t>(i + 1), s.end());
      return true;
    }
  }
  return false;
}

bool brute_split(const std::vector<GridPoint>& c, std::int64_t alpha, Island& out) {
  const std::size_t n = c.size();
  // Point 0 always goes to part0; mask bit i - 1 puts point i into part1.
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << (n - 1)); ++mask) {
    std::vector<GridPoint> a{c[0]}, b;
    for (std::size_t i = 1; i < n; ++i) ((mask >> (i - 1)) & 1 ? b : a).push_back(c[i]);
    if (diameter(a) <= alpha && diameter(b) <= alpha) {
      out.part0 = std::move(a);
      out.part1 = std::move(b);
      return true;
    }
  }
  return false;
}

}  // namespace

std::int64_t diameter(const std::vector<GridPoint>& pts) { return pts.empty() ? 0 : bounds(pts).diameter(); }

std::int64_t Schedule::alpha_at(int k) const { return clamp_geom(alpha.at(static_cast<std::size_t>(k - 1))); }
std::int64_t Schedule::beta_at(int k) const { return clamp_geom(beta.at(static_cast<std::size_t>(k - 1))); }
std::int64_t Schedule::gamma_at(int k) const {
  return gamma.empty() ? alpha_at(k) : clamp_geom(gamma.at(static_cast<std::size_t>(k - 1)));
}

Schedule island_schedule(int ranks) {
  Schedule s;
  BigInt sum = 0;
  for (int k = 1; k <= ranks; ++k) {
    const BigInt a = k == 1 ? BigInt(1) : 8 * sum + 1;
    s.alpha.push_back(a);
    s.beta.push_back(2 * a);
    sum += 2 * a;
  }
  s.gamma = s.alpha;
  return s;
}

Schedule bi_island_schedule(const ZoomSchedule& z, int ranks) {
  Schedule s;
  s.mode = IslandMode::BiIsland;
  for (int k = 1; k <= ranks; ++k) {
    s.alpha.push_back(26 * z.L(k - 1));
    s.beta.push_back(2 * z.L(k));
  }
  s.gamma = s.alpha;
  return s;
}

ScheduleReport validate_schedule(const Schedule& s) {
  ScheduleReport rep;
  const bool bi = s.mode == IslandMode::BiIsland;
  rep.growth_limit = bi ? 3 : 2;
  if (s.beta.size() != s.alpha.size() || (!s.gamma.empty() && s.gamma.size() != s.alpha.size()))
    throw Error(ErrorCode::InvalidArgument, "schedule vectors differ in length");
  BigInt sum = 0;
  auto logv = [](const BigInt& v) { return static_cast<double>(std::log(v.convert_to<long double>())); };
  for (int k = 1; k <= s.max_rank(); ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    if (s.alpha[i] < 1 || s.alpha[i] > s.beta[i]) rep.ordered = false;
    if (!s.gamma.empty() && s.gamma[i] < s.alpha[i]) rep.ordered = false;
    ScheduleRank r;
    r.k = k;
    r.lhs = (bi ? 12 : 8) * sum;
    r.rhs = s.alpha[i];
    r.inequality = r.lhs < r.rhs;
    rep.inequalities = rep.inequalities && r.inequality;
    if (k >= 2 && k < s.max_rank() && s.beta[i] > 1) {
      r.growth = logv(s.beta[i + 1]) / logv(s.beta[i]);
      r.growth_ok = *r.growth < rep.growth_limit;
      rep.growth = rep.growth && r.growth_ok;
    }
    sum += s.beta[i];
    rep.ranks.push_back(r);
  }
  return rep;
}

void DirtySet::normalize() {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (const auto& p : points)
    if (!window.contains(p.x, p.y))
      throw Error(ErrorCode::OutOfDomain, "dirty point (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") outside window");
}

RankIslands find_rank_islands(const DirtySet& e, std::int64_t alpha, std::int64_t beta, IslandMode mode,
                              BoundaryPolicy policy) {
  if (alpha < 0 || alpha > beta) throw Error(ErrorCode::InvalidArgument, "need 0 <= alpha <= beta");
  RankIslands out;
  for (auto& c : components(e.points, beta)) {
    const Box b = bounds(c);
    const Region& w = e.window;
    const bool inside = b.x0 - beta >= w.x0 && b.y0 - beta >= w.y0 && b.x1 + beta < std::int64_t{w.x0} + w.width &&
                        b.y1 + beta < std::int64_t{w.y0} + w.height;
    Island isl;
    bool ok = false;
    if (policy == BoundaryPolicy::Finite || inside) {
      if (b.diameter() <= alpha) {
        ok = true;
      } else if (mode == IslandMode::BiIsland && b.diameter() <= 2 * alpha + beta) {
        ok = axis_split(c, alpha, true, isl) || axis_split(c, alpha, false, isl);
        if (!ok && c.size() <= kSplitBruteForceCap) {
          ok = brute_split(c, alpha, isl);
        } else if (!ok) {
          out.flagged.insert(out.flagged.end(), c.begin(), c.end());
        }
      }
    }
    if (ok) {
      isl.points = std::move(c);
      std::sort(isl.part0.begin(), isl.part0.end());
      std::sort(isl.part1.begin(), isl.part1.end());
      out.islands.push_back(std::move(isl));
    } else {
      out.survivors.insert(out.survivors.end(), c.begin(), c.end());
    }
  }
  std::sort(out.survivors.begin(), out.survivors.end());
  std::sort(out.flagged.begin(), out.flagged.end());
  return out;
}

int Decomposition::cleaned_at() const {
  for (std::size_t k = 0; k < remaining.size(); ++k)
    if (remaining[k] == 0) return static_cast<int>(k);
  return -1;
}

Decomposition clean(const DirtySet& e, const Schedule& s, BoundaryPolicy policy) {
  Decomposition d;
  d.window = e.window;
  d.mode = s.mode;
  DirtySet cur = e;
  cur.normalize();
  d.remaining.push_back(cur.points.size());
  for (int k = 1; k <= s.max_rank(); ++k) {
    RankIslands r = find_rank_islands(cur, s.alpha_at(k), s.beta_at(k), s.mode, policy);
    d.ranks.push_back(std::move(r.islands));
    cur.points = std::move(r.survivors);
    d.remaining.push_back(cur.points.size());
    if (k == s.max_rank()) d.flagged = std::move(r.flagged);
  }
  d.residual = std::move(cur.points);
  return d;
}

std::vector<std::uint8_t> affected_mask(const Decomposition& d, const Schedule& s, int k) {
  const Region& w = d.window;
  std::vector<std::uint8_t> mask(w.cell_count(), 0);
  const std::int64_t beta = s.beta_at(k);
  for (const auto& isl : d.ranks.at(static_cast<std::size_t>(k - 1)))
    for (const auto& p : isl.points) {
      const int x0 = static_cast<int>(std::max<std::int64_t>(w.x0, p.x - beta));
      const int x1 = static_cast<int>(std::min<std::int64_t>(w.x0 + w.width - 1, p.x + beta));
      const int y0 = static_cast<int>(std::max<std::int64_t>(w.y0, p.y - beta));
      const int y1 = static_cast<int>(std::min<std::int64_t>(w.y0 + w.height - 1, p.y + beta));
      for (int y = y0; y <= y1; ++y) std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(w.offset(x0, y)), x1 - x0 + 1, 1);
    }
  return mask;
}

SoundnessReport check_decomposition(const DirtySet& e, const Schedule& s, const Decomposition& d) {
  auto fail = [](std::string msg) { return SoundnessReport{false, std::move(msg)}; };
  std::set<GridPoint> live(e.points.begin(), e.points.end());
  if (static_cast<int>(d.ranks.size()) != s.max_rank()) return fail("rank count differs from schedule");
  for (int k = 1; k <= s.max_rank(); ++k) {
    const auto& isls = d.ranks[static_cast<std::size_t>(k - 1)];
    const std::int64_t alpha = s.alpha_at(k), beta = s.beta_at(k);
    const std::string at = "rank " + std::to_string(k) + ": ";
    for (const auto& isl : isls) {
      if (isl.points.empty()) return fail(at + "empty island");
      std::set<GridPoint> own(isl.points.begin(), isl.points.end());
      if (own.size() != isl.points.size()) return fail(at + "repeated point in island");
      for (const auto& p : isl.points)
        if (!live.count(p)) return fail(at + "island point not in E_{k-1}");
      if (isl.is_split()) {
        if (s.mode != IslandMode::BiIsland) return fail(at + "split island in island mode");
        std::set<GridPoint> u(isl.part0.begin(), isl.part0.end());
        u.insert(isl.part1.begin(), isl.part1.end());
        if (u != own || isl.part0.size() + isl.part1.size() != own.size()) return fail(at + "parts do not partition island");
        if (diameter(isl.part0) > alpha || diameter(isl.part1) > alpha) return fail(at + "part diameter exceeds alpha");
        std::int64_t gap = kGeomCap;
        for (const auto& a : isl.part0)
          for (const auto& b : isl.part1) gap = std::min(gap, dist(a, b));
        if (gap > beta) return fail(at + "parts farther apart than beta");
      } else if (diameter(isl.points) > alpha) {
        return fail(at + "island diameter exceeds alpha");
      }
      for (const auto& q : live) {
        if (own.count(q)) continue;
        for (const auto& p : isl.points)
          if (dist(p, q) <= beta) return fail(at + "another dirty point within beta of an island");
      }
    }
    for (std::size_t i = 0; i < isls.size(); ++i)
      for (std::size_t j = i + 1; j < isls.size(); ++j)
        for (const auto& p : isls[i].points)
          for (const auto& q : isls[j].points)
            if (dist(p, q) <= beta) return fail(at + "two islands within beta");
    for (const auto& isl : isls)
      for (const auto& p : isl.points) live.erase(p);
  }
  if (std::vector<GridPoint>(live.begin(), live.end()) != d.residual) return fail("residual differs from E minus islands");
  return {};
}

DirtySet sample_bernoulli(double eps, const Region& window, std::uint64_t seed) {
  if (!(eps >= 0 && eps <= 1)) throw Error(ErrorCode::InvalidArgument, "probability outside [0, 1]");
  DirtySet d;
  d.window = window;
  for (int y = window.y0; y < window.y0 + window.height; ++y)
    for (int x = window.x0; x < window.x0 + window.width; ++x)
      if (counter_uniform(seed, window.offset(x, y)) < eps) d.points.push_back({x, y});
  std::sort(d.points.begin(), d.points.end());
  return d;
}

int MonteCarloStats::cleaned_by(int rank) const {
  int n = 0;
  for (const auto& t : trials) n += t.cleaned && t.max_rank <= rank;
  return n;
}

MonteCarloStats monte_carlo_sparsity(double eps, const Schedule& s, const Region& window, int trials,
                                     std::uint64_t seed, int jobs) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  MonteCarloStats st;
  st.trials.resize(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      TrialStats ts;
      ts.trial = t;
      ts.seed = seed + static_cast<std::uint64_t>(t);
      const Decomposition d = clean(sample_bernoulli(eps, window, ts.seed), s, BoundaryPolicy::Finite);
      ts.cleaned = d.cleaned();
      ts.max_rank = d.cleaned_at();
      ts.survivors = d.residual.size();
      ts.remaining = d.remaining;
      st.trials[static_cast<std::size_t>(t)] = std::move(ts);
    }
  };
  const int n = std::max(1, std::min(jobs, trials));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  st.survival.assign(static_cast<std::size_t>(s.max_rank()) + 1, 0.0);
  const double area = static_cast<double>(window.cell_count()) * trials;
  for (const auto& t : st.trials)
    for (std::size_t k = 0; k < t.remaining.size(); ++k) st.survival[k] += static_cast<double>(t.remaining[k]) / area;
  return st;
}

std::size_t neighborhoods_cells(const Decomposition& d, const std::vector<std::int64_t>& gamma, bool extended) {
  if (extended && d.mode != IslandMode::BiIsland)
    throw Error(ErrorCode::ExtendedRequiresBiIslands, "extended neighbourhoods are defined for bi-islands");
  if (gamma.size() < d.ranks.size()) throw Error(ErrorCode::InvalidArgument, "need one gamma per rank");
  const Region& w = d.window;
  // Per-row difference arrays of horizontal runs.
  std::vector<std::vector<int>> diff(static_cast<std::size_t>(w.height), std::vector<int>(static_cast<std::size_t>(w.width) + 1, 0));
  auto cover = [&](std::int64_t x0, std::int64_t x1, std::int64_t y0, std::int64_t y1) {
    x0 = std::max<std::int64_t>(x0, w.x0);
    x1 = std::min<std::int64_t>(x1, std::int64_t{w.x0} + w.width - 1);
    y0 = std::max<std::int64_t>(y0, w.y0);
    y1 = std::min<std::int64_t>(y1, std::int64_t{w.y0} + w.height - 1);
    if (x0 > x1 || y0 > y1) return;
    for (std::int64_t y = y0; y <= y1; ++y) {
      auto& row = diff[static_cast<std::size_t>(y - w.y0)];
      ++row[static_cast<std::size_t>(x0 - w.x0)];
      --row[static_cast<std::size_t>(x1 - w.x0 + 1)];
    }
  };
  for (std::size_t k = 0; k < d.ranks.size(); ++k) {
    const std::int64_t g = gamma[k];
    if (g < 0) throw Error(ErrorCode::InvalidArgument, "negative gamma");
    for (const auto& isl : d.ranks[k]) {
      if (!extended) {
        for (const auto& p : isl.points) cover(p.x - g, p.x + g, p.y - g, p.y + g);
        continue;
      }
      // Column-wise hull of the union of squares.
      const Box b = bounds(isl.points);
      const std::int64_t span = b.x1 - b.x0 + 2 * g + 1;
      std::vector<std::int64_t> lo(static_cast<std::size_t>(span), kGeomCap), hi(static_cast<std::size_t>(span), -kGeomCap);
      for (const auto& p : isl.points)
        for (std::int64_t x = p.x - g; x <= p.x + g; ++x) {
          const auto i = static_cast<std::size_t>(x - (b.x0 - g));
          lo[i] = std::min<std::int64_t>(lo[i], p.y - g);
          hi[i] = std::max<std::int64_t>(hi[i], p.y + g);
        }
      for (std::int64_t i = 0; i < span; ++i)
        if (lo[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)])
          cover(b.x0 - g + i, b.x0 - g + i, lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
    }
  }
  std::size_t covered = 0;
  for (const auto& row : diff) {
    int run = 0;
    for (int x = 0; x < w.width; ++x) covered += (run += row[static_cast<std::size_t>(x)]) > 0;
  }
  return covered;
}

double neighborhoods_density(const Decomposition& d, const std::vector<std::int64_t>& gamma, bool extended) {
  return static_cast<double>(neighborhoods_cells(d, gamma, extended)) / static_cast<double>(d.window.cell_count());
}

nlohmann::json to_json(const DirtySet& e) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : e.points) pts.push_back({p.x, p.y});
  return {{"window", {e.window.x0, e.window.y0, e.window.width, e.window.height}}, {"points", pts}};
}

DirtySet dirty_from_json(const nlohmann::json& j) {
  try {
    DirtySet d;
    const auto& w = j.at("window");
    d.window = Region{w.at(0).get<int>(), w.at(1).get<int>(), w.at(2).get<int>(), w.at(3).get<int>()};
    if (d.window.width < 1 || d.window.height < 1) throw Error(ErrorCode::MalformedSpec, "empty window");
    for (const auto& p : j.at("points")) d.points.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    d.normalize();
    return d;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedSpec, std::string("dirty set: ") + ex.what());
  }
}

nlohmann::json to_json(const Decomposition& d) {
  auto pts = [](const std::vector<GridPoint>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : v) a.push_back({p.x, p.y});
    return a;
  };
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& r : d.ranks) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& isl : r) {
      nlohmann::json o = {{"points", pts(isl.points)}};
      if (isl.is_split()) o["split"] = {pts(isl.part0), pts(isl.part1)};
      list.push_back(o);
    }
    ranks.push_back(list);
  }
  return {{"mode", d.mode == IslandMode::Island ? "island" : "bi"},
          {"ranks", ranks},
          {"residual", pts(d.residual)},
          {"flagged", pts(d.flagged)},
          {"remaining", d.remaining},
          {"cleaned", d.cleaned()}};
}

std::string stats_csv(const MonteCarloStats& st) {
  std::ostringstream os;
  os << "trial,seed,cleaned,max_rank,survivors\n";
  for (const auto& t : st.trials) os << t.trial << ',' << t.seed << ',' << (t.cleaned ? 1 : 0) << ',' << t.max_rank << ',' << t.survivors << '\n';
  return os.str();
}

}  // namespace tileforge
