#include "tileforge/wang_core.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <regex>
#include <thread>
#include <unordered_map>

namespace tileforge {

std::vector<Violation> check_patch(const PatchTiling& t, const TileSet& ts) {
  std::vector<Violation> out;
  const Region& r = t.region;
  for (int y = r.y0; y < r.y0 + r.height; ++y) {
    for (int x = r.x0; x < r.x0 + r.width; ++x) {
      TileId a = t.at(x, y);
      if (a == kHole) continue;
      const Tile& ta = ts.tiles[static_cast<std::size_t>(a)];
      if (x + 1 < r.x0 + r.width) {
        TileId b = t.at(x + 1, y);
        if (b != kHole && ta.right != ts.tiles[static_cast<std::size_t>(b)].left)
          out.push_back({x, y, x + 1, y, Side::Right});
      }
      if (y + 1 < r.y0 + r.height) {
        TileId b = t.at(x, y + 1);
        if (b != kHole && ta.top != ts.tiles[static_cast<std::size_t>(b)].bottom)
          out.push_back({x, y, x, y + 1, Side::Top});
      }
    }
  }
  return out;
}

namespace {

std::int64_t pair_key(ColorId a, ColorId b) { return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b); }

// Candidate lists keyed by whichever of (left, bottom) is constrained.
struct CandidateIndex {
  std::vector<TileId> all;
  std::unordered_map<ColorId, std::vector<TileId>> by_left;
  std::unordered_map<ColorId, std::vector<TileId>> by_bottom;
  std::unordered_map<std::int64_t, std::vector<TileId>> by_both;

  explicit CandidateIndex(const TileSet& ts) {
    for (TileId t = 0; t < ts.size(); ++t) {
      const Tile& tile = ts.tiles[static_cast<std::size_t>(t)];
      all.push_back(t);
      by_left[tile.left].push_back(t);
      by_bottom[tile.bottom].push_back(t);
      by_both[pair_key(tile.left, tile.bottom)].push_back(t);
    }
  }

  const std::vector<TileId>& lookup(std::optional<ColorId> l, std::optional<ColorId> b) const {
    static const std::vector<TileId> empty;
    if (l && b) {
      auto it = by_both.find(pair_key(*l, *b));
      return it == by_both.end() ? empty : it->second;
    }
    if (l) {
      auto it = by_left.find(*l);
      return it == by_left.end() ? empty : it->second;
    }
    if (b) {
      auto it = by_bottom.find(*b);
      return it == by_bottom.end() ? empty : it->second;
    }
    return all;
  }
};

std::optional<ColorId> edge_at(const std::vector<std::optional<ColorId>>& v, int i) {
  if (v.empty()) return std::nullopt;
  return v[static_cast<std::size_t>(i)];
}

class Solver {
 public:
  Solver(const TileSet& ts, const CandidateIndex& idx, const Region& r, const FillOptions& o)
      : ts_(ts), idx_(idx), r_(r), o_(o), patch_(r) {
    if (!o.holes.empty() && o.holes.size() != r.cell_count())
      throw Error(ErrorCode::InvalidArgument, "hole mask size does not match region");
    auto check_len = [](const std::vector<std::optional<ColorId>>& v, int n, const char* which) {
      if (!v.empty() && static_cast<int>(v.size()) != n)
        throw Error(ErrorCode::InvalidArgument, std::string("boundary '") + which + "' has wrong length");
    };
    check_len(o.boundary.left, r.height, "left");
    check_len(o.boundary.right, r.height, "right");
    check_len(o.boundary.top, r.width, "top");
    check_len(o.boundary.bottom, r.width, "bottom");
    for (int y = r.y0; y < r.y0 + r.height; ++y)
      for (int x = r.x0; x < r.x0 + r.width; ++x)
        if (!hole(x, y)) order_.emplace_back(x, y);
  }

  bool hole(int x, int y) const { return !o_.holes.empty() && o_.holes[r_.offset(x, y)]; }

  const std::vector<std::pair<int, int>>& order() const { return order_; }

  // Candidates for order_[k] given the current partial assignment.
  const std::vector<TileId>& candidates(std::size_t k) const {
    auto [x, y] = order_[k];
    return idx_.lookup(left_need(x, y), bottom_need(x, y));
  }

  /// Runs DFS from order_[start]; cells before start must already be placed.
  void run(std::size_t start, const std::function<bool(const PatchTiling&)>& visit) {
    visit_ = &visit;
    stop_ = false;
    dfs(start);
  }

  /// Places `t` at order_[0] if consistent; returns false otherwise.
  bool place_first(TileId t) {
    auto [x, y] = order_[0];
    if (!fits(x, y, t)) return false;
    patch_.at(x, y) = t;
    ++nodes_;
    return true;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  std::optional<ColorId> left_need(int x, int y) const {
    if (x > r_.x0) {
      if (hole(x - 1, y)) return std::nullopt;
      return ts_.tiles[static_cast<std::size_t>(patch_.at(x - 1, y))].right;
    }
    if (o_.wrap_x) return std::nullopt;
    return edge_at(o_.boundary.left, y - r_.y0);
  }

  std::optional<ColorId> bottom_need(int x, int y) const {
    if (y > r_.y0) {
      if (hole(x, y - 1)) return std::nullopt;
      return ts_.tiles[static_cast<std::size_t>(patch_.at(x, y - 1))].top;
    }
    if (o_.wrap_y) return std::nullopt;
    return edge_at(o_.boundary.bottom, x - r_.x0);
  }

  bool fits(int x, int y, TileId t) const {
    const Tile& tile = ts_.tiles[static_cast<std::size_t>(t)];
    if (auto l = left_need(x, y); l && *l != tile.left) return false;
    if (auto b = bottom_need(x, y); b && *b != tile.bottom) return false;
    if (o_.cell_filter && !o_.cell_filter(x, y, t)) return false;
    const int xr = r_.x0 + r_.width - 1;
    const int yt = r_.y0 + r_.height - 1;
    if (x == xr) {
      if (o_.wrap_x) {
        if (!hole(r_.x0, y)) {
          TileId first = x == r_.x0 ? t : patch_.at(r_.x0, y);
          if (ts_.tiles[static_cast<std::size_t>(first)].left != tile.right) return false;
        }
      } else if (auto c = edge_at(o_.boundary.right, y - r_.y0); c && *c != tile.right) {
        return false;
      }
    }
    if (y == yt) {
      if (o_.wrap_y) {
        if (!hole(x, r_.y0)) {
          TileId first = y == r_.y0 ? t : patch_.at(x, r_.y0);
          if (ts_.tiles[static_cast<std::size_t>(first)].bottom != tile.top) return false;
        }
      } else if (auto c = edge_at(o_.boundary.top, x - r_.x0); c && *c != tile.top) {
        return false;
      }
    }
    // Forward check: the right neighbor must still have some compatible tile.
    if (x < xr && !hole(x + 1, y)) {
      std::optional<ColorId> below;
      if (y > r_.y0) {
        if (!hole(x + 1, y - 1)) below = ts_.tiles[static_cast<std::size_t>(patch_.at(x + 1, y - 1))].top;
      } else if (!o_.wrap_y) {
        below = edge_at(o_.boundary.bottom, x + 1 - r_.x0);
      }
      if (idx_.lookup(tile.right, below).empty()) return false;
    }
    return true;
  }

  void dfs(std::size_t k) {
    if (stop_) return;
    if (k == order_.size()) {
      if (!(*visit_)(patch_)) stop_ = true;
      return;
    }
    auto [x, y] = order_[k];
    for (TileId t : candidates(k)) {
      if (!fits(x, y, t)) continue;
      if (o_.node_cap != 0 && nodes_ >= o_.node_cap)
        throw Error(ErrorCode::WindowSearchExploded, "search exceeded node cap of " + std::to_string(o_.node_cap));
      ++nodes_;
      patch_.at(x, y) = t;
      dfs(k + 1);
      patch_.at(x, y) = kHole;
      if (stop_) return;
    }
  }

  const TileSet& ts_;
  const CandidateIndex& idx_;
  Region r_;
  const FillOptions& o_;
  PatchTiling patch_;
  std::vector<std::pair<int, int>> order_;
  const std::function<bool(const PatchTiling&)>* visit_ = nullptr;
  bool stop_ = false;
  std::uint64_t nodes_ = 0;
};

void validate_region(const Region& r) {
  if (r.width < 1 || r.height < 1) throw Error(ErrorCode::InvalidArgument, "region must be at least 1x1");
}

// Collects solutions into `res` according to mode and cap; returns whether to continue.
struct Collector {
  const FillOptions& o;
  FillResult& res;
  bool operator()(const PatchTiling& p) {
    ++res.count;
    if (o.mode != FillMode::Count) res.solutions.push_back(p);
    if (o.mode == FillMode::First) return false;
    if (res.count >= o.cap) {
      res.capped = o.mode == FillMode::Count;
      return false;
    }
    return true;
  }
};

}  // namespace

std::uint64_t for_each_tiling(const TileSet& ts, const Region& r, const FillOptions& opts,
                              const std::function<bool(const PatchTiling&)>& visit) {
  validate_region(r);
  CandidateIndex idx(ts);
  Solver s(ts, idx, r, opts);
  s.run(0, visit);
  return s.nodes();
}

FillResult fill_region(const TileSet& ts, const Region& r, const FillOptions& opts) {
  validate_region(r);
  if (ts.tiles.empty()) throw Error(ErrorCode::MalformedSpec, "tile set is empty");
  if (opts.mode != FillMode::First && opts.cap < 1) throw Error(ErrorCode::InvalidArgument, "cap must be >= 1");
  FillOptions o = opts;
  if (o.mode == FillMode::First) o.cap = 1;

  CandidateIndex idx(ts);
  FillResult res;
  Solver probe(ts, idx, r, o);
  const bool parallel = o.jobs > 1 && o.node_cap == 0 && !probe.order().empty();

  if (!parallel) {
    Collector c{o, res};
    probe.run(0, std::function<bool(const PatchTiling&)>(std::ref(c)));
    res.nodes = probe.nodes();
  } else {
    // Split on the first cell's candidates; each branch is an independent
    // search and branches are merged in candidate order, so the output does
    // not depend on scheduling.
    std::vector<TileId> firsts = probe.candidates(0);
    std::vector<FillResult> parts(firsts.size());
    std::size_t next = 0;
    std::mutex m;
    auto worker = [&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= firsts.size()) return;
          i = next++;
        }
        Solver s(ts, idx, r, o);
        if (!s.place_first(firsts[i])) continue;
        Collector c{o, parts[i]};
        s.run(1, std::function<bool(const PatchTiling&)>(std::ref(c)));
        parts[i].nodes = s.nodes();
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(o.jobs, static_cast<int>(firsts.size()));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& p : parts) {
      res.nodes += p.nodes;
      res.count += p.count;
      for (auto& sol : p.solutions)
        if (res.solutions.size() < o.cap) res.solutions.push_back(std::move(sol));
    }
    if (res.count >= o.cap) {
      res.count = o.cap;
      res.capped = o.mode == FillMode::Count;
    }
  }
  if (o.mode == FillMode::First && res.solutions.empty())
    throw Error(ErrorCode::NoSolution, "region " + std::to_string(r.width) + "x" + std::to_string(r.height) +
                                           " has no tiling");
  return res;
}

std::optional<PatchTiling> torus_tiling(const TileSet& ts, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "torus size must be >= 1");
  FillOptions o;
  o.mode = FillMode::First;
  o.wrap_x = o.wrap_y = true;
  try {
    return fill_region(ts, Region{0, 0, m, m}, o).solutions.front();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoSolution) return std::nullopt;
    throw;
  }
}

std::optional<int> min_torus_period(const TileSet& ts, int m_max) {
  if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
  for (int m = 1; m <= m_max; ++m)
    if (torus_tiling(ts, m)) return m;
  return std::nullopt;
}

Rational Rational::make(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (d < 0) n = -n, d = -d;
  std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  return {n / g, d / g};
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

std::pair<Rational, Rational> density_bounds(const TileSet& ts, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (ts.parts.size() != ts.tiles.size() ||
      std::any_of(ts.parts.begin(), ts.parts.end(), [](Part p) { return p == Part::None; }))
    throw Error(ErrorCode::MalformedSpec, "every tile needs an A/B partition tag");
  std::int64_t lo = -1, hi = -1;
  for_each_tiling(ts, Region{0, 0, n, n}, FillOptions{}, [&](const PatchTiling& p) {
    std::int64_t a = 0;
    for (TileId t : p.cells) a += ts.part(t) == Part::A;
    if (lo < 0 || a < lo) lo = a;
    if (hi < 0 || a > hi) hi = a;
    return true;
  });
  if (lo < 0) throw Error(ErrorCode::NoSolution, "no " + std::to_string(n) + "x" + std::to_string(n) + " tiling");
  const std::int64_t cells = static_cast<std::int64_t>(n) * n;
  return {Rational::make(lo, cells), Rational::make(hi, cells)};
}

// ---------------------------------------------------------------------------

TileSet example1() {
  TileSet ts;
  ts.name = "example1";
  ts.colors = {"white"};
  ts.tiles = {Tile{0, 0, 0, 0, "white"}};
  return ts;
}

TileSet example2(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "example2 needs N >= 2");
  TileSet ts;
  ts.name = "example2(" + std::to_string(n) + ")";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ts.colors.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Tile t;
      t.left = example2_color(n, i, j);
      t.bottom = example2_color(n, i, j);
      t.right = example2_color(n, i + 1, j);
      t.top = example2_color(n, i, j + 1);
      t.label = ts.colors[static_cast<std::size_t>(t.left)];
      ts.tiles.push_back(t);
    }
  }
  return ts;
}

TileSet chessboard() {
  TileSet ts;
  ts.name = "chessboard";
  ts.colors = {"black", "white"};
  ts.tiles = {Tile{0, 0, 0, 0, "black"}, Tile{1, 1, 1, 1, "white"}};
  return ts;
}

TileSet thue_morse_block(int n) {
  if (n < 2 || (n & (n - 1)) != 0) throw Error(ErrorCode::InvalidArgument, "thue_morse_block needs N a power of two >= 2");
  TileSet ts;
  ts.name = "thue_morse_block(" + std::to_string(n) + ")";
  // Colors 0..N^2-1: bare coordinates (used on macro-tile borders).
  // Colors N^2 + 2*c + f: coordinate c carrying father letter f (internal edges).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ts.colors.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
  for (int c = 0; c < n * n; ++c)
    for (int f = 0; f < 2; ++f) ts.colors.push_back(ts.colors[static_cast<std::size_t>(c)] + "/" + std::to_string(f));
  auto col = [&](int i, int j, int f, bool border) {
    ColorId c = example2_color(n, i, j);
    return border ? c : n * n + 2 * c + f;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int f = 0; f < 2; ++f) {
        // Matrix row of cell (i,j) counted from the top of the block.
        const int row = n - 1 - j;
        const int own = f ^ (__builtin_popcount(static_cast<unsigned>(i)) & 1) ^
                        (__builtin_popcount(static_cast<unsigned>(row)) & 1);
        Tile t;
        t.left = col(i, j, f, i == 0);
        t.right = col(i + 1, j, f, i == n - 1);
        t.bottom = col(i, j, f, j == 0);
        t.top = col(i, j + 1, f, j == n - 1);
        t.label = ts.colors[static_cast<std::size_t>(example2_color(n, i, j))] + " father=" + std::to_string(f) +
                  " letter=" + std::to_string(own);
        ts.tiles.push_back(t);
        ts.parts.push_back(own == 0 ? Part::A : Part::B);
      }
    }
  }
  return ts;
}

TileSet builtin(const std::string& name) {
  static const std::regex param(R"(^\s*(\w+)\s*(?:\(\s*(\d+)\s*\)|:\s*(\d+))\s*$)");
  std::smatch m;
  if (name == "example1") return example1();
  if (name == "chessboard") return chessboard();
  if (std::regex_match(name, m, param)) {
    const std::string base = m[1];
    const int n = std::stoi(m[2].matched ? m[2].str() : m[3].str());
    if (base == "example2") return example2(n);
    if (base == "thue_morse_block") return thue_morse_block(n);
  }
  throw Error(ErrorCode::UnknownName, "no built-in tile set named '" + name + "'");
}

void set_partition(TileSet& ts, const std::vector<TileId>& a_tiles) {
  ts.parts.assign(ts.tiles.size(), Part::B);
  for (TileId t : a_tiles) {
    if (t < 0 || t >= ts.size()) throw Error(ErrorCode::InvalidArgument, "partition tile index out of range");
    ts.parts[static_cast<std::size_t>(t)] = Part::A;
  }
}

}  // namespace tileforge
