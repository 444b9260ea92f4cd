#include "tileforge/substitution.hpp"

#include <algorithm>
#include <thread>

namespace tileforge {

LetterPattern::LetterPattern(std::initializer_list<std::initializer_list<Letter>> m) {
  rows = static_cast<int>(m.size());
  cols = rows == 0 ? 0 : static_cast<int>(m.begin()->size());
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != cols) throw Error(ErrorCode::DimensionMismatch, "ragged letter matrix");
    cells.insert(cells.end(), row.begin(), row.end());
  }
}

Letter SubstitutionRule::letter(const std::string& name) const {
  auto it = std::find(alphabet.begin(), alphabet.end(), name);
  if (it == alphabet.end()) throw Error(ErrorCode::LetterNotInAlphabet, "'" + name + "' is not in the alphabet");
  return static_cast<Letter>(it - alphabet.begin());
}

void SubstitutionRule::validate() const {
  if (m < 2) throw Error(ErrorCode::MalformedSpec, "block size m must be >= 2");
  if (alphabet.empty()) throw Error(ErrorCode::MalformedSpec, "alphabet is empty");
  if (table.size() != alphabet.size()) throw Error(ErrorCode::MalformedSpec, "rule table is not total on the alphabet");
  for (const auto& mat : table) {
    if (mat.rows != m || mat.cols != m) throw Error(ErrorCode::MalformedSpec, "rule images must be m x m");
    for (Letter l : mat.cells)
      if (l < 0 || l >= size()) throw Error(ErrorCode::LetterNotInAlphabet, "rule image uses letter " + std::to_string(l));
  }
}

SubstitutionRule thue_morse_rule() {
  return SubstitutionRule{{"0", "1"}, 2, {LetterPattern{{0, 1}, {1, 0}}, LetterPattern{{1, 0}, {0, 1}}}};
}

SubstitutionRule example3_rule() {
  return SubstitutionRule{{"0", "1"}, 2, {LetterPattern{{0, 1}, {1, 0}}, LetterPattern{{0, 1}, {1, 0}}}};
}

LetterPattern apply(const SubstitutionRule& s, const LetterPattern& p) {
  const int m = s.m;
  LetterPattern out(p.rows * m, p.cols * m);
  out.anchor_x = p.anchor_x * m;
  out.anchor_y = p.anchor_y * m;
  for (int r = 0; r < p.rows; ++r)
    for (int c = 0; c < p.cols; ++c) {
      const Letter a = p.at(r, c);
      if (a < 0 || a >= s.size()) throw Error(ErrorCode::LetterNotInAlphabet, "letter " + std::to_string(a));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out.at(r * m + i, c * m + j) = s.image(a, i, j);
    }
  return out;
}

LetterPattern iterate(const SubstitutionRule& s, Letter a, int n, std::size_t cell_cap) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "iteration count must be >= 0");
  if (a < 0 || a >= s.size()) throw Error(ErrorCode::LetterNotInAlphabet, "letter " + std::to_string(a));
  std::size_t side = 1;
  for (int i = 0; i < n; ++i) {
    side *= static_cast<std::size_t>(s.m);
    if (side * side > cell_cap) throw Error(ErrorCode::SizeCap, "s^" + std::to_string(n) + " exceeds the pattern size cap");
  }
  LetterPattern p(1, 1, a);
  for (int i = 0; i < n; ++i) p = apply(s, p);
  return p;
}

SubstitutionRule power(const SubstitutionRule& s, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "power must be >= 1");
  SubstitutionRule out{s.alphabet, 1, {}};
  for (Letter a = 0; a < s.size(); ++a) out.table.push_back(iterate(s, a, k));
  out.m = out.table.front().rows;
  return out;
}

std::pair<std::string, std::string> tm_words(int n) {
  if (n < 0 || n > 30) throw Error(ErrorCode::InvalidArgument, "n must be in [0,30]");
  std::string a = "0", b = "1";
  for (int i = 0; i < n; ++i) {
    std::string a2 = a + b;
    b += a;
    a = std::move(a2);
  }
  return {a, b};
}

Agreement shift_agreement(const std::string& w, std::size_t u) {
  if (u < 1 || u >= w.size()) throw Error(ErrorCode::InvalidArgument, "shift must satisfy 1 <= u < |w|");
  Agreement r;
  const std::size_t n = w.size() - u;
  const char* p = w.data();
  std::size_t same = 0;
  for (std::size_t i = 0; i < n; ++i) same += p[i] == p[i + u];
  r.agree = same;
  r.disagree = n - same;
  return r;
}

std::optional<std::pair<int, std::size_t>> folklore_lemma_counterexample(int n_max) {
  if (n_max < 0 || n_max > 30) throw Error(ErrorCode::InvalidArgument, "n_max must be in [0,30]");
  std::string a = tm_words(n_max).first;
  for (int n = 0; n <= n_max; ++n) {
    const std::string an = a.substr(0, std::size_t{1} << n);
    const std::size_t bound = n >= 2 ? std::size_t{1} << (n - 2) : 0;
    for (std::size_t u = 1; u <= an.size() / 4; ++u) {
      Agreement g = shift_agreement(an, u);
      if (g.agree < bound || g.disagree < bound) return std::make_pair(n, u);
    }
  }
  return std::nullopt;
}

namespace {

void require_inside(const Region& domain, const Region& w, const char* what) {
  if (w.x0 < domain.x0 || w.y0 < domain.y0 || w.x0 + w.width > domain.x0 + domain.width ||
      w.y0 + w.height > domain.y0 + domain.height)
    throw Error(ErrorCode::OutOfDomain, std::string(what) + " leaves the generated domain");
}

}  // namespace

MismatchCount aperiodicity_measure(const LetterField& f, const Region& domain, PeriodVector t, const Region& window,
                                   int jobs) {
  require_inside(domain, window, "window");
  require_inside(domain, Region{window.x0 + t.dx, window.y0 + t.dy, window.width, window.height}, "shifted window");
  const int workers = std::max(1, std::min(jobs, window.height));
  std::vector<std::uint64_t> partial(static_cast<std::size_t>(workers), 0);
  auto run = [&](int w) {
    std::uint64_t c = 0;
    for (int y = window.y0 + w; y < window.y0 + window.height; y += workers)
      for (int x = window.x0; x < window.x0 + window.width; ++x) c += f(x, y) != f(x + t.dx, y + t.dy);
    partial[static_cast<std::size_t>(w)] = c;
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  MismatchCount out;
  for (auto c : partial) out.mismatches += c;
  out.total = window.cell_count();
  return out;
}

MismatchCount aperiodicity_measure(const LetterPattern& p, PeriodVector t, const Region& window) {
  // Plane y grows with the matrix row index here, as in the anchor convention.
  Region domain{p.anchor_x, p.anchor_y, p.cols, p.rows};
  auto f = [&](std::int64_t x, std::int64_t y) {
    return p.at(static_cast<int>(y - p.anchor_y), static_cast<int>(x - p.anchor_x));
  };
  return aperiodicity_measure(f, domain, t, window);
}

MismatchCount tm_aperiodicity(PeriodVector t, const Region& window) {
  std::uint64_t cx = 0, cy = 0;
  for (std::int64_t x = window.x0; x < window.x0 + window.width; ++x) cx += tm1(x) != tm1(x + t.dx);
  for (std::int64_t y = window.y0; y < window.y0 + window.height; ++y) cy += tm1(y) != tm1(y + t.dy);
  const std::uint64_t w = static_cast<std::uint64_t>(window.width), h = static_cast<std::uint64_t>(window.height);
  // The xor of the two 1D differences is 1 exactly when one of them is.
  return MismatchCount{cx * (h - cy) + (w - cx) * cy, w * h};
}

// ---------------------------------------------------------------------------
// Compatibility

namespace {

using LetterSet = std::uint64_t;

struct SetPattern {
  int rows = 0, cols = 0;
  std::vector<LetterSet> cells;
  LetterSet at(int r, int c) const { return cells[static_cast<std::size_t>(r * cols + c)]; }
};

class CompatSearch {
 public:
  CompatSearch(const SubstitutionRule& s, int depth, std::uint64_t cap) : s_(s), depth_(depth), cap_(cap) {}

  bool run(const SetPattern& p0) {
    levels_.push_back(p0);
    return dfs();
  }

  const std::vector<SetPattern>& levels() const { return levels_; }
  const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }
  std::uint64_t explored() const { return explored_; }

 private:
  bool parent(const SetPattern& child, int ox, int oy, SetPattern& out) const {
    const int m = s_.m;
    out.rows = (child.rows + oy + m - 1) / m;
    out.cols = (child.cols + ox + m - 1) / m;
    out.cells.assign(static_cast<std::size_t>(out.rows * out.cols), 0);
    for (int R = 0; R < out.rows; ++R)
      for (int C = 0; C < out.cols; ++C) {
        LetterSet ok = 0;
        for (Letter b = 0; b < s_.size(); ++b) {
          bool fits = true;
          for (int i = 0; i < m && fits; ++i)
            for (int j = 0; j < m && fits; ++j) {
              const int r = R * m + i - oy, c = C * m + j - ox;
              if (r < 0 || c < 0 || r >= child.rows || c >= child.cols) continue;
              fits = (child.at(r, c) >> s_.image(b, i, j)) & 1;
            }
          if (fits) ok |= LetterSet{1} << b;
        }
        if (ok == 0) return false;
        out.cells[static_cast<std::size_t>(R * out.cols + C)] = ok;
      }
    return true;
  }

  bool dfs() {
    if (static_cast<int>(offsets_.size()) == depth_) return true;
    const SetPattern cur = levels_.back();
    for (int oy = 0; oy < s_.m; ++oy)
      for (int ox = 0; ox < s_.m; ++ox) {
        if (++explored_ > cap_) throw Error(ErrorCode::SearchCap, "compatibility search exceeded its cap");
        SetPattern p;
        if (!parent(cur, ox, oy, p)) continue;
        levels_.push_back(std::move(p));
        offsets_.emplace_back(ox, oy);
        if (dfs()) return true;
        levels_.pop_back();
        offsets_.pop_back();
      }
    return false;
  }

  const SubstitutionRule& s_;
  int depth_;
  std::uint64_t cap_;
  std::vector<SetPattern> levels_;
  std::vector<std::pair<int, int>> offsets_;
  std::uint64_t explored_ = 0;
};

}  // namespace

CompatibilityResult check_compatible(const LetterPattern& p, const SubstitutionRule& s, int depth,
                                     std::uint64_t search_cap) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
  s.validate();
  if (s.size() > 64) throw Error(ErrorCode::InvalidArgument, "compatibility search supports at most 64 letters");
  if (p.rows < 1 || p.cols < 1) throw Error(ErrorCode::InvalidArgument, "pattern must be nonempty");
  SetPattern p0{p.rows, p.cols, {}};
  for (Letter l : p.cells) {
    if (l < 0 || l >= s.size()) throw Error(ErrorCode::LetterNotInAlphabet, "letter " + std::to_string(l));
    p0.cells.push_back(LetterSet{1} << l);
  }
  CompatSearch search(s, depth, search_cap);
  CompatibilityResult res;
  res.compatible = search.run(p0);
  res.explored = search.explored();
  if (!res.compatible) return res;

  // Top level: any letter from each set; then push down through s.
  const auto& levels = search.levels();
  res.offsets = search.offsets();
  const SetPattern& top = levels.back();
  LetterPattern cur(top.rows, top.cols);
  for (int r = 0; r < top.rows; ++r)
    for (int c = 0; c < top.cols; ++c) cur.at(r, c) = __builtin_ctzll(top.at(r, c));
  std::vector<LetterPattern> chain{cur};
  for (int lvl = depth - 1; lvl >= 1; --lvl) {
    const auto [ox, oy] = res.offsets[static_cast<std::size_t>(lvl)];
    const LetterPattern img = apply(s, cur);
    LetterPattern next(levels[static_cast<std::size_t>(lvl)].rows, levels[static_cast<std::size_t>(lvl)].cols);
    for (int r = 0; r < next.rows; ++r)
      for (int c = 0; c < next.cols; ++c) next.at(r, c) = img.at(r + oy, c + ox);
    cur = next;
    chain.push_back(cur);
  }
  std::reverse(chain.begin(), chain.end());
  res.preimages = std::move(chain);
  return res;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const SubstitutionRule& s) {
  nlohmann::json j;
  j["alphabet"] = s.alphabet;
  j["m"] = s.m;
  j["table"] = nlohmann::json::object();
  for (Letter a = 0; a < s.size(); ++a) {
    nlohmann::json mat = nlohmann::json::array();
    const LetterPattern& t = s.table[static_cast<std::size_t>(a)];
    for (int r = 0; r < t.rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < t.cols; ++c) row.push_back(s.alphabet[static_cast<std::size_t>(t.at(r, c))]);
      mat.push_back(row);
    }
    j["table"][s.alphabet[static_cast<std::size_t>(a)]] = mat;
  }
  return j;
}

SubstitutionRule rule_from_json(const nlohmann::json& j) {
  SubstitutionRule s;
  try {
    for (const auto& a : j.at("alphabet")) s.alphabet.push_back(a.is_string() ? a.get<std::string>() : a.dump());
    s.m = j.at("m").get<int>();
    const auto& table = j.at("table");
    for (const auto& name : s.alphabet) {
      if (!table.contains(name)) throw Error(ErrorCode::MalformedSpec, "rule table has no entry for '" + name + "'");
      const auto& mat = table.at(name);
      LetterPattern p(static_cast<int>(mat.size()), mat.empty() ? 0 : static_cast<int>(mat[0].size()));
      for (int r = 0; r < p.rows; ++r) {
        if (static_cast<int>(mat[static_cast<std::size_t>(r)].size()) != p.cols)
          throw Error(ErrorCode::MalformedSpec, "ragged rule matrix");
        for (int c = 0; c < p.cols; ++c) {
          const auto& cell = mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
          p.at(r, c) = s.letter(cell.is_string() ? cell.get<std::string>() : cell.dump());
        }
      }
      s.table.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, e.what());
  }
  s.validate();
  return s;
}

nlohmann::json to_json(const LetterPattern& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < p.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < p.cols; ++c) row.push_back(p.at(r, c));
    rows.push_back(row);
  }
  return {{"anchor", {p.anchor_x, p.anchor_y}}, {"rows", rows}};
}

std::string render_pattern_ppm(const LetterPattern& p, int scale) {
  if (scale < 1) throw Error(ErrorCode::InvalidArgument, "scale must be >= 1");
  static const unsigned char palette[8][3] = {{255, 255, 255}, {0, 0, 0},     {220, 50, 47},  {38, 139, 210},
                                              {133, 153, 0},  {181, 137, 0}, {108, 113, 196}, {42, 161, 152}};
  const int w = p.cols * scale, h = p.rows * scale;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto* c = palette[static_cast<std::size_t>(p.at(y / scale, x / scale)) % 8];
      out.append(reinterpret_cast<const char*>(c), 3);
    }
  return out;
}

}  // namespace tileforge
