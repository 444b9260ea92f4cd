#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tileforge/wang_core.hpp"

namespace tileforge {

using Letter = int;

/// Rectangular array of letters in matrix convention: row 0 is the top row.
/// Cell (row, col) sits at plane coordinate (anchor_x + col, anchor_y + row).
struct LetterPattern {
  int rows = 0;
  int cols = 0;
  int anchor_x = 0;
  int anchor_y = 0;
  std::vector<Letter> cells;

  LetterPattern() = default;
  LetterPattern(int r, int c, Letter fill = 0) : rows(r), cols(c), cells(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}
  LetterPattern(std::initializer_list<std::initializer_list<Letter>> m);

  Letter at(int r, int c) const { return cells[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
  Letter& at(int r, int c) { return cells[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }

  friend bool operator==(const LetterPattern& a, const LetterPattern& b) {
    return a.rows == b.rows && a.cols == b.cols && a.cells == b.cells;
  }
};

/// s : A -> A^{m x m}. Letters are indices into `alphabet`.
struct SubstitutionRule {
  std::vector<std::string> alphabet;
  int m = 2;
  /// One m x m matrix per letter.
  std::vector<LetterPattern> table;

  int size() const { return static_cast<int>(alphabet.size()); }
  Letter image(Letter a, int r, int c) const { return table[static_cast<std::size_t>(a)].at(r, c); }
  Letter letter(const std::string& name) const;
  void validate() const;
};

SubstitutionRule thue_morse_rule();
/// Both letters map to the same checkerboard block.
SubstitutionRule example3_rule();

LetterPattern apply(const SubstitutionRule& s, const LetterPattern& p);
/// s^k as a rule with block size m^k.
SubstitutionRule power(const SubstitutionRule& s, int k);

inline constexpr std::size_t kDefaultPatternCap = std::size_t{1} << 26;

/// s^n(a); throws SizeCap if the result would exceed `cell_cap` cells.
LetterPattern iterate(const SubstitutionRule& s, Letter a, int n, std::size_t cell_cap = kDefaultPatternCap);

/// (a_n, b_n) as '0'/'1' strings.
std::pair<std::string, std::string> tm_words(int n);

struct Agreement {
  std::size_t agree = 0;
  std::size_t disagree = 0;
  friend bool operator==(const Agreement&, const Agreement&) = default;
};

Agreement shift_agreement(const std::string& w, std::size_t u);

/// For every n <= n_max and 1 <= u <= 2^n/4, both counts of a_n are >= 2^(n-2).
/// Returns the first failing (n, u) or nullopt when the lemma holds.
std::optional<std::pair<int, std::size_t>> folklore_lemma_counterexample(int n_max);

inline int tm1(std::int64_t x) { return __builtin_popcountll(static_cast<unsigned long long>(x)) & 1; }
inline int tm_cell(std::int64_t x, std::int64_t y) { return tm1(x) ^ tm1(y); }

struct MismatchCount {
  std::uint64_t mismatches = 0;
  std::uint64_t total = 0;
  double fraction() const { return total == 0 ? 0.0 : static_cast<double>(mismatches) / static_cast<double>(total); }
};

using LetterField = std::function<Letter(std::int64_t x, std::int64_t y)>;

/// Exact count of x in `window` with f(x) != f(x + T); `domain` bounds where
/// f is defined (throws OutOfDomain if window or window+T leaves it).
MismatchCount aperiodicity_measure(const LetterField& f, const Region& domain, PeriodVector t, const Region& window,
                                   int jobs = 1);
MismatchCount aperiodicity_measure(const LetterPattern& p, PeriodVector t, const Region& window);
/// Same count for the 2D Thue-Morse field, factorized through the 1D word.
MismatchCount tm_aperiodicity(PeriodVector t, const Region& window);

struct CompatibilityResult {
  bool compatible = false;
  /// Level i: offset (col, row) of level-(i) pattern inside s(level i+1).
  std::vector<std::pair<int, int>> offsets;
  /// preimages[i] is X_{i+1}: s(preimages[0]) contains p, and so on.
  std::vector<LetterPattern> preimages;
  std::uint64_t explored = 0;
};

/// Searches for a chain X_d -> ... -> X_1 -> p of preimages under s, each
/// level sitting at some offset in [0,m)^2 inside the image of the next.
CompatibilityResult check_compatible(const LetterPattern& p, const SubstitutionRule& s, int depth,
                                     std::uint64_t search_cap = 10'000'000);

nlohmann::json to_json(const SubstitutionRule& s);
SubstitutionRule rule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LetterPattern& p);

/// P6 image with one fixed color per letter, top row first.
std::string render_pattern_ppm(const LetterPattern& p, int scale = 1);

}  // namespace tileforge
