#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tileforge {

using BigInt = boost::multiprecision::cpp_int;

/// Zoom factors N_k of a hierarchy of macro-tiles: either constant, or
/// N_k = Q^floor(c^k) with c = c_num / c_den held exactly.
struct ZoomSchedule {
  enum class Kind { Fixed, Powers };
  Kind kind = Kind::Fixed;
  std::int64_t n = 2;
  std::int64_t q = 16;
  std::int64_t c_num = 5;
  std::int64_t c_den = 2;

  static ZoomSchedule fixed(std::int64_t n);
  static ZoomSchedule powers(std::int64_t q, std::int64_t c_num, std::int64_t c_den);
  /// Exact decimal such as "2.5".
  static ZoomSchedule powers(std::int64_t q, const std::string& c);

  BigInt N(int k) const;
  /// L_k = N_0 ... N_{k-1}; L_0 = 1.
  BigInt L(int k) const;
  std::string describe() const;
};

std::pair<BigInt, BigInt> zoom_values(const ZoomSchedule& s, int k);

/// floor(log2 v) for v >= 1, and ceil(log2 v) (0 for v <= 1).
int floor_log2(const BigInt& v);
int ceil_log2(const BigInt& v);

/// A level-k macro-tile: (x, y) is its position inside its father and
/// `origin` the first omega index of its zone of responsibility.
struct MacroCoord {
  int level = 0;
  BigInt x, y;
  BigInt origin;
};

/// Coordinates of the level-k macro-tile with horizontal index `column` and
/// vertical position `y` in its father.
MacroCoord macro_coord(const ZoomSchedule& s, int level, const BigInt& column, const BigInt& y);

/// Half-open interval of omega indices.
struct Interval {
  BigInt lo, hi;
  BigInt length() const { return hi - lo; }
  bool contains(const BigInt& v) const { return lo <= v && v < hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// origin + y when y < L_k; macro-tiles higher up carry no bit.
std::optional<BigInt> delegated_bit(const ZoomSchedule& s, const MacroCoord& mc);

/// [index * L_k, (index + 1) * L_k).
Interval responsibility_zone(const ZoomSchedule& s, int level, const BigInt& index);

/// max(1, floor(log2 log2 log2 max(k, 27))).
std::int64_t default_group_length(int k);

/// Bits checked by a macro-tile: from its delegated bit, truncated at the end
/// of its zone. Throws NoDelegatedBit.
Interval check_group(const ZoomSchedule& s, const MacroCoord& mc,
                     const std::function<std::int64_t(int)>& length_fn = default_group_length);

/// Row i and column i of an N x N grid as (x, y) cells; 2N - 1 cells.
std::vector<std::pair<int, int>> checksum_routes(int n, int i);

/// Bits a level-k macro-tile must keep on one tape row.
struct FieldBudget {
  std::int64_t a = 0;  // level number and position in the father
  std::int64_t b = 0;  // own letter
  std::int64_t c = 0;  // delegated bit
  std::int64_t d = 0;  // check flag
  std::int64_t e = 0;  // checksums
  std::int64_t f = 0;  // check group
  BigInt budget;       // N_{k-1}
  std::int64_t total() const { return a + b + c + d + e + f; }
  bool fits() const { return BigInt(total()) <= budget; }
  /// Per-field fit, in field order A..F.
  std::vector<bool> field_fits() const;
};

/// A = ceil log2 k + 2 ceil log2 N_k, B = ceil log2 |alphabet|, C = D-flag = 1,
/// E = D * 2 ceil log2 q with q the least power of two >= 2 N_{k-1} (the
/// checksum field), F = default check-group length. Requires k >= 1.
FieldBudget consciousness_budget(const ZoomSchedule& s, int k, int checksums, std::int64_t alphabet = 1);

/// Enumerates candidate forbidden strings; `budget` bounds how many.
struct ForbiddenFactorSource {
  std::string name;
  std::function<std::vector<std::string>(std::size_t budget)> enumerate;
  /// Parameters of a complexity-style description (K(x) >= alpha |x| - c);
  /// metadata only, never evaluated.
  std::optional<std::pair<double, double>> complexity;
};

ForbiddenFactorSource explicit_source(std::vector<std::string> strings);
/// bit^j for j = min_len, min_len + 1, ...
ForbiddenFactorSource runs_source(char bit, std::size_t min_len);

struct FactorViolation {
  std::size_t offset = 0;
  std::string factor;
  friend bool operator==(const FactorViolation& a, const FactorViolation& b) {
    return a.offset == b.offset && a.factor == b.factor;
  }
};

/// Every occurrence of every enumerated string, sorted by (offset, factor).
std::vector<FactorViolation> scan_forbidden(const std::string& omega, const ForbiddenFactorSource& src,
                                            std::size_t budget);

}  // namespace tileforge
