#include "tileforge/zoom_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tileforge/error.hpp"

namespace tileforge {

namespace {

// Exponents beyond this would not fit in memory anyway.
constexpr std::int64_t kMaxExponent = std::int64_t{1} << 22;

}  // namespace

ZoomSchedule ZoomSchedule::fixed(std::int64_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "fixed zoom must be >= 2");
  ZoomSchedule s;
  s.kind = Kind::Fixed;
  s.n = n;
  return s;
}

ZoomSchedule ZoomSchedule::powers(std::int64_t q, std::int64_t c_num, std::int64_t c_den) {
  if (q < 2) throw Error(ErrorCode::InvalidArgument, "Q must be >= 2");
  if (c_den <= 0 || c_num < c_den) throw Error(ErrorCode::InvalidArgument, "c must be >= 1");
  const std::int64_t g = std::gcd(c_num, c_den);
  ZoomSchedule s;
  s.kind = Kind::Powers;
  s.q = q;
  s.c_num = c_num / g;
  s.c_den = c_den / g;
  return s;
}

ZoomSchedule ZoomSchedule::powers(std::int64_t q, const std::string& c) {
  std::int64_t num = 0, den = 1;
  bool dot = false, any = false;
  for (char ch : c) {
    if (ch == '.' && !dot) {
      dot = true;
      continue;
    }
    if (ch < '0' || ch > '9' || num > (std::int64_t{1} << 40)) throw Error(ErrorCode::InvalidArgument, "bad decimal c: " + c);
    num = num * 10 + (ch - '0');
    if (dot) den *= 10;
    any = true;
  }
  if (!any) throw Error(ErrorCode::InvalidArgument, "bad decimal c: " + c);
  return powers(q, num, den);
}

BigInt ZoomSchedule::N(int k) const {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative level");
  if (kind == Kind::Fixed) return BigInt(n);
  const BigInt e = boost::multiprecision::pow(BigInt(c_num), static_cast<unsigned>(k)) /
                   boost::multiprecision::pow(BigInt(c_den), static_cast<unsigned>(k));
  if (e > kMaxExponent) throw Error(ErrorCode::SizeCap, "N_" + std::to_string(k) + " is too large to represent");
  return boost::multiprecision::pow(BigInt(q), e.convert_to<unsigned>());
}

BigInt ZoomSchedule::L(int k) const {
  BigInt l = 1;
  for (int j = 0; j < k; ++j) l *= N(j);
  return l;
}

std::string ZoomSchedule::describe() const {
  if (kind == Kind::Fixed) return "fixed(" + std::to_string(n) + ")";
  return "powers(" + std::to_string(q) + "," + std::to_string(c_num) + "/" + std::to_string(c_den) + ")";
}

std::pair<BigInt, BigInt> zoom_values(const ZoomSchedule& s, int k) { return {s.N(k), s.L(k)}; }

int floor_log2(const BigInt& v) {
  if (v < 1) throw Error(ErrorCode::InvalidArgument, "log of a non-positive number");
  return static_cast<int>(boost::multiprecision::msb(v));
}

int ceil_log2(const BigInt& v) {
  if (v <= 1) return 0;
  return static_cast<int>(boost::multiprecision::msb(BigInt(v - 1))) + 1;
}

MacroCoord macro_coord(const ZoomSchedule& s, int level, const BigInt& column, const BigInt& y) {
  const BigInt nk = s.N(level);
  if (column < 0 || y < 0 || y >= nk) throw Error(ErrorCode::OutOfDomain, "macro coordinate out of range");
  return MacroCoord{level, column % nk, y, column * s.L(level)};
}

std::optional<BigInt> delegated_bit(const ZoomSchedule& s, const MacroCoord& mc) {
  if (mc.y < s.L(mc.level)) return mc.origin + mc.y;
  return std::nullopt;
}

Interval responsibility_zone(const ZoomSchedule& s, int level, const BigInt& index) {
  const BigInt l = s.L(level);
  return Interval{index * l, (index + 1) * l};
}

std::int64_t default_group_length(int k) {
  const double v = std::log2(std::log2(std::log2(static_cast<double>(std::max(k, 27)))));
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(v)));
}

Interval check_group(const ZoomSchedule& s, const MacroCoord& mc, const std::function<std::int64_t(int)>& length_fn) {
  const auto b = delegated_bit(s, mc);
  if (!b) throw Error(ErrorCode::NoDelegatedBit, "vertical position is not below L_k");
  const std::int64_t len = std::max<std::int64_t>(1, length_fn(mc.level));
  const BigInt zone_end = mc.origin + s.L(mc.level);
  return Interval{*b, std::min(BigInt(*b + len), zone_end)};
}

std::vector<std::pair<int, int>> checksum_routes(int n, int i) {
  if (n < 1 || i < 0 || i >= n) throw Error(ErrorCode::OutOfDomain, "row index outside the grid");
  std::vector<std::pair<int, int>> cells;
  for (int x = 0; x < n; ++x) cells.emplace_back(x, i);
  for (int y = 0; y < n; ++y)
    if (y != i) cells.emplace_back(i, y);
  std::sort(cells.begin(), cells.end());
  return cells;
}

std::vector<bool> FieldBudget::field_fits() const {
  std::vector<bool> out;
  for (std::int64_t v : {a, b, c, d, e, f}) out.push_back(BigInt(v) <= budget);
  return out;
}

FieldBudget consciousness_budget(const ZoomSchedule& s, int k, int checksums, std::int64_t alphabet) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "consciousness budget needs k >= 1");
  if (checksums < 0 || alphabet < 1) throw Error(ErrorCode::InvalidArgument, "bad checksum count or alphabet size");
  FieldBudget fb;
  fb.a = ceil_log2(BigInt(k)) + 2 * static_cast<std::int64_t>(ceil_log2(s.N(k)));
  fb.b = ceil_log2(BigInt(alphabet));
  fb.c = 1;
  fb.d = 1;
  fb.e = static_cast<std::int64_t>(checksums) * 2 * ceil_log2(BigInt(2 * s.N(k - 1)));
  fb.f = default_group_length(k);
  fb.budget = s.N(k - 1);
  return fb;
}

ForbiddenFactorSource explicit_source(std::vector<std::string> strings) {
  std::sort(strings.begin(), strings.end());
  strings.erase(std::unique(strings.begin(), strings.end()), strings.end());
  ForbiddenFactorSource src;
  src.name = "explicit";
  src.enumerate = [strings](std::size_t budget) {
    return std::vector<std::string>(strings.begin(), strings.begin() + static_cast<std::ptrdiff_t>(std::min(budget, strings.size())));
  };
  return src;
}

ForbiddenFactorSource runs_source(char bit, std::size_t min_len) {
  ForbiddenFactorSource src;
  src.name = std::string("runs(") + bit + ">=" + std::to_string(min_len) + ")";
  src.enumerate = [bit, min_len](std::size_t budget) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < budget; ++j) out.emplace_back(min_len + j, bit);
    return out;
  };
  return src;
}

std::vector<FactorViolation> scan_forbidden(const std::string& omega, const ForbiddenFactorSource& src,
                                            std::size_t budget) {
  std::vector<FactorViolation> out;
  for (const auto& f : src.enumerate(budget)) {
    if (f.empty() || f.size() > omega.size()) continue;
    for (std::size_t pos = omega.find(f); pos != std::string::npos; pos = omega.find(f, pos + 1))
      out.push_back({pos, f});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.offset, a.factor) < std::tie(b.offset, b.factor);
  });
  return out;
}

}  // namespace tileforge
