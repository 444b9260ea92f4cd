#include "tileforge/rs_field.hpp"

#include <bit>
#include <cmath>
#include <set>

#include "tileforge/error.hpp"

namespace tileforge {

namespace {

int poly_degree(std::uint32_t p) { return p == 0 ? -1 : 31 - std::countl_zero(p); }

std::uint32_t gf2_mod(std::uint32_t a, std::uint32_t m) {
  const int dm = poly_degree(m);
  for (int d = poly_degree(a); d >= dm; d = poly_degree(a)) a ^= m << (d - dm);
  return a;
}

}  // namespace

bool gf2_irreducible(std::uint32_t poly) {
  const int t = poly_degree(poly);
  if (t < 1) return false;
  for (std::uint32_t d = 2; poly_degree(d) <= t / 2; ++d)
    if (gf2_mod(poly, d) == 0) return false;
  return true;
}

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

Field Field::binary(int t, std::uint32_t poly) {
  if (t < 1 || t > 16) throw Error(ErrorCode::InvalidArgument, "binary field degree must be in [1, 16]");
  if (poly_degree(poly) != t || !gf2_irreducible(poly))
    throw Error(ErrorCode::InvalidArgument, "polynomial is not irreducible of degree " + std::to_string(t));
  Field f;
  f.kind_ = Kind::Binary;
  f.t_ = t;
  f.poly_ = poly;
  f.q_ = std::uint32_t{1} << t;
  return f;
}

Field Field::prime(std::uint32_t p) {
  if (!is_prime(p) || p > (std::uint32_t{1} << 31))
    throw Error(ErrorCode::InvalidArgument, std::to_string(p) + " is not a supported prime");
  Field f;
  f.kind_ = Kind::Prime;
  f.t_ = 1;
  f.q_ = p;
  return f;
}

int Field::bits() const { return kind_ == Kind::Binary ? t_ : poly_degree(q_ - 1) + 1; }

Elem Field::mul(Elem a, Elem b) const {
  if (kind_ == Kind::Prime) return static_cast<Elem>(std::uint64_t{a} * b % q_);
  std::uint32_t r = 0;
  for (; b; b >>= 1, a <<= 1)
    if (b & 1) r ^= a;
  return gf2_mod(r, poly_);
}

Elem Field::pow(Elem a, std::uint64_t e) const {
  Elem r = 1;
  for (; e; e >>= 1, a = mul(a, a))
    if (e & 1) r = mul(r, a);
  return r;
}

Elem Field::inv(Elem a) const {
  if (a == 0 || a >= q_) throw Error(ErrorCode::InvalidArgument, "no inverse for " + std::to_string(a));
  return pow(a, q_ - 2);
}

Field build_field(int t) {
  if (t < 1 || t > 16) throw Error(ErrorCode::InvalidArgument, "field degree must be in [1, 16]");
  for (std::uint32_t low = 0; low < (std::uint32_t{1} << t); ++low) {
    const std::uint32_t poly = (std::uint32_t{1} << t) | low;
    if (gf2_irreducible(poly)) return Field::binary(t, poly);
  }
  throw Error(ErrorCode::InvalidArgument, "no irreducible polynomial");  // unreachable
}

void RSCode::validate() const {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "code needs at least one evaluation point");
  if (static_cast<std::uint64_t>(n()) + static_cast<std::uint64_t>(D()) > field.size())
    throw Error(ErrorCode::InvalidArgument, "n + D exceeds the field size");
  if (degree_bound < 1 || degree_bound > n()) throw Error(ErrorCode::InvalidArgument, "degree bound must be in [1, n]");
  std::set<Elem> seen;
  for (const auto* v : {&points, &checks})
    for (Elem x : *v) {
      if (!field.contains(x)) throw Error(ErrorCode::InvalidArgument, "point outside the field");
      if (!seen.insert(x).second) throw Error(ErrorCode::DuplicatePoint, "point " + std::to_string(x) + " repeated");
    }
}

RSCode make_code(const Field& f, int n, int D) {
  if (n < 1 || D < 0) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and D >= 0");
  std::vector<Elem> xs, as;
  for (int i = 0; i < n; ++i) xs.push_back(static_cast<Elem>(i));
  for (int j = 0; j < D; ++j) as.push_back(static_cast<Elem>(n + j));
  return make_code(f, std::move(xs), std::move(as), n);
}

RSCode make_code(const Field& f, std::vector<Elem> points, std::vector<Elem> checks, int d) {
  RSCode c{f, std::move(points), std::move(checks), d};
  c.validate();
  return c;
}

Elem lagrange_eval(const Field& f, const std::vector<Elem>& xs, const std::vector<Elem>& ys, Elem at) {
  Elem sum = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Elem num = 1, den = 1;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      num = f.mul(num, f.sub(at, xs[j]));
      den = f.mul(den, f.sub(xs[i], xs[j]));
    }
    sum = f.add(sum, f.mul(ys[i], f.div(num, den)));
  }
  return sum;
}

namespace {

void check_values(const RSCode& code, const std::vector<Elem>& values) {
  if (values.size() != code.points.size())
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(code.n()) + " values, got " + std::to_string(values.size()));
  for (Elem v : values)
    if (!code.field.contains(v)) throw Error(ErrorCode::InvalidArgument, "value outside the field");
}

}  // namespace

std::vector<Elem> rs_checksums(const RSCode& code, const std::vector<Elem>& values) {
  check_values(code, values);
  std::vector<Elem> out;
  for (Elem a : code.checks) out.push_back(lagrange_eval(code.field, code.points, values, a));
  return out;
}

RSStream::RSStream(const RSCode& code) : code_(&code), q_(code.checks.size(), 1), r_(code.checks.size(), 0) {}

void RSStream::push(Elem x, Elem value) {
  const RSCode& c = *code_;
  const Field& f = c.field;
  for (int j = 0; j < i_; ++j)
    if (c.points[static_cast<std::size_t>(j)] == x)
      throw Error(ErrorCode::DuplicatePoint, "point " + std::to_string(x) + " already streamed");
  if (i_ >= c.n()) throw Error(ErrorCode::DimensionMismatch, "stream longer than n");
  if (c.points[static_cast<std::size_t>(i_)] != x) throw Error(ErrorCode::InvalidArgument, "points must arrive in code order");
  if (!f.contains(value)) throw Error(ErrorCode::InvalidArgument, "value outside the field");
  // Barycentric weight of x: depends on the code only.
  Elem den = 1;
  for (Elem y : c.points)
    if (y != x) den = f.mul(den, f.sub(x, y));
  const Elem coef = f.mul(value, f.inv(den));
  for (std::size_t j = 0; j < c.checks.size(); ++j) {
    const Elem lin = f.sub(c.checks[j], x);
    r_[j] = f.add(f.mul(r_[j], lin), f.mul(coef, q_[j]));
    q_[j] = f.mul(q_[j], lin);
  }
  ++i_;
}

std::vector<Elem> RSStream::finish() const {
  if (i_ != code_->n())
    throw Error(ErrorCode::DimensionMismatch, "stream ended after " + std::to_string(i_) + " of " + std::to_string(code_->n()));
  return r_;
}

std::vector<Elem> rs_stream_checksums(const RSCode& code, const std::vector<std::pair<Elem, Elem>>& stream) {
  RSStream s(code);
  for (auto [x, v] : stream) s.push(x, v);
  return s.finish();
}

std::vector<Elem> rs_erasure_decode(const RSCode& code, const std::vector<std::optional<Elem>>& known,
                                    const std::vector<Elem>& checksums) {
  const Field& f = code.field;
  if (known.size() != code.points.size()) throw Error(ErrorCode::DimensionMismatch, "known vector must have n entries");
  if (checksums.size() != code.checks.size()) throw Error(ErrorCode::DimensionMismatch, "expected D checksums");
  std::vector<Elem> xs, ys;
  int erased = 0;
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (!known[i]) {
      ++erased;
      continue;
    }
    if (!f.contains(*known[i])) throw Error(ErrorCode::InvalidArgument, "value outside the field");
    xs.push_back(code.points[i]);
    ys.push_back(*known[i]);
  }
  if (erased > code.D())
    throw Error(ErrorCode::TooManyErasures, std::to_string(erased) + " erasures, at most " + std::to_string(code.D()));
  std::vector<Elem> out;
  if (erased == 0) {
    for (const auto& v : known) out.push_back(*v);
  }
  for (std::size_t j = 0; j < checksums.size(); ++j) {
    xs.push_back(code.checks[j]);
    ys.push_back(checksums[j]);
  }
  const std::size_t n = code.points.size();
  const std::vector<Elem> bx(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n));
  const std::vector<Elem> by(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(n));
  for (std::size_t i = n; i < xs.size(); ++i)
    if (lagrange_eval(f, bx, by, xs[i]) != ys[i])
      throw Error(ErrorCode::InconsistentData, "point " + std::to_string(xs[i]) + " is off the interpolant");
  if (erased == 0) return out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(known[i] ? *known[i] : lagrange_eval(f, bx, by, code.points[i]));
  return out;
}

FamilyReport validate_family_parameters(const std::vector<long double>& N, const std::vector<long double>& eps,
                                        long double target) {
  FamilyReport rep;
  rep.target = target;
  for (long double e : eps) rep.eps_sum += e;
  for (std::size_t k = 0; k + 1 < N.size() && k < eps.size(); ++k) {
    FamilyLevel lv;
    lv.k = static_cast<int>(k);
    lv.lhs = 4 * std::log2(N[k + 1]);
    lv.rhs = eps[k] * N[k] * N[k];
    // Relative slack for values computed to hit the bound exactly.
    lv.ok = lv.lhs <= lv.rhs * (1 + 1e-12L);
    rep.levels_ok = rep.levels_ok && lv.ok;
    rep.levels.push_back(lv);
  }
  rep.sum_ok = rep.eps_sum < target;
  return rep;
}

std::string to_hex(const Field& f, const std::vector<Elem>& v) {
  static const char* digits = "0123456789abcdef";
  const int bytes = (f.bits() + 7) / 8;
  std::string out;
  for (Elem e : v)
    for (int b = bytes - 1; b >= 0; --b) {
      const unsigned byte = (e >> (8 * b)) & 0xffu;
      out += digits[byte >> 4];
      out += digits[byte & 15];
    }
  return out;
}

std::vector<Elem> from_hex(const Field& f, const std::string& hex) {
  const std::size_t width = 2 * static_cast<std::size_t>((f.bits() + 7) / 8);
  if (hex.size() % width != 0) throw Error(ErrorCode::MalformedSpec, "hex length is not a multiple of the element width");
  std::vector<Elem> out;
  for (std::size_t i = 0; i < hex.size(); i += width) {
    Elem e = 0;
    for (std::size_t k = 0; k < width; ++k) {
      const char c = hex[i + k];
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else throw Error(ErrorCode::MalformedSpec, std::string("bad hex digit '") + c + "'");
      e = (e << 4) | static_cast<Elem>(d);
    }
    if (!f.contains(e)) throw Error(ErrorCode::MalformedSpec, "element outside the field");
    out.push_back(e);
  }
  return out;
}

RSCode code_from_json(const nlohmann::json& j) {
  try {
    Field f = j.contains("p") ? Field::prime(j.at("p").get<std::uint32_t>()) : build_field(j.at("t").get<int>());
    std::vector<Elem> xs, as;
    if (j.contains("points")) {
      xs = j.at("points").get<std::vector<Elem>>();
      as = j.at("checks").get<std::vector<Elem>>();
    } else {
      const int n = j.at("n").get<int>(), D = j.at("D").get<int>();
      RSCode c = make_code(f, n, D);
      xs = c.points;
      as = c.checks;
    }
    const int d = j.contains("d") ? j.at("d").get<int>() : static_cast<int>(xs.size());
    return make_code(f, std::move(xs), std::move(as), d);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, std::string("code descriptor: ") + e.what());
  }
}

nlohmann::json to_json(const RSCode& code) {
  nlohmann::json j;
  if (code.field.kind() == Field::Kind::Binary) j["t"] = code.field.degree();
  else j["p"] = code.field.size();
  j["n"] = code.n();
  j["D"] = code.D();
  j["d"] = code.degree_bound;
  j["points"] = code.points;
  j["checks"] = code.checks;
  return j;
}

}  // namespace tileforge
