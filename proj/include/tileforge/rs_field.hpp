#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tileforge {

using Elem = std::uint32_t;

/// GF(2^t) modulo an irreducible polynomial, or GF(p). Elements are integers
/// in [0, q); for binary fields bit i is the coefficient of x^i.
class Field {
 public:
  enum class Kind { Binary, Prime };

  /// Binary field from an explicit polynomial (leading bit included).
  static Field binary(int t, std::uint32_t poly);
  static Field prime(std::uint32_t p);

  Kind kind() const { return kind_; }
  int degree() const { return t_; }
  std::uint32_t polynomial() const { return poly_; }
  std::uint32_t size() const { return q_; }
  /// Bits needed to store an element.
  int bits() const;

  Elem add(Elem a, Elem b) const { return kind_ == Kind::Binary ? a ^ b : (a + b) % q_; }
  Elem sub(Elem a, Elem b) const { return kind_ == Kind::Binary ? a ^ b : (a + q_ - b) % q_; }
  Elem neg(Elem a) const { return kind_ == Kind::Binary ? a : (q_ - a) % q_; }
  Elem mul(Elem a, Elem b) const;
  Elem pow(Elem a, std::uint64_t e) const;
  /// Throws InvalidArgument on zero.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  bool contains(Elem a) const { return a < q_; }

  friend bool operator==(const Field& a, const Field& b) {
    return a.kind_ == b.kind_ && a.t_ == b.t_ && a.poly_ == b.poly_ && a.q_ == b.q_;
  }

 private:
  Kind kind_ = Kind::Prime;
  int t_ = 1;
  std::uint32_t poly_ = 0;
  std::uint32_t q_ = 2;
};

/// Irreducibility over GF(2) by trial division.
bool gf2_irreducible(std::uint32_t poly);
bool is_prime(std::uint32_t p);

/// GF(2^t), 1 <= t <= 16, with the smallest irreducible polynomial of degree t.
Field build_field(int t);

struct RSCode {
  Field field;
  std::vector<Elem> points;  // x_1..x_n
  std::vector<Elem> checks;  // a_1..a_D
  int degree_bound = 0;      // d

  int n() const { return static_cast<int>(points.size()); }
  int D() const { return static_cast<int>(checks.size()); }
  /// Throws InvalidArgument / DuplicatePoint when the invariants fail.
  void validate() const;
};

/// Canonical code: x_i = i - 1, a_j = n + j - 1, d = n.
RSCode make_code(const Field& f, int n, int D);
RSCode make_code(const Field& f, std::vector<Elem> points, std::vector<Elem> checks, int d);

/// Value at `at` of the interpolant through (xs[i], ys[i]).
Elem lagrange_eval(const Field& f, const std::vector<Elem>& xs, const std::vector<Elem>& ys, Elem at);

std::vector<Elem> rs_checksums(const RSCode& code, const std::vector<Elem>& values);

/// One pass over the values in code order. For each checksum point a it keeps
/// two residues modulo (x - a): q_i(a) with q_i = prod_{j<=i} (x - x_j), and
/// r_i(a) with r_{i+1} = r_i (x - x_{i+1}) + eta_{i+1} w_{i+1} q_i, where w are
/// the barycentric weights of the code. r_n is the interpolant.
class RSStream {
 public:
  explicit RSStream(const RSCode& code);
  /// Throws DuplicatePoint on a repeated x, DimensionMismatch past n points,
  /// InvalidArgument when x is not the next code point.
  void push(Elem x, Elem value);
  std::size_t state_size() const { return q_.size() + r_.size(); }
  int consumed() const { return i_; }
  /// Throws DimensionMismatch unless all n values arrived.
  std::vector<Elem> finish() const;

 private:
  const RSCode* code_;
  int i_ = 0;
  std::vector<Elem> q_, r_;
};

std::vector<Elem> rs_stream_checksums(const RSCode& code, const std::vector<std::pair<Elem, Elem>>& stream);

/// Fills in the missing values. Throws TooManyErasures when more than D are
/// missing and InconsistentData when the surviving points are not on one
/// polynomial of degree < n.
std::vector<Elem> rs_erasure_decode(const RSCode& code, const std::vector<std::optional<Elem>>& known,
                                    const std::vector<Elem>& checksums);

struct FamilyLevel {
  int k = 0;
  long double lhs = 0;  // 4 log2 N_{k+1}
  long double rhs = 0;  // eps_k N_k^2
  bool ok = false;
};

struct FamilyReport {
  std::vector<FamilyLevel> levels;
  long double eps_sum = 0;
  long double target = 0.01L;
  bool levels_ok = true;
  bool sum_ok = true;
  bool ok() const { return levels_ok && sum_ok; }
};

/// Checks 4 log2 N_{k+1} <= eps_k N_k^2 for every k with both values known,
/// and sum eps_k < target.
FamilyReport validate_family_parameters(const std::vector<long double>& N, const std::vector<long double>& eps,
                                        long double target = 0.01L);

/// Fixed-width big-endian hex, ceil(bits/8) bytes per element.
std::string to_hex(const Field& f, const std::vector<Elem>& v);
std::vector<Elem> from_hex(const Field& f, const std::string& hex);

/// {t, n, D, d, points?, checks?} or {p, ...} for a prime field.
RSCode code_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RSCode& code);

}  // namespace tileforge
