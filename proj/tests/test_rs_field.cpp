#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tileforge/error.hpp"
#include "tileforge/rs_field.hpp"

using namespace tileforge;

namespace {

std::uint32_t clmul(std::uint32_t a, std::uint32_t b) {
  std::uint32_t r = 0;
  for (int i = 0; i < 16; ++i)
    if ((b >> i) & 1) r ^= a << i;
  return r;
}

// Irreducible iff not a product of two polynomials of degree >= 1.
bool irreducible_by_products(std::uint32_t poly, int t) {
  for (std::uint32_t a = 2; a < (1u << t); ++a)
    for (std::uint32_t b = 2; b < (1u << t); ++b)
      if (clmul(a, b) == poly) return false;
  return true;
}

// Coefficients of the interpolant by Gaussian elimination on the Vandermonde system.
std::vector<Elem> solve_coefficients(const Field& f, const std::vector<Elem>& xs, const std::vector<Elem>& ys) {
  const std::size_t n = xs.size();
  std::vector<std::vector<Elem>> m(n, std::vector<Elem>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = f.pow(xs[i], j);
    m[i][n] = ys[i];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (m[p][c] == 0) ++p;
    std::swap(m[p], m[c]);
    const Elem iv = f.inv(m[c][c]);
    for (auto& v : m[c]) v = f.mul(v, iv);
    for (std::size_t r = 0; r < n; ++r)
      if (r != c && m[r][c] != 0) {
        const Elem k = m[r][c];
        for (std::size_t j = 0; j <= n; ++j) m[r][j] = f.sub(m[r][j], f.mul(k, m[c][j]));
      }
  }
  std::vector<Elem> coef(n);
  for (std::size_t i = 0; i < n; ++i) coef[i] = m[i][n];
  return coef;
}

Elem horner(const Field& f, const std::vector<Elem>& coef, Elem x) {
  Elem r = 0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) r = f.add(f.mul(r, x), *it);
  return r;
}

}  // namespace

TEST_CASE("build_field picks the smallest irreducible polynomial") {
  CHECK(build_field(1).polynomial() == 0b10);
  CHECK(build_field(4).polynomial() == 0b10011);
  for (int t = 2; t <= 8; ++t) {
    std::uint32_t expect = 0;
    for (std::uint32_t low = 0; low < (1u << t) && !expect; ++low)
      if (irreducible_by_products((1u << t) | low, t)) expect = (1u << t) | low;
    CHECK(build_field(t).polynomial() == expect);
  }
  CHECK(build_field(16).size() == 65536u);
  CHECK_THROWS_AS(build_field(0), Error);
  CHECK_THROWS_AS(Field::binary(4, 0b10101), Error);
  CHECK_THROWS_AS(Field::prime(9), Error);
}

TEST_CASE("field axioms") {
  const Field f = build_field(4);
  for (Elem a = 0; a < 16; ++a) {
    if (a) CHECK(f.mul(a, f.inv(a)) == 1);
    for (Elem b = 0; b < 16; ++b) {
      CHECK(f.mul(a, b) == f.mul(b, a));
      for (Elem c = 0; c < 16; ++c) {
        REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
        REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      }
    }
  }
  CHECK_THROWS_AS(f.inv(0), Error);

  const Field g = build_field(8);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    const Elem a = static_cast<Elem>(1 + rng() % 255), b = static_cast<Elem>(rng() % 256), c = static_cast<Elem>(rng() % 256);
    CHECK(g.mul(a, g.inv(a)) == 1);
    CHECK(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
    CHECK(g.mul(a, g.add(b, c)) == g.add(g.mul(a, b), g.mul(a, c)));
  }

  const Field p = Field::prime(13);
  for (Elem a = 1; a < 13; ++a) CHECK(p.mul(a, p.inv(a)) == 1);
  CHECK(p.sub(2, 5) == 10);
}

TEST_CASE("distinct low-degree polynomials agree on few points") {
  const Field f = build_field(3);
  for (int d = 1; d <= 3; ++d) {
    const int count = 1 << (3 * d);
    auto coef = [&](int idx) {
      std::vector<Elem> c;
      for (int i = 0; i < d; ++i) c.push_back(static_cast<Elem>((idx >> (3 * i)) & 7));
      return c;
    };
    int worst = 0;
    for (int a = 0; a < count; ++a)
      for (int b = a + 1; b < count; ++b) {
        int agree = 0;
        for (Elem x = 0; x < 8; ++x) agree += horner(f, coef(a), x) == horner(f, coef(b), x);
        worst = std::max(worst, agree);
      }
    CHECK(worst == d - 1);
  }
}

TEST_CASE("rs_checksums") {
  const Field f5 = Field::prime(5);
  const RSCode c5 = make_code(f5, {1, 2}, {3}, 2);
  CHECK(rs_checksums(c5, {1, 2}) == std::vector<Elem>{3});

  const Field f = build_field(8);
  const RSCode code = make_code(f, 20, 6);
  CHECK(rs_checksums(code, std::vector<Elem>(20, 77)) == std::vector<Elem>(6, 77));
  CHECK_THROWS_WITH_AS(rs_checksums(code, std::vector<Elem>(19, 0)), doctest::Contains("DimensionMismatch"), Error);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Elem> a(20), b(20), s(20);
    for (int i = 0; i < 20; ++i) {
      a[static_cast<std::size_t>(i)] = static_cast<Elem>(rng() % 256);
      b[static_cast<std::size_t>(i)] = static_cast<Elem>(rng() % 256);
      s[static_cast<std::size_t>(i)] = f.add(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]);
    }
    auto ca = rs_checksums(code, a), cb = rs_checksums(code, b), cs = rs_checksums(code, s);
    for (int j = 0; j < 6; ++j) CHECK(cs[static_cast<std::size_t>(j)] == f.add(ca[static_cast<std::size_t>(j)], cb[static_cast<std::size_t>(j)]));
    // Against the coefficient-form oracle.
    auto coef = solve_coefficients(f, code.points, a);
    for (int j = 0; j < 6; ++j) CHECK(ca[static_cast<std::size_t>(j)] == horner(f, coef, code.checks[static_cast<std::size_t>(j)]));
  }

  CHECK_THROWS_WITH_AS(make_code(f, {1, 2}, {2}, 2), doctest::Contains("DuplicatePoint"), Error);
  CHECK_THROWS_AS(make_code(Field::prime(5), 4, 2), Error);
}

TEST_CASE("streaming checksums equal direct ones") {
  const Field f = build_field(8);
  const RSCode code = make_code(f, 20, 6);
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Elem> v(20);
    for (auto& e : v) e = static_cast<Elem>(rng() % 256);
    RSStream s(code);
    for (int i = 0; i < 20; ++i) {
      s.push(code.points[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      REQUIRE(s.state_size() == 12);
    }
    REQUIRE(s.finish() == rs_checksums(code, v));
  }

  const RSCode one = make_code(f, 1, 3);
  CHECK(rs_stream_checksums(one, {{0, 42}}) == std::vector<Elem>(3, 42));

  RSStream s(code);
  s.push(0, 1);
  CHECK_THROWS_WITH_AS(s.push(0, 1), doctest::Contains("DuplicatePoint"), Error);
  CHECK_THROWS_WITH_AS(s.finish(), doctest::Contains("DimensionMismatch"), Error);
  CHECK_THROWS_AS(s.push(5, 1), Error);
}

TEST_CASE("erasure decoding") {
  const Field f = build_field(8);
  const RSCode code = make_code(f, 20, 6);
  std::mt19937_64 rng(555);
  std::vector<Elem> truth(20);
  for (auto& e : truth) e = static_cast<Elem>(rng() % 256);
  const auto cs = rs_checksums(code, truth);

  std::vector<std::optional<Elem>> all(truth.begin(), truth.end());
  CHECK(rs_erasure_decode(code, all, cs) == truth);

  for (int trial = 0; trial < 100; ++trial) {
    auto known = all;
    std::vector<int> idx(20);
    for (int i = 0; i < 20; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < 6; ++i) known[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])].reset();
    REQUIRE(rs_erasure_decode(code, known, cs) == truth);
  }

  auto seven = all;
  for (int i = 0; i < 7; ++i) seven[static_cast<std::size_t>(i)].reset();
  CHECK_THROWS_WITH_AS(rs_erasure_decode(code, seven, cs), doctest::Contains("TooManyErasures"), Error);

  auto bad = all;
  bad[0].reset();
  bad[5] = f.add(*bad[5], 1);
  CHECK_THROWS_WITH_AS(rs_erasure_decode(code, bad, cs), doctest::Contains("InconsistentData"), Error);
}

TEST_CASE("family parameters") {
  std::vector<long double> N, eps;
  for (int k = 0; k < 12; ++k) N.push_back(std::ldexp(1.0L, k + 10));
  for (int k = 0; k + 1 < 12; ++k) eps.push_back(4 * std::log2(N[static_cast<std::size_t>(k) + 1]) / (N[static_cast<std::size_t>(k)] * N[static_cast<std::size_t>(k)]));
  auto rep = validate_family_parameters(N, eps);
  CHECK(rep.levels.size() == 11);
  CHECK(rep.levels_ok);
  CHECK(rep.sum_ok);
  for (const auto& lv : rep.levels) CHECK(static_cast<double>(lv.rhs / lv.lhs) == doctest::Approx(1.0));

  std::vector<long double> slow, e2(6, 0.001L);
  for (int k = 0; k < 7; ++k) slow.push_back(k + 2);
  auto bad = validate_family_parameters(slow, e2);
  CHECK_FALSE(bad.levels_ok);
  CHECK_FALSE(bad.levels[0].ok);

  auto empty = validate_family_parameters({}, {});
  CHECK(empty.ok());
}

TEST_CASE("hex and JSON") {
  const Field f = build_field(8);
  CHECK(to_hex(f, {0, 255, 16}) == "00ff10");
  CHECK(from_hex(f, "00FF10") == std::vector<Elem>{0, 255, 16});
  CHECK(to_hex(build_field(12), {0xabc}) == "0abc");
  CHECK_THROWS_AS(from_hex(f, "0"), Error);
  CHECK_THROWS_AS(from_hex(build_field(4), "ff"), Error);

  const RSCode code = code_from_json({{"t", 8}, {"n", 20}, {"D", 6}});
  CHECK(code.points.size() == 20);
  CHECK(code.checks.front() == 20);
  const RSCode back = code_from_json(to_json(code));
  CHECK(back.points == code.points);
  CHECK(back.checks == code.checks);
  CHECK_THROWS_WITH_AS(code_from_json({{"n", 3}}), doctest::Contains("MalformedSpec"), Error);
}
