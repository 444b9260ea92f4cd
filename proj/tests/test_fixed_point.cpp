#include <doctest.h>

#include <random>

#include "tileforge/compiler/fixed_point.hpp"
#include "tileforge/error.hpp"

using namespace tileforge;

TEST_CASE("quote and unquote round trip") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab\"\\\n #x";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 20);
    for (int i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    REQUIRE(unquote(quote(s)) == s);
    CHECK(quote(s).find('\n') == std::string::npos);
  }
  CHECK_THROWS_AS(unquote("abc"), Error);
  CHECK_THROWS_AS(unquote("\"a\"b\""), Error);
}

TEST_CASE("interpreter basics") {
  auto r = run_program("write a\n# comment\npush \"bc\"\nemit\nhalt\nwrite z\n", 100);
  CHECK(r.output == "abc");
  CHECK(r.halted);
  CHECK(r.steps == 4);

  auto loop = run_program("write x\njump 0\n", 10);
  CHECK(loop.exhausted);
  CHECK(loop.output == "xxxxx");

  CHECK_THROWS_WITH_AS(run_program("emit\n", 10), doctest::Contains("MalformedSpec"), Error);
  CHECK_THROWS_WITH_AS(run_program("frobnicate\n", 10), doctest::Contains("MalformedSpec"), Error);
  CHECK_THROWS_WITH_AS(apply_transformer("rot13", "x"), doctest::Contains("UnknownName"), Error);
}

TEST_CASE("fixed point for identity is a quine at the text level") {
  const std::string p = fixed_point_program("identity");
  CHECK(get_text(p) == p);
  // Evaluating gettext inside the program pushes the program itself.
  auto r = run_program("data " + quote(p.substr(p.find('\n') + 1)) + "\ngettext\nemit\n", 10);
  CHECK(r.output.rfind(p.substr(0, p.find('\n')), 0) == 0);
  // Executing it just recurses until the budget runs out.
  CHECK(run_program(p, 1000).exhausted);
}

TEST_CASE("printer fixed point prints its own text") {
  const std::string p = fixed_point_program("printer");
  auto r = run_program(p, 100);
  CHECK(r.output == p);
  CHECK_FALSE(r.exhausted);
}

TEST_CASE("comment transformer changes only a comment") {
  const std::string p = fixed_point_program("comment:hello world");
  const std::string image = apply_transformer("comment:hello world", get_text(p));
  CHECK(image != p);
  CHECK(strip_comments(image) == strip_comments(p));
  CHECK(image.substr(0, p.size()) == p);
  CHECK(image.substr(p.size()) == "# hello world\n");
}

TEST_CASE("const fixed point behaves like the constant program") {
  const std::vector<std::string> programs = {
      "write a\nwrite b\njump 0\n",
      "push \"xyz\"\nemit\nwrite !\nhalt\n",
      "# loops forever writing q\nwrite q\njump 1\n",
      "",
  };
  for (const auto& q : programs) {
    const std::string p = fixed_point_program("const:" + q);
    CHECK(get_text(p) == p);
    auto direct = run_program(q, 1000);
    auto via = run_program(p, 1000 + kFixedPointPrologue);
    CHECK(via.output == direct.output);
    CHECK(via.halted == direct.halted);
    CHECK(via.exhausted == direct.exhausted);
  }
}
