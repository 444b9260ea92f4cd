#include "tileforge/compiler/substitution_layer.hpp"

namespace tileforge {

int letter_bits(const SubstitutionRule& s) {
  int bits = 1;
  while ((1 << bits) < s.size()) ++bits;
  return bits;
}

namespace {

void check_zoom(const SubstitutionRule& s, int iterations, int zoom) {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  long long size = 1;
  for (int i = 0; i < iterations && size <= zoom; ++i) size *= s.m;
  if (size != zoom)
    throw Error(ErrorCode::ZoomMismatch, "m^iterations = " + std::to_string(size) + " but N = " + std::to_string(zoom));
}

SideBits slice(const SideBits& s, int from, int len) {
  auto cut = [&](const std::vector<int>& v) {
    return std::vector<int>(v.begin() + from, v.begin() + from + len);
  };
  return SideBits{cut(s.left), cut(s.right), cut(s.top), cut(s.bottom)};
}

}  // namespace

CheckerMachine add_substitution_layer(const CheckerMachine& m, const SubstitutionRule& s, int iterations, int zoom) {
  s.validate();
  m.validate();
  check_zoom(s, iterations, zoom);
  if (m.letters) throw Error(ErrorCode::InvalidArgument, "machine already carries a letter layer");
  const int k = m.input_bits;
  const int bits = letter_bits(s);
  const int letters = s.size();
  auto field = [](const std::vector<int>& v) {
    int a = 0;
    for (std::size_t i = 0; i < v.size(); ++i) a |= v[i] << i;
    return a;
  };
  CheckerMachine out = machine_from_predicate(m.name + "+letters", k + bits, [&](const SideBits& sb) {
    const SideBits lt = slice(sb, k, bits);
    const int a = field(lt.left);
    if (a >= letters || field(lt.right) != a || field(lt.top) != a || field(lt.bottom) != a) return false;
    return machine_accepts(m, slice(sb, 0, k));
  });
  out.letters = LetterLayer{s, iterations, k, bits};
  return out;
}

CompiledTileSet compile_substitution(const SubstitutionRule& s, int iterations) {
  s.validate();
  int n = 1;
  for (int i = 0; i < iterations; ++i) {
    n *= s.m;
    if (n > 4096) throw Error(ErrorCode::SizeCap, "m^iterations too large");
  }
  check_zoom(s, iterations, n);
  CheckerMachine trivial = accept_all_machine(0);
  Layout l;
  l.n = n;
  CompiledTileSet cts = compile(trivial, l, LetterLayer{s, iterations, 0, letter_bits(s)});
  cts.tiles.name = "substitution(m=" + std::to_string(s.m) + ",iterations=" + std::to_string(iterations) + ")";
  return cts;
}

LetterPattern project_letters(const CompiledTileSet& cts, const MacroTile& mt) {
  if (!cts.letters) throw Error(ErrorCode::InvalidArgument, "tile set has no letter layer");
  const int n = mt.n;
  LetterPattern p(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) p.at(n - 1 - y, x) = cts.decode[static_cast<std::size_t>(mt.body.at(x, y))].own;
  return p;
}

MacroTile letter_macrotile(const CompiledTileSet& cts, Letter a) {
  if (!cts.letters) throw Error(ErrorCode::InvalidArgument, "tile set has no letter layer");
  if (a < 0 || a >= cts.letters->rule.size()) throw Error(ErrorCode::LetterNotInAlphabet, "letter " + std::to_string(a));
  if (cts.layout.zone) throw Error(ErrorCode::InvalidArgument, "set has a computation zone; use assemble_macrotile");
  const int n = cts.n();
  MacroTile mt{n, PatchTiling(Region{0, 0, n, n})};
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      TileInfo info;
      info.x = x;
      info.y = y;
      info.father = a;
      mt.body.at(x, y) = cts.encode(info);
    }
  return mt;
}

}  // namespace tileforge
