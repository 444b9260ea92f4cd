#pragma once

#include "tileforge/compiler/compile.hpp"
#include "tileforge/substitution.hpp"

namespace tileforge {

/// Number of bits used to encode a letter of `s` on each side.
int letter_bits(const SubstitutionRule& s);

/// Extends a machine with a letter field of letter_bits(s) bits per side. The
/// new machine accepts iff the base machine accepts the base bits, the four
/// letter fields agree and name a letter of the alphabet. The compiled tiles
/// then carry (father, own) letters with own = s^iterations(father) at the
/// tile's position. Throws ZoomMismatch unless zoom == m^iterations.
CheckerMachine add_substitution_layer(const CheckerMachine& m, const SubstitutionRule& s, int iterations, int zoom);

/// Coordinates plus the letter layer only, N = m^iterations.
CompiledTileSet compile_substitution(const SubstitutionRule& s, int iterations);

/// Own letters of a compiled macro-tile as a letter pattern (row 0 on top).
LetterPattern project_letters(const CompiledTileSet& cts, const MacroTile& mt);

/// The macro-tile of a letter-only compiled set whose father letter is `a`.
MacroTile letter_macrotile(const CompiledTileSet& cts, Letter a);

}  // namespace tileforge
