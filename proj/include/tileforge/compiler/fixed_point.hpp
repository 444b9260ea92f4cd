#pragma once

#include <cstdint>
#include <string>

namespace tileforge {

// A tiny line-oriented program language used to build self-referential
// programs. One instruction per line; blank lines and lines starting with '#'
// are comments and cost no steps.
//
//   data "lit"     set the data register
//   gettext        push  data <quoted register> \n <register>
//   push "lit"     push a string
//   apply "desc"   pop s, push transform(desc, s)
//   exec           pop s, run it as a nested program (shared output and budget)
//   emit           pop s, append it to the output tape
//   write c        append the single character c
//   jump n         continue at line n (0-based, comments included)
//   halt           stop the whole run
//
// Transformer descriptions: "identity", "comment:X" (append the line "# X"),
// "const:<program>" (ignore the input, return the program) and "printer"
// (return a program that emits the input).

struct ProgramRun {
  std::string output;
  std::int64_t steps = 0;
  bool halted = false;     // an explicit halt ran
  bool exhausted = false;  // stopped by the step budget
};

/// Runs `text` for at most `max_steps` instructions. Malformed instructions
/// and stack underflow throw MalformedSpec.
ProgramRun run_program(const std::string& text, std::int64_t max_steps);

std::string quote(const std::string& s);
std::string unquote(const std::string& lit);

std::string apply_transformer(const std::string& desc, const std::string& text);

/// The value `gettext` pushes when evaluated in `program`.
std::string get_text(const std::string& program);

/// Program p that executes transform(pi, p). get_text(p) == p. Running p
/// spends kFixedPointPrologue steps before control reaches transform(pi, p).
std::string fixed_point_program(const std::string& pi);
inline constexpr std::int64_t kFixedPointPrologue = 4;

std::string strip_comments(const std::string& text);

}  // namespace tileforge
