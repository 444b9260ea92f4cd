#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tileforge/substitution.hpp"

namespace tileforge {

/// Read-only track symbols.
inline constexpr int kBit0 = 0;
inline constexpr int kBit1 = 1;
inline constexpr int kBlank = 2;

enum class Move { Left, Stay, Right };

struct Transition {
  int next = 0;
  int write = 0;
  Move move = Move::Stay;
};

/// Optional substitution letter layer carried by a machine: the last
/// `letter_bits` bits of every side string encode a letter of `rule`.
struct LetterLayer {
  SubstitutionRule rule;
  int iterations = 1;
  int base_bits = 0;
  int letter_bits = 1;
};

/// Single-tape machine over a work track plus a read-only track that holds
/// the side inputs followed by the program bits. Work symbol 0 is blank.
/// A missing transition rejects; the accepting state is absorbing.
struct CheckerMachine {
  std::string name;
  std::vector<std::string> states;
  int start = 0;
  int accept = 0;
  int work_symbols = 1;
  int input_bits = 0;  // k, bits per side
  std::vector<int> program;
  /// Keyed by (state, read-only symbol, work symbol).
  std::map<std::tuple<int, int, int>, Transition> delta;
  std::optional<LetterLayer> letters;

  int state_count() const { return static_cast<int>(states.size()); }
  int state(const std::string& n) const;
  void validate() const;
};

/// Side strings, each of length k. Left/right are indexed bottom to top,
/// top/bottom left to right.
struct SideBits {
  std::vector<int> left, right, top, bottom;
  friend bool operator==(const SideBits&, const SideBits&) = default;
};

/// Read-only track column holding bit i of each side.
struct InputColumns {
  static int left(int k, int i) { return k - 1 - i; }
  static int bottom(int k, int i) { return k + i; }
  static int top(int k, int i) { return 2 * k + i; }
  static int right(int k, int i) { return 3 * k + i; }
};

/// Read-only track of width `width`: inputs, then program, then blanks.
std::vector<int> initial_track(const CheckerMachine& m, const SideBits& s, int width);

/// All 2^(4k) side inputs in a fixed order (bit j of the counter feeds tape column j).
std::vector<SideBits> all_side_inputs(int k);

enum class RunOutcome { Accepted, Rejected, OutOfTime, OutOfSpace };

struct MachineRow {
  std::vector<int> work;
  int head = 0;
  int state = 0;
  friend bool operator==(const MachineRow&, const MachineRow&) = default;
};

struct MachineRun {
  RunOutcome outcome = RunOutcome::Rejected;
  /// Time at which the machine entered the accepting state or stopped.
  int steps = 0;
  int max_head = 0;
  /// Row t is the configuration at time t (only when traced).
  std::vector<MachineRow> trace;
};

/// Runs at most `max_steps` steps on a tape of `width` cells. Moving left of
/// column 0 rejects; moving right of the last column is OutOfSpace.
MachineRun run_machine(const CheckerMachine& m, const std::vector<int>& track, int width, int max_steps,
                       bool keep_trace = false);

/// Accepts iff all four 1-bit side strings are equal; four states.
CheckerMachine eq1_machine();
/// No transitions: rejects every input.
CheckerMachine reject_all_machine(int k);
/// Accepts every input immediately (start state is accepting).
CheckerMachine accept_all_machine(int k);

/// Builds a machine that reads the 4k input bits left to right through a
/// minimal layered automaton for `pred` and accepts on the first blank.
CheckerMachine machine_from_predicate(const std::string& name, int k,
                                      const std::function<bool(const SideBits&)>& pred);

/// Evaluates a machine on side inputs with generous limits; true iff accepted.
bool machine_accepts(const CheckerMachine& m, const SideBits& s, int max_steps = 100000);

nlohmann::json to_json(const CheckerMachine& m);
CheckerMachine machine_from_json(const nlohmann::json& j);

}  // namespace tileforge
