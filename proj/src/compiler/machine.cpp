#include "tileforge/compiler/machine.hpp"

#include <algorithm>

namespace tileforge {

int CheckerMachine::state(const std::string& n) const {
  auto it = std::find(states.begin(), states.end(), n);
  if (it == states.end()) throw Error(ErrorCode::MalformedSpec, "unknown machine state '" + n + "'");
  return static_cast<int>(it - states.begin());
}

void CheckerMachine::validate() const {
  const int s = state_count();
  if (s < 1) throw Error(ErrorCode::MalformedSpec, "machine has no states");
  if (start < 0 || start >= s || accept < 0 || accept >= s) throw Error(ErrorCode::MalformedSpec, "start/accept out of range");
  if (work_symbols < 1) throw Error(ErrorCode::MalformedSpec, "machine needs at least the blank work symbol");
  if (input_bits < 0) throw Error(ErrorCode::MalformedSpec, "negative input width");
  for (int b : program)
    if (b != 0 && b != 1) throw Error(ErrorCode::MalformedSpec, "program bits must be 0 or 1");
  for (const auto& [key, tr] : delta) {
    const auto [q, ro, w] = key;
    if (q < 0 || q >= s || ro < 0 || ro > kBlank || w < 0 || w >= work_symbols)
      throw Error(ErrorCode::MalformedSpec, "transition key out of range");
    if (q == accept) throw Error(ErrorCode::MalformedSpec, "the accepting state must not have transitions");
    if (tr.next < 0 || tr.next >= s || tr.write < 0 || tr.write >= work_symbols)
      throw Error(ErrorCode::MalformedSpec, "transition target out of range");
  }
  if (letters) {
    if (letters->base_bits + letters->letter_bits != input_bits)
      throw Error(ErrorCode::MalformedSpec, "letter layer widths do not add up to the input width");
    letters->rule.validate();
  }
}

std::vector<int> initial_track(const CheckerMachine& m, const SideBits& s, int width) {
  const int k = m.input_bits;
  for (const auto* v : {&s.left, &s.right, &s.top, &s.bottom})
    if (static_cast<int>(v->size()) != k)
      throw Error(ErrorCode::DimensionMismatch, "side strings must have length " + std::to_string(k));
  if (width < 4 * k + static_cast<int>(m.program.size()))
    throw Error(ErrorCode::InvalidArgument, "track narrower than inputs plus program");
  std::vector<int> t(static_cast<std::size_t>(width), kBlank);
  for (int i = 0; i < k; ++i) {
    const auto bit = [](int b) {
      if (b != 0 && b != 1) throw Error(ErrorCode::InvalidArgument, "side bits must be 0 or 1");
      return b;
    };
    t[static_cast<std::size_t>(InputColumns::left(k, i))] = bit(s.left[static_cast<std::size_t>(i)]);
    t[static_cast<std::size_t>(InputColumns::bottom(k, i))] = bit(s.bottom[static_cast<std::size_t>(i)]);
    t[static_cast<std::size_t>(InputColumns::top(k, i))] = bit(s.top[static_cast<std::size_t>(i)]);
    t[static_cast<std::size_t>(InputColumns::right(k, i))] = bit(s.right[static_cast<std::size_t>(i)]);
  }
  for (std::size_t i = 0; i < m.program.size(); ++i) t[static_cast<std::size_t>(4 * k) + i] = m.program[i];
  return t;
}

namespace {

SideBits sides_from_counter(int k, std::uint64_t v) {
  SideBits s{std::vector<int>(static_cast<std::size_t>(k)), std::vector<int>(static_cast<std::size_t>(k)),
             std::vector<int>(static_cast<std::size_t>(k)), std::vector<int>(static_cast<std::size_t>(k))};
  auto bit = [&](int col) { return static_cast<int>((v >> col) & 1); };
  for (int i = 0; i < k; ++i) {
    s.left[static_cast<std::size_t>(i)] = bit(InputColumns::left(k, i));
    s.bottom[static_cast<std::size_t>(i)] = bit(InputColumns::bottom(k, i));
    s.top[static_cast<std::size_t>(i)] = bit(InputColumns::top(k, i));
    s.right[static_cast<std::size_t>(i)] = bit(InputColumns::right(k, i));
  }
  return s;
}

}  // namespace

std::vector<SideBits> all_side_inputs(int k) {
  if (k < 0 || 4 * k > 24) throw Error(ErrorCode::SizeCap, "too many side inputs to enumerate");
  std::vector<SideBits> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << (4 * k)); ++v) out.push_back(sides_from_counter(k, v));
  return out;
}

MachineRun run_machine(const CheckerMachine& m, const std::vector<int>& track, int width, int max_steps,
                       bool keep_trace) {
  MachineRow row{std::vector<int>(static_cast<std::size_t>(width), 0), 0, m.start};
  MachineRun run;
  if (keep_trace) run.trace.push_back(row);
  for (int t = 0;; ++t) {
    run.steps = t;
    if (row.state == m.accept) {
      run.outcome = RunOutcome::Accepted;
      return run;
    }
    if (t == max_steps) {
      run.outcome = RunOutcome::OutOfTime;
      return run;
    }
    const int ro = track[static_cast<std::size_t>(row.head)];
    auto it = m.delta.find({row.state, ro, row.work[static_cast<std::size_t>(row.head)]});
    if (it == m.delta.end()) {
      run.outcome = RunOutcome::Rejected;
      return run;
    }
    const Transition& tr = it->second;
    row.work[static_cast<std::size_t>(row.head)] = tr.write;
    row.state = tr.next;
    const int next = row.head + (tr.move == Move::Left ? -1 : tr.move == Move::Right ? 1 : 0);
    if (next < 0) {
      run.outcome = RunOutcome::Rejected;
      return run;
    }
    if (next >= width) {
      run.outcome = RunOutcome::OutOfSpace;
      return run;
    }
    row.head = next;
    run.max_head = std::max(run.max_head, next);
    if (keep_trace) run.trace.push_back(row);
  }
}

CheckerMachine eq1_machine() {
  CheckerMachine m;
  m.name = "EQ1";
  m.states = {"start", "seen0", "seen1", "accept"};
  m.start = 0;
  m.accept = 3;
  m.input_bits = 1;
  for (int b = 0; b < 2; ++b) {
    m.delta[{0, b, 0}] = Transition{1 + b, 0, Move::Right};
    m.delta[{1 + b, b, 0}] = Transition{1 + b, 0, Move::Right};
    m.delta[{1 + b, kBlank, 0}] = Transition{3, 0, Move::Stay};
  }
  return m;
}

CheckerMachine reject_all_machine(int k) {
  CheckerMachine m;
  m.name = "REJECT-ALL";
  m.states = {"start", "accept"};
  m.start = 0;
  m.accept = 1;
  m.input_bits = k;
  return m;
}

CheckerMachine accept_all_machine(int k) {
  CheckerMachine m;
  m.name = "ACCEPT-ALL";
  m.states = {"accept"};
  m.input_bits = k;
  return m;
}

CheckerMachine machine_from_predicate(const std::string& name, int k,
                                      const std::function<bool(const SideBits&)>& pred) {
  const int n = 4 * k;
  if (k < 0 || n > 24) throw Error(ErrorCode::SizeCap, "predicate too wide to tabulate");
  // ids[j][p]: residual class of the j-bit prefix p; class 0 is the dead class.
  std::vector<std::vector<int>> ids(static_cast<std::size_t>(n + 1));
  std::vector<std::vector<std::pair<int, int>>> children(static_cast<std::size_t>(n + 1));
  ids[static_cast<std::size_t>(n)].resize(std::size_t{1} << n);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v)
    ids[static_cast<std::size_t>(n)][v] = pred(sides_from_counter(k, v)) ? 1 : 0;
  for (int j = n - 1; j >= 0; --j) {
    std::map<std::pair<int, int>, int> intern{{{0, 0}, 0}};
    auto& cls = ids[static_cast<std::size_t>(j)];
    cls.resize(std::size_t{1} << j);
    auto& ch = children[static_cast<std::size_t>(j)];
    ch.assign(1, {0, 0});
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << j); ++p) {
      const auto& next = ids[static_cast<std::size_t>(j + 1)];
      std::pair<int, int> key{next[p], next[p | (std::uint64_t{1} << j)]};
      auto [it, fresh] = intern.emplace(key, static_cast<int>(ch.size()));
      if (fresh) ch.push_back(key);
      cls[p] = it->second;
    }
  }

  CheckerMachine m;
  m.name = name;
  m.input_bits = k;
  std::map<std::pair<int, int>, int> state_of;
  auto get = [&](int level, int cls) {
    auto [it, fresh] = state_of.emplace(std::make_pair(level, cls), m.state_count());
    if (fresh) m.states.push_back("q" + std::to_string(level) + "_" + std::to_string(cls));
    return it->second;
  };
  m.start = get(0, ids[0][0]);
  const int root = ids[0][0];
  std::vector<std::pair<int, int>> todo;
  if (root != 0) todo.emplace_back(0, root);
  std::vector<std::tuple<int, int, int>> edges;  // (from, bit, to); to < 0 marks blank -> accept
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const auto [level, cls] = todo[i];
    const int from = get(level, cls);
    if (level == n) {
      edges.emplace_back(from, kBlank, -1);
      continue;
    }
    const auto [c0, c1] = children[static_cast<std::size_t>(level)][static_cast<std::size_t>(cls)];
    for (int b = 0; b < 2; ++b) {
      const int c = b == 0 ? c0 : c1;
      if (c == 0) continue;
      const bool seen = state_of.count({level + 1, c}) > 0;
      const int to = get(level + 1, c);
      if (!seen) todo.emplace_back(level + 1, c);
      edges.emplace_back(from, b, to);
    }
  }
  m.accept = m.state_count();
  m.states.push_back("accept");
  for (const auto& [from, b, to] : edges) {
    if (to < 0) m.delta[{from, kBlank, 0}] = Transition{m.accept, 0, Move::Stay};
    else m.delta[{from, b, 0}] = Transition{to, 0, Move::Right};
  }
  return m;
}

bool machine_accepts(const CheckerMachine& m, const SideBits& s, int max_steps) {
  const int width = 4 * m.input_bits + static_cast<int>(m.program.size()) + std::min(max_steps, 4096) + 1;
  return run_machine(m, initial_track(m, s, width), width, max_steps).outcome == RunOutcome::Accepted;
}

namespace {

const char* move_name(Move mv) { return mv == Move::Left ? "L" : mv == Move::Right ? "R" : "S"; }

Move parse_move(const std::string& s) {
  if (s == "L") return Move::Left;
  if (s == "R") return Move::Right;
  if (s == "S") return Move::Stay;
  throw Error(ErrorCode::MalformedSpec, "move must be L, R or S");
}

}  // namespace

nlohmann::json to_json(const CheckerMachine& m) {
  nlohmann::json j;
  j["name"] = m.name;
  j["states"] = m.states;
  j["start"] = m.states[static_cast<std::size_t>(m.start)];
  j["accept"] = m.states[static_cast<std::size_t>(m.accept)];
  j["work_symbols"] = m.work_symbols;
  j["input_bits"] = m.input_bits;
  j["program"] = m.program;
  j["transitions"] = nlohmann::json::array();
  for (const auto& [key, tr] : m.delta) {
    const auto [q, ro, w] = key;
    j["transitions"].push_back({{"state", m.states[static_cast<std::size_t>(q)]},
                                {"read", ro == kBlank ? nlohmann::json("_") : nlohmann::json(ro)},
                                {"work", w},
                                {"next", m.states[static_cast<std::size_t>(tr.next)]},
                                {"write", tr.write},
                                {"move", move_name(tr.move)}});
  }
  if (m.letters) {
    j["letters"] = {{"rule", to_json(m.letters->rule)},
                    {"iterations", m.letters->iterations},
                    {"base_bits", m.letters->base_bits},
                    {"letter_bits", m.letters->letter_bits}};
  }
  return j;
}

CheckerMachine machine_from_json(const nlohmann::json& j) {
  CheckerMachine m;
  try {
    m.name = j.value("name", std::string("machine"));
    m.states = j.at("states").get<std::vector<std::string>>();
    m.start = m.state(j.at("start").get<std::string>());
    m.accept = m.state(j.at("accept").get<std::string>());
    m.work_symbols = j.value("work_symbols", 1);
    m.input_bits = j.at("input_bits").get<int>();
    m.program = j.value("program", std::vector<int>{});
    for (const auto& t : j.value("transitions", nlohmann::json::array())) {
      const auto& rd = t.at("read");
      const int ro = rd.is_string() ? (rd.get<std::string>() == "_" ? kBlank : -1) : rd.get<int>();
      auto [it, fresh] = m.delta.emplace(std::make_tuple(m.state(t.at("state").get<std::string>()), ro, t.value("work", 0)),
                                         Transition{m.state(t.at("next").get<std::string>()), t.value("write", 0),
                                                    parse_move(t.at("move").get<std::string>())});
      (void)it;
      if (!fresh) throw Error(ErrorCode::MalformedSpec, "nondeterministic transition table");
    }
    if (j.contains("letters")) {
      const auto& l = j["letters"];
      m.letters = LetterLayer{rule_from_json(l.at("rule")), l.at("iterations").get<int>(), l.at("base_bits").get<int>(),
                              l.at("letter_bits").get<int>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedSpec, e.what());
  }
  m.validate();
  return m;
}

}  // namespace tileforge
