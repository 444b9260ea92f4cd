#include "tileforge/compiler/fixed_point.hpp"

#include <vector>

#include "tileforge/error.hpp"

namespace tileforge {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

bool is_comment(const std::string& line) {
  const auto p = line.find_first_not_of(" \t");
  return p == std::string::npos || line[p] == '#';
}

// Splits "op rest" at the first space.
std::pair<std::string, std::string> split_op(const std::string& line) {
  const auto b = line.find_first_not_of(" \t");
  const auto e = line.find(' ', b);
  if (e == std::string::npos) return {line.substr(b), ""};
  return {line.substr(b, e - b), line.substr(e + 1)};
}

struct Frame {
  std::vector<std::string> lines;
  std::size_t pc = 0;
  std::string data;
  std::vector<std::string> stack;
};

std::string pop(Frame& f, const std::string& op) {
  if (f.stack.empty()) throw Error(ErrorCode::MalformedSpec, op + " on an empty stack");
  std::string s = std::move(f.stack.back());
  f.stack.pop_back();
  return s;
}

std::string reconstruct(const std::string& data) { return "data " + quote(data) + "\n" + data; }

}  // namespace

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\\' || c == '"') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

std::string unquote(const std::string& lit) {
  if (lit.size() < 2 || lit.front() != '"' || lit.back() != '"')
    throw Error(ErrorCode::MalformedSpec, "expected a quoted literal: " + lit);
  std::string out;
  for (std::size_t i = 1; i + 1 < lit.size(); ++i) {
    char c = lit[i];
    if (c == '"') throw Error(ErrorCode::MalformedSpec, "unescaped quote in literal");
    if (c == '\\') {
      if (i + 2 >= lit.size()) throw Error(ErrorCode::MalformedSpec, "dangling escape");
      c = lit[++i];
      if (c == 'n') c = '\n';
      else if (c != '\\' && c != '"') throw Error(ErrorCode::MalformedSpec, "unknown escape");
    }
    out += c;
  }
  return out;
}

std::string apply_transformer(const std::string& desc, const std::string& text) {
  if (desc == "identity") return text;
  if (desc == "printer") return "push " + quote(text) + "\nemit\n";
  if (desc.rfind("comment:", 0) == 0) return text + "# " + desc.substr(8) + "\n";
  if (desc.rfind("const:", 0) == 0) return desc.substr(6);
  throw Error(ErrorCode::UnknownName, "transformer " + desc);
}

ProgramRun run_program(const std::string& text, std::int64_t max_steps) {
  ProgramRun run;
  std::vector<Frame> frames;
  frames.push_back(Frame{split_lines(text), 0, {}, {}});
  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.pc >= f.lines.size()) {
      frames.pop_back();
      continue;
    }
    const std::string& line = f.lines[f.pc];
    if (is_comment(line)) {
      ++f.pc;
      continue;
    }
    if (run.steps >= max_steps) {
      run.exhausted = true;
      break;
    }
    ++run.steps;
    ++f.pc;
    auto [op, arg] = split_op(line);
    if (op == "data") {
      f.data = unquote(arg);
    } else if (op == "gettext") {
      f.stack.push_back(reconstruct(f.data));
    } else if (op == "push") {
      f.stack.push_back(unquote(arg));
    } else if (op == "apply") {
      std::string s = pop(f, op);
      f.stack.push_back(apply_transformer(unquote(arg), s));
    } else if (op == "exec") {
      std::string s = pop(f, op);
      frames.push_back(Frame{split_lines(s), 0, {}, {}});  // invalidates f
    } else if (op == "emit") {
      run.output += pop(f, op);
    } else if (op == "write") {
      if (arg.size() != 1) throw Error(ErrorCode::MalformedSpec, "write takes one character");
      run.output += arg[0];
    } else if (op == "jump") {
      std::size_t used = 0;
      long n = -1;
      try {
        n = std::stol(arg, &used);
      } catch (const std::exception&) {
      }
      if (n < 0 || used != arg.size()) throw Error(ErrorCode::MalformedSpec, "bad jump target: " + arg);
      f.pc = static_cast<std::size_t>(n);
    } else if (op == "halt") {
      run.halted = true;
      break;
    } else {
      throw Error(ErrorCode::MalformedSpec, "unknown instruction: " + op);
    }
  }
  return run;
}

std::string get_text(const std::string& program) {
  std::string data;
  for (const auto& line : split_lines(program)) {
    if (is_comment(line)) continue;
    auto [op, arg] = split_op(line);
    if (op == "data") data = unquote(arg);
  }
  return reconstruct(data);
}

std::string fixed_point_program(const std::string& pi) {
  const std::string body = "gettext\napply " + quote(pi) + "\nexec\n";
  return reconstruct(body);
}

std::string strip_comments(const std::string& text) {
  std::string out;
  for (const auto& line : split_lines(text))
    if (!is_comment(line)) out += line + "\n";
  return out;
}

}  // namespace tileforge
