#include "tightbound/lang.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace tightbound {

// ---------------------------------------------------------------------------
// Construction and structure

ExprPtr Expr::make_var(std::size_t i) {
  if (i == 0) throw std::invalid_argument("variable indices start at 1");
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var = i;
  return e;
}

ExprPtr Expr::make_add(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Add;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr Expr::make_mul(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Mul;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Expr::Kind::Var) return a.var == b.var;
  return *a.lhs == *b.lhs && *a.rhs == *b.rhs;
}

CommandPtr Command::make_skip() { return std::make_shared<Command>(); }

CommandPtr Command::make_assign(std::size_t target, ExprPtr rhs) {
  if (target == 0) throw std::invalid_argument("variable indices start at 1");
  auto c = std::make_shared<Command>();
  c->kind = Kind::Assign;
  c->target = target;
  c->expr = std::move(rhs);
  return c;
}

CommandPtr Command::make_seq(CommandPtr a, CommandPtr b) {
  if (a->kind == Kind::Seq) return make_seq(a->first, make_seq(a->second, std::move(b)));
  auto c = std::make_shared<Command>();
  c->kind = Kind::Seq;
  c->first = std::move(a);
  c->second = std::move(b);
  return c;
}

CommandPtr Command::make_loop(ExprPtr bound, CommandPtr body, int line) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Loop;
  c->expr = std::move(bound);
  c->first = std::move(body);
  c->line = line;
  return c;
}

CommandPtr Command::make_choose(CommandPtr a, CommandPtr b) {
  auto c = std::make_shared<Command>();
  c->kind = Kind::Choose;
  c->first = std::move(a);
  c->second = std::move(b);
  return c;
}

bool operator==(const Command& a, const Command& b) {
  if (a.kind != b.kind) return false;
  using K = Command::Kind;
  switch (a.kind) {
    case K::Skip:
      return true;
    case K::Assign:
      return a.target == b.target && *a.expr == *b.expr;
    case K::Seq:
    case K::Choose:
      return *a.first == *b.first && *a.second == *b.second;
    case K::Loop:
      return *a.expr == *b.expr && *a.first == *b.first;
  }
  return false;
}

std::size_t max_var(const Expr& e) {
  if (e.kind == Expr::Kind::Var) return e.var;
  return std::max(max_var(*e.lhs), max_var(*e.rhs));
}

std::size_t max_var(const Command& c) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Skip:
      return 0;
    case K::Assign:
      return std::max(c.target, max_var(*c.expr));
    case K::Seq:
    case K::Choose:
      return std::max(max_var(*c.first), max_var(*c.second));
    case K::Loop:
      return std::max(max_var(*c.expr), max_var(*c.first));
  }
  return 0;
}

std::size_t loop_depth(const Command& c) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Seq:
    case K::Choose:
      return std::max(loop_depth(*c.first), loop_depth(*c.second));
    case K::Loop:
      return 1 + loop_depth(*c.first);
    default:
      return 0;
  }
}

std::size_t count_loops(const Command& c) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Seq:
    case K::Choose:
      return count_loops(*c.first) + count_loops(*c.second);
    case K::Loop:
      return 1 + count_loops(*c.first);
    default:
      return 0;
  }
}

std::size_t count_chooses(const Command& c) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Seq:
      return count_chooses(*c.first) + count_chooses(*c.second);
    case K::Choose:
      return 1 + count_chooses(*c.first) + count_chooses(*c.second);
    case K::Loop:
      return count_chooses(*c.first);
    default:
      return 0;
  }
}

namespace {
std::size_t expr_nodes(const Expr& e) {
  if (e.kind == Expr::Kind::Var) return 1;
  return 1 + expr_nodes(*e.lhs) + expr_nodes(*e.rhs);
}
}  // namespace

std::size_t node_count(const Command& c) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Skip:
      return 1;
    case K::Assign:
      return 1 + expr_nodes(*c.expr);
    case K::Seq:
    case K::Choose:
      return 1 + node_count(*c.first) + node_count(*c.second);
    case K::Loop:
      return 1 + expr_nodes(*c.expr) + node_count(*c.first);
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_expr(const Expr& e, std::string& out) {
  auto sub = [&](const Expr& x, bool paren) {
    if (paren) out += '(';
    print_expr(x, out);
    if (paren) out += ')';
  };
  switch (e.kind) {
    case Expr::Kind::Var:
      out += 'X' + std::to_string(e.var);
      return;
    case Expr::Kind::Add:
      sub(*e.lhs, false);
      out += " + ";
      sub(*e.rhs, e.rhs->kind == Expr::Kind::Add);
      return;
    case Expr::Kind::Mul:
      sub(*e.lhs, e.lhs->kind == Expr::Kind::Add);
      out += " * ";
      sub(*e.rhs, e.rhs->kind != Expr::Kind::Var);
      return;
  }
}

void print_inline(const Command& c, std::string& out) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Skip:
      out += "skip";
      return;
    case K::Assign:
      out += 'X' + std::to_string(c.target) + " := ";
      print_expr(*c.expr, out);
      return;
    case K::Seq:
      print_inline(*c.first, out);
      out += "; ";
      print_inline(*c.second, out);
      return;
    case K::Loop:
      out += "loop ";
      print_expr(*c.expr, out);
      out += " { ";
      print_inline(*c.first, out);
      out += " }";
      return;
    case K::Choose:
      out += "choose { ";
      print_inline(*c.first, out);
      out += " } or { ";
      print_inline(*c.second, out);
      out += " }";
      return;
  }
}

void print_block(const Command& c, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  using K = Command::Kind;
  switch (c.kind) {
    case K::Seq:
      print_block(*c.first, indent, out);
      out += ";\n";
      print_block(*c.second, indent, out);
      return;
    case K::Loop:
      out += pad + "loop ";
      print_expr(*c.expr, out);
      out += " {\n";
      print_block(*c.first, indent + 1, out);
      out += '\n' + pad + "}";
      return;
    case K::Choose:
      out += pad + "choose {\n";
      print_block(*c.first, indent + 1, out);
      out += '\n' + pad + "} or {\n";
      print_block(*c.second, indent + 1, out);
      out += '\n' + pad + "}";
      return;
    default:
      out += pad;
      print_inline(c, out);
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

std::string to_string(const Command& c) {
  std::string out;
  print_inline(c, out);
  return out;
}

std::string format_program(const Program& p) {
  std::string out;
  if (p.n != std::max<std::size_t>(1, max_var(*p.command))) out += "# vars: " + std::to_string(p.n) + "\n";
  print_block(*p.command, 0, out);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Program program() {
    std::size_t declared = 0;
    read_directive(declared);
    CommandPtr c = sequence();
    skip_ws();
    if (!eof()) fail("unexpected '" + std::string(1, peek()) + "'");
    Program p;
    p.command = c;
    const std::size_t used = max_var(*c);
    if (declared != 0) {
      if (declared < used)
        throw ParseError(1, 1, "declared vars " + std::to_string(declared) + " but X" + std::to_string(used) + " is used");
      p.n = declared;
    } else {
      p.n = std::max<std::size_t>(1, used);
    }
    if (p.n > kMaxVars) throw ParseError(1, 1, "too many variables (limit " + std::to_string(kMaxVars) + ")");
    return p;
  }

 private:
  void read_directive(std::size_t& declared) {
    std::size_t p = 0;
    while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t')) ++p;
    if (p >= s_.size() || s_[p] != '#') return;
    ++p;
    while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t')) ++p;
    if (s_.substr(p, 5) != "vars:") return;
    p += 5;
    while (p < s_.size() && (s_[p] == ' ' || s_[p] == '\t')) ++p;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + p, s_.data() + s_.size(), v);
    if (ec != std::errc{} || v == 0) throw ParseError(1, static_cast<int>(p) + 1, "malformed vars directive");
    declared = v;
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!eof()) {
      const char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    if (std::isalpha(static_cast<unsigned char>(tok.back()))) {
      const std::size_t after = pos_ + tok.size();
      if (after < s_.size() && std::isalnum(static_cast<unsigned char>(s_[after]))) return false;
    }
    for (std::size_t i = 0; i < tok.size(); ++i) advance();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'" + found());
  }

  std::string found() {
    skip_ws();
    if (eof()) return " but reached end of input";
    return " but found '" + std::string(1, peek()) + "'";
  }

  bool at_variable() {
    skip_ws();
    return peek() == 'X' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]));
  }

  std::size_t variable() {
    if (!at_variable()) fail("expected a variable" + found());
    const int line = line_, col = col_;
    advance();
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc{} || v == 0 || v > kMaxVars)
      throw ParseError(line, col, "variable index must be between 1 and " + std::to_string(kMaxVars));
    while (s_.data() + pos_ < ptr) advance();
    return v;
  }

  CommandPtr sequence() {
    CommandPtr c = command();
    if (accept(";")) {
      skip_ws();
      if (eof() || peek() == '}') return c;
      return Command::make_seq(c, sequence());
    }
    return c;
  }

  CommandPtr block() {
    expect("{");
    CommandPtr c = sequence();
    expect("}");
    return c;
  }

  CommandPtr command() {
    skip_ws();
    const int line = line_;
    if (accept("skip")) return Command::make_skip();
    if (accept("loop")) {
      ExprPtr bound = expr();
      CommandPtr body = block();
      return Command::make_loop(bound, body, line);
    }
    if (accept("choose")) {
      CommandPtr a = block();
      expect("or");
      CommandPtr b = block();
      return Command::make_choose(a, b);
    }
    if (at_variable()) {
      const std::size_t target = variable();
      expect(":=");
      return Command::make_assign(target, expr());
    }
    fail("expected a command" + found());
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (accept("+")) e = Expr::make_add(e, term());
    return e;
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (accept("*")) e = Expr::make_mul(e, factor());
    return e;
  }

  ExprPtr factor() {
    if (accept("(")) {
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    return Expr::make_var(variable());
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

Program parse(std::string_view text) { return Parser(text).program(); }

// ---------------------------------------------------------------------------
// Semantics

State parse_state(std::string_view text) {
  State s;
  std::size_t p = 0;
  while (true) {
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + p, text.data() + text.size(), v);
    if (ec != std::errc{}) throw std::invalid_argument("malformed state '" + std::string(text) + "'");
    s.push_back(v);
    p = static_cast<std::size_t>(ptr - text.data());
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    if (p == text.size()) break;
    if (text[p] != ',') throw std::invalid_argument("malformed state '" + std::string(text) + "'");
    ++p;
  }
  return s;
}

std::string to_string(const State& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + ")";
}

namespace {

class ScheduleRunner {
 public:
  explicit ScheduleRunner(const Schedule& sched) : sched_(sched) {}

  void exec(const Command& c, State& s) {
    using K = Command::Kind;
    switch (c.kind) {
      case K::Skip:
        return;
      case K::Assign:
        s[c.target - 1] = eval_expr(*c.expr, s);
        return;
      case K::Seq:
        exec(*c.first, s);
        exec(*c.second, s);
        return;
      case K::Choose: {
        const Decision d = next();
        if (d.kind == Decision::Kind::Iterations) throw ScheduleError("expected a choice, got an iteration count");
        exec(d.kind == Decision::Kind::ChooseLeft ? *c.first : *c.second, s);
        return;
      }
      case K::Loop: {
        const Decision d = next();
        if (d.kind != Decision::Kind::Iterations) throw ScheduleError("expected an iteration count, got a choice");
        const std::uint64_t bound = eval_expr(*c.expr, s);
        if (d.count > bound)
          throw ScheduleError("iteration count " + std::to_string(d.count) + " exceeds loop bound " + std::to_string(bound));
        for (std::uint64_t i = 0; i < d.count; ++i) exec(*c.body(), s);
        return;
      }
    }
  }

  bool exhausted() const { return pos_ == sched_.size(); }

 private:
  Decision next() {
    if (pos_ >= sched_.size()) throw ScheduleError("schedule exhausted");
    return sched_[pos_++];
  }

  const Schedule& sched_;
  std::size_t pos_ = 0;
};

}  // namespace

State run_schedule(const Program& p, const State& s, const Schedule& sched) {
  if (s.size() != p.n) throw ArityError("state has " + std::to_string(s.size()) + " values, program has " + std::to_string(p.n) + " variables");
  State out = s;
  ScheduleRunner r(sched);
  r.exec(*p.command, out);
  if (!r.exhausted()) throw ScheduleError("schedule has unused decisions");
  return out;
}

namespace {

// Mirrors Explorer::exec without pruning, but stops growing sets at the
// budget instead of throwing so the partial result can be returned.
class TruncatingExplorer {
 public:
  using StateSet = std::set<State>;
  explicit TruncatingExplorer(std::size_t budget) : budget_(budget) {}

  bool truncated = false;

  StateSet exec(const Command& c, StateSet in) {
    using K = Command::Kind;
    switch (c.kind) {
      case K::Skip:
        return in;
      case K::Assign: {
        StateSet out;
        for (const auto& s : in) {
          State t = s;
          t[c.target - 1] = eval_expr(*c.expr, s);
          out.insert(std::move(t));
        }
        return out;
      }
      case K::Seq:
        return exec(*c.second, exec(*c.first, std::move(in)));
      case K::Choose: {
        StateSet a = exec(*c.first, in);
        StateSet b = exec(*c.second, std::move(in));
        for (auto& x : b) add(a, x);
        return a;
      }
      case K::Loop: {
        StateSet out;
        for (const auto& s : in) {
          std::uint64_t iters = eval_expr(*c.expr, s);
          if (iters > budget_) {
            iters = budget_;
            truncated = true;
          }
          StateSet seen{s};
          StateSet frontier{s};
          for (std::uint64_t i = 0; i < iters && !frontier.empty() && !truncated; ++i) {
            StateSet next = exec(*c.body(), std::move(frontier));
            frontier.clear();
            for (auto& y : next)
              if (!seen.count(y) && add(seen, y)) frontier.insert(y);
          }
          for (auto& x : seen) add(out, x);
        }
        return out;
      }
    }
    return in;
  }

 private:
  bool add(StateSet& s, const State& x) {
    if (s.size() >= budget_ && !s.count(x)) {
      truncated = true;
      return false;
    }
    s.insert(x);
    return true;
  }

  std::size_t budget_;
};

}  // namespace

Finals enumerate_finals(const Program& p, const State& s, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("enumeration budget must be positive");
  if (s.size() != p.n) throw ArityError("state has " + std::to_string(s.size()) + " values, program has " + std::to_string(p.n) + " variables");
  TruncatingExplorer ex(budget);
  auto finals = ex.exec(*p.command, {s});
  Finals out;
  out.states.assign(finals.begin(), finals.end());
  out.truncated = ex.truncated;
  return out;
}

namespace {

CommandPtr instrument(const CommandPtr& c, std::size_t unit, std::size_t counter) {
  using K = Command::Kind;
  switch (c->kind) {
    case K::Seq:
      return Command::make_seq(instrument(c->first, unit, counter), instrument(c->second, unit, counter));
    case K::Choose:
      return Command::make_choose(instrument(c->first, unit, counter), instrument(c->second, unit, counter));
    case K::Loop: {
      auto tick = Command::make_assign(counter, Expr::make_add(Expr::make_var(counter), Expr::make_var(unit)));
      return Command::make_loop(c->expr, Command::make_seq(tick, instrument(c->body(), unit, counter)), c->line);
    }
    default:
      return c;
  }
}

}  // namespace

Program instrument_counters(const Program& p) {
  Program out;
  out.n = p.n + 2;
  if (out.n > kMaxVars) throw ArityError("instrumentation exceeds the variable limit");
  out.command = instrument(p.command, p.n + 1, p.n + 2);
  return out;
}

NatPoly expr_poly(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return NatPoly::var(e.var);
    case Expr::Kind::Add:
      return expr_poly(*e.lhs) + expr_poly(*e.rhs);
    case Expr::Kind::Mul:
      return expr_poly(*e.lhs) * expr_poly(*e.rhs);
  }
  return {};
}

namespace {

void symbolic(const Command& c, std::vector<NatMultiPoly>& states) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Skip:
      return;
    case K::Assign: {
      const NatPoly rhs = expr_poly(*c.expr);
      for (auto& s : states) {
        NatPoly v = rhs.compose(s.entries());
        s.entry(c.target) = std::move(v);
      }
      return;
    }
    case K::Seq:
      symbolic(*c.first, states);
      symbolic(*c.second, states);
      return;
    case K::Choose: {
      std::vector<NatMultiPoly> right = states;
      symbolic(*c.first, states);
      symbolic(*c.second, right);
      states.insert(states.end(), right.begin(), right.end());
      std::sort(states.begin(), states.end());
      states.erase(std::unique(states.begin(), states.end()), states.end());
      return;
    }
    case K::Loop:
      throw std::invalid_argument("symbolic_eval: command contains a loop");
  }
}

}  // namespace

std::vector<NatMultiPoly> symbolic_eval(const Command& c, std::size_t n) {
  if (max_var(c) > n) throw ArityError("command uses more variables than the arity");
  std::vector<NatMultiPoly> states{NatMultiPoly::identity(n)};
  symbolic(c, states);
  return states;
}

}  // namespace tightbound
