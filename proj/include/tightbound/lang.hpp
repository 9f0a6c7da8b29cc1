#pragma once

// The bounded-loop core language: syntax trees, concrete syntax, and a
// nondeterministic interpreter.

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "tightbound/poly.hpp"

namespace tightbound {

// ---------------------------------------------------------------------------
// Syntax

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Var, Add, Mul };
  Kind kind = Kind::Var;
  std::size_t var = 0;
  ExprPtr lhs, rhs;

  static ExprPtr make_var(std::size_t i);
  static ExprPtr make_add(ExprPtr a, ExprPtr b);
  static ExprPtr make_mul(ExprPtr a, ExprPtr b);
};

bool operator==(const Expr& a, const Expr& b);

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
  enum class Kind { Skip, Assign, Seq, Loop, Choose };
  Kind kind = Kind::Skip;
  std::size_t target = 0;  // Assign
  ExprPtr expr;            // Assign rhs, Loop bound
  CommandPtr first;        // Seq first, Loop body, Choose left
  CommandPtr second;       // Seq second, Choose right
  int line = 0;            // source line of a loop keyword, 0 if synthesized

  static CommandPtr make_skip();
  static CommandPtr make_assign(std::size_t target, ExprPtr rhs);
  /// Right-nests: seq(seq(a, b), c) becomes seq(a, seq(b, c)).
  static CommandPtr make_seq(CommandPtr a, CommandPtr b);
  static CommandPtr make_loop(ExprPtr bound, CommandPtr body, int line = 0);
  static CommandPtr make_choose(CommandPtr a, CommandPtr b);

  const CommandPtr& body() const { return first; }
};

/// Structural equality; source lines are ignored.
bool operator==(const Command& a, const Command& b);

struct Program {
  CommandPtr command;
  std::size_t n = 1;
};

std::size_t max_var(const Expr& e);
std::size_t max_var(const Command& c);
std::size_t loop_depth(const Command& c);
std::size_t count_loops(const Command& c);
std::size_t count_chooses(const Command& c);
/// Number of AST nodes, expressions included.
std::size_t node_count(const Command& c);

std::string to_string(const Expr& e);
/// Single-line rendering.
std::string to_string(const Command& c);
/// Multi-line rendering with a `# vars:` header when n exceeds the largest
/// index used. Parsing the result gives back an equal program.
std::string format_program(const Program& p);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

Program parse(std::string_view text);

// ---------------------------------------------------------------------------
// Semantics

using State = std::vector<std::uint64_t>;

/// Parses `3,1,4`.
State parse_state(std::string_view text);
std::string to_string(const State& s);

namespace detail {
template <class V>
V checked_add(V a, V b) {
  if constexpr (std::is_integral_v<V>) {
    V r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("arithmetic overflow");
    return r;
  } else {
    return a + b;
  }
}
template <class V>
V checked_mul(V a, V b) {
  if constexpr (std::is_integral_v<V>) {
    V r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("arithmetic overflow");
    return r;
  } else {
    return a * b;
  }
}
}  // namespace detail

/// Integer instantiations throw OverflowError instead of wrapping.
template <class V>
V eval_expr(const Expr& e, std::span<const V> s) {
  switch (e.kind) {
    case Expr::Kind::Var:
      return s[e.var - 1];
    case Expr::Kind::Add:
      return detail::checked_add(eval_expr(*e.lhs, s), eval_expr(*e.rhs, s));
    case Expr::Kind::Mul:
      return detail::checked_mul(eval_expr(*e.lhs, s), eval_expr(*e.rhs, s));
  }
  return V(0);
}

inline std::uint64_t eval_expr(const Expr& e, const State& s) {
  return eval_expr<std::uint64_t>(e, std::span<const std::uint64_t>(s));
}

struct Decision {
  enum class Kind { ChooseLeft, ChooseRight, Iterations };
  Kind kind = Kind::Iterations;
  std::uint64_t count = 0;

  static Decision left() { return {Kind::ChooseLeft, 0}; }
  static Decision right() { return {Kind::ChooseRight, 0}; }
  static Decision iterations(std::uint64_t i) { return {Kind::Iterations, i}; }
  friend bool operator==(const Decision&, const Decision&) = default;
};

using Schedule = std::vector<Decision>;

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decisions are consumed in execution order: one per choose, one per loop
/// entry. Unused trailing decisions are an error.
State run_schedule(const Program& p, const State& s, const Schedule& sched);

struct ExploreLimits {
  /// Largest state set held at any point.
  std::size_t max_states = 100000;
  /// Largest loop bound that will be unrolled.
  std::uint64_t max_iterations = 100000;
  /// Total state transitions computed.
  std::uint64_t max_work = 50'000'000;
  /// Keep only componentwise-maximal states. Sound for maxima because every
  /// operation of the language is monotone.
  bool prune_dominated = false;
};

/// Exhaustive set-semantics interpreter over value type V (an unsigned
/// integer type or a floating type). Throws BudgetExceeded when a limit is
/// hit.
template <class V>
class Explorer {
 public:
  using Vec = std::vector<V>;
  using StateSet = std::set<Vec>;

  explicit Explorer(ExploreLimits limits) : limits_(limits) {}

  StateSet run(const Command& c, StateSet in) { return exec(c, std::move(in)); }
  std::uint64_t work() const { return work_; }

  /// Componentwise-maximal members.
  static StateSet maximal(const StateSet& s);

 private:
  StateSet exec(const Command& c, StateSet in);
  void charge(std::size_t set_size, std::uint64_t steps = 1) {
    work_ += steps;
    if (set_size > limits_.max_states) throw BudgetExceeded("state set exceeds limit");
    if (work_ > limits_.max_work) throw BudgetExceeded("exploration work exceeds limit");
  }
  static bool leq(const Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (b[i] < a[i]) return false;
    return true;
  }
  static bool dominated_by_any(const Vec& v, const StateSet& s) {
    for (const auto& w : s)
      if (leq(v, w)) return true;
    return false;
  }

  ExploreLimits limits_;
  std::uint64_t work_ = 0;
};

struct Finals {
  std::vector<State> states;  // sorted
  bool truncated = false;
};

/// All final states reachable from s. On a budget overrun the states found
/// so far are returned with `truncated` set.
Finals enumerate_finals(const Program& p, const State& s, std::size_t budget = 100000);

/// Adds unit U = X(n+1) and counter C = X(n+2); every loop body starts with
/// `C := C + U`.
Program instrument_counters(const Program& p);

/// Exact polynomial of an expression.
NatPoly expr_poly(const Expr& e);

/// Symbolic evaluation of a loop-free command over n variables: one exact
/// transition per choose path, deduplicated and sorted. Throws
/// std::invalid_argument on a loop.
std::vector<NatMultiPoly> symbolic_eval(const Command& c, std::size_t n);

// ---------------------------------------------------------------------------
// Explorer implementation

template <class V>
typename Explorer<V>::StateSet Explorer<V>::maximal(const StateSet& s) {
  // Candidates in order of decreasing coordinate sum: a state can only be
  // dominated by one with a sum at least as large.
  std::vector<std::pair<long double, const Vec*>> order;
  order.reserve(s.size());
  for (const auto& v : s) {
    long double sum = 0;
    for (const auto& x : v) sum += static_cast<long double>(x);
    order.emplace_back(sum, &v);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<const Vec*> keep;
  for (const auto& [sum, v] : order) {
    bool dom = false;
    for (const Vec* w : keep)
      if (leq(*v, *w)) {
        dom = true;
        break;
      }
    if (!dom) keep.push_back(v);
  }
  StateSet out;
  for (const Vec* v : keep) out.insert(*v);
  return out;
}

template <class V>
typename Explorer<V>::StateSet Explorer<V>::exec(const Command& c, StateSet in) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Skip:
      return in;
    case K::Assign: {
      StateSet out;
      for (const auto& s : in) {
        Vec t = s;
        t[c.target - 1] = eval_expr<V>(*c.expr, std::span<const V>(s));
        out.insert(std::move(t));
      }
      charge(out.size(), in.size());
      if (limits_.prune_dominated) return maximal(out);
      return out;
    }
    case K::Seq:
      return exec(*c.second, exec(*c.first, std::move(in)));
    case K::Choose: {
      StateSet a = exec(*c.first, in);
      StateSet b = exec(*c.second, std::move(in));
      a.merge(b);
      charge(a.size());
      if (limits_.prune_dominated) return maximal(a);
      return a;
    }
    case K::Loop: {
      StateSet out;
      for (const auto& s : in) {
        const V bound = eval_expr<V>(*c.expr, std::span<const V>(s));
        if (!(bound <= static_cast<V>(limits_.max_iterations)))
          throw BudgetExceeded("loop bound exceeds iteration limit");
        const auto iters = static_cast<std::uint64_t>(bound);
        StateSet seen{s};
        StateSet frontier{s};
        for (std::uint64_t i = 0; i < iters && !frontier.empty(); ++i) {
          StateSet next = exec(*c.body(), std::move(frontier));
          frontier.clear();
          for (auto& y : next) {
            if (seen.count(y)) continue;
            if (limits_.prune_dominated && dominated_by_any(y, seen)) continue;
            frontier.insert(y);
          }
          if (limits_.prune_dominated) {
            frontier = maximal(frontier);
            StateSet all = seen;
            all.insert(frontier.begin(), frontier.end());
            seen = maximal(all);
          } else {
            seen.insert(frontier.begin(), frontier.end());
          }
          charge(seen.size());
        }
        out.merge(seen);
        charge(out.size());
      }
      if (limits_.prune_dominated) return maximal(out);
      return out;
    }
  }
  return in;
}

}  // namespace tightbound
