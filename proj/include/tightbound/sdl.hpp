#pragma once

// Solver for simple disjunctive loops: abstract closure, idempotence,
// generalization and super-polynomial detection.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tightbound/execution.hpp"
#include "tightbound/poly.hpp"

namespace tightbound {

struct Budget {
  /// Largest total degree (tau included) of any entry.
  unsigned max_degree = 40;
  std::size_t max_set_size = 200000;
  /// Closure-plus-generalization rounds per solve.
  std::size_t max_rounds = 64;
};

// ---------------------------------------------------------------------------
// Derivations

struct DerivationNode;
using Derivation = std::shared_ptr<const DerivationNode>;

/// How an element of a solution was built from the loop body.
struct DerivationNode {
  enum class Kind { Identity, Input, Compose, Generalize };
  Kind kind = Kind::Identity;
  std::size_t input = 0;  // 0-based body index
  Derivation first;       // Compose: applied first; Generalize: operand
  Derivation then;        // Compose: applied second

  static Derivation identity();
  static Derivation make_input(std::size_t k);
  static Derivation make_compose(Derivation first, Derivation then);
  static Derivation make_generalize(Derivation of);
};

/// Replays derivations over a fixed body, sharing results between the
/// common subtrees of different derivations.
class Replayer {
 public:
  explicit Replayer(std::span<const MultiPoly> body);
  MultiPoly replay(const Derivation& d);

 private:
  std::vector<MultiPoly> body_;
  std::size_t n_;
  std::unordered_map<const DerivationNode*, MultiPoly> memo_;
};

MultiPoly replay(const Derivation& d, std::span<const MultiPoly> body);

// ---------------------------------------------------------------------------
// Element-level operations

/// Indices i (1-based) whose entry mentions x_i. SuperPoly entries are not
/// self-dependent.
std::vector<std::size_t> sd_set(const MultiPoly& p);

/// p∘p = p with saturated coefficients.
bool is_idempotent(const MultiPoly& p);
/// p∘p = p once coefficients are erased (x + x counts as x).
bool is_erase_idempotent(const MultiPoly& p);

struct Decomposition {
  std::size_t index = 0;
  /// Self-dependent monomials carrying tau, with one tau factor stripped.
  Poly p_prime;
  /// Tau-free self-dependent monomials other than x_i.
  Poly p_dprime;
  /// Monomials mentioning a variable that is not self-dependent.
  Poly p_tprime;
};

/// Requires i in sd_set(p) and a bare coefficient-One x_i in p[i]; throws
/// std::invalid_argument otherwise.
Decomposition decompose_entry(const MultiPoly& p, std::size_t i);

/// Throws std::invalid_argument unless p is erase-idempotent. Every
/// saturated idempotent qualifies.
MultiPoly generalize(const MultiPoly& p);

/// Entries i holding a monomial divisible by x_i other than a bare
/// coefficient-One x_i.
std::vector<std::size_t> detect_superpoly(const MultiPoly& p);

// ---------------------------------------------------------------------------
// Closure and the solver

struct SdlElement {
  MultiPoly mp;
  Derivation derivation;
};

class SdlBudgetExceeded : public BudgetExceeded {
 public:
  SdlBudgetExceeded(const std::string& what, std::size_t elements, std::size_t rounds, std::size_t restarts)
      : BudgetExceeded(what), elements(elements), rounds(rounds), restarts(restarts) {}
  std::size_t elements;
  std::size_t rounds;
  std::size_t restarts;
};

/// Least composition-closed set containing Id and t. Elements appear in
/// discovery order; the first derivation found is kept.
std::vector<SdlElement> closure(std::span<const MultiPoly> t, const Budget& budget = {},
                                Execution exec = Execution::Parallel);

struct SdlProblem {
  std::vector<MultiPoly> body;
  std::size_t n = 0;
  Budget budget;
};

struct SdlStats {
  std::size_t rounds = 0;
  std::size_t elements = 0;  // elements created, summed over restarts
  std::size_t restarts = 0;
  std::size_t generalizations = 0;  // generalizations that changed the element, final solve
};

struct SdlSolution {
  /// The body actually solved: flagged entries replaced by SuperPoly.
  std::vector<MultiPoly> body;
  std::vector<SdlElement> bounds;
  /// Variables flagged by detect_superpoly.
  std::vector<std::size_t> flagged;
  /// Variables that are SuperPoly in some bound.
  std::vector<std::size_t> superpoly_vars;
  SdlStats stats;
};

SdlSolution solve_sdl(const SdlProblem& prob, Execution exec = Execution::Parallel);

}  // namespace tightbound
