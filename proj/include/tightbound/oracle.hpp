#pragma once

// Brute-force ground truth for the analyzer: exhaustive execution, empirical
// upper- and lower-bound checks, and growth classification.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tightbound/analyzer.hpp"
#include "tightbound/execution.hpp"
#include "tightbound/lang.hpp"
#include "tightbound/witness.hpp"

namespace tightbound {

/// Cartesian product of per-variable value lists, enumerated with the last
/// variable varying fastest.
struct Grid {
  std::vector<std::vector<std::uint64_t>> values;
  std::size_t max_points = 1'000'000;

  /// {lo..hi} for each of n variables.
  static Grid uniform(std::size_t n, std::uint64_t lo, std::uint64_t hi);
  std::size_t size() const;
  /// Throws BudgetExceeded if the product exceeds max_points.
  std::vector<State> points() const;
};

/// Componentwise maximum of the states reachable by traces of length at
/// most L over the exact body transitions.
State sdl_max_outcomes(std::span<const NatMultiPoly> body, const State& s, std::size_t L,
                       std::size_t budget = 1'000'000);

// ---------------------------------------------------------------------------
// Upper bounds

struct UpperCounterexample {
  State input;
  State output;
  std::size_t variable = 0;  // 1-based, worst offending variable of the best bound
  std::uint64_t observed = 0;
  long double bound_value = 0;
  std::string bound;  // best bound tried
};

struct UpperCheck {
  bool pass = true;
  /// Largest constant needed anywhere (0 when there were no finals).
  std::uint64_t max_constant = 0;
  /// Per checked bound (same order as `bounds`), largest constant it was
  /// chosen for; 0 if never chosen.
  std::vector<std::uint64_t> constants;
  std::vector<MultiPoly> bounds;
  std::size_t points = 0;
  std::size_t finals = 0;
  /// Some grid point exceeded the exploration budget; the verdict covers
  /// the remaining points only.
  bool budget_exceeded = false;
  std::optional<UpperCounterexample> counterexample;
};

/// Every final state from every grid input must satisfy y_i <= c * gamma(b)[i](x)
/// for all i in pb, for some bound b and integer c <= cap. Checks the
/// report's unreduced bounds.
UpperCheck check_upper(const Program& p, const AnalysisReport& report, const Grid& grid, std::uint64_t cap = 64,
                       ExploreLimits limits = {}, Execution exec = Execution::Parallel);

/// Same check against an explicit bound set.
UpperCheck check_upper(const Program& p, std::span<const MultiPoly> bounds, std::span<const std::size_t> pb,
                       const Grid& grid, std::uint64_t cap = 64, ExploreLimits limits = {},
                       Execution exec = Execution::Parallel);

// ---------------------------------------------------------------------------
// Lower bounds

struct LowerCheck {
  bool pass = true;
  /// Fitted at the smallest scale; infinite when the bound has no
  /// non-linear part.
  long double d_fit = 0;
  /// Per scale, the minimum ratio over t and entries.
  std::vector<long double> d_by_scale;
  /// Failure description, empty on pass.
  std::string failure;
};

/// All-ones concretization of a MultiPoly. Throws std::domain_error on a
/// SuperPoly entry.
NatMultiPoly gamma_body(const MultiPoly& p);

/// Replays expand_pattern(pi, t) from x = (s, ..., s) and checks
/// y_i >= nu(bound)[i](x) + d * nubar(bound)[i](x, t). SuperPoly entries of
/// the bound are ignored.
LowerCheck check_lower(std::span<const NatMultiPoly> body, const MultiPoly& bound, const Pattern& pi,
                       std::span<const std::uint64_t> scales = std::vector<std::uint64_t>{2, 4, 8},
                       std::size_t t_max = 6);

// ---------------------------------------------------------------------------
// Growth classification

struct Growth {
  enum class Kind { Polynomial, SuperPolynomial, Unknown };
  Kind kind = Kind::Unknown;
  int degree = 0;
  std::vector<std::uint64_t> scales;
  std::vector<long double> values;
  friend bool operator==(const Growth& a, const Growth& b) { return a.kind == b.kind && a.degree == b.degree; }
};

std::string to_string(const Growth& g);

/// Default scales 2, 4, ..., 256.
std::vector<std::uint64_t> default_scales();

/// Worst-case final values at inputs (s, ..., s) for increasing s, stopping
/// at the first scale that exceeds the exploration budget. Needs at least
/// four scales for a verdict.
std::vector<Growth> classify_all(const Program& p, std::span<const std::uint64_t> scales, ExploreLimits limits = {},
                                 Execution exec = Execution::Parallel);
Growth classify_growth(const Program& p, std::size_t i, std::span<const std::uint64_t> scales,
                       ExploreLimits limits = {}, Execution exec = Execution::Parallel);

/// The slope rule on a value series at doubling scales.
Growth classify_series(std::span<const std::uint64_t> scales, std::span<const long double> values);

// ---------------------------------------------------------------------------
// Adversarial corpus

/// m = n/2 inputs X1..Xm and outputs Y_j = X(m+j); each Y_j becomes a product
/// of d independent choices, one from each block of m/d inputs.
Program gen_adversarial(std::size_t n, std::size_t d);

}  // namespace tightbound
