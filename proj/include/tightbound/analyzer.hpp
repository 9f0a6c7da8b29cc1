#pragma once

// Compositional set-of-multi-polynomials semantics of commands and the
// final bound report.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tightbound/execution.hpp"
#include "tightbound/lang.hpp"
#include "tightbound/poly.hpp"
#include "tightbound/sdl.hpp"
#include "tightbound/witness.hpp"

namespace tightbound {

struct AbstractElement {
  MultiPoly mp;
  /// Exact transition, kept while the command is loop-free.
  std::optional<NatMultiPoly> exact;
};

/// What the solver saw and produced for one loop.
struct LoopSummary {
  int line = 0;
  std::string bound;  // loop-bound expression text
  std::vector<MultiPoly> body;
  /// Exact body transitions; empty when the body contains a loop.
  std::vector<NatMultiPoly> exact_body;
  SdlSolution solution;
};

struct AbstractResult {
  std::size_t n = 0;
  /// Canonically sorted, duplicate-free.
  std::vector<AbstractElement> elements;
  /// In order of completion (inner loops first).
  std::vector<LoopSummary> loops;

  std::vector<MultiPoly> mps() const;
};

struct AnalysisOptions {
  Budget budget;
  bool reduce = true;
  Execution exec = Execution::Parallel;
};

AbstractResult analyze(const Command& c, std::size_t n, const AnalysisOptions& opts = {});

/// Dominance-maximal erased entry-i polynomials, or super.
struct VariableBound {
  bool super = false;
  std::vector<Poly> polys;
  friend bool operator==(const VariableBound&, const VariableBound&) = default;
};

VariableBound per_variable_bounds(std::span<const MultiPoly> bounds, std::size_t i);

struct WitnessEntry {
  MultiPoly bound;  // erased and reduced tau-bound
  MultiPoly raw;    // the solver element it was taken from
  Pattern pattern;
};

struct LoopWitnesses {
  int line = 0;
  std::string bound;
  std::vector<MultiPoly> body;
  bool exact_body = false;
  std::vector<NatMultiPoly> exact;  // parallel to body when exact_body
  std::vector<WitnessEntry> entries;
};

struct ReportStats {
  std::size_t rounds = 0;
  std::size_t elements = 0;
  std::size_t restarts = 0;
  std::size_t unreduced = 0;
  std::size_t loops = 0;
};

struct AnalysisReport {
  std::size_t n = 0;
  std::vector<std::size_t> pb;
  std::vector<std::size_t> superpoly;
  /// Erased; reduced when AnalysisOptions::reduce is set.
  std::vector<MultiPoly> bounds;
  /// Erased and deduplicated, without dominance reduction.
  std::vector<MultiPoly> unreduced;
  std::map<std::size_t, VariableBound> per_variable;
  std::vector<LoopWitnesses> witnesses;
  ReportStats stats;
  Budget budget;
};

AnalysisReport analyze_program(const Program& p, const AnalysisOptions& opts = {});

}  // namespace tightbound
