#include "tightbound/analyzer.hpp"

#include <algorithm>
#include <set>

namespace tightbound {

std::vector<MultiPoly> AbstractResult::mps() const {
  std::vector<MultiPoly> out;
  out.reserve(elements.size());
  for (const auto& e : elements) out.push_back(e.mp);
  return out;
}

namespace {

// Sorts by MP and merges duplicates, keeping any exact transition found.
void normalize(std::vector<AbstractElement>& v) {
  std::stable_sort(v.begin(), v.end(), [](const AbstractElement& a, const AbstractElement& b) { return a.mp < b.mp; });
  std::vector<AbstractElement> out;
  out.reserve(v.size());
  for (auto& e : v) {
    if (!out.empty() && out.back().mp == e.mp) {
      if (!out.back().exact && e.exact) out.back().exact = std::move(e.exact);
      continue;
    }
    out.push_back(std::move(e));
  }
  v = std::move(out);
}

class Analyzer {
 public:
  Analyzer(std::size_t n, const AnalysisOptions& opts) : n_(n), opts_(opts) {}

  std::vector<AbstractElement> run(const Command& c) {
    using K = Command::Kind;
    switch (c.kind) {
      case K::Skip: {
        const auto id = NatMultiPoly::identity(n_);
        return {{alpha_k(id), id}};
      }
      case K::Assign: {
        NatMultiPoly t = NatMultiPoly::identity(n_);
        t.entry(c.target) = expr_poly(*c.expr);
        return {{alpha_k(t), t}};
      }
      case K::Seq: {
        auto a = run(*c.first);
        auto b = run(*c.second);
        return sequence(a, b);
      }
      case K::Choose: {
        auto a = run(*c.first);
        auto b = run(*c.second);
        a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
        normalize(a);
        check_size(a.size());
        return a;
      }
      case K::Loop:
        return loop(c);
    }
    return {};
  }

  std::vector<LoopSummary> loops;

 private:
  void check_size(std::size_t k) const {
    if (k > opts_.budget.max_set_size) throw BudgetExceeded("set-size budget exceeded in sequential composition");
  }

  // {b after a : a in first, b in second}
  std::vector<AbstractElement> sequence(const std::vector<AbstractElement>& first,
                                        const std::vector<AbstractElement>& second) const {
    check_size(first.size() * second.size());
    std::vector<AbstractElement> out(first.size() * second.size());
    const auto total = static_cast<std::ptrdiff_t>(out.size());
    const bool par = opts_.exec == Execution::Parallel;
    bool overflow = false;
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
      const auto& a = first[static_cast<std::size_t>(k) / second.size()];
      const auto& b = second[static_cast<std::size_t>(k) % second.size()];
      auto& o = out[static_cast<std::size_t>(k)];
      try {
        o.mp = mp_compose(b.mp, a.mp);
      } catch (const OverflowError&) {
#pragma omp atomic write
        overflow = true;
        continue;
      }
      if (a.exact && b.exact) {
        try {
          o.exact = mp_compose(*b.exact, *a.exact);
        } catch (const OverflowError&) {
          o.exact.reset();
        }
      }
    }
    if (overflow) throw BudgetExceeded("degree budget exceeded (exponent overflow)");
    for (const auto& o : out)
      if (o.mp.degree() > opts_.budget.max_degree) throw BudgetExceeded("degree budget exceeded");
    normalize(out);
    return out;
  }

  std::vector<AbstractElement> loop(const Command& c) {
    auto body_elems = run(*c.body());
    LoopSummary summary;
    summary.line = c.line;
    summary.bound = to_string(*c.expr);
    bool exact = true;
    for (const auto& e : body_elems) {
      summary.body.push_back(e.mp);
      if (e.exact)
        summary.exact_body.push_back(*e.exact);
      else
        exact = false;
    }
    if (!exact) summary.exact_body.clear();

    SdlProblem prob;
    prob.body = summary.body;
    prob.n = n_;
    prob.budget = opts_.budget;
    summary.solution = solve_sdl(prob, opts_.exec);

    const Poly tau = alpha_k(expr_poly(*c.expr));
    std::vector<AbstractElement> out;
    out.reserve(summary.solution.bounds.size());
    for (const auto& b : summary.solution.bounds) out.push_back({subst_tau(b.mp, tau), std::nullopt});
    normalize(out);
    for (const auto& o : out)
      if (o.mp.degree() > opts_.budget.max_degree) throw BudgetExceeded("degree budget exceeded after loop-bound substitution");
    loops.push_back(std::move(summary));
    return out;
  }

  std::size_t n_;
  AnalysisOptions opts_;
};

}  // namespace

AbstractResult analyze(const Command& c, std::size_t n, const AnalysisOptions& opts) {
  if (max_var(c) > n) throw ArityError("command uses more variables than the arity");
  Analyzer a(n, opts);
  AbstractResult r;
  r.n = n;
  r.elements = a.run(c);
  r.loops = std::move(a.loops);
  return r;
}

VariableBound per_variable_bounds(std::span<const MultiPoly> bounds, std::size_t i) {
  VariableBound out;
  std::vector<Poly> polys;
  for (const auto& b : bounds) {
    const Entry& e = b.entry(i);
    if (e.is_super()) {
      out.super = true;
      return out;
    }
    polys.push_back(reduce_poly(erase_k(e.poly())));
  }
  std::sort(polys.begin(), polys.end());
  polys.erase(std::unique(polys.begin(), polys.end()), polys.end());
  for (std::size_t k = 0; k < polys.size(); ++k) {
    bool dominated = false;
    for (std::size_t j = 0; j < polys.size() && !dominated; ++j)
      dominated = j != k && poly_dominates(polys[j], polys[k]);
    if (!dominated) out.polys.push_back(polys[k]);
  }
  return out;
}

AnalysisReport analyze_program(const Program& p, const AnalysisOptions& opts) {
  AbstractResult res = analyze(*p.command, p.n, opts);
  AnalysisReport rep;
  rep.n = p.n;
  rep.budget = opts.budget;

  for (const auto& e : res.elements) rep.unreduced.push_back(erase_k(e.mp));
  std::sort(rep.unreduced.begin(), rep.unreduced.end());
  rep.unreduced.erase(std::unique(rep.unreduced.begin(), rep.unreduced.end()), rep.unreduced.end());
  rep.bounds = opts.reduce ? reduce_mp_set(rep.unreduced) : rep.unreduced;

  for (std::size_t i = 1; i <= p.n; ++i) {
    bool super = false;
    for (const auto& b : rep.unreduced) super = super || b.entry(i).is_super();
    (super ? rep.superpoly : rep.pb).push_back(i);
    rep.per_variable.emplace(i, per_variable_bounds(rep.bounds, i));
  }

  rep.stats.unreduced = res.elements.size();
  rep.stats.loops = res.loops.size();
  for (const auto& loop : res.loops) {
    rep.stats.rounds += loop.solution.stats.rounds;
    rep.stats.elements += loop.solution.stats.elements;
    rep.stats.restarts += loop.solution.stats.restarts;

    LoopWitnesses w;
    w.line = loop.line;
    w.bound = loop.bound;
    w.body = loop.solution.body;
    w.exact_body = !loop.exact_body.empty() && loop.solution.flagged.empty();
    if (w.exact_body) w.exact = loop.exact_body;
    std::set<MultiPoly> seen;
    for (const auto& b : loop.solution.bounds) {
      MultiPoly shown = reduce_mp_set(std::vector<MultiPoly>{erase_k(b.mp)}).front();
      if (!seen.insert(shown).second) continue;
      w.entries.push_back({std::move(shown), b.mp, derive_pattern(b.derivation, p.n)});
    }
    std::sort(w.entries.begin(), w.entries.end(),
              [](const WitnessEntry& a, const WitnessEntry& b) { return a.bound < b.bound; });
    rep.witnesses.push_back(std::move(w));
  }
  return rep;
}

}  // namespace tightbound
