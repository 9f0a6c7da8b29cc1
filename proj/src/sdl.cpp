#include "tightbound/sdl.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace tightbound {

// ---------------------------------------------------------------------------
// Derivations

Derivation DerivationNode::identity() {
  static const Derivation id = std::make_shared<DerivationNode>();
  return id;
}

Derivation DerivationNode::make_input(std::size_t k) {
  auto d = std::make_shared<DerivationNode>();
  d->kind = Kind::Input;
  d->input = k;
  return d;
}

Derivation DerivationNode::make_compose(Derivation first, Derivation then) {
  auto d = std::make_shared<DerivationNode>();
  d->kind = Kind::Compose;
  d->first = std::move(first);
  d->then = std::move(then);
  return d;
}

Derivation DerivationNode::make_generalize(Derivation of) {
  auto d = std::make_shared<DerivationNode>();
  d->kind = Kind::Generalize;
  d->first = std::move(of);
  return d;
}

Replayer::Replayer(std::span<const MultiPoly> body) : body_(body.begin(), body.end()), n_(0) {
  if (!body_.empty()) n_ = body_.front().arity();
}

MultiPoly Replayer::replay(const Derivation& d) {
  if (auto it = memo_.find(d.get()); it != memo_.end()) return it->second;
  MultiPoly r;
  switch (d->kind) {
    case DerivationNode::Kind::Identity:
      if (body_.empty()) throw std::invalid_argument("replay: identity needs a non-empty body for its arity");
      r = MultiPoly::identity(n_);
      break;
    case DerivationNode::Kind::Input:
      if (d->input >= body_.size()) throw std::out_of_range("replay: body index out of range");
      r = body_[d->input];
      break;
    case DerivationNode::Kind::Compose:
      r = mp_compose(replay(d->then), replay(d->first));
      break;
    case DerivationNode::Kind::Generalize:
      r = generalize(replay(d->first));
      break;
  }
  memo_.emplace(d.get(), r);
  return r;
}

MultiPoly replay(const Derivation& d, std::span<const MultiPoly> body) { return Replayer(body).replay(d); }

// ---------------------------------------------------------------------------
// Element-level operations

std::vector<std::size_t> sd_set(const MultiPoly& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= p.arity(); ++i) {
    const Entry& e = p.entry(i);
    if (!e.is_super() && e.poly().mentions(i)) out.push_back(i);
  }
  return out;
}

bool is_idempotent(const MultiPoly& p) { return mp_compose(p, p) == p; }

bool is_erase_idempotent(const MultiPoly& p) {
  const MultiPoly e = erase_k(p);
  return erase_k(mp_compose(e, e)) == e;
}

namespace {

bool in_set(const std::vector<std::size_t>& s, std::size_t i) { return std::binary_search(s.begin(), s.end(), i); }

bool self_dependent_monomial(const Monomial& m, const std::vector<std::size_t>& sd) {
  const std::size_t top = m.max_var();
  for (std::size_t v = 1; v <= top; ++v)
    if (m.mentions(v) && !in_set(sd, v)) return false;
  return true;
}

Decomposition decompose_with(const MultiPoly& p, std::size_t i, const std::vector<std::size_t>& sd) {
  if (!in_set(sd, i)) throw std::invalid_argument("decompose_entry: x" + std::to_string(i) + " is not self-dependent");
  const Poly& entry = p.entry(i).poly();
  const Monomial base = Monomial::var(i);
  const Sat* c = entry.find(base);
  if (c == nullptr || *c != Sat::One)
    throw std::invalid_argument("decompose_entry: self-dependent entry missing bare x" + std::to_string(i));
  std::vector<Term<Sat>> prime, dprime, tprime;
  for (const auto& t : entry.terms()) {
    if (t.mono == base) continue;
    if (!self_dependent_monomial(t.mono, sd))
      tprime.push_back(t);
    else if (t.mono.tau_exp() > 0)
      prime.push_back({t.mono.without_one_tau(), t.coeff});
    else
      dprime.push_back(t);
  }
  return {i, Poly(std::move(prime)), Poly(std::move(dprime)), Poly(std::move(tprime))};
}

MultiPoly generalize_unchecked(const MultiPoly& p) {
  const auto sd = sd_set(p);
  std::vector<Entry> out = p.entries();
  for (std::size_t i : sd) {
    const Decomposition d = decompose_with(p, i, sd);
    out[i - 1] = Entry(Poly::var(i) + d.p_prime.times_tau() + d.p_dprime.times_tau() + d.p_tprime);
  }
  return MultiPoly(std::move(out));
}

}  // namespace

Decomposition decompose_entry(const MultiPoly& p, std::size_t i) {
  if (i == 0 || i > p.arity()) throw ArityError("decompose_entry: index out of range");
  return decompose_with(p, i, sd_set(p));
}

MultiPoly generalize(const MultiPoly& p) {
  if (!is_erase_idempotent(p)) throw std::invalid_argument("generalize: argument is not idempotent");
  return generalize_unchecked(p);
}

std::vector<std::size_t> detect_superpoly(const MultiPoly& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= p.arity(); ++i) {
    const Entry& e = p.entry(i);
    if (e.is_super()) continue;
    for (const auto& t : e.poly().terms()) {
      if (!t.mono.mentions(i)) continue;
      if (t.mono.is_linear() && t.coeff == Sat::One) continue;
      out.push_back(i);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closure engine

namespace {

constexpr std::size_t kBatch = 4096;

class Engine {
 public:
  Engine(std::size_t n, const Budget& budget, Execution exec, bool detect)
      : n_(n), budget_(budget), exec_(exec), detect_(detect) {}

  // Returns the element index and whether it is new. Sets flagged_ when
  // detection fires.
  std::pair<std::size_t, bool> add(MultiPoly mp, Derivation d) {
    if (auto it = index_.find(mp); it != index_.end()) return {it->second, false};
    if (mp.degree() > budget_.max_degree) fail("degree budget exceeded (" + std::to_string(mp.degree()) + ")");
    if (elements_.size() >= budget_.max_set_size) fail("set-size budget exceeded");
    if (detect_)
      for (std::size_t v : detect_superpoly(mp)) flagged_.insert(v);
    const std::size_t idx = elements_.size();
    index_.emplace(mp, idx);
    elements_.push_back({std::move(mp), std::move(d), 0, false});
    ++created_;
    return {idx, true};
  }

  void add_generator(std::size_t idx) {
    if (std::find(generators_.begin(), generators_.end(), idx) == generators_.end()) generators_.push_back(idx);
  }

  // Closes under right multiplication by generators. Returns false if
  // detection fired.
  bool close() {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    while (true) {
      pairs.clear();
      const std::size_t count = elements_.size();
      for (std::size_t e = 0; e < count; ++e) {
        Slot& s = elements_[e];
        for (std::size_t g = s.gens_done; g < generators_.size(); ++g) pairs.emplace_back(e, generators_[g]);
        s.gens_done = generators_.size();
      }
      if (pairs.empty()) return true;
      for (std::size_t start = 0; start < pairs.size(); start += kBatch) {
        const std::size_t end = std::min(pairs.size(), start + kBatch);
        std::vector<std::optional<MultiPoly>> results(end - start);
        compose_batch(pairs, start, end, results);
        for (std::size_t k = start; k < end; ++k) {
          auto& r = results[k - start];
          if (!r) fail("degree budget exceeded (exponent overflow)");
          const auto [e, g] = pairs[k];
          add(std::move(*r), DerivationNode::make_compose(elements_[e].derivation, elements_[g].derivation));
          if (!flagged_.empty()) return false;
        }
      }
    }
  }

  // Generalizes every idempotent not yet examined. Returns the number of
  // new elements; detection firing shows in flagged().
  std::size_t generalize_round() {
    std::size_t fresh = 0;
    const std::size_t count = elements_.size();
    std::vector<char> idem(count, 0);
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < count; ++i)
      if (!elements_[i].idem_checked) todo.push_back(i);
    const bool par = exec_ == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 8) if (par)
    for (std::size_t k = 0; k < todo.size(); ++k) {
      try {
        idem[todo[k]] = is_idempotent(elements_[todo[k]].mp) ? 1 : 0;
      } catch (const OverflowError&) {
        idem[todo[k]] = 2;
      }
    }
    for (std::size_t i : todo) {
      elements_[i].idem_checked = true;
      if (idem[i] == 2) fail("degree budget exceeded (exponent overflow)");
      if (idem[i] == 0) continue;
      MultiPoly g = generalize_unchecked(elements_[i].mp);
      if (g != elements_[i].mp) ++generalizations_;
      auto [idx, inserted] = add(std::move(g), DerivationNode::make_generalize(elements_[i].derivation));
      if (inserted) {
        add_generator(idx);
        ++fresh;
      }
      if (!flagged_.empty()) break;
    }
    return fresh;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw SdlBudgetExceeded(what, elements_.size(), rounds, restarts);
  }

  std::vector<SdlElement> elements() const {
    std::vector<SdlElement> out;
    out.reserve(elements_.size());
    for (const auto& s : elements_) out.push_back({s.mp, s.derivation});
    return out;
  }

  const std::set<std::size_t>& flagged() const { return flagged_; }
  std::size_t created() const { return created_; }
  std::size_t generalizations() const { return generalizations_; }

  std::size_t rounds = 0;
  std::size_t restarts = 0;

 private:
  struct Slot {
    MultiPoly mp;
    Derivation derivation;
    std::size_t gens_done;
    bool idem_checked;
  };

  void compose_batch(const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t start,
                     std::size_t end, std::vector<std::optional<MultiPoly>>& out) const {
    const bool par = exec_ == Execution::Parallel;
    const auto count = static_cast<std::ptrdiff_t>(end - start);
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const auto [e, g] = pairs[start + static_cast<std::size_t>(k)];
      try {
        out[static_cast<std::size_t>(k)] = mp_compose(elements_[g].mp, elements_[e].mp);
      } catch (const OverflowError&) {
        out[static_cast<std::size_t>(k)].reset();
      }
    }
  }

  std::size_t n_;
  Budget budget_;
  Execution exec_;
  bool detect_;
  std::vector<Slot> elements_;
  std::unordered_map<MultiPoly, std::size_t, MultiPolyHash> index_;
  std::vector<std::size_t> generators_;
  std::set<std::size_t> flagged_;
  std::size_t created_ = 0;
  std::size_t generalizations_ = 0;
};

std::size_t common_arity(std::span<const MultiPoly> t, std::size_t n) {
  for (const auto& m : t) {
    if (n == 0) n = m.arity();
    if (m.arity() != n) throw ArityError("SDL members differ in arity");
  }
  return n;
}

}  // namespace

std::vector<SdlElement> closure(std::span<const MultiPoly> t, const Budget& budget, Execution exec) {
  const std::size_t n = common_arity(t, 0);
  Engine engine(n, budget, exec, false);
  engine.add(MultiPoly::identity(n), DerivationNode::identity());
  for (std::size_t k = 0; k < t.size(); ++k) engine.add_generator(engine.add(t[k], DerivationNode::make_input(k)).first);
  engine.close();
  return engine.elements();
}

SdlSolution solve_sdl(const SdlProblem& prob, Execution exec) {
  const std::size_t n = common_arity(prob.body, prob.n);
  if (n == 0) throw ArityError("solve_sdl: arity is zero");
  for (const auto& m : prob.body)
    if (m.has_tau()) throw std::invalid_argument("solve_sdl: body member mentions tau");

  std::set<std::size_t> flags;
  SdlStats stats;
  for (std::size_t attempt = 0;; ++attempt) {
    std::vector<MultiPoly> body = prob.body;
    for (auto& m : body)
      for (std::size_t v : flags) m.entry(v) = Entry::superpoly();

    Engine engine(n, prob.budget, exec, true);
    engine.restarts = attempt;
    engine.add(MultiPoly::identity(n), DerivationNode::identity());
    for (std::size_t k = 0; k < body.size(); ++k)
      engine.add_generator(engine.add(body[k], DerivationNode::make_input(k)).first);

    bool restart = !engine.flagged().empty();
    while (!restart) {
      if (engine.rounds >= prob.budget.max_rounds) engine.fail("round budget exceeded");
      ++engine.rounds;
      if (!engine.close()) {
        restart = true;
        break;
      }
      const std::size_t fresh = engine.generalize_round();
      if (!engine.flagged().empty()) {
        restart = true;
        break;
      }
      if (fresh == 0) break;
    }
    stats.elements += engine.created();
    if (restart) {
      const std::size_t before = flags.size();
      flags.insert(engine.flagged().begin(), engine.flagged().end());
      if (flags.size() == before) throw std::logic_error("solve_sdl: detection fired without new flags");
      ++stats.restarts;
      continue;
    }

    SdlSolution sol;
    sol.body = std::move(body);
    sol.bounds = engine.elements();
    sol.flagged.assign(flags.begin(), flags.end());
    std::set<std::size_t> super;
    for (const auto& e : sol.bounds)
      for (std::size_t i = 1; i <= n; ++i)
        if (e.mp.entry(i).is_super()) super.insert(i);
    sol.superpoly_vars.assign(super.begin(), super.end());
    stats.rounds = engine.rounds;
    stats.generalizations = engine.generalizations();
    sol.stats = stats;
    return sol;
  }
}

}  // namespace tightbound
