#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "tightbound/sdl.hpp"

using namespace tightbound;
using namespace tbtest;

namespace {

std::set<MultiPoly> mps_of(const std::vector<SdlElement>& v) {
  std::set<MultiPoly> out;
  for (const auto& e : v) out.insert(e.mp);
  return out;
}

std::set<MultiPoly> erased_reduced(const std::vector<SdlElement>& v) {
  std::set<MultiPoly> out;
  for (const auto& e : v) {
    std::vector<Entry> es;
    const MultiPoly er = erase_k(e.mp);
    for (const auto& x : er.entries()) es.push_back(x.is_super() ? x : Entry(reduce_poly(x.poly())));
    out.insert(MultiPoly(std::move(es)));
  }
  return out;
}

SdlSolution solve(std::vector<MultiPoly> body, Execution exec = Execution::Parallel) {
  SdlProblem prob;
  prob.n = body.front().arity();
  prob.body = std::move(body);
  return solve_sdl(prob, exec);
}

}  // namespace

TEST(SelfDependence, Examples) {
  EXPECT_EQ(sd_set(M("<x1+tau*x2+tau*x3+x3*x4, x3, x3, x4>")), (std::vector<std::size_t>{1, 3, 4}));
  EXPECT_EQ(sd_set(MultiPoly::identity(3)), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(sd_set(M("<x1+x2, x1>")), (std::vector<std::size_t>{1}));
  EXPECT_EQ(sd_set(M("<SUPERPOLY, x2>")), (std::vector<std::size_t>{2}));
}

TEST(Idempotence, Examples) {
  EXPECT_TRUE(is_erase_idempotent(M("<x1+x2, x2>")));
  EXPECT_TRUE(is_erase_idempotent(M("<x1, x1+x2>")));
  EXPECT_FALSE(is_erase_idempotent(M("<x1*x2, x2>")));
  EXPECT_FALSE(is_erase_idempotent(M("<x1+x2, x1>")));
  // Saturated squares pick up w, so only the saturated powers are idempotent.
  EXPECT_FALSE(is_idempotent(M("<x1+x2, x2>")));
  EXPECT_TRUE(is_idempotent(M("<x1+w*x2, x2>")));
}

TEST(Idempotence, SaturatedSquareAndCube) {
  EXPECT_FALSE(is_idempotent(M("<x1+w*x2+x3, x2+w*x3, x3, x3>")));
  EXPECT_TRUE(is_idempotent(M("<x1+w*x2+w*x3, x2+w*x3, x3, x3>")));
}

TEST(Decompose, SplitsEntryOne) {
  const MultiPoly p = M("<x1+tau*x2+tau*x3+x3*x4, x3, x3, x4>");
  const Decomposition d = decompose_entry(p, 1);
  EXPECT_EQ(d.p_prime, P("x3"));
  EXPECT_EQ(d.p_dprime, P("x3*x4"));
  EXPECT_EQ(d.p_tprime, P("tau*x2"));
  const Decomposition tau2 = decompose_entry(M("<x1+tau^2*x3, x2, x3, x4>"), 1);
  EXPECT_EQ(tau2.p_prime, P("tau*x3"));
}

TEST(Decompose, IdentityIsEmptyAndErrors) {
  const Decomposition d = decompose_entry(MultiPoly::identity(2), 1);
  EXPECT_TRUE(d.p_prime.is_zero());
  EXPECT_TRUE(d.p_dprime.is_zero());
  EXPECT_TRUE(d.p_tprime.is_zero());
  EXPECT_THROW(decompose_entry(M("<x1*x2, x2>"), 1), std::invalid_argument);
  EXPECT_THROW(decompose_entry(M("<x2, x2>"), 1), std::invalid_argument);
}

TEST(Decompose, Reassembles) {
  Rng rng(31);
  int checked = 0;
  for (int k = 0; k < 2000 && checked < 200; ++k) {
    MultiPoly p = random_mp(rng, 3, 2, 3, true);
    p.entry(1) = Entry(P("x1") + p.entry(1).poly());
    if (p.entry(1).poly().find(Monomial::var(1)) == nullptr || *p.entry(1).poly().find(Monomial::var(1)) != Sat::One) continue;
    const auto sd = sd_set(p);
    if (std::find(sd.begin(), sd.end(), 1u) == sd.end()) continue;
    const Decomposition d = decompose_entry(p, 1);
    EXPECT_EQ(P("x1") + d.p_prime.times_tau() + d.p_dprime + d.p_tprime, p.entry(1).poly());
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Generalize, Examples) {
  EXPECT_EQ(generalize(M("<x1+x3, x2+x3+x4, x3, x3>")), M("<x1+tau*x3, x2+tau*x3+x4, x3, x3>"));
  const MultiPoly p = M("<x1+tau*x2+tau*x3+tau*x3*x4, x3, x3, x4>");
  EXPECT_EQ(generalize(p), p);
  EXPECT_EQ(generalize(MultiPoly::identity(3)), MultiPoly::identity(3));
  EXPECT_THROW(generalize(M("<x1+x2, x1>")), std::invalid_argument);
}

TEST(Superpoly, Detection) {
  EXPECT_EQ(detect_superpoly(M("<w*x1>")), std::vector<std::size_t>{1});
  EXPECT_EQ(detect_superpoly(M("<x1^2>")), std::vector<std::size_t>{1});
  EXPECT_TRUE(detect_superpoly(MultiPoly::identity(3)).empty());
  EXPECT_TRUE(detect_superpoly(M("<x1+tau*x3, x2+tau*x3+x4, x3, x3>")).empty());
  EXPECT_EQ(detect_superpoly(M("<x1+tau*x1, x2*x1, x2*x3>")), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(detect_superpoly(M("<x1+x2*x3, x2+x1, x3>")), std::vector<std::size_t>{});
}

TEST(Closure, Examples) {
  const std::vector<MultiPoly> mult{M("<x2^2, x3, x3>")};
  EXPECT_EQ(mps_of(closure(mult)), (std::set<MultiPoly>{MultiPoly::identity(3), M("<x2^2, x3, x3>"), M("<x3^2, x3, x3>")}));
  EXPECT_EQ(closure(std::vector<MultiPoly>{}).size(), 1u);
  const std::vector<MultiPoly> lin{M("<x1+x2, x2>")};
  EXPECT_EQ(mps_of(closure(lin)), (std::set<MultiPoly>{MultiPoly::identity(2), M("<x1+x2, x2>"), M("<x1+w*x2, x2>")}));
}

TEST(Closure, BudgetExceeded) {
  Budget b;
  b.max_set_size = 3;
  const std::vector<MultiPoly> body{M("<x1+x2, x2+x3, x3, x3>")};
  EXPECT_THROW(closure(body, b), BudgetExceeded);
}

TEST(Solve, TriangularAccumulator) {
  const SdlSolution s = solve({M("<x1+x2, x2+x3, x3, x3>")});
  EXPECT_TRUE(s.superpoly_vars.empty());
  const std::set<MultiPoly> five{MultiPoly::identity(4), M("<x1+x2, x2+x3, x3, x3>"), M("<x1+x2+x3, x2+x3, x3, x3>"),
                                 M("<x1+tau*x2+tau*x3, x2+tau*x3, x3, x3>"),
                                 M("<x1+tau*x2+tau^2*x3, x2+tau*x3, x3, x3>")};
  EXPECT_EQ(erased_reduced(s.bounds), five);
  for (const auto& e : s.bounds) {
    const MultiPoly er = erase_k(e.mp);
    bool covered = false;
    for (const auto& f : five) covered = covered || mp_dominates(f, er);
    EXPECT_TRUE(covered) << to_string(e.mp);
  }
}

TEST(Solve, SquareSumLoop) {
  const SdlSolution s = solve({M("<x1, x1+x2, x1+x2, x4>")});
  EXPECT_TRUE(s.superpoly_vars.empty());
  const auto er = erased_reduced(s.bounds);
  EXPECT_TRUE(er.count(MultiPoly::identity(4)));
  EXPECT_TRUE(er.count(M("<x1, x2+tau*x1, x2+tau*x1, x4>")));
}

TEST(Solve, DoublingFlagsAndRestarts) {
  const SdlSolution s = solve({M("<w*x1, x1>")});
  EXPECT_EQ(s.superpoly_vars, (std::vector<std::size_t>{1, 2}));
  EXPECT_GE(s.stats.restarts, 1u);
  for (const auto& e : s.bounds) {
    if (e.mp.is_identity()) continue;
    EXPECT_TRUE(e.mp.entry(1).is_super());
  }
}

TEST(Solve, MultiplicativeFragmentNeverGeneralizes) {
  const SdlSolution s = solve({M("<x2^2, x3, x3>")});
  EXPECT_EQ(s.stats.generalizations, 0u);
  EXPECT_EQ(mps_of(s.bounds), mps_of(closure(std::vector<MultiPoly>{M("<x2^2, x3, x3>")})));
}

TEST(Solve, BudgetExceededCarriesDiagnostics) {
  SdlProblem prob;
  prob.body = {M("<x1+x2, x2+x3, x3+x4, x4>")};
  prob.n = 4;
  prob.budget.max_set_size = 5;
  try {
    solve_sdl(prob);
    FAIL();
  } catch (const SdlBudgetExceeded& e) {
    EXPECT_GT(e.elements, 0u);
  }
}

TEST(Invariants, ReplayClosednessAndPowers) {
  Rng rng(41);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = uniform(rng, 2, 3);
    std::vector<MultiPoly> body;
    for (std::size_t j = uniform(rng, 1, 2); j-- > 0;) body.push_back(random_sdl_mp(rng, n, 2));
    SdlProblem prob{body, n, {}};
    SdlSolution s;
    try {
      s = solve_sdl(prob);
    } catch (const BudgetExceeded&) {
      continue;
    }
    const std::set<MultiPoly> all = mps_of(s.bounds);
    Replayer r(s.body);
    for (const auto& e : s.bounds) ASSERT_EQ(r.replay(e.derivation), e.mp);
    for (const auto& a : s.bounds)
      for (const auto& b : s.bounds) ASSERT_TRUE(all.count(mp_compose(a.mp, b.mp)));
    for (const auto& a : s.bounds) {
      if (is_idempotent(a.mp)) ASSERT_TRUE(all.count(generalize(a.mp)));
      MultiPoly pw = a.mp;
      bool found = is_idempotent(pw);
      for (std::size_t j = 1; j <= all.size() && !found; ++j) {
        pw = mp_compose(pw, a.mp);
        found = is_idempotent(pw);
      }
      ASSERT_TRUE(found) << to_string(a.mp);
    }
  }
}

TEST(Invariants, ConditionalTauClosure) {
  Rng rng(42);
  int checked = 0;
  for (int k = 0; k < 200 && checked < 200; ++k) {
    const std::size_t n = uniform(rng, 2, 3);
    std::vector<MultiPoly> body{random_sdl_mp(rng, n, 2), random_sdl_mp(rng, n, 2)};
    SdlSolution s;
    try {
      s = solve_sdl(SdlProblem{body, n, {}});
    } catch (const BudgetExceeded&) {
      continue;
    }
    for (const auto& e : s.bounds) {
      if (!is_idempotent(e.mp) || e.mp.has_super()) continue;
      const MultiPoly g = generalize(e.mp);
      if (!is_idempotent(g)) continue;
      ASSERT_EQ(generalize(g), g);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Invariants, ManyCoefficientsAreAQuotient) {
  // Replacing the concrete coefficient 2 by 3 or 5 before abstraction does
  // not change the erased result.
  const auto body_with = [](std::uint64_t c) {
    NatMultiPoly p = N("<x1+x2, 2*x2+x3, x3, x3>");
    p.entry(2) = parse_nat_poly(std::to_string(c) + "*x2 + x3");
    return std::vector<MultiPoly>{alpha_k(p)};
  };
  auto erased = [](const SdlSolution& s) {
    std::set<MultiPoly> out;
    for (const auto& e : s.bounds) out.insert(erase_k(e.mp));
    return out;
  };
  const auto base = erased(solve(body_with(2)));
  EXPECT_EQ(erased(solve(body_with(3))), base);
  EXPECT_EQ(erased(solve(body_with(5))), base);
}

TEST(Determinism, SerialAndParallelAgree) {
  Rng rng(43);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 3;
    std::vector<MultiPoly> body{random_sdl_mp(rng, n, 2), random_sdl_mp(rng, n, 2)};
    SdlProblem prob{body, n, {}};
    SdlSolution a, b;
    bool ea = false, eb = false;
    try {
      a = solve_sdl(prob, Execution::Serial);
    } catch (const BudgetExceeded&) {
      ea = true;
    }
    try {
      b = solve_sdl(prob, Execution::Parallel);
    } catch (const BudgetExceeded&) {
      eb = true;
    }
    ASSERT_EQ(ea, eb);
    if (ea) continue;
    ASSERT_EQ(a.bounds.size(), b.bounds.size());
    for (std::size_t i = 0; i < a.bounds.size(); ++i) ASSERT_EQ(a.bounds[i].mp, b.bounds[i].mp);
    ASSERT_EQ(a.flagged, b.flagged);
  }
}
