#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tightbound/lang.hpp"
#include "tightbound/poly.hpp"

namespace tightbound {
inline void PrintTo(const Poly& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const NatPoly& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const MultiPoly& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const NatMultiPoly& p, std::ostream* os) { *os << to_string(p); }
}  // namespace tightbound

namespace tbtest {

using namespace tightbound;

inline Poly P(const std::string& s) { return parse_poly(s); }
inline MultiPoly M(const std::string& s) { return parse_multipoly(s); }
inline NatMultiPoly N(const std::string& s) { return parse_nat_multipoly(s); }

inline Program prog(const std::string& s) { return parse(s); }

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Monomial random_monomial(Rng& rng, std::size_t n, unsigned max_deg, bool with_tau = false) {
  Monomial m;
  const unsigned deg = static_cast<unsigned>(uniform(rng, 1, max_deg));
  for (unsigned k = 0; k < deg; ++k) {
    if (with_tau && uniform(rng, 0, 3) == 0) {
      m.set_tau_exp(m.tau_exp() + 1);
    } else {
      const std::size_t i = uniform(rng, 1, n);
      m.set_exp(i, m.exp(i) + 1);
    }
  }
  return m;
}

inline NatPoly random_nat_poly(Rng& rng, std::size_t n, unsigned max_deg, std::size_t max_terms,
                               std::uint64_t max_coeff = 3, bool with_tau = false) {
  std::vector<Term<std::uint64_t>> t;
  const std::size_t k = uniform(rng, 1, max_terms);
  for (std::size_t j = 0; j < k; ++j) t.push_back({random_monomial(rng, n, max_deg, with_tau), uniform(rng, 1, max_coeff)});
  return NatPoly(std::move(t));
}

inline Poly random_poly(Rng& rng, std::size_t n, unsigned max_deg, std::size_t max_terms, bool with_tau = false) {
  std::vector<Term<Sat>> t;
  const std::size_t k = uniform(rng, 1, max_terms);
  for (std::size_t j = 0; j < k; ++j)
    t.push_back({random_monomial(rng, n, max_deg, with_tau), uniform(rng, 0, 2) == 0 ? Sat::Many : Sat::One});
  return Poly(std::move(t));
}

inline NatMultiPoly random_nat_mp(Rng& rng, std::size_t n, unsigned max_deg = 2, std::size_t max_terms = 3,
                                  std::uint64_t max_coeff = 3) {
  std::vector<NatPoly> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back(random_nat_poly(rng, n, max_deg, max_terms, max_coeff));
  return NatMultiPoly(std::move(e));
}

inline MultiPoly random_mp(Rng& rng, std::size_t n, unsigned max_deg = 2, std::size_t max_terms = 3,
                           bool with_tau = false) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(random_poly(rng, n, max_deg, max_terms, with_tau));
  return MultiPoly(std::move(e));
}

/// Linear "SDL-like" transition: each entry is x_i with probability 1/2
/// plus a few other variables, products of degree <= max_deg allowed off
/// the diagonal.
inline MultiPoly random_sdl_mp(Rng& rng, std::size_t n, unsigned max_deg) {
  std::vector<Entry> e;
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<Term<Sat>> t;
    if (uniform(rng, 0, 1) == 0) t.push_back({Monomial::var(i), Sat::One});
    const std::size_t extra = uniform(rng, t.empty() ? 1 : 0, 2);
    for (std::size_t k = 0; k < extra; ++k) {
      Monomial m;
      const unsigned deg = static_cast<unsigned>(uniform(rng, 1, max_deg));
      for (unsigned d = 0; d < deg; ++d) {
        std::size_t j = uniform(rng, 1, n);
        if (j == i) j = j % n + 1;
        if (n == 1) break;
        m.set_exp(j, m.exp(j) + 1);
      }
      if (m.degree() > 0) t.push_back({m, Sat::One});
    }
    if (t.empty()) t.push_back({Monomial::var(i), Sat::One});
    e.emplace_back(Poly(std::move(t)));
  }
  return MultiPoly(std::move(e));
}

inline ExprPtr random_expr(Rng& rng, std::size_t n, std::size_t size) {
  if (size <= 1) return Expr::make_var(uniform(rng, 1, n));
  const std::size_t left = uniform(rng, 1, size - 1);
  auto a = random_expr(rng, n, left);
  auto b = random_expr(rng, n, size - left);
  return uniform(rng, 0, 2) == 0 ? Expr::make_mul(a, b) : Expr::make_add(a, b);
}

struct ProgramShape {
  std::size_t n = 4;
  std::size_t max_depth = 2;  // loop nesting
  std::size_t size = 15;      // AST node budget
  bool allow_mul = true;
};

namespace detail {
inline CommandPtr random_command(Rng& rng, const ProgramShape& s, std::size_t depth, std::size_t& budget) {
  const std::size_t pick = uniform(rng, 0, 9);
  if (budget < 4 || pick < 3) {
    budget = budget >= 3 ? budget - 3 : 0;
    const std::size_t target = uniform(rng, 1, s.n);
    ExprPtr e = uniform(rng, 0, 1) ? Expr::make_add(Expr::make_var(uniform(rng, 1, s.n)), Expr::make_var(uniform(rng, 1, s.n)))
                                   : Expr::make_var(uniform(rng, 1, s.n));
    if (s.allow_mul && uniform(rng, 0, 4) == 0)
      e = Expr::make_mul(Expr::make_var(uniform(rng, 1, s.n)), Expr::make_var(uniform(rng, 1, s.n)));
    return Command::make_assign(target, e);
  }
  if (pick < 6) {
    budget -= 1;
    auto a = random_command(rng, s, depth, budget);
    auto b = random_command(rng, s, depth, budget);
    return Command::make_seq(a, b);
  }
  if (pick < 8 || depth >= s.max_depth) {
    budget -= 1;
    auto a = random_command(rng, s, depth, budget);
    auto b = uniform(rng, 0, 3) == 0 ? Command::make_skip() : random_command(rng, s, depth, budget);
    return Command::make_choose(a, b);
  }
  budget -= 2;
  auto bound = Expr::make_var(uniform(rng, 1, s.n));
  auto body = random_command(rng, s, depth + 1, budget);
  return Command::make_loop(bound, body);
}
}  // namespace detail

inline Program random_program(Rng& rng, const ProgramShape& s) {
  std::size_t budget = s.size;
  Program p;
  p.command = detail::random_command(rng, s, 0, budget);
  p.n = s.n;
  return p;
}

}  // namespace tbtest
