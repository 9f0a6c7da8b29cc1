#pragma once

// Monomials, polynomials and multi-polynomials over x1..xn and tau.
//
// Two coefficient domains share one implementation: the saturated domain
// {One, Many} used by the analysis, and exact natural numbers used for
// symbolic evaluation of straight-line code and for witness replay.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tightbound {

/// Largest supported variable index.
inline constexpr std::size_t kMaxVars = 31;

class ArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A configured size, degree or iteration limit was hit.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Coefficients

enum class Sat : std::uint8_t { One = 1, Many = 2 };

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Sat> {
  static constexpr Sat one() { return Sat::One; }
  static constexpr Sat add(Sat, Sat) { return Sat::Many; }
  static constexpr Sat mul(Sat a, Sat b) {
    return (a == Sat::One && b == Sat::One) ? Sat::One : Sat::Many;
  }
};

template <>
struct CoeffTraits<std::uint64_t> {
  static constexpr std::uint64_t one() { return 1; }
  static std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("coefficient overflow");
    return r;
  }
  static std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("coefficient overflow");
    return r;
  }
};

// ---------------------------------------------------------------------------
// Monomial

/// A product x1^e1 * ... * xn^en * tau^k. Variables are 1-based.
class Monomial {
 public:
  Monomial() = default;

  static Monomial var(std::size_t i, unsigned exponent = 1);
  static Monomial tau(unsigned exponent = 1);

  unsigned exp(std::size_t i) const { return e_[i - 1]; }
  unsigned tau_exp() const { return e_[kMaxVars]; }
  void set_exp(std::size_t i, unsigned e);
  void set_tau_exp(unsigned e);

  /// Total degree including tau.
  unsigned degree() const;
  unsigned x_degree() const { return degree() - tau_exp(); }
  bool is_unit() const { return degree() == 0; }
  /// Exactly x_i for some i: degree one and tau-free.
  bool is_linear() const { return tau_exp() == 0 && degree() == 1; }
  /// Highest variable index with a positive exponent, 0 if none.
  std::size_t max_var() const;
  bool mentions(std::size_t i) const { return e_[i - 1] != 0; }

  Monomial operator*(const Monomial& o) const;
  /// Strips one factor of tau; requires tau_exp() > 0.
  Monomial without_one_tau() const;
  Monomial with_tau_times(unsigned k) const;

  std::size_t hash() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  /// Canonical order: ascending total degree, then descending lexicographic
  /// on (x1, ..., xn, tau).
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

  std::string to_string() const;

 private:
  std::array<std::uint8_t, kMaxVars + 1> e_{};
};

/// True iff every exponent of `b` (tau included) is at most that of `a`,
/// i.e. b <= a pointwise whenever every variable and tau are >= 1.
bool mono_dominates(const Monomial& a, const Monomial& b);

// ---------------------------------------------------------------------------
// Polynomial

template <class C>
struct Term {
  Monomial mono;
  C coeff;
  friend bool operator==(const Term&, const Term&) = default;
};

template <class C>
class BasicPoly {
 public:
  using Coeff = C;
  using Traits = CoeffTraits<C>;

  BasicPoly() = default;
  /// Normalizes: sorts canonically and merges repeated monomials with +.
  explicit BasicPoly(std::vector<Term<C>> terms);

  static BasicPoly var(std::size_t i) { return BasicPoly(Monomial::var(i)); }
  explicit BasicPoly(const Monomial& m, C c = Traits::one()) : terms_{{m, c}} {}

  const std::vector<Term<C>>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  unsigned degree() const;
  unsigned tau_degree() const;
  bool has_tau() const { return tau_degree() > 0; }
  bool mentions(std::size_t i) const;
  std::size_t max_var() const;
  /// Coefficient of m, or nullptr when absent.
  const C* find(const Monomial& m) const;

  friend BasicPoly operator+(const BasicPoly& a, const BasicPoly& b) {
    std::vector<Term<C>> t;
    t.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a.terms_[i].mono < b.terms_[j].mono)) {
        t.push_back(a.terms_[i++]);
      } else if (i == a.size() || b.terms_[j].mono < a.terms_[i].mono) {
        t.push_back(b.terms_[j++]);
      } else {
        t.push_back({a.terms_[i].mono, Traits::add(a.terms_[i].coeff, b.terms_[j].coeff)});
        ++i;
        ++j;
      }
    }
    BasicPoly r;
    r.terms_ = std::move(t);
    return r;
  }

  friend BasicPoly operator*(const BasicPoly& a, const BasicPoly& b) {
    std::vector<Term<C>> t;
    t.reserve(a.size() * b.size());
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) t.push_back({x.mono * y.mono, Traits::mul(x.coeff, y.coeff)});
    return BasicPoly(std::move(t));
  }

  BasicPoly pow(unsigned k) const;

  /// Substitutes subs[i-1] for every x_i; tau passes through unchanged.
  /// Variables beyond subs.size() are left alone.
  BasicPoly compose(std::span<const BasicPoly> subs) const;

  /// Replaces tau^k by e^k in every monomial.
  BasicPoly subst_tau(const BasicPoly& e) const;

  /// Multiplies every monomial by tau.
  BasicPoly times_tau() const;

  std::size_t hash() const;
  friend bool operator==(const BasicPoly&, const BasicPoly&) = default;
  /// Polynomials order by term count first, then by term sequence.
  friend std::strong_ordering operator<=>(const BasicPoly& a, const BasicPoly& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (auto c = a.terms_[i].mono <=> b.terms_[i].mono; c != 0) return c;
      if (a.terms_[i].coeff != b.terms_[i].coeff)
        return a.terms_[i].coeff < b.terms_[i].coeff ? std::strong_ordering::less
                                                     : std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
  }

 private:
  std::vector<Term<C>> terms_;
};

using Poly = BasicPoly<Sat>;
using NatPoly = BasicPoly<std::uint64_t>;

// ---------------------------------------------------------------------------
// Multi-polynomials

/// One component of a multi-polynomial: a polynomial bound, or the
/// absorbing super-polynomial marker.
class Entry {
 public:
  Entry() = default;
  Entry(Poly p) : poly_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  static Entry superpoly() {
    Entry e;
    e.super_ = true;
    return e;
  }
  bool is_super() const { return super_; }
  const Poly& poly() const { return poly_; }
  Poly& poly() { return poly_; }

  friend bool operator==(const Entry&, const Entry&) = default;
  friend std::strong_ordering operator<=>(const Entry& a, const Entry& b) {
    if (a.super_ != b.super_) return a.super_ ? std::strong_ordering::greater : std::strong_ordering::less;
    return a.poly_ <=> b.poly_;
  }

 private:
  bool super_ = false;
  Poly poly_;
};

/// An n-tuple of entries over the saturated coefficient domain.
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(std::vector<Entry> entries);

  static MultiPoly identity(std::size_t n);

  std::size_t arity() const { return entries_.size(); }
  /// 1-based access.
  const Entry& entry(std::size_t i) const { return entries_[i - 1]; }
  Entry& entry(std::size_t i) { return entries_[i - 1]; }
  const std::vector<Entry>& entries() const { return entries_; }

  bool has_tau() const;
  bool has_super() const;
  unsigned degree() const;
  bool is_identity() const;

  std::size_t hash() const;
  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;
  friend std::strong_ordering operator<=>(const MultiPoly& a, const MultiPoly& b) {
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(),
                                                  b.entries_.begin(), b.entries_.end());
  }

 private:
  std::vector<Entry> entries_;
};

/// An n-tuple of polynomials with exact natural coefficients.
class NatMultiPoly {
 public:
  NatMultiPoly() = default;
  explicit NatMultiPoly(std::vector<NatPoly> entries) : entries_(std::move(entries)) {}
  static NatMultiPoly identity(std::size_t n);

  std::size_t arity() const { return entries_.size(); }
  const NatPoly& entry(std::size_t i) const { return entries_[i - 1]; }
  NatPoly& entry(std::size_t i) { return entries_[i - 1]; }
  const std::vector<NatPoly>& entries() const { return entries_; }

  friend bool operator==(const NatMultiPoly&, const NatMultiPoly&) = default;
  friend auto operator<=>(const NatMultiPoly& a, const NatMultiPoly& b) {
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(),
                                                  b.entries_.begin(), b.entries_.end());
  }

 private:
  std::vector<NatPoly> entries_;
};

struct MultiPolyHash {
  std::size_t operator()(const MultiPoly& p) const { return p.hash(); }
};

// ---------------------------------------------------------------------------
// Operations

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);

/// q after p: substitutes p[i] for x_i in every entry of q. An entry of q
/// that mentions some x_j with p[j] super-polynomial becomes SuperPoly.
MultiPoly mp_compose(const MultiPoly& q, const MultiPoly& p);
NatMultiPoly mp_compose(const NatMultiPoly& q, const NatMultiPoly& p);

/// Replaces tau by the tau-free polynomial e throughout.
MultiPoly subst_tau(const MultiPoly& p, const Poly& e);

/// Coefficient 1 maps to One, anything larger to Many.
Poly alpha_k(const NatPoly& p);
MultiPoly alpha_k(const NatMultiPoly& p);

/// Forgets the One/Many distinction (all coefficients become One).
Poly erase_k(const Poly& p);
MultiPoly erase_k(const MultiPoly& p);

/// Canonical concretization: every coefficient read as 1.
template <class V>
V gamma_eval(const Poly& p, std::span<const V> x, V t);
/// Evaluates every entry; throws std::domain_error on a SuperPoly entry.
std::vector<std::uint64_t> gamma_eval(const MultiPoly& p, std::span<const std::uint64_t> s,
                                      std::uint64_t t);

template <class V>
V nat_eval(const NatPoly& p, std::span<const V> x, V t);

/// Linear monomials (bare x_i, tau-free) versus all the rest.
std::pair<Poly, Poly> split_linear(const Poly& p);

/// Removes every monomial dominated by a different monomial of p.
Poly reduce_poly(const Poly& p);

/// True if every monomial of `b` is dominated by some monomial of `a`.
bool poly_dominates(const Poly& a, const Poly& b);
/// Entry-wise domination; SuperPoly dominates everything.
bool mp_dominates(const MultiPoly& a, const MultiPoly& b);

/// reduce_poly on every entry, deduplication, then deletion of members
/// dominated by another member. The identity is never deleted. The result
/// is sorted canonically.
std::vector<MultiPoly> reduce_mp_set(std::span<const MultiPoly> set);

/// Monomial-wise maximum of coefficients.
NatPoly join_nat(const NatPoly& p, const NatPoly& q);

// ---------------------------------------------------------------------------
// Text form: `x1^2*x3*tau + w*x2`, `<e1, e2>` with SUPERPOLY entries.

std::string to_string(const Poly& p);
std::string to_string(const NatPoly& p);
std::string to_string(const Entry& e);
std::string to_string(const MultiPoly& p);
std::string to_string(const NatMultiPoly& p);

class PolyParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integer coefficients >= 2 and `w` both read as Many.
Poly parse_poly(std::string_view text);
NatPoly parse_nat_poly(std::string_view text);
/// `<e1, ..., en>`; arity is the number of entries.
MultiPoly parse_multipoly(std::string_view text);
NatMultiPoly parse_nat_multipoly(std::string_view text);

// ---------------------------------------------------------------------------
// Template definitions

template <class C>
BasicPoly<C>::BasicPoly(std::vector<Term<C>> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term<C>& a, const Term<C>& b) { return a.mono < b.mono; });
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().mono == t.mono)
      terms_.back().coeff = Traits::add(terms_.back().coeff, t.coeff);
    else
      terms_.push_back(t);
  }
}

template <class C>
unsigned BasicPoly<C>::degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.degree());
  return d;
}

template <class C>
unsigned BasicPoly<C>::tau_degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.mono.tau_exp());
  return d;
}

template <class C>
bool BasicPoly<C>::mentions(std::size_t i) const {
  for (const auto& t : terms_)
    if (t.mono.mentions(i)) return true;
  return false;
}

template <class C>
std::size_t BasicPoly<C>::max_var() const {
  std::size_t m = 0;
  for (const auto& t : terms_) m = std::max(m, t.mono.max_var());
  return m;
}

template <class C>
const C* BasicPoly<C>::find(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term<C>& t, const Monomial& x) { return t.mono < x; });
  if (it != terms_.end() && it->mono == m) return &it->coeff;
  return nullptr;
}

template <class C>
BasicPoly<C> BasicPoly<C>::pow(unsigned k) const {
  BasicPoly r(Monomial{});
  for (unsigned i = 0; i < k; ++i) r = r * *this;
  return r;
}

namespace detail {

/// Substitutes polynomials for variables, caching the powers it needs so a
/// whole tuple of entries can share them.
template <class C>
class Substituter {
 public:
  explicit Substituter(std::span<const BasicPoly<C>> subs) : subs_(subs), powers_(subs.size()) {}

  BasicPoly<C> apply(const BasicPoly<C>& q) {
    std::vector<Term<C>> out;
    for (const auto& t : q.terms()) {
      Monomial keep;
      keep.set_tau_exp(t.mono.tau_exp());
      BasicPoly<C> acc(keep, t.coeff);
      const std::size_t top = t.mono.max_var();
      for (std::size_t v = 1; v <= top; ++v) {
        const unsigned e = t.mono.exp(v);
        if (e == 0) continue;
        if (v > subs_.size())
          acc = acc * BasicPoly<C>(Monomial::var(v, e));
        else
          acc = acc * power(v, e);
      }
      out.insert(out.end(), acc.terms().begin(), acc.terms().end());
    }
    return BasicPoly<C>(std::move(out));
  }

 private:
  const BasicPoly<C>& power(std::size_t var, unsigned k) {
    auto& pw = powers_[var - 1];
    if (pw.empty()) pw.push_back(BasicPoly<C>(Monomial{}));
    while (pw.size() <= k) pw.push_back(pw.back() * subs_[var - 1]);
    return pw[k];
  }

  std::span<const BasicPoly<C>> subs_;
  std::vector<std::vector<BasicPoly<C>>> powers_;
};

}  // namespace detail

template <class C>
BasicPoly<C> BasicPoly<C>::compose(std::span<const BasicPoly> subs) const {
  detail::Substituter<C> sub(subs);
  return sub.apply(*this);
}

template <class C>
BasicPoly<C> BasicPoly<C>::subst_tau(const BasicPoly& e) const {
  std::vector<BasicPoly> powers{BasicPoly(Monomial{})};
  std::vector<Term<C>> out;
  for (const auto& t : terms_) {
    const unsigned k = t.mono.tau_exp();
    while (powers.size() <= k) powers.push_back(powers.back() * e);
    Monomial m = t.mono;
    m.set_tau_exp(0);
    const BasicPoly part = BasicPoly(m, t.coeff) * powers[k];
    out.insert(out.end(), part.terms_.begin(), part.terms_.end());
  }
  return BasicPoly(std::move(out));
}

template <class C>
BasicPoly<C> BasicPoly<C>::times_tau() const {
  BasicPoly r = *this;
  for (auto& t : r.terms_) t.mono = t.mono.with_tau_times(1);
  return r;
}

template <class C>
std::size_t BasicPoly<C>::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& t : terms_) {
    h ^= t.mono.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(t.coeff) * 0xff51afd7ed558ccdull;
  }
  return h;
}

namespace detail {
template <class V>
V monomial_value(const Monomial& m, std::span<const V> x, V t) {
  V r = V(1);
  const std::size_t top = m.max_var();
  for (std::size_t v = 1; v <= top; ++v)
    for (unsigned k = 0; k < m.exp(v); ++k) r = r * x[v - 1];
  for (unsigned k = 0; k < m.tau_exp(); ++k) r = r * t;
  return r;
}
}  // namespace detail

template <class V>
V gamma_eval(const Poly& p, std::span<const V> x, V t) {
  V r = V(0);
  for (const auto& term : p.terms()) r = r + detail::monomial_value<V>(term.mono, x, t);
  return r;
}

template <class V>
V nat_eval(const NatPoly& p, std::span<const V> x, V t) {
  V r = V(0);
  for (const auto& term : p.terms()) r = r + V(term.coeff) * detail::monomial_value<V>(term.mono, x, t);
  return r;
}

}  // namespace tightbound

template <>
struct std::hash<tightbound::MultiPoly> {
  std::size_t operator()(const tightbound::MultiPoly& p) const { return p.hash(); }
};
