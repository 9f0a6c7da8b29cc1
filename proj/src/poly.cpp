#include "tightbound/poly.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <numeric>
#include <sstream>

namespace tightbound {

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::var(std::size_t i, unsigned exponent) {
  Monomial m;
  m.set_exp(i, exponent);
  return m;
}

Monomial Monomial::tau(unsigned exponent) {
  Monomial m;
  m.set_tau_exp(exponent);
  return m;
}

void Monomial::set_exp(std::size_t i, unsigned e) {
  if (i == 0 || i > kMaxVars) throw ArityError("variable index out of range: " + std::to_string(i));
  if (e > 255) throw OverflowError("exponent overflow");
  e_[i - 1] = static_cast<std::uint8_t>(e);
}

void Monomial::set_tau_exp(unsigned e) {
  if (e > 255) throw OverflowError("exponent overflow");
  e_[kMaxVars] = static_cast<std::uint8_t>(e);
}

unsigned Monomial::degree() const {
  return std::accumulate(e_.begin(), e_.end(), 0u);
}

std::size_t Monomial::max_var() const {
  for (std::size_t i = kMaxVars; i > 0; --i)
    if (e_[i - 1] != 0) return i;
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < e_.size(); ++i) {
    const unsigned s = unsigned{e_[i]} + o.e_[i];
    if (s > 255) throw OverflowError("exponent overflow");
    r.e_[i] = static_cast<std::uint8_t>(s);
  }
  return r;
}

Monomial Monomial::without_one_tau() const {
  if (tau_exp() == 0) throw std::logic_error("monomial has no tau factor");
  Monomial r = *this;
  --r.e_[kMaxVars];
  return r;
}

Monomial Monomial::with_tau_times(unsigned k) const {
  Monomial r = *this;
  r.set_tau_exp(tau_exp() + k);
  return r;
}

std::size_t Monomial::hash() const {
  std::uint64_t w[4];
  static_assert(sizeof(w) == sizeof(e_));
  std::memcpy(w, e_.data(), sizeof(w));
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto x : w) {
    h ^= x;
    h *= 0x100000001b3ull;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  const unsigned da = a.degree(), db = b.degree();
  if (da != db) return da <=> db;
  // Descending lexicographic: larger exponent on x1 comes first.
  for (std::size_t i = 0; i < a.e_.size(); ++i)
    if (a.e_[i] != b.e_[i]) return b.e_[i] <=> a.e_[i];
  return std::strong_ordering::equal;
}

std::string Monomial::to_string() const {
  std::string out;
  auto factor = [&](const std::string& name, unsigned e) {
    if (e == 0) return;
    if (!out.empty()) out += '*';
    out += name;
    if (e > 1) out += '^' + std::to_string(e);
  };
  for (std::size_t i = 1; i <= kMaxVars; ++i) factor("x" + std::to_string(i), exp(i));
  factor("tau", tau_exp());
  return out.empty() ? "1" : out;
}

bool mono_dominates(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 1; i <= kMaxVars; ++i)
    if (b.exp(i) > a.exp(i)) return false;
  return b.tau_exp() <= a.tau_exp();
}

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly::MultiPoly(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.size() > kMaxVars) throw ArityError("arity exceeds supported maximum");
}

MultiPoly MultiPoly::identity(std::size_t n) {
  std::vector<Entry> e;
  e.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) e.emplace_back(Poly::var(i));
  return MultiPoly(std::move(e));
}

bool MultiPoly::has_tau() const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const Entry& e) { return !e.is_super() && e.poly().has_tau(); });
}

bool MultiPoly::has_super() const {
  return std::any_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.is_super(); });
}

unsigned MultiPoly::degree() const {
  unsigned d = 0;
  for (const auto& e : entries_)
    if (!e.is_super()) d = std::max(d, e.poly().degree());
  return d;
}

bool MultiPoly::is_identity() const {
  for (std::size_t i = 1; i <= arity(); ++i) {
    const Entry& e = entry(i);
    if (e.is_super() || e.poly() != Poly::var(i)) return false;
  }
  return true;
}

std::size_t MultiPoly::hash() const {
  std::size_t h = entries_.size();
  for (const auto& e : entries_) {
    const std::size_t x = e.is_super() ? 0x5bd1e995u : e.poly().hash();
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

NatMultiPoly NatMultiPoly::identity(std::size_t n) {
  std::vector<NatPoly> e;
  e.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) e.push_back(NatPoly::var(i));
  return NatMultiPoly(std::move(e));
}

// ---------------------------------------------------------------------------
// Operations

Poly poly_add(const Poly& a, const Poly& b) { return a + b; }
Poly poly_mul(const Poly& a, const Poly& b) { return a * b; }

MultiPoly mp_compose(const MultiPoly& q, const MultiPoly& p) {
  if (q.arity() != p.arity()) throw ArityError("mp_compose: arity mismatch");
  const std::size_t n = p.arity();
  std::vector<Poly> subs;
  subs.reserve(n);
  std::vector<bool> super(n);
  for (std::size_t i = 0; i < n; ++i) {
    super[i] = p.entries()[i].is_super();
    subs.push_back(super[i] ? Poly{} : p.entries()[i].poly());
  }
  detail::Substituter<Sat> sub(subs);
  std::vector<Entry> out;
  out.reserve(n);
  for (const auto& e : q.entries()) {
    if (e.is_super()) {
      out.push_back(Entry::superpoly());
      continue;
    }
    bool hits_super = false;
    for (std::size_t j = 0; j < n && !hits_super; ++j) hits_super = super[j] && e.poly().mentions(j + 1);
    out.push_back(hits_super ? Entry::superpoly() : Entry(sub.apply(e.poly())));
  }
  return MultiPoly(std::move(out));
}

NatMultiPoly mp_compose(const NatMultiPoly& q, const NatMultiPoly& p) {
  if (q.arity() != p.arity()) throw ArityError("mp_compose: arity mismatch");
  detail::Substituter<std::uint64_t> sub(p.entries());
  std::vector<NatPoly> out;
  out.reserve(q.arity());
  for (const auto& e : q.entries()) out.push_back(sub.apply(e));
  return NatMultiPoly(std::move(out));
}

MultiPoly subst_tau(const MultiPoly& p, const Poly& e) {
  if (e.has_tau()) throw std::invalid_argument("subst_tau: replacement mentions tau");
  std::vector<Entry> out;
  out.reserve(p.arity());
  for (const auto& x : p.entries())
    out.push_back(x.is_super() ? Entry::superpoly() : Entry(x.poly().subst_tau(e)));
  return MultiPoly(std::move(out));
}

Poly alpha_k(const NatPoly& p) {
  std::vector<Term<Sat>> t;
  t.reserve(p.size());
  for (const auto& x : p.terms()) {
    if (x.coeff == 0) continue;
    t.push_back({x.mono, x.coeff == 1 ? Sat::One : Sat::Many});
  }
  return Poly(std::move(t));
}

MultiPoly alpha_k(const NatMultiPoly& p) {
  std::vector<Entry> out;
  out.reserve(p.arity());
  for (const auto& e : p.entries()) out.emplace_back(alpha_k(e));
  return MultiPoly(std::move(out));
}

Poly erase_k(const Poly& p) {
  std::vector<Term<Sat>> t = p.terms();
  for (auto& x : t) x.coeff = Sat::One;
  return Poly(std::move(t));
}

MultiPoly erase_k(const MultiPoly& p) {
  std::vector<Entry> out;
  out.reserve(p.arity());
  for (const auto& e : p.entries()) out.push_back(e.is_super() ? Entry::superpoly() : Entry(erase_k(e.poly())));
  return MultiPoly(std::move(out));
}

namespace {

struct CheckedU64 {
  std::uint64_t v = 0;
  CheckedU64() = default;
  explicit CheckedU64(std::uint64_t x) : v(x) {}
  friend CheckedU64 operator+(CheckedU64 a, CheckedU64 b) {
    CheckedU64 r;
    if (__builtin_add_overflow(a.v, b.v, &r.v)) throw OverflowError("evaluation overflow");
    return r;
  }
  friend CheckedU64 operator*(CheckedU64 a, CheckedU64 b) {
    CheckedU64 r;
    if (__builtin_mul_overflow(a.v, b.v, &r.v)) throw OverflowError("evaluation overflow");
    return r;
  }
};

}  // namespace

std::vector<std::uint64_t> gamma_eval(const MultiPoly& p, std::span<const std::uint64_t> s, std::uint64_t t) {
  if (s.size() < p.arity()) throw ArityError("gamma_eval: state shorter than arity");
  std::vector<CheckedU64> x(s.begin(), s.end());
  std::vector<std::uint64_t> out;
  out.reserve(p.arity());
  for (const auto& e : p.entries()) {
    if (e.is_super()) throw std::domain_error("gamma_eval: super-polynomial entry");
    out.push_back(gamma_eval<CheckedU64>(e.poly(), x, CheckedU64(t)).v);
  }
  return out;
}

std::pair<Poly, Poly> split_linear(const Poly& p) {
  std::vector<Term<Sat>> lin, rest;
  for (const auto& t : p.terms()) (t.mono.is_linear() ? lin : rest).push_back(t);
  return {Poly(std::move(lin)), Poly(std::move(rest))};
}

Poly reduce_poly(const Poly& p) {
  const auto& t = p.terms();
  std::vector<Term<Sat>> keep;
  for (std::size_t i = 0; i < t.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < t.size() && !dominated; ++j)
      dominated = j != i && mono_dominates(t[j].mono, t[i].mono);
    if (!dominated) keep.push_back(t[i]);
  }
  return Poly(std::move(keep));
}

bool poly_dominates(const Poly& a, const Poly& b) {
  for (const auto& y : b.terms()) {
    bool covered = false;
    for (const auto& x : a.terms())
      if (mono_dominates(x.mono, y.mono)) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

bool mp_dominates(const MultiPoly& a, const MultiPoly& b) {
  if (a.arity() != b.arity()) throw ArityError("mp_dominates: arity mismatch");
  for (std::size_t i = 1; i <= a.arity(); ++i) {
    const Entry& x = a.entry(i);
    const Entry& y = b.entry(i);
    if (x.is_super()) continue;
    if (y.is_super() || !poly_dominates(x.poly(), y.poly())) return false;
  }
  return true;
}

std::vector<MultiPoly> reduce_mp_set(std::span<const MultiPoly> set) {
  std::vector<MultiPoly> r;
  r.reserve(set.size());
  for (const auto& m : set) {
    std::vector<Entry> e;
    e.reserve(m.arity());
    for (const auto& x : m.entries()) e.push_back(x.is_super() ? Entry::superpoly() : Entry(reduce_poly(x.poly())));
    r.emplace_back(std::move(e));
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());

  std::vector<MultiPoly> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r[i].is_identity()) {
      bool dominated = false;
      for (std::size_t j = 0; j < r.size() && !dominated; ++j) {
        if (j == i || !mp_dominates(r[j], r[i])) continue;
        // Mutual domination means equal up to coefficients; keep the first.
        dominated = !mp_dominates(r[i], r[j]) || j < i;
      }
      if (dominated) continue;
    }
    out.push_back(r[i]);
  }
  return out;
}

NatPoly join_nat(const NatPoly& p, const NatPoly& q) {
  std::vector<Term<std::uint64_t>> t;
  std::size_t i = 0, j = 0;
  const auto& a = p.terms();
  const auto& b = q.terms();
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].mono < b[j].mono)) {
      t.push_back(a[i++]);
    } else if (i == a.size() || b[j].mono < a[i].mono) {
      t.push_back(b[j++]);
    } else {
      t.push_back({a[i].mono, std::max(a[i].coeff, b[j].coeff)});
      ++i;
      ++j;
    }
  }
  return NatPoly(std::move(t));
}

// ---------------------------------------------------------------------------
// Text form

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& t : p.terms()) {
    if (!out.empty()) out += '+';
    if (t.coeff == Sat::Many)
      out += t.mono.is_unit() ? "w" : "w*" + t.mono.to_string();
    else
      out += t.mono.to_string();
  }
  return out;
}

std::string to_string(const NatPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& t : p.terms()) {
    if (!out.empty()) out += '+';
    if (t.coeff != 1)
      out += t.mono.is_unit() ? std::to_string(t.coeff) : std::to_string(t.coeff) + "*" + t.mono.to_string();
    else
      out += t.mono.to_string();
  }
  return out;
}

std::string to_string(const Entry& e) { return e.is_super() ? "SUPERPOLY" : to_string(e.poly()); }

std::string to_string(const MultiPoly& p) {
  std::string out = "<";
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (i) out += ", ";
    out += to_string(p.entries()[i]);
  }
  return out + ">";
}

std::string to_string(const NatMultiPoly& p) {
  std::string out = "<";
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (i) out += ", ";
    out += to_string(p.entries()[i]);
  }
  return out + ">";
}

namespace {

class PolyReader {
 public:
  explicit PolyReader(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    skip_ws();
    if (s_.substr(pos_, w.size()) == w) {
      const std::size_t after = pos_ + w.size();
      if (after < s_.size() && std::isalnum(static_cast<unsigned char>(s_[after])) && !std::isdigit(static_cast<unsigned char>(s_[after])))
        return false;
      pos_ = after;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::uint64_t number() {
    skip_ws();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc{}) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  bool peek_digit() {
    skip_ws();
    return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw PolyParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  unsigned exponent() {
    if (!accept('^')) return 1;
    const auto e = number();
    if (e > 255) fail("exponent too large");
    return static_cast<unsigned>(e);
  }

  // A polynomial with natural coefficients; `w` reads as 2.
  NatPoly poly() {
    std::vector<Term<std::uint64_t>> terms;
    do {
      std::uint64_t coeff = 1;
      Monomial m;
      do {
        if (peek_digit()) {
          coeff = CoeffTraits<std::uint64_t>::mul(coeff, number());
        } else if (accept_word("w")) {
          coeff = CoeffTraits<std::uint64_t>::mul(coeff, 2);
        } else if (accept_word("tau")) {
          m.set_tau_exp(m.tau_exp() + exponent());
        } else if (accept('x') || accept('X')) {
          const auto i = number();
          if (i == 0 || i > kMaxVars) fail("variable index out of range");
          const unsigned e = exponent();
          m.set_exp(i, m.exp(i) + e);
        } else {
          fail("expected a factor");
        }
      } while (accept('*'));
      if (coeff != 0) terms.push_back({m, coeff});
    } while (accept('+'));
    return NatPoly(std::move(terms));
  }

  template <class Fn>
  auto tuple(Fn&& entry) {
    expect('<');
    std::vector<decltype(entry())> out;
    if (!accept('>')) {
      do out.push_back(entry());
      while (accept(','));
      expect('>');
    }
    if (!at_end()) fail("trailing input");
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

NatPoly parse_nat_poly(std::string_view text) {
  PolyReader r(text);
  NatPoly p = r.poly();
  if (!r.at_end()) r.fail("trailing input");
  return p;
}

Poly parse_poly(std::string_view text) { return alpha_k(parse_nat_poly(text)); }

MultiPoly parse_multipoly(std::string_view text) {
  PolyReader r(text);
  auto entries = r.tuple([&]() -> Entry {
    if (r.accept_word("SUPERPOLY")) return Entry::superpoly();
    return Entry(alpha_k(r.poly()));
  });
  return MultiPoly(std::move(entries));
}

NatMultiPoly parse_nat_multipoly(std::string_view text) {
  PolyReader r(text);
  auto entries = r.tuple([&] { return r.poly(); });
  return NatMultiPoly(std::move(entries));
}

}  // namespace tightbound
