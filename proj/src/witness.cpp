#include "tightbound/witness.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <unordered_map>

namespace tightbound {

bool well_formed(const Pattern& p) {
  for (const auto& a : p) {
    if (a.letters.empty()) return false;
    if (!a.star && a.letters.size() != 1) return false;
  }
  return true;
}

bool star_free(const Pattern& p) {
  for (const auto& a : p)
    if (a.star) return false;
  return true;
}

Trace flatten(const Pattern& p) {
  Trace out;
  for (const auto& a : p) out.insert(out.end(), a.letters.begin(), a.letters.end());
  return out;
}

namespace {

class PatternBuilder {
 public:
  explicit PatternBuilder(std::size_t n) : n_(n) {}

  const Pattern& build(const Derivation& d) {
    if (auto it = memo_.find(d.get()); it != memo_.end()) return it->second;
    Pattern out;
    switch (d->kind) {
      case DerivationNode::Kind::Identity:
        break;
      case DerivationNode::Kind::Input:
        out.push_back(Atom::letter(d->input));
        break;
      case DerivationNode::Kind::Compose: {
        const Pattern& a = build(d->first);
        out = a;
        const Pattern& b = build(d->then);
        out.insert(out.end(), b.begin(), b.end());
        break;
      }
      case DerivationNode::Kind::Generalize: {
        const Pattern pi = build(d->first);
        Trace once = flatten(pi);
        if (!once.empty()) out.push_back(Atom::starred(std::move(once)));
        for (std::size_t k = 0; k < n_; ++k) out.insert(out.end(), pi.begin(), pi.end());
        break;
      }
    }
    return memo_.emplace(d.get(), std::move(out)).first->second;
  }

 private:
  std::size_t n_;
  std::unordered_map<const DerivationNode*, Pattern> memo_;
};

}  // namespace

Pattern derive_pattern(const Derivation& d, std::size_t n) { return PatternBuilder(n).build(d); }

Trace expand_pattern(const Pattern& p, std::size_t t) {
  if (t == 0) throw std::invalid_argument("expand_pattern: t must be at least 1");
  Trace out;
  for (const auto& a : p) {
    const std::size_t reps = a.star ? t : 1;
    for (std::size_t r = 0; r < reps; ++r) out.insert(out.end(), a.letters.begin(), a.letters.end());
  }
  return out;
}

std::string to_string(const Pattern& p) {
  if (p.empty()) return "eps";
  std::string out;
  auto letter = [&](std::size_t k) { out += 'p' + std::to_string(k + 1); };
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    const Atom& a = p[i];
    if (!a.star) {
      letter(a.letters.front());
      continue;
    }
    out += '(';
    for (std::size_t j = 0; j < a.letters.size(); ++j) {
      if (j) out += ' ';
      letter(a.letters[j]);
    }
    out += ")*";
  }
  return out;
}

Pattern parse_pattern(const std::string& text) {
  Pattern out;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto letter = [&]() -> std::size_t {
    skip();
    if (pos >= text.size() || text[pos] != 'p') throw std::invalid_argument("pattern: expected a letter");
    ++pos;
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), k);
    if (ec != std::errc{} || k == 0) throw std::invalid_argument("pattern: bad letter index");
    pos = static_cast<std::size_t>(ptr - text.data());
    return k - 1;
  };
  skip();
  if (text.compare(pos, 3, "eps") == 0) {
    pos += 3;
    skip();
    if (pos != text.size()) throw std::invalid_argument("pattern: trailing input");
    return out;
  }
  while (true) {
    skip();
    if (pos >= text.size()) break;
    if (text[pos] == '(') {
      ++pos;
      std::vector<std::size_t> ls;
      while (true) {
        skip();
        if (pos < text.size() && text[pos] == ')') break;
        ls.push_back(letter());
      }
      ++pos;
      if (pos >= text.size() || text[pos] != '*') throw std::invalid_argument("pattern: expected '*'");
      ++pos;
      if (ls.empty()) throw std::invalid_argument("pattern: empty star");
      out.push_back(Atom::starred(std::move(ls)));
    } else {
      out.push_back(Atom::letter(letter()));
    }
  }
  return out;
}

}  // namespace tightbound
