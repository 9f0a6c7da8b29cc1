#pragma once

// Lower-bound witnesses: patterns over loop-body letters, derived from
// solver derivations and expanded into concrete traces.

#include <cstddef>
#include <string>
#include <vector>

#include "tightbound/sdl.hpp"

namespace tightbound {

/// A letter (one body transition) or a starred block of letters. Stars do
/// not nest.
struct Atom {
  bool star = false;
  std::vector<std::size_t> letters;  // 0-based body indices

  static Atom letter(std::size_t k) { return {false, {k}}; }
  static Atom starred(std::vector<std::size_t> ls) { return {true, std::move(ls)}; }
  friend bool operator==(const Atom&, const Atom&) = default;
};

using Pattern = std::vector<Atom>;
/// Sequence of 0-based body indices.
using Trace = std::vector<std::size_t>;

/// Letters are non-empty, plain atoms hold exactly one letter.
bool well_formed(const Pattern& p);
bool star_free(const Pattern& p);
/// Every star taken once.
Trace flatten(const Pattern& p);

/// Identity: empty; Input k: the letter; Compose: concatenation in
/// application order; Generalize of pi: (pi with every star taken once)*
/// followed by n copies of pi.
Pattern derive_pattern(const Derivation& d, std::size_t n);

/// Every star repeated t times. Requires t >= 1.
Trace expand_pattern(const Pattern& p, std::size_t t);

/// `p1 (p2 p3)* p1`; letters are 1-based; the empty pattern prints as `eps`.
std::string to_string(const Pattern& p);
Pattern parse_pattern(const std::string& text);

}  // namespace tightbound
