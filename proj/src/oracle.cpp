#include "tightbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace tightbound {

// ---------------------------------------------------------------------------
// Grid

Grid Grid::uniform(std::size_t n, std::uint64_t lo, std::uint64_t hi) {
  Grid g;
  std::vector<std::uint64_t> vals;
  for (std::uint64_t v = lo; v <= hi; ++v) vals.push_back(v);
  g.values.assign(n, vals);
  return g;
}

std::size_t Grid::size() const {
  std::size_t k = 1;
  for (const auto& v : values) {
    if (v.empty()) return 0;
    if (k > max_points / v.size() + 1) return max_points + 1;
    k *= v.size();
  }
  return k;
}

std::vector<State> Grid::points() const {
  const std::size_t total = size();
  if (total > max_points) throw BudgetExceeded("grid exceeds point budget");
  std::vector<State> out;
  out.reserve(total);
  if (total == 0) return out;
  std::vector<std::size_t> idx(values.size(), 0);
  while (true) {
    State s(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s[i] = values[i][idx[i]];
    out.push_back(std::move(s));
    std::size_t k = values.size();
    while (k > 0) {
      --k;
      if (++idx[k] < values[k].size()) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
    if (values.empty()) return out;
  }
}

// ---------------------------------------------------------------------------
// SDL traces

namespace {

State apply_nat(const NatMultiPoly& p, const State& s) {
  State out(p.arity());
  for (std::size_t i = 0; i < p.arity(); ++i) {
    std::uint64_t acc = 0;
    for (const auto& t : p.entries()[i].terms()) {
      std::uint64_t m = t.coeff;
      const std::size_t top = t.mono.max_var();
      for (std::size_t v = 1; v <= top; ++v)
        for (unsigned e = 0; e < t.mono.exp(v); ++e) m = CoeffTraits<std::uint64_t>::mul(m, s[v - 1]);
      acc = CoeffTraits<std::uint64_t>::add(acc, m);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

State sdl_max_outcomes(std::span<const NatMultiPoly> body, const State& s, std::size_t L, std::size_t budget) {
  State best = s;
  std::set<State> seen{s};
  std::vector<State> frontier{s};
  for (std::size_t len = 0; len < L && !frontier.empty(); ++len) {
    std::vector<State> next;
    for (const auto& x : frontier)
      for (const auto& p : body) {
        State y = apply_nat(p, x);
        if (!seen.insert(y).second) continue;
        if (seen.size() > budget) throw BudgetExceeded("trace enumeration exceeds budget");
        for (std::size_t i = 0; i < y.size(); ++i) best[i] = std::max(best[i], y[i]);
        next.push_back(std::move(y));
      }
    frontier = std::move(next);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Upper bounds

UpperCheck check_upper(const Program& p, const AnalysisReport& report, const Grid& grid, std::uint64_t cap,
                       ExploreLimits limits, Execution exec) {
  return check_upper(p, report.unreduced, report.pb, grid, cap, limits, exec);
}

namespace {

struct PointResult {
  bool budget = false;
  std::size_t finals = 0;
  // Per maximal final: chosen bound index and constant (max_u64 if none fits).
  std::vector<std::pair<std::size_t, std::uint64_t>> picks;
  std::optional<UpperCounterexample> cex;
};

constexpr std::uint64_t kNoFit = std::numeric_limits<std::uint64_t>::max();

}  // namespace

UpperCheck check_upper(const Program& p, std::span<const MultiPoly> bounds, std::span<const std::size_t> pb,
                       const Grid& grid, std::uint64_t cap, ExploreLimits limits, Execution exec) {
  UpperCheck out;
  out.bounds.assign(bounds.begin(), bounds.end());
  out.constants.assign(bounds.size(), 0);
  const auto points = grid.points();
  out.points = points.size();
  limits.prune_dominated = true;

  std::vector<PointResult> results(points.size());
  const bool par = exec == Execution::Parallel;
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1) if (par)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const State& x = points[static_cast<std::size_t>(k)];
    PointResult& r = results[static_cast<std::size_t>(k)];
    std::set<std::vector<std::uint64_t>> finals;
    try {
      Explorer<std::uint64_t> ex(limits);
      finals = ex.run(*p.command, {x});
    } catch (const BudgetExceeded&) {
      r.budget = true;
      continue;
    } catch (const OverflowError&) {
      r.budget = true;
      continue;
    }
    r.finals = finals.size();
    // gamma of every bound at x, as long double.
    std::vector<long double> xv(x.begin(), x.end());
    std::vector<std::vector<long double>> gam(bounds.size(), std::vector<long double>(p.n, 0));
    for (std::size_t b = 0; b < bounds.size(); ++b)
      for (std::size_t i : pb)
        gam[b][i - 1] = gamma_eval<long double>(bounds[b].entry(i).poly(), xv, 0.0L);
    for (const auto& y : finals) {
      std::size_t best = 0;
      std::uint64_t best_c = kNoFit;
      std::size_t worst_var = pb.empty() ? 0 : pb.front();
      for (std::size_t b = 0; b < bounds.size(); ++b) {
        std::uint64_t c = 1;
        std::size_t arg = worst_var;
        for (std::size_t i : pb) {
          const auto yi = static_cast<long double>(y[i - 1]);
          const long double g = gam[b][i - 1];
          std::uint64_t need;
          if (yi == 0)
            need = 0;
          else if (g == 0)
            need = kNoFit;
          else
            need = static_cast<std::uint64_t>(std::min<long double>(std::ceil(yi / g), 1e18L));
          if (need > c) {
            c = need;
            arg = i;
          }
        }
        if (b == 0 || c < best_c) {
          best_c = c;
          best = b;
          worst_var = arg;
        }
      }
      r.picks.emplace_back(best, best_c);
      if (best_c > cap && !r.cex) {
        UpperCounterexample cx;
        cx.input = x;
        cx.output = State(y.begin(), y.end());
        cx.variable = worst_var;
        if (worst_var != 0) {
          cx.observed = y[worst_var - 1];
          if (!bounds.empty()) cx.bound_value = gam[best][worst_var - 1];
        }
        if (!bounds.empty()) cx.bound = to_string(bounds[best]);
        r.cex = cx;
      }
    }
  }

  for (auto& r : results) {
    if (r.budget) {
      out.budget_exceeded = true;
      continue;
    }
    out.finals += r.finals;
    for (auto [b, c] : r.picks) {
      if (c == kNoFit || c > cap) {
        out.pass = false;
        out.max_constant = std::max(out.max_constant, c);
        continue;
      }
      out.max_constant = std::max(out.max_constant, c);
      if (b < out.constants.size()) out.constants[b] = std::max(out.constants[b], c);
    }
    if (r.cex && !out.counterexample) out.counterexample = std::move(r.cex);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lower bounds

NatMultiPoly gamma_body(const MultiPoly& p) {
  std::vector<NatPoly> entries;
  entries.reserve(p.arity());
  for (const auto& e : p.entries()) {
    if (e.is_super()) throw std::domain_error("gamma_body: super-polynomial entry");
    std::vector<Term<std::uint64_t>> t;
    for (const auto& x : e.poly().terms()) t.push_back({x.mono, 1});
    entries.emplace_back(std::move(t));
  }
  return NatMultiPoly(std::move(entries));
}

LowerCheck check_lower(std::span<const NatMultiPoly> body, const MultiPoly& bound, const Pattern& pi,
                       std::span<const std::uint64_t> scales, std::size_t t_max) {
  LowerCheck out;
  if (scales.empty() || t_max == 0) throw std::invalid_argument("check_lower: empty scale or t range");
  if (!well_formed(pi)) throw std::invalid_argument("check_lower: malformed pattern");
  const std::size_t n = bound.arity();
  for (const auto& b : body)
    if (b.arity() != n) throw ArityError("check_lower: body arity differs from bound arity");

  std::vector<std::pair<Poly, Poly>> split(n);
  for (std::size_t i = 1; i <= n; ++i)
    if (!bound.entry(i).is_super()) split[i - 1] = split_linear(erase_k(bound.entry(i).poly()));

  constexpr long double kInf = std::numeric_limits<long double>::infinity();
  for (std::uint64_t s : scales) {
    long double d_s = kInf;
    for (std::size_t t = 1; t <= t_max; ++t) {
      const Trace trace = expand_pattern(pi, t);
      std::vector<long double> x(n, static_cast<long double>(s));
      for (std::size_t k : trace) {
        if (k >= body.size()) throw std::out_of_range("check_lower: pattern letter outside the body");
        std::vector<long double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = nat_eval<long double>(body[k].entries()[i], x, 0.0L);
        x = std::move(y);
      }
      const std::vector<long double> x0(n, static_cast<long double>(s));
      const auto tv = static_cast<long double>(t);
      for (std::size_t i = 1; i <= n; ++i) {
        if (bound.entry(i).is_super()) continue;
        const long double nu = gamma_eval<long double>(split[i - 1].first, x0, tv);
        const long double nubar = gamma_eval<long double>(split[i - 1].second, x0, tv);
        const long double y = x[i - 1];
        if (y < nu) {
          std::ostringstream msg;
          msg << "x" << i << " reached " << static_cast<double>(y) << " below its linear part "
              << static_cast<double>(nu) << " at s=" << s << ", t=" << t;
          out.pass = false;
          out.failure = msg.str();
          return out;
        }
        if (nubar > 0) d_s = std::min(d_s, (y - nu) / nubar);
      }
    }
    out.d_by_scale.push_back(d_s);
  }
  out.d_fit = out.d_by_scale.front();
  if (!(out.d_fit > 0)) {
    out.pass = false;
    out.failure = "no positive constant fits at the smallest scale";
    return out;
  }
  for (std::size_t k = 1; k < out.d_by_scale.size(); ++k)
    if (out.d_by_scale[k] < 0.5L * out.d_fit) {
      std::ostringstream msg;
      msg << "fitted constant decays from " << static_cast<double>(out.d_fit) << " to "
          << static_cast<double>(out.d_by_scale[k]) << " at s=" << scales[k];
      out.pass = false;
      out.failure = msg.str();
      return out;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Growth classification

std::string to_string(const Growth& g) {
  switch (g.kind) {
    case Growth::Kind::Polynomial:
      return "polynomial(" + std::to_string(g.degree) + ")";
    case Growth::Kind::SuperPolynomial:
      return "superpolynomial";
    case Growth::Kind::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::vector<std::uint64_t> default_scales() { return {2, 4, 8, 16, 32, 64, 128, 256}; }

Growth classify_series(std::span<const std::uint64_t> scales, std::span<const long double> values) {
  Growth g;
  g.scales.assign(scales.begin(), scales.begin() + static_cast<std::ptrdiff_t>(values.size()));
  g.values.assign(values.begin(), values.end());
  for (long double v : values)
    if (!std::isfinite(v)) {
      g.kind = Growth::Kind::SuperPolynomial;
      return g;
    }
  if (values.size() < 4) return g;
  std::vector<long double> slopes;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const long double a = std::max<long double>(values[k], 1);
    const long double b = std::max<long double>(values[k + 1], 1);
    const long double ds = std::log2(static_cast<long double>(scales[k + 1]) / static_cast<long double>(scales[k]));
    slopes.push_back(std::log2(b / a) / ds);
  }
  const std::size_t m = slopes.size();
  const long double a = slopes[m - 3], b = slopes[m - 2], c = slopes[m - 1];
  if (c - b > 0.5L && b - a > 0.5L) {
    g.kind = Growth::Kind::SuperPolynomial;
    return g;
  }
  g.kind = Growth::Kind::Polynomial;
  g.degree = static_cast<int>(std::lround(static_cast<double>(c)));
  return g;
}

std::vector<Growth> classify_all(const Program& p, std::span<const std::uint64_t> scales, ExploreLimits limits,
                                 Execution exec) {
  limits.prune_dominated = true;
  const auto count = static_cast<std::ptrdiff_t>(scales.size());
  std::vector<std::vector<long double>> maxima(scales.size());
  std::vector<char> ok(scales.size(), 0);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::Parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto s = static_cast<long double>(scales[static_cast<std::size_t>(k)]);
    try {
      Explorer<long double> ex(limits);
      const auto finals = ex.run(*p.command, {std::vector<long double>(p.n, s)});
      std::vector<long double> m(p.n, 0);
      for (const auto& y : finals)
        for (std::size_t i = 0; i < p.n; ++i) m[i] = std::max(m[i], y[i]);
      maxima[static_cast<std::size_t>(k)] = std::move(m);
      ok[static_cast<std::size_t>(k)] = 1;
    } catch (const BudgetExceeded&) {
    }
  }
  // Series stop at the first scale over budget.
  std::vector<std::vector<long double>> series(p.n);
  std::vector<std::uint64_t> done;
  for (std::size_t k = 0; k < scales.size() && ok[k]; ++k) {
    done.push_back(scales[k]);
    for (std::size_t i = 0; i < p.n; ++i) series[i].push_back(maxima[k][i]);
  }
  std::vector<Growth> out;
  out.reserve(p.n);
  for (std::size_t i = 0; i < p.n; ++i) out.push_back(classify_series(done, series[i]));
  return out;
}

Growth classify_growth(const Program& p, std::size_t i, std::span<const std::uint64_t> scales, ExploreLimits limits,
                       Execution exec) {
  if (i == 0 || i > p.n) throw ArityError("classify_growth: variable out of range");
  return classify_all(p, scales, limits, exec)[i - 1];
}

// ---------------------------------------------------------------------------
// Adversarial corpus

Program gen_adversarial(std::size_t n, std::size_t d) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument("gen_adversarial: n must be a positive even number");
  const std::size_t m = n / 2;
  if (d == 0 || m % d != 0) throw std::invalid_argument("gen_adversarial: d must divide n/2");
  if (n > kMaxVars) throw ArityError("gen_adversarial: too many variables");
  const std::size_t block = m / d;

  auto choice = [&](std::size_t y, std::size_t b, bool multiply) {
    CommandPtr c;
    for (std::size_t k = block; k-- > 0;) {
      const std::size_t x = b * block + k + 1;
      ExprPtr rhs = multiply ? Expr::make_mul(Expr::make_var(y), Expr::make_var(x)) : Expr::make_var(x);
      CommandPtr a = Command::make_assign(y, rhs);
      c = c ? Command::make_choose(a, c) : a;
    }
    return c;
  };

  CommandPtr prog;
  for (std::size_t j = 1; j <= m; ++j) {
    const std::size_t y = m + j;
    for (std::size_t b = 0; b < d; ++b) {
      CommandPtr c = choice(y, b, b > 0);
      prog = prog ? Command::make_seq(prog, c) : c;
    }
  }
  Program p;
  p.command = prog;
  p.n = n;
  return p;
}

}  // namespace tightbound
