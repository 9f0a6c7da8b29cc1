#include "tightbound/report.hpp"

#include <cmath>
#include <sstream>

namespace tightbound {

namespace {

std::string var_name(std::size_t i) { return "x" + std::to_string(i); }

Json double_or_null(long double v) {
  if (!std::isfinite(v)) return nullptr;
  return static_cast<double>(v);
}

Json strings(const std::vector<MultiPoly>& v) {
  Json a = Json::array();
  for (const auto& m : v) a.push_back(to_string(m));
  return a;
}

}  // namespace

Json to_json(const Poly& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms()) {
    Json exps = Json::object();
    for (std::size_t i = 1; i <= kMaxVars; ++i)
      if (t.mono.exp(i)) exps[var_name(i)] = t.mono.exp(i);
    if (t.mono.tau_exp()) exps["tau"] = t.mono.tau_exp();
    terms.push_back(Json{{"coeff", t.coeff == Sat::One ? "1" : "w"}, {"exps", exps}});
  }
  return terms;
}

Json to_json(const MultiPoly& p) {
  Json out = Json::array();
  for (const auto& e : p.entries()) out.push_back(e.is_super() ? Json("SUPERPOLY") : to_json(e.poly()));
  return out;
}

Poly poly_from_json(const Json& j) {
  if (j.is_string()) return parse_poly(j.get<std::string>());
  if (!j.is_array()) throw std::invalid_argument("polynomial must be an array of terms or a string");
  std::vector<Term<Sat>> terms;
  for (const auto& t : j) {
    Monomial m;
    for (const auto& [k, v] : t.at("exps").items()) {
      const auto e = v.get<unsigned>();
      if (k == "tau") {
        m.set_tau_exp(e);
      } else if (k.size() > 1 && k[0] == 'x') {
        m.set_exp(std::stoul(k.substr(1)), e);
      } else {
        throw std::invalid_argument("unknown variable '" + k + "'");
      }
    }
    const auto c = t.value("coeff", std::string("1"));
    if (c != "1" && c != "w") throw std::invalid_argument("coefficient must be \"1\" or \"w\"");
    terms.push_back({m, c == "1" ? Sat::One : Sat::Many});
  }
  return Poly(std::move(terms));
}

MultiPoly multipoly_from_json(const Json& j) {
  if (j.is_string()) return parse_multipoly(j.get<std::string>());
  if (!j.is_array()) throw std::invalid_argument("multi-polynomial must be an array of entries or a string");
  std::vector<Entry> entries;
  for (const auto& e : j) {
    if (e.is_string() && e.get<std::string>() == "SUPERPOLY")
      entries.push_back(Entry::superpoly());
    else
      entries.emplace_back(poly_from_json(e));
  }
  return MultiPoly(std::move(entries));
}

Json to_json(const Budget& b) {
  return Json{{"max_degree", b.max_degree}, {"max_set_size", b.max_set_size}, {"max_rounds", b.max_rounds}};
}

void budget_from_json(const Json& j, Budget& b) {
  if (j.contains("max_degree")) b.max_degree = j["max_degree"].get<unsigned>();
  if (j.contains("max_set_size")) b.max_set_size = j["max_set_size"].get<std::size_t>();
  if (j.contains("max_rounds")) b.max_rounds = j["max_rounds"].get<std::size_t>();
  if (b.max_degree == 0 || b.max_set_size == 0 || b.max_rounds == 0)
    throw std::invalid_argument("budget values must be positive");
}

namespace {

Json variable_json(const VariableBound& v) {
  if (v.super) return "SUPERPOLY";
  Json a = Json::array();
  for (const auto& p : v.polys) a.push_back(to_string(p));
  return a;
}

Json witness_json(const LoopWitnesses& w, std::size_t k) {
  Json patterns = Json::array();
  for (const auto& e : w.entries) patterns.push_back(Json{{"bound", to_string(e.bound)}, {"pattern", to_string(e.pattern)}});
  return Json{{"id", "loop" + std::to_string(k + 1)},
              {"line", w.line},
              {"bound", w.bound},
              {"replay", w.exact_body ? "exact" : "gamma"},
              {"body", strings(w.body)},
              {"patterns", patterns}};
}

}  // namespace

Json to_json(const AnalysisReport& r, bool witnesses) {
  Json j;
  j["n"] = r.n;
  j["pb"] = r.pb;
  j["bounds"] = strings(r.bounds);
  Json pv = Json::object();
  for (const auto& [i, v] : r.per_variable) pv[var_name(i)] = variable_json(v);
  j["per_variable"] = pv;
  j["superpoly"] = r.superpoly;
  Json w = Json::object();
  if (witnesses)
    for (std::size_t k = 0; k < r.witnesses.size(); ++k) w["loop" + std::to_string(k + 1)] = witness_json(r.witnesses[k], k);
  j["witnesses"] = w;
  j["stats"] = Json{{"rounds", r.stats.rounds}, {"elements", r.stats.elements}, {"restarts", r.stats.restarts}};
  j["unreduced_count"] = r.stats.unreduced;
  j["budget"] = to_json(r.budget);
  j["version"] = kVersion;
  return j;
}

std::string render_text(const AnalysisReport& r, bool witnesses) {
  std::ostringstream os;
  auto list = [&](const std::vector<std::size_t>& v) {
    os << '{';
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << var_name(v[k]);
    os << '}';
  };
  os << "variables: " << r.n << '\n';
  os << "polynomially bounded: ";
  list(r.pb);
  os << '\n';
  if (!r.superpoly.empty()) {
    os << "super-polynomial: ";
    list(r.superpoly);
    os << '\n';
  }
  os << "bounds (" << r.bounds.size() << " of " << r.stats.unreduced << " computed):\n";
  for (const auto& b : r.bounds) os << "  " << to_string(b) << '\n';
  os << "per variable:\n";
  for (const auto& [i, v] : r.per_variable) {
    os << "  " << var_name(i) << ": ";
    if (v.super) {
      os << "SUPERPOLY\n";
      continue;
    }
    os << (v.polys.size() > 1 ? "max(" : "");
    for (std::size_t k = 0; k < v.polys.size(); ++k) os << (k ? ", " : "") << to_string(v.polys[k]);
    os << (v.polys.size() > 1 ? ")" : "") << '\n';
  }
  if (witnesses) {
    for (std::size_t k = 0; k < r.witnesses.size(); ++k) {
      const auto& w = r.witnesses[k];
      os << "loop" << k + 1 << " (line " << w.line << ", bound " << w.bound << ", " << (w.exact_body ? "exact" : "gamma")
         << " replay):\n";
      for (std::size_t b = 0; b < w.body.size(); ++b) os << "  p" << b + 1 << " = " << to_string(w.body[b]) << '\n';
      for (const auto& e : w.entries) os << "  " << to_string(e.bound) << "  <=  " << to_string(e.pattern) << '\n';
    }
  }
  os << "stats: rounds " << r.stats.rounds << ", elements " << r.stats.elements << ", restarts " << r.stats.restarts
     << '\n';
  return os.str();
}

Json to_json(const SdlSolution& s, std::size_t n, bool witnesses) {
  std::vector<MultiPoly> raw;
  for (const auto& e : s.bounds) raw.push_back(e.mp);
  std::vector<MultiPoly> erased;
  for (const auto& m : raw) erased.push_back(erase_k(m));
  Json j;
  j["n"] = n;
  j["flagged"] = s.flagged;
  j["superpoly"] = s.superpoly_vars;
  j["bounds"] = strings(reduce_mp_set(erased));
  Json all = Json::array();
  for (const auto& e : s.bounds) {
    Json item{{"mp", to_string(e.mp)}, {"terms", to_json(e.mp)}};
    if (witnesses) item["pattern"] = to_string(derive_pattern(e.derivation, n));
    all.push_back(item);
  }
  j["elements"] = all;
  j["stats"] = Json{{"rounds", s.stats.rounds}, {"elements", s.stats.elements}, {"restarts", s.stats.restarts}};
  j["version"] = kVersion;
  return j;
}

std::string render_text(const SdlSolution& s, std::size_t n, bool witnesses) {
  std::ostringstream os;
  os << "flagged:";
  for (auto v : s.flagged) os << ' ' << var_name(v);
  os << "\nsuper-polynomial:";
  for (auto v : s.superpoly_vars) os << ' ' << var_name(v);
  os << "\nelements (" << s.bounds.size() << "):\n";
  for (const auto& e : s.bounds) {
    os << "  " << to_string(e.mp);
    if (witnesses) os << "  <=  " << to_string(derive_pattern(e.derivation, n));
    os << '\n';
  }
  std::vector<MultiPoly> erased;
  for (const auto& e : s.bounds) erased.push_back(erase_k(e.mp));
  os << "reduced:\n";
  for (const auto& m : reduce_mp_set(erased)) os << "  " << to_string(m) << '\n';
  os << "stats: rounds " << s.stats.rounds << ", elements " << s.stats.elements << ", restarts " << s.stats.restarts
     << '\n';
  return os.str();
}

Json to_json(const UpperCheck& c) {
  Json j;
  j["pass"] = c.pass;
  j["max_constant"] = c.max_constant;
  j["points"] = c.points;
  j["finals"] = c.finals;
  j["budget_exceeded"] = c.budget_exceeded;
  Json per = Json::array();
  for (std::size_t k = 0; k < c.bounds.size(); ++k)
    per.push_back(Json{{"bound", to_string(c.bounds[k])}, {"constant", c.constants[k]}});
  j["constants"] = per;
  if (c.counterexample) {
    const auto& x = *c.counterexample;
    j["counterexample"] = Json{{"input", x.input},
                               {"output", x.output},
                               {"variable", var_name(x.variable)},
                               {"observed", x.observed},
                               {"bound_value", static_cast<double>(x.bound_value)},
                               {"bound", x.bound}};
  }
  return j;
}

Json to_json(const LowerCheck& c) {
  Json j;
  j["pass"] = c.pass;
  j["d_fit"] = double_or_null(c.d_fit);
  Json ds = Json::array();
  for (auto d : c.d_by_scale) ds.push_back(double_or_null(d));
  j["d_by_scale"] = ds;
  if (!c.pass) j["failure"] = c.failure;
  return j;
}

}  // namespace tightbound
