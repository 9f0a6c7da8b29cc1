#include "tightbound/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "tightbound/analyzer.hpp"
#include "tightbound/oracle.hpp"
#include "tightbound/report.hpp"

namespace tightbound {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(in), {});
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(f), {});
}

std::vector<std::uint64_t> parse_scales(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (auto v : parse_state(text)) {
    if (v < 2) throw UsageError("scales must be at least 2");
    out.push_back(v);
  }
  if (!std::is_sorted(out.begin(), out.end())) throw UsageError("scales must be increasing");
  return out;
}

Schedule parse_schedule(const std::string& text) {
  Schedule s;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty()) continue;
    if (tok == "L" || tok == "l")
      s.push_back(Decision::left());
    else if (tok == "R" || tok == "r")
      s.push_back(Decision::right());
    else
      s.push_back(Decision::iterations(std::stoull(tok)));
  }
  return s;
}

// Every loop runs its full bound, every choose goes left.
State run_greedy(const Command& c, State s) {
  using K = Command::Kind;
  switch (c.kind) {
    case K::Skip:
      return s;
    case K::Assign:
      s[c.target - 1] = eval_expr(*c.expr, s);
      return s;
    case K::Seq:
      return run_greedy(*c.second, run_greedy(*c.first, std::move(s)));
    case K::Choose:
      return run_greedy(*c.first, std::move(s));
    case K::Loop: {
      const std::uint64_t b = eval_expr(*c.expr, s);
      for (std::uint64_t i = 0; i < b; ++i) s = run_greedy(*c.body(), std::move(s));
      return s;
    }
  }
  return s;
}

struct BudgetFlags {
  unsigned max_degree = Budget{}.max_degree;
  std::size_t max_set_size = Budget{}.max_set_size;
  std::size_t max_rounds = Budget{}.max_rounds;

  void add_to(CLI::App* app) {
    app->add_option("--max-degree", max_degree, "Largest entry degree, tau included")->check(CLI::PositiveNumber);
    app->add_option("--max-set-size", max_set_size, "Largest bound set")->check(CLI::PositiveNumber);
    app->add_option("--max-rounds", max_rounds, "Largest number of solver rounds")->check(CLI::PositiveNumber);
  }
  Budget budget() const { return {max_degree, max_set_size, max_rounds}; }
};

// ---------------------------------------------------------------------------
// check

struct FileVerdict {
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;
  Json json;
};

std::string var_key(std::size_t i) { return "x" + std::to_string(i); }

std::set<std::string> monomial_set(const VariableBound& v, const std::set<std::size_t>& drop) {
  std::set<std::string> out;
  for (const auto& p : v.polys)
    for (const auto& t : p.terms()) {
      bool skip = false;
      for (std::size_t d : drop) skip = skip || t.mono.mentions(d);
      if (!skip) out.insert(t.mono.to_string());
    }
  // Keep the dominance-maximal ones only.
  std::vector<Monomial> ms;
  for (const auto& s : out) ms.push_back(parse_poly(s).terms().front().mono);
  std::set<std::string> maximal;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    bool dom = false;
    for (std::size_t j = 0; j < ms.size() && !dom; ++j) dom = j != i && mono_dominates(ms[j], ms[i]);
    if (!dom) maximal.insert(ms[i].to_string());
  }
  return maximal;
}

std::set<std::string> canonical_polys(const Json& list) {
  std::set<std::string> out;
  for (const auto& s : list) out.insert(to_string(reduce_poly(erase_k(parse_poly(s.get<std::string>())))));
  return out;
}

struct CheckOptions {
  std::uint64_t cap = 64;
  std::vector<std::uint64_t> scales = default_scales();
  std::vector<std::uint64_t> lower_scales{2, 4, 8};
  std::uint64_t grid_max = 3;
  std::size_t grid_points = 20000;
  bool growth = true;
  bool instrument = false;
  Budget budget;
};

FileVerdict check_file(const fs::path& path, const CheckOptions& opts, std::istream& in) {
  FileVerdict v;
  v.name = path.filename().string();
  Program prog = parse(read_input(path.string(), in));
  Json expect = Json::object();
  fs::path sidecar = path;
  sidecar.replace_extension(".expect.json");
  if (fs::exists(sidecar)) {
    std::ifstream f(sidecar);
    expect = Json::parse(f);
  }
  if (opts.instrument || expect.value("instrument", false)) prog = instrument_counters(prog);

  AnalysisOptions aopts;
  aopts.budget = opts.budget;
  const AnalysisReport rep = analyze_program(prog, aopts);
  auto fail = [&](const std::string& note) {
    v.pass = false;
    v.notes.push_back(note);
  };

  // Expectations.
  Json ej = Json::object();
  if (expect.contains("pb")) {
    const auto want = expect["pb"].get<std::vector<std::size_t>>();
    if (want != rep.pb) fail("pb differs from expectation");
    ej["pb"] = want == rep.pb;
  }
  if (expect.contains("bounds_count")) {
    const bool ok = expect["bounds_count"].get<std::size_t>() == rep.bounds.size();
    if (!ok) fail("bound count " + std::to_string(rep.bounds.size()) + " differs from expectation");
    ej["bounds_count"] = ok;
  }
  if (expect.contains("per_variable")) {
    for (const auto& [k, want] : expect["per_variable"].items()) {
      const std::size_t i = std::stoul(k.substr(1));
      const VariableBound& got = rep.per_variable.at(i);
      bool ok;
      if (want.is_string()) {
        ok = got.super;
      } else {
        std::set<std::string> g;
        for (const auto& p : got.polys) g.insert(to_string(p));
        ok = !got.super && g == canonical_polys(want);
      }
      if (!ok) fail("per-variable bound of " + k + " differs from expectation");
      ej["per_variable"][k] = ok;
    }
  }
  if (expect.contains("per_variable_monomials")) {
    std::set<std::size_t> drop;
    for (const auto& d : expect.value("drop_variables", Json::array())) drop.insert(std::stoul(d.get<std::string>().substr(1)));
    for (const auto& [k, want] : expect["per_variable_monomials"].items()) {
      const std::size_t i = std::stoul(k.substr(1));
      std::set<std::string> w;
      for (const auto& s : want) w.insert(parse_poly(s.get<std::string>()).terms().front().mono.to_string());
      const bool ok = monomial_set(rep.per_variable.at(i), drop) == w;
      if (!ok) fail("maximal monomials of " + k + " differ from expectation");
      ej["per_variable_monomials"][k] = ok;
    }
  }

  // Upper bounds on a small grid.
  std::uint64_t g = opts.grid_max;
  auto grid = Grid::uniform(prog.n, 0, g);
  while (g > 1 && grid.size() > opts.grid_points) grid = Grid::uniform(prog.n, 0, --g);
  grid.max_points = std::max(grid.size(), opts.grid_points);
  const UpperCheck up = check_upper(prog, rep, grid, opts.cap);
  if (!up.pass) fail("upper check failed");
  Json uj = to_json(up);
  uj.erase("constants");
  uj["grid_max"] = g;

  // Lower bounds for every loop witness.
  std::vector<std::uint64_t> lower_scales = opts.lower_scales;
  if (expect.contains("lower_scales")) lower_scales = expect["lower_scales"].get<std::vector<std::uint64_t>>();
  std::size_t lower_total = 0, lower_pass = 0, lower_skipped = 0;
  Json lj = Json::array();
  for (std::size_t k = 0; k < rep.witnesses.size(); ++k) {
    const auto& w = rep.witnesses[k];
    std::vector<NatMultiPoly> body;
    try {
      if (w.exact_body) {
        body = w.exact;
      } else {
        for (const auto& m : w.body) body.push_back(gamma_body(m));
      }
    } catch (const std::domain_error&) {
      lower_skipped += w.entries.size();
      continue;
    }
    for (const auto& e : w.entries) {
      ++lower_total;
      const LowerCheck lc = check_lower(body, e.raw, e.pattern, lower_scales);
      if (lc.pass) {
        ++lower_pass;
      } else {
        fail("lower check failed for loop" + std::to_string(k + 1) + " bound " + to_string(e.bound) + ": " + lc.failure);
        Json item = to_json(lc);
        item["loop"] = "loop" + std::to_string(k + 1);
        item["bound"] = to_string(e.bound);
        lj.push_back(item);
      }
    }
  }

  // Growth classification against the pb verdict.
  Json gj = Json::object();
  if (opts.growth) {
    const auto growth = classify_all(prog, opts.scales);
    for (std::size_t i = 1; i <= prog.n; ++i) {
      const Growth& gr = growth[i - 1];
      const bool analyzer_poly = std::find(rep.pb.begin(), rep.pb.end(), i) != rep.pb.end();
      std::string verdict = to_string(gr);
      if (gr.kind != Growth::Kind::Unknown) {
        const bool oracle_poly = gr.kind == Growth::Kind::Polynomial;
        if (oracle_poly != analyzer_poly) fail("growth of " + var_key(i) + " is " + verdict + " but the analyzer disagrees");
      }
      if (expect.contains("classification") && expect["classification"].contains(var_key(i))) {
        const auto want = expect["classification"][var_key(i)].get<std::string>();
        const bool ok = want == "polynomial" ? analyzer_poly : !analyzer_poly;
        if (!ok) fail("classification of " + var_key(i) + " differs from expectation");
      }
      gj[var_key(i)] = verdict;
    }
  }

  v.json = Json{{"file", v.name},
                {"pass", v.pass},
                {"pb", rep.pb},
                {"expectations", ej},
                {"upper", uj},
                {"lower", Json{{"scales", lower_scales}, {"checked", lower_total}, {"passed", lower_pass}, {"skipped", lower_skipped}, {"failures", lj}}},
                {"growth", gj},
                {"notes", v.notes}};
  std::ostringstream line;
  line << (v.pass ? "PASS " : "FAIL ") << v.name << "  upper c<=" << up.max_constant << (up.budget_exceeded ? " (partial)" : "")
       << "  lower " << lower_pass << "/" << lower_total;
  if (lower_skipped) line << " (" << lower_skipped << " skipped)";
  if (opts.growth) {
    std::size_t unknown = 0;
    for (const auto& [k, s] : gj.items()) unknown += s.get<std::string>() == "unknown";
    line << "  growth " << (prog.n - unknown) << "/" << prog.n << " classified";
  }
  v.notes.insert(v.notes.begin(), line.str());
  return v;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tight polynomial worst-case bounds for bounded-loop programs", "tightbound"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("tightbound ") + kVersion);

  bool json = false, witness = false, no_reduce = false, instrument = false, serial = false;
  std::string path;
  BudgetFlags bflags;

  auto* analyze = app.add_subcommand("analyze", "Compute bounds for a program");
  analyze->add_option("file", path, "Program file, - for stdin")->required();
  analyze->add_flag("--json", json, "JSON output");
  analyze->add_flag("--witness", witness, "Include lower-bound witness patterns");
  analyze->add_flag("--reduce,!--no-reduce", no_reduce, "Dominance-reduce reported bounds (default on)");
  analyze->add_flag("--instrument", instrument, "Add a step counter before analysis");
  analyze->add_flag("--serial", serial, "Use the single-threaded kernels");
  bflags.add_to(analyze);

  auto* solve = app.add_subcommand("solve-sdl", "Solve a simple disjunctive loop given as JSON");
  solve->add_option("file", path, "SDL file, - for stdin")->required();
  solve->add_flag("--json", json, "JSON output");
  solve->add_flag("--witness", witness, "Include witness patterns");
  solve->add_flag("--serial", serial, "Use the single-threaded kernels");
  bflags.add_to(solve);

  std::string input, schedule;
  bool enumerate = false;
  std::size_t enum_budget = 100000;
  auto* interp = app.add_subcommand("interpret", "Run a program on a concrete state");
  interp->add_option("file", path, "Program file, - for stdin")->required();
  interp->add_option("--input", input, "Initial state, e.g. 3,1")->required();
  interp->add_flag("--enumerate", enumerate, "List every reachable final state");
  interp->add_option("--schedule", schedule, "Decisions: L, R or an iteration count, comma separated");
  interp->add_option("--budget", enum_budget, "State-count limit for --enumerate")->check(CLI::PositiveNumber);
  interp->add_flag("--instrument", instrument, "Add a step counter first");
  interp->add_flag("--json", json, "JSON output");

  CheckOptions copts;
  std::string scales;
  bool no_growth = false;
  auto* check = app.add_subcommand("check", "Validate analysis results against the brute-force oracle");
  check->add_option("path", path, "A .loop file or a directory of them")->required();
  check->add_option("--cap", copts.cap, "Largest acceptable upper-bound constant")->check(CLI::PositiveNumber);
  check->add_option("--scales", scales, "Growth-classification scales, e.g. 2,4,8,16");
  std::string lower_scales;
  check->add_option("--lower-scales", lower_scales, "Lower-check scales, default 2,4,8");
  check->add_option("--grid-max", copts.grid_max, "Upper checks use inputs 0..N");
  check->add_flag("--no-growth", no_growth, "Skip growth classification");
  check->add_flag("--instrument", instrument, "Instrument every program first");
  check->add_flag("--json", json, "JSON output");
  bflags.add_to(check);

  std::size_t adv_n = 0, adv_d = 0;
  auto* adv = app.add_subcommand("gen-adversarial", "Emit a program with a large number of maximal bounds");
  adv->add_option("n", adv_n, "Number of variables (even)")->required();
  adv->add_option("d", adv_d, "Factors per product")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Execution exec = serial ? Execution::Serial : Execution::Parallel;
  try {
    if (*analyze) {
      Program p = parse(read_input(path, in));
      if (instrument) p = instrument_counters(p);
      AnalysisOptions opts;
      opts.budget = bflags.budget();
      opts.reduce = !no_reduce;
      opts.exec = exec;
      const AnalysisReport rep = analyze_program(p, opts);
      if (json)
        out << to_json(rep, witness).dump(2) << '\n';
      else
        out << render_text(rep, witness);
      return kExitOk;
    }
    if (*solve) {
      const Json j = Json::parse(read_input(path, in));
      SdlProblem prob;
      prob.budget = bflags.budget();
      if (j.contains("budget")) budget_from_json(j["budget"], prob.budget);
      for (const auto& m : j.at("body")) prob.body.push_back(multipoly_from_json(m));
      prob.n = j.contains("arity") ? j["arity"].get<std::size_t>() : (prob.body.empty() ? 0 : prob.body[0].arity());
      const SdlSolution sol = solve_sdl(prob, exec);
      if (json)
        out << to_json(sol, prob.n, witness).dump(2) << '\n';
      else
        out << render_text(sol, prob.n, witness);
      return kExitOk;
    }
    if (*interp) {
      Program p = parse(read_input(path, in));
      if (instrument) p = instrument_counters(p);
      const State s = parse_state(input);
      if (s.size() != p.n)
        throw UsageError("--input has " + std::to_string(s.size()) + " values but the program has " + std::to_string(p.n) + " variables");
      if (enumerate) {
        const Finals f = enumerate_finals(p, s, enum_budget);
        if (json) {
          out << Json{{"finals", f.states}, {"truncated", f.truncated}}.dump(2) << '\n';
        } else {
          for (const auto& y : f.states) out << to_string(y) << '\n';
          if (f.truncated) err << "warning: enumeration truncated at " << enum_budget << " states\n";
        }
        return f.truncated ? kExitBudget : kExitOk;
      }
      const State y = schedule.empty() ? run_greedy(*p.command, s) : run_schedule(p, s, parse_schedule(schedule));
      out << to_string(y) << '\n';
      return kExitOk;
    }
    if (*check) {
      if (!scales.empty()) copts.scales = parse_scales(scales);
      if (!lower_scales.empty()) copts.lower_scales = parse_scales(lower_scales);
      copts.growth = !no_growth;
      copts.instrument = instrument;
      copts.budget = bflags.budget();
      std::vector<fs::path> files;
      if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path))
          if (e.path().extension() == ".loop") files.push_back(e.path());
        std::sort(files.begin(), files.end());
      } else {
        files.emplace_back(path);
      }
      if (files.empty()) throw UsageError("no .loop files under '" + path + "'");
      bool all = true;
      Json results = Json::array();
      for (const auto& f : files) {
        FileVerdict v = check_file(f, copts, in);
        all = all && v.pass;
        if (json) {
          results.push_back(v.json);
        } else {
          out << v.notes.front() << '\n';
          for (std::size_t k = 1; k < v.notes.size(); ++k) out << "    " << v.notes[k] << '\n';
        }
      }
      if (json) out << Json{{"pass", all}, {"files", results}, {"version", kVersion}}.dump(2) << '\n';
      return all ? kExitOk : kExitCheckFailed;
    }
    if (*adv) {
      out << format_program(gen_adversarial(adv_n, adv_d));
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << (path.empty() ? "" : path + ": ") << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ScheduleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  }
  return kExitUsage;
}

}  // namespace tightbound
