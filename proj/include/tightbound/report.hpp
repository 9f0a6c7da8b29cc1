#pragma once

// JSON and text rendering of analysis results, plus the JSON form of
// multi-polynomials.

#include <string>

#include "json.hpp"
#include "tightbound/analyzer.hpp"
#include "tightbound/oracle.hpp"
#include "tightbound/sdl.hpp"

namespace tightbound {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// `[[{"coeff":"1","exps":{"x1":2,"tau":1}}, ...], "SUPERPOLY", ...]`
Json to_json(const MultiPoly& p);
Json to_json(const Poly& p);
/// Accepts the structured form or the text form `<e1, ..., en>`.
MultiPoly multipoly_from_json(const Json& j);
Poly poly_from_json(const Json& j);

Json to_json(const Budget& b);
/// Missing fields keep the values already in `b`.
void budget_from_json(const Json& j, Budget& b);

Json to_json(const AnalysisReport& r, bool witnesses);
std::string render_text(const AnalysisReport& r, bool witnesses);

Json to_json(const SdlSolution& s, std::size_t n, bool witnesses);
std::string render_text(const SdlSolution& s, std::size_t n, bool witnesses);

Json to_json(const UpperCheck& c);
Json to_json(const LowerCheck& c);

}  // namespace tightbound
