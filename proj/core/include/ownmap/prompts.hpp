#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ownmap/ownership.hpp"
#include "ownmap/roster.hpp"
#include "ownmap/scoring.hpp"

namespace ownmap {

/// Marker substituted for prompt sections disabled by ablation flags.
inline constexpr const char* kNotAvailable = "not available";

/// Renders the multi-label scoring prompt for one object: user background,
/// target attributes, similar/nearby context (with known_ownership where
/// facts exist), and the usage summary, ending in the JSON output contract
/// keyed "ownership_distribution".
std::string build_inference_prompt(const ContextBundle& bundle, const KnownFacts& known);

/// Extracts the ownership_distribution object from a model reply,
/// tolerating surrounding prose and code fences. Every roster user must be
/// present with a numeric value; values are clamped to [0,1]. Throws
/// BackendError (carrying the raw text) otherwise.
OwnershipScores parse_score_response(const std::string& text, const Roster& roster);

/// Renders the question-generation prompt for one object.
std::string build_question_prompt(const std::string& object_id,
                                  const std::string& class_label,
                                  const std::array<double, 3>& position,
                                  const Roster& roster,
                                  const OwnershipScores& scores);

/// Renders the answer-interpretation prompt.
std::string build_interpret_prompt(const std::string& question,
                                   const std::string& answer,
                                   const Roster& roster);

/// Extracts the ownership_boolean object from a model reply; same
/// tolerance and error contract as parse_score_response.
std::map<std::string, bool> parse_bool_response(const std::string& text,
                                                const Roster& roster);

}  // namespace ownmap
