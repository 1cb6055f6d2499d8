#include "ownmap/prompts.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ownmap/errors.hpp"

namespace ownmap {

namespace {

using ordered_json = nlohmann::ordered_json;

double round_to(double value, int digits) {
    const double scale = std::pow(10.0, digits);
    return std::round(value * scale) / scale;
}

ordered_json background_json(const Roster& roster) {
    ordered_json bg = ordered_json::object();
    for (const auto& user : roster.users()) {
        bg[user.name] = {{"role", user.role}, {"occupation", user.occupation}};
    }
    return bg;
}

ordered_json context_json(const std::vector<ContextEntry>& entries) {
    ordered_json arr = ordered_json::array();
    for (const auto& entry : entries) {
        ordered_json item;
        item["object_id"] = entry.object_id;
        item["class"] = entry.class_label;
        if (entry.kind == ContextKind::neighbor) {
            item["distance"] = round_to(entry.distance, 4);
            item["weight"] = round_to(entry.weight, 4);
        } else {
            item["similarity"] = round_to(entry.similarity, 4);
        }
        if (entry.known_ownership) item["known_ownership"] = *entry.known_ownership;
        arr.push_back(std::move(item));
    }
    return arr;
}

ordered_json usage_json(const UsageSummary& usage) {
    ordered_json out;
    out["object"] = {{"id", usage.object_id}, {"name", usage.object_name}};
    ordered_json users = ordered_json::array();
    for (const auto& u : usage.user_summary) {
        ordered_json item;
        item["user_id"] = u.user_id;
        item["total_events"] = u.total_events;
        ordered_json actions = ordered_json::object();
        for (const auto& [action, count] : u.actions) actions[action] = count;
        item["actions"] = std::move(actions);
        item["last_used_days_ago"] = round_to(u.last_used_days_ago, 2);
        item["example_events"] = u.example_events;
        users.push_back(std::move(item));
    }
    out["user_summary"] = std::move(users);
    return out;
}

std::string score_placeholder_line(const Roster& roster) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& user : roster.users()) {
        if (!first) out << ", ";
        first = false;
        out << '"' << user.name << "\":0.xx";
    }
    out << "}";
    return out.str();
}

std::string window_label(double window_days) {
    const double rounded = std::round(window_days);
    if (std::abs(window_days - rounded) < 1e-9) {
        std::ostringstream out;
        out << static_cast<long long>(rounded);
        return out.str();
    }
    std::ostringstream out;
    out << window_days;
    return out.str();
}

// --- tolerant JSON extraction -------------------------------------------

std::vector<std::string> candidate_payloads(const std::string& text) {
    std::vector<std::string> candidates;
    candidates.push_back(text);

    // fenced blocks: ```json ... ``` or plain ```
    std::size_t pos = 0;
    while ((pos = text.find("```", pos)) != std::string::npos) {
        std::size_t start = pos + 3;
        std::size_t line_end = text.find('\n', start);
        if (line_end != std::string::npos && line_end - start <= 8) start = line_end + 1;
        const std::size_t close = text.find("```", start);
        if (close == std::string::npos) break;
        candidates.push_back(text.substr(start, close - start));
        pos = close + 3;
    }

    const std::size_t first = text.find('{');
    const std::size_t last = text.rfind('}');
    if (first != std::string::npos && last != std::string::npos && last > first)
        candidates.push_back(text.substr(first, last - first + 1));
    return candidates;
}

// Balanced-brace object immediately following the given key, if any.
std::optional<std::string> object_after_key(const std::string& text, const std::string& key) {
    const std::size_t key_pos = text.find("\"" + key + "\"");
    if (key_pos == std::string::npos) return std::nullopt;
    const std::size_t open = text.find('{', key_pos);
    if (open == std::string::npos) return std::nullopt;
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        else if (text[i] == '}') {
            --depth;
            if (depth == 0) return text.substr(open, i - open + 1);
        }
    }
    return std::nullopt;
}

std::optional<nlohmann::json> extract_keyed_object(const std::string& text,
                                                   const std::string& key) {
    for (const auto& candidate : candidate_payloads(text)) {
        auto parsed = nlohmann::json::parse(candidate, nullptr, false);
        if (parsed.is_discarded()) continue;
        if (parsed.is_object()) {
            if (parsed.contains(key) && parsed[key].is_object()) return parsed[key];
            return parsed;  // maybe the bare inner map
        }
    }
    if (auto inner = object_after_key(text, key)) {
        auto parsed = nlohmann::json::parse(*inner, nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

}  // namespace

std::string build_inference_prompt(const ContextBundle& bundle, const KnownFacts& known) {
    std::ostringstream out;
    out << "You are an excellent household robot.\n";
    out << "Your task: estimate ownership probability for ONE target object using ALL "
           "given information sources.\n\n";
    out << "IMPORTANT:\n";
    out << "- This is MULTI-LABEL probability (each person independently between 0 and 1).\n";
    out << "- The probabilities MUST NOT sum to 1.\n";
    out << "- Output numbers only (0..1), no formulas.\n\n";

    if (bundle.flags.use_background)
        out << background_json(*bundle.roster).dump(2) << "\n\n";
    else
        out << kNotAvailable << "\n\n";

    out << "### Target Object\n";
    out << "- object_id: " << bundle.object_id << "\n";
    out << "- class: " << bundle.class_label << "\n\n";

    out << "### Similar Objects (may include known_ownership for asked==1 or "
           "high-confidence)\n";
    if (bundle.flags.use_similars)
        out << context_json(attach_known(bundle.similars, known)).dump(2) << "\n\n";
    else
        out << kNotAvailable << "\n\n";

    out << "### Nearby Objects (may include known_ownership)\n";
    if (bundle.flags.use_neighbors)
        out << context_json(attach_known(bundle.neighbors, known)).dump(2) << "\n\n";
    else
        out << kNotAvailable << "\n\n";

    out << "### Usage History (last " << window_label(bundle.usage.window_days)
        << " days)\n";
    if (bundle.flags.use_history)
        out << usage_json(bundle.usage).dump(2) << "\n\n";
    else
        out << kNotAvailable << "\n\n";

    out << "### Output\n";
    out << "Return ONLY the following JSON (no other explanation, no code fences):\n";
    out << "{\n";
    out << "  \"ownership_distribution\": " << score_placeholder_line(*bundle.roster)
        << "\n";
    out << "}\n";
    return out.str();
}

OwnershipScores parse_score_response(const std::string& text, const Roster& roster) {
    auto object = extract_keyed_object(text, "ownership_distribution");
    if (!object)
        throw BackendError("score response: no parseable ownership_distribution", text);

    OwnershipScores scores;
    for (const auto& user : roster.users()) {
        if (!object->contains(user.name))
            throw BackendError("score response: missing user '" + user.name + "'", text);
        const auto& value = (*object)[user.name];
        if (!value.is_number())
            throw BackendError("score response: non-numeric value for '" + user.name + "'",
                               text);
        scores[user.name] = std::clamp(value.get<double>(), 0.0, 1.0);
    }
    return scores;
}

std::string build_question_prompt(const std::string& object_id,
                                  const std::string& class_label,
                                  const std::array<double, 3>& position,
                                  const Roster& roster,
                                  const OwnershipScores& scores) {
    ordered_json owners = ordered_json::array();
    for (const auto& user : roster.users()) owners.push_back(user.name);

    ordered_json p_final = ordered_json::object();
    for (const auto& user : roster.users()) {
        auto it = scores.find(user.name);
        p_final[user.name] = round_to(it == scores.end() ? 0.0 : it->second, 4);
    }

    ordered_json pos = ordered_json::array();
    for (double v : position) pos.push_back(round_to(v, 3));

    std::ostringstream out;
    out << "You are a dialogue module for a home-service robot.\n";
    out << "Based on the given information, generate exactly ONE natural English question\n";
    out << "that the robot will ask the user to identify the owner of an object.\n\n";
    out << "The robot needs to ask the user who owns the following object.\n\n";
    out << "### Object Information\n";
    out << "[Object ID]\n" << object_id << "\n\n";
    out << "[Object class]\n" << class_label << "\n\n";
    out << "[Position information]\n" << pos.dump() << "\n\n";
    out << "[Ownership candidates]\n" << owners.dump() << "\n\n";
    out << "[Ownership probability distribution P_final (if available)]\n"
        << p_final.dump() << "\n\n";
    out << "--- Requirements for the generated question ---\n";
    out << "- Produce ONLY one single English question sentence.\n";
    out << "- Make it sound natural and conversational, as if a home robot is asking the "
           "user directly.\n";
    out << "- If possible, include light contextual details such as the object's class "
           "name,\n";
    out << "  so the user can easily understand which object is being referred to.\n";
    out << "- P_final represents estimated multi-label ownership probabilities for each "
           "candidate owner\n";
    out << "  (the values do not necessarily sum to 1). Use this distribution to design a "
           "question that is\n";
    out << "  easy for the user to answer, for example by focusing on the 1-2 most likely "
           "owners as explicit\n";
    out << "  options and treating the others as 'someone else' if appropriate.\n";
    out << "- You may mention the ownership candidates or 'someone else'.\n";
    out << "- The output must be ONLY the question sentence.\n";
    out << "  Do NOT include explanations, bullet points, JSON, quotes, or additional "
           "text.\n";
    return out.str();
}

std::string build_interpret_prompt(const std::string& question,
                                   const std::string& answer,
                                   const Roster& roster) {
    ordered_json owners = ordered_json::array();
    for (const auto& user : roster.users()) owners.push_back(user.name);

    std::ostringstream out;
    out << "You are an excellent household robot.\n";
    out << "From the dialogue between the robot and the user, you must decide,\n";
    out << "for each candidate person, whether they are an owner of the object (True) or "
           "not (False).\n";
    out << "Multiple people can be owners (shared / joint ownership is allowed).\n\n";
    out << "Below is the robot's question to the user and the user's answer.\n\n";
    out << "[Robot's question]\n" << question << "\n\n";
    out << "[User's answer]\n" << answer << "\n\n";
    out << "[Ownership candidates]\n" << owners.dump() << "\n\n";
    out << "--- Decision rules ---\n";
    out << "- For each candidate person, return true if they can reasonably be considered "
           "an owner of the object,\n";
    out << "  and false if they should not be considered an owner.\n";
    out << "- It is allowed that more than one person is true (shared ownership is "
           "possible).\n";
    out << "- If the user mentions someone who is not in the candidate list, you should "
           "normally return false\n";
    out << "  for all candidates, unless the user also clearly indicates one of the "
           "candidates as an owner.\n";
    out << "- Even if the user's answer is vague, try to make a reasonable true/false "
           "decision for each candidate.\n";
    out << "- If it is truly impossible to decide, you may return false for all "
           "candidates.\n\n";
    out << "--- Output format ---\n";
    out << "Return ONLY the following JSON. Do NOT include any extra text, explanation, or "
           "natural language.\n";
    out << "{\n  \"ownership_boolean\": {\n";
    for (std::size_t i = 0; i < roster.size(); ++i) {
        out << "    \"" << roster.users()[i].name << "\": true/false";
        if (i + 1 < roster.size()) out << ",";
        out << "\n";
    }
    out << "  }\n}\n";
    return out.str();
}

std::map<std::string, bool> parse_bool_response(const std::string& text,
                                                const Roster& roster) {
    auto object = extract_keyed_object(text, "ownership_boolean");
    if (!object)
        throw BackendError("answer response: no parseable ownership_boolean", text);

    std::map<std::string, bool> vector;
    for (const auto& user : roster.users()) {
        if (!object->contains(user.name))
            throw BackendError("answer response: missing user '" + user.name + "'", text);
        const auto& value = (*object)[user.name];
        if (value.is_boolean()) {
            vector[user.name] = value.get<bool>();
        } else if (value.is_string()) {
            const std::string s = value.get<std::string>();
            if (s == "true" || s == "True") vector[user.name] = true;
            else if (s == "false" || s == "False") vector[user.name] = false;
            else
                throw BackendError("answer response: non-boolean value for '" +
                                       user.name + "'",
                                   text);
        } else {
            throw BackendError("answer response: non-boolean value for '" + user.name + "'",
                               text);
        }
    }
    return vector;
}

}  // namespace ownmap
