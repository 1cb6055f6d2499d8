#include "ownmap/interaction.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>

#include "ownmap/errors.hpp"
#include "ownmap/prompts.hpp"

namespace ownmap {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

/// Two highest-scoring users, score descending then name ascending.
std::vector<std::string> top_candidates(const OwnershipScores& scores, std::size_t k) {
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i)
        out.push_back(ranked[i].first);
    return out;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

Question TemplateQuestionBackend::generate(const ObjectRecord& object,
                                           const OwnershipScores& scores,
                                           const Roster& roster) {
    Question q;
    q.object_id = object.object_id;
    q.focus_candidates = top_candidates(scores, std::min<std::size_t>(2, roster.size()));

    std::ostringstream text;
    text << "Is this " << object.class_label << " (object " << object.object_id
         << ") owned by ";
    if (q.focus_candidates.size() >= 2) {
        text << q.focus_candidates[0] << ", " << q.focus_candidates[1]
             << ", or someone else?";
    } else if (q.focus_candidates.size() == 1) {
        text << q.focus_candidates[0] << "?";
    } else {
        text << "someone?";
    }
    q.text = text.str();
    return q;
}

Question LlmQuestionBackend::generate(const ObjectRecord& object,
                                      const OwnershipScores& scores,
                                      const Roster& roster) {
    const std::string prompt = build_question_prompt(
        object.object_id, object.class_label, object.position, roster, scores);
    std::string reply = trim(client_->complete(ChatRequest{prompt}));
    std::replace(reply.begin(), reply.end(), '\n', ' ');

    Question q;
    q.object_id = object.object_id;
    q.focus_candidates = top_candidates(scores, std::min<std::size_t>(2, roster.size()));

    const std::size_t terminator = reply.find_first_of(".?!");
    if (terminator != std::string::npos && terminator + 1 < reply.size()) {
        const std::string rest = trim(reply.substr(terminator + 1));
        if (!rest.empty()) q.truncated = true;
        reply = reply.substr(0, terminator + 1);
    }
    q.text = trim(reply);
    if (q.text.empty())
        throw BackendError("question backend: empty question", reply);
    return q;
}

std::string OracleRespondent::canonical_sentence(std::vector<std::string> owners) {
    std::sort(owners.begin(), owners.end());
    std::ostringstream out;
    out << "It belongs to ";
    for (std::size_t i = 0; i < owners.size(); ++i) {
        if (i > 0) out << " and ";
        out << owners[i];
    }
    out << ".";
    return out.str();
}

std::string OracleRespondent::respond(const Question& question) {
    auto it = truth_.find(question.object_id);
    if (it == truth_.end() || it->second.empty())
        throw ValidationError("oracle respondent: no ground truth for object '" +
                              question.object_id + "'");
    return canonical_sentence(it->second);
}

ScriptedRespondent::ScriptedRespondent(std::vector<std::string> answers)
    : queue_(answers.begin(), answers.end()) {}

std::string ScriptedRespondent::respond(const Question&) {
    if (queue_.empty())
        throw StateError("scripted respondent: answer queue exhausted");
    std::string answer = std::move(queue_.front());
    queue_.pop_front();
    return answer;
}

std::string ConsoleRespondent::respond(const Question& question) {
    std::cout << question.text << "\n> " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line))
        throw StateError("console respondent: end of input");
    return line;
}

InterpretResult RuleAnswerInterpreter::interpret(const Question&,
                                                 const std::string& answer,
                                                 const Roster& roster) {
    // Collect lowercase tokens with possessives and punctuation stripped,
    // so "Tom's" matches Tom.
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (current.empty()) return;
        if (current.size() > 2 && current.ends_with("'s"))
            current.erase(current.size() - 2);
        else if (current.size() > 1 && current.back() == '\'')
            current.pop_back();
        tokens.push_back(current);
        current.clear();
    };
    for (char c : answer) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '_')
            current.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else
            flush();
    }
    flush();

    InterpretResult result;
    for (const auto& user : roster.users()) {
        const std::string needle = lowercase(user.name);
        result.vector[user.name] =
            std::find(tokens.begin(), tokens.end(), needle) != tokens.end();
    }
    return result;
}

InterpretResult LlmAnswerInterpreter::interpret(const Question& question,
                                                const std::string& answer,
                                                const Roster& roster) {
    const std::string prompt = build_interpret_prompt(question.text, answer, roster);
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            const std::string reply = client_->complete(ChatRequest{prompt});
            InterpretResult result;
            result.vector = parse_bool_response(reply, roster);
            return result;
        } catch (const BackendError&) {
            // retry once, then fall back to the rule matcher
        }
    }
    RuleAnswerInterpreter rules;
    InterpretResult result = rules.interpret(question, answer, roster);
    result.used_fallback = true;
    return result;
}

void apply_answer(AcquisitionState& state,
                  const std::string& object_id,
                  const AnswerVector& vector,
                  const ShareParams& share_params) {
    ObjectState& entry = state.at(object_id);
    if (entry.asked)
        throw StateError("apply_answer: object '" + object_id + "' was already asked");

    bool any = false;
    for (const auto& [user, is_owner] : vector) {
        (void)user;
        if (is_owner) any = true;
    }

    entry.asked = true;
    if (!any) {
        entry.needs_revisit = true;  // keep prior scores; nothing was learned
        return;
    }

    entry.answered.clear();
    for (auto& [user, score] : entry.scores) {
        auto it = vector.find(user);
        const bool is_owner = it != vector.end() && it->second;
        score = is_owner ? 1.0 : 0.0;
        if (is_owner) entry.answered.push_back(user);
    }
    entry.share = detect_shared(entry.scores, share_params);
}

}  // namespace ownmap
