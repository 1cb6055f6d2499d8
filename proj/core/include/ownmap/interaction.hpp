#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ownmap/chat.hpp"
#include "ownmap/map_store.hpp"
#include "ownmap/ownership.hpp"
#include "ownmap/roster.hpp"
#include "ownmap/state.hpp"

namespace ownmap {

/// One natural-language ownership question.
struct Question {
    std::string object_id;
    std::string text;                            // a single sentence
    std::vector<std::string> focus_candidates;   // at most two highlighted users
    bool truncated = false;                      // model reply had extra sentences
};

/// Per-user boolean owner vector. All-false means "none of the candidates".
using AnswerVector = std::map<std::string, bool>;

/// Question backends. The template backend names the two highest-scoring
/// users; the LLM backend renders the generation prompt and keeps only the
/// first sentence of the reply.
class QuestionBackend {
public:
    virtual ~QuestionBackend() = default;
    virtual Question generate(const ObjectRecord& object,
                              const OwnershipScores& scores,
                              const Roster& roster) = 0;
};

class TemplateQuestionBackend final : public QuestionBackend {
public:
    Question generate(const ObjectRecord& object,
                      const OwnershipScores& scores,
                      const Roster& roster) override;
};

class LlmQuestionBackend final : public QuestionBackend {
public:
    explicit LlmQuestionBackend(std::shared_ptr<ChatClient> client)
        : client_(std::move(client)) {}
    Question generate(const ObjectRecord& object,
                      const OwnershipScores& scores,
                      const Roster& roster) override;

private:
    std::shared_ptr<ChatClient> client_;
};

/// Answer sources. The oracle replies with the canonical sentence for the
/// ground-truth owner set; scripted pops a queue; console prompts stdin.
class Respondent {
public:
    virtual ~Respondent() = default;
    virtual std::string respond(const Question& question) = 0;
    virtual std::string kind() const = 0;
};

class OracleRespondent final : public Respondent {
public:
    explicit OracleRespondent(std::map<std::string, std::vector<std::string>> truth)
        : truth_(std::move(truth)) {}
    std::string respond(const Question& question) override;
    std::string kind() const override { return "oracle"; }

    /// "It belongs to A and B." with names joined by " and ".
    static std::string canonical_sentence(std::vector<std::string> owners);

private:
    std::map<std::string, std::vector<std::string>> truth_;
};

class ScriptedRespondent final : public Respondent {
public:
    explicit ScriptedRespondent(std::vector<std::string> answers);
    std::string respond(const Question& question) override;
    std::string kind() const override { return "scripted"; }

private:
    std::deque<std::string> queue_;
};

class ConsoleRespondent final : public Respondent {
public:
    std::string respond(const Question& question) override;
    std::string kind() const override { return "console"; }
};

struct InterpretResult {
    AnswerVector vector;
    bool used_fallback = false;  // LLM output unusable twice; rule matcher used
};

/// Answer interpreters. The rule-based matcher marks a user true when the
/// answer mentions their name (case-insensitive, possessives stripped);
/// the LLM backend renders the interpretation prompt and parses the
/// boolean JSON, retrying once before falling back to the rules.
class AnswerInterpreter {
public:
    virtual ~AnswerInterpreter() = default;
    virtual InterpretResult interpret(const Question& question,
                                      const std::string& answer,
                                      const Roster& roster) = 0;
};

class RuleAnswerInterpreter final : public AnswerInterpreter {
public:
    InterpretResult interpret(const Question& question,
                              const std::string& answer,
                              const Roster& roster) override;
};

class LlmAnswerInterpreter final : public AnswerInterpreter {
public:
    explicit LlmAnswerInterpreter(std::shared_ptr<ChatClient> client)
        : client_(std::move(client)) {}
    InterpretResult interpret(const Question& question,
                              const std::string& answer,
                              const Roster& roster) override;

private:
    std::shared_ptr<ChatClient> client_;
};

/// Writes the answer into the state: owners get score 1.0, everyone else
/// 0.0, the object is marked asked, and the share decision is recomputed.
/// An all-false vector marks the object asked and needs_revisit, leaving
/// scores untouched. Throws StateError when the object was already asked.
void apply_answer(AcquisitionState& state,
                  const std::string& object_id,
                  const AnswerVector& vector,
                  const ShareParams& share_params);

}  // namespace ownmap
