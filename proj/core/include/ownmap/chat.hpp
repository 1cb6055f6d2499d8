#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

namespace ownmap {

/// A single-turn chat completion request. The pipeline only ever sends one
/// user message per call.
struct ChatRequest {
    std::string prompt;
};

/// Minimal chat-completions abstraction so the pipeline can run against a
/// live endpoint, a recorded transcript, or an in-process stub.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    /// Returns the assistant message content. Throws BackendError on
    /// transport or protocol failures.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Configuration for the OpenAI-compatible HTTP backend. The API key is
/// read from the environment (never from config files): OWNMAP_API_KEY,
/// falling back to OPENAI_API_KEY.
struct LlmEndpoint {
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4o";
    double temperature = 0.2;
    std::string api_key_env = "OWNMAP_API_KEY";
    int timeout_seconds = 60;
};

/// POSTs {base_url}/chat/completions with a single user message and
/// returns choices[0].message.content.
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(LlmEndpoint endpoint);
    std::string complete(const ChatRequest& request) override;

private:
    LlmEndpoint endpoint_;
};

/// Recorded prompt->response pairs, keyed by a 64-bit content hash of the
/// prompt so replays are exact and independent of prompt length.
class Transcript {
public:
    static std::string key_for(const std::string& prompt);

    void put(const std::string& prompt, const std::string& response);
    /// Throws BackendError when the prompt was never recorded.
    const std::string& get(const std::string& prompt) const;
    bool has(const std::string& prompt) const;

    std::size_t size() const noexcept { return entries_.size(); }

    /// key -> {prompt, response}; exposed for (de)serialization.
    struct Entry {
        std::string prompt;
        std::string response;
    };
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
    void insert_raw(std::string key, Entry entry);

private:
    std::map<std::string, Entry> entries_;
};

/// Serves completions from a transcript. No network.
class ReplayChatClient final : public ChatClient {
public:
    explicit ReplayChatClient(std::shared_ptr<const Transcript> transcript)
        : transcript_(std::move(transcript)) {}
    std::string complete(const ChatRequest& request) override;

private:
    std::shared_ptr<const Transcript> transcript_;
};

/// Wraps another client and records every exchange into a transcript.
class RecordingChatClient final : public ChatClient {
public:
    RecordingChatClient(std::shared_ptr<ChatClient> inner,
                        std::shared_ptr<Transcript> transcript)
        : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
    std::string complete(const ChatRequest& request) override;

private:
    std::shared_ptr<ChatClient> inner_;
    std::shared_ptr<Transcript> transcript_;
};

/// Adapts a callable; used by tests to simulate a model in-process.
class CallableChatClient final : public ChatClient {
public:
    using Fn = std::function<std::string(const std::string&)>;
    explicit CallableChatClient(Fn fn) : fn_(std::move(fn)) {}
    std::string complete(const ChatRequest& request) override { return fn_(request.prompt); }

private:
    Fn fn_;
};

}  // namespace ownmap
