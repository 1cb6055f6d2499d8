#include "ownmap/chat.hpp"

#include <cstdio>
#include <cstdlib>

#ifdef OWNMAP_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "ownmap/errors.hpp"
#include "ownmap/rng.hpp"

namespace ownmap {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // leading path prefix, no trailing slash
};

SplitUrl split_url(const std::string& base_url) {
    const std::size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw ValidationError("llm endpoint: base url missing scheme: " + base_url);
    const std::size_t path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.path = base_url.substr(path_start);
        while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    }
    return out;
}

}  // namespace

HttpChatClient::HttpChatClient(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string HttpChatClient::complete(const ChatRequest& request) {
    const SplitUrl url = split_url(endpoint_.base_url);

    httplib::Client client(url.origin);
    client.set_connection_timeout(endpoint_.timeout_seconds, 0);
    client.set_read_timeout(endpoint_.timeout_seconds, 0);

    httplib::Headers headers;
    const char* key = std::getenv(endpoint_.api_key_env.c_str());
    if (!key || !*key) key = std::getenv("OPENAI_API_KEY");
    if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body;
    body["model"] = endpoint_.model;
    body["temperature"] = endpoint_.temperature;
    body["messages"] = nlohmann::json::array(
        {{{"role", "user"}, {"content", request.prompt}}});

    auto result = client.Post(url.path + "/chat/completions", headers, body.dump(),
                              "application/json");
    if (!result)
        throw BackendError("llm: transport failure talking to " + endpoint_.base_url, "");
    if (result->status < 200 || result->status >= 300)
        throw BackendError("llm: HTTP " + std::to_string(result->status), result->body);

    auto parsed = nlohmann::json::parse(result->body, nullptr, false);
    if (parsed.is_discarded())
        throw BackendError("llm: response is not JSON", result->body);
    try {
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw BackendError("llm: unexpected response shape", result->body);
    }
}

std::string Transcript::key_for(const std::string& prompt) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(prompt)));
    return buf;
}

void Transcript::put(const std::string& prompt, const std::string& response) {
    entries_[key_for(prompt)] = Entry{prompt, response};
}

const std::string& Transcript::get(const std::string& prompt) const {
    auto it = entries_.find(key_for(prompt));
    if (it == entries_.end())
        throw BackendError("transcript: no recorded response for prompt hash " +
                               key_for(prompt),
                           prompt);
    return it->second.response;
}

bool Transcript::has(const std::string& prompt) const {
    return entries_.count(key_for(prompt)) > 0;
}

void Transcript::insert_raw(std::string key, Entry entry) {
    entries_[std::move(key)] = std::move(entry);
}

std::string ReplayChatClient::complete(const ChatRequest& request) {
    return transcript_->get(request.prompt);
}

std::string RecordingChatClient::complete(const ChatRequest& request) {
    const std::string response = inner_->complete(request);
    transcript_->put(request.prompt, response);
    return response;
}

}  // namespace ownmap
