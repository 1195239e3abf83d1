#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace kgrag {

struct ChatRequest {
    std::string prompt;
    std::string model;
    double temperature = 0.0;
    // Caller metadata (e.g. probe item id); never sent to real providers.
    std::string tag;
};

// Chat-completion provider: one prompt in, text out. Implementations throw
// TransportError on delivery failure.
class ChatClient {
  public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
};

struct ProviderProfile {
    std::string name;
    std::string model;
    std::string endpoint;        // e.g. https://api.example.com/v1/chat/completions
    std::string credential_env;  // environment variable holding the API key
    int max_retries = 3;
    int timeout_ms = 30000;
};

std::vector<ProviderProfile> load_profiles(const std::string& path);

// OpenAI-style chat-completions HTTP client. Key is read from the profile's
// credential environment variable at request time; bodies can be traced to
// stderr with the key redacted.
class HttpChatClient : public ChatClient {
  public:
    explicit HttpChatClient(ProviderProfile profile, bool trace = false);
    std::string complete(const ChatRequest& req) override;

  private:
    ProviderProfile profile_;
    bool trace_;
};

// Answers with the keyed letter looked up by request tag in a sidecar map.
class OracleClient : public ChatClient {
  public:
    explicit OracleClient(std::map<std::string, std::string> answers_by_tag)
        : answers_(std::move(answers_by_tag)) {}
    std::string complete(const ChatRequest& req) override;

  private:
    std::map<std::string, std::string> answers_;
};

// Uniform pick over the allowed letters advertised in the prompt. Stateless:
// the choice is a pure function of (seed, model, temperature, tag, prompt),
// so grids replay identically regardless of execution order.
class RandomClient : public ChatClient {
  public:
    explicit RandomClient(std::uint64_t seed) : seed_(seed) {}
    std::string complete(const ChatRequest& req) override;

  private:
    std::uint64_t seed_;
};

// Fixed transcript keyed by the FNV-1a hex hash of the prompt. Unknown
// prompts raise TransportError.
class ScriptClient : public ChatClient {
  public:
    explicit ScriptClient(const std::string& transcript_path);
    std::string complete(const ChatRequest& req) override;

    static std::string prompt_key(const std::string& prompt);

  private:
    std::map<std::string, std::string> transcript_;
};

// Parses "mock:oracle", "mock:random:<seed>", "mock:script:<file>", or "http".
// oracle_answers is only consulted for mock:oracle.
std::unique_ptr<ChatClient> make_client(const std::string& spec, const ProviderProfile& profile,
                                        const std::map<std::string, std::string>& oracle_answers,
                                        bool trace = false);

}  // namespace kgrag
