#include "kgrag/chat.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/rng.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

using nlohmann::json;

std::vector<ProviderProfile> load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profiles file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("profiles: ") + e.what());
    }
    std::vector<ProviderProfile> out;
    for (const auto& p : j) {
        ProviderProfile prof;
        prof.name = p.value("name", "");
        prof.model = p.at("model").get<std::string>();
        if (prof.name.empty()) prof.name = prof.model;
        prof.endpoint = p.value("endpoint", "");
        prof.credential_env = p.value("credential_env", "");
        prof.max_retries = p.value("max_retries", 3);
        prof.timeout_ms = p.value("timeout_ms", 30000);
        out.push_back(std::move(prof));
    }
    if (out.empty()) throw ValidationError("profiles file lists no models: " + path);
    return out;
}

HttpChatClient::HttpChatClient(ProviderProfile profile, bool trace)
    : profile_(std::move(profile)), trace_(trace) {}

std::string HttpChatClient::complete(const ChatRequest& req) {
    // Split endpoint into base and path.
    auto pos = profile_.endpoint.find("://");
    if (pos == std::string::npos) throw ConfigError("bad endpoint: " + profile_.endpoint);
    auto path_pos = profile_.endpoint.find('/', pos + 3);
    std::string base = path_pos == std::string::npos ? profile_.endpoint
                                                     : profile_.endpoint.substr(0, path_pos);
    std::string path = path_pos == std::string::npos ? "/" : profile_.endpoint.substr(path_pos);

    json body{{"model", req.model},
              {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
              {"temperature", req.temperature}};
    httplib::Headers headers;
    if (!profile_.credential_env.empty()) {
        const char* key = std::getenv(profile_.credential_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("credential env var not set: " + profile_.credential_env);
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    if (trace_) {
        std::cerr << "[trace] POST " << base << path << " body=" << body.dump() << "\n";
    }

    std::string last_error;
    for (int attempt = 0; attempt <= profile_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(250 * (1 << (attempt - 1))));
        }
        httplib::Client cli(base);
        cli.set_read_timeout(profile_.timeout_ms / 1000, (profile_.timeout_ms % 1000) * 1000);
        auto res = cli.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failure";
            continue;
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("provider returned HTTP " + std::to_string(res->status));
        }
        if (trace_) std::cerr << "[trace] response=" << res->body << "\n";
        try {
            json r = json::parse(res->body);
            return r.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw TransportError(std::string("unparseable provider response: ") + e.what());
        }
    }
    throw TransportError("provider unreachable after " + std::to_string(profile_.max_retries + 1) +
                         " attempts: " + last_error);
}

std::string OracleClient::complete(const ChatRequest& req) {
    auto it = answers_.find(req.tag);
    if (it == answers_.end()) throw TransportError("oracle has no answer for tag: " + req.tag);
    return it->second;
}

std::string RandomClient::complete(const ChatRequest& req) {
    // Recover the allowed letters from the instruction line of the prompt.
    static const std::string marker = "from this set: ";
    std::vector<char> allowed;
    auto pos = req.prompt.find(marker);
    if (pos != std::string::npos) {
        for (std::size_t i = pos + marker.size(); i < req.prompt.size(); ++i) {
            char c = req.prompt[i];
            if (c == '.' || c == '\n') break;
            if (c >= 'A' && c <= 'Z') allowed.push_back(c);
        }
    }
    if (allowed.empty()) allowed = {'A', 'B', 'C', 'D'};
    std::ostringstream key;
    key << seed_ << "|" << req.model << "|" << req.temperature << "|" << req.tag << "|"
        << req.prompt;
    Rng rng(fnv1a(key.str()));
    return std::string(1, allowed[rng.below(allowed.size())]);
}

ScriptClient::ScriptClient(const std::string& transcript_path) {
    std::ifstream in(transcript_path);
    if (!in) throw ConfigError("cannot open transcript: " + transcript_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("transcript: ") + e.what());
    }
    for (auto& [k, v] : j.items()) transcript_[k] = v.get<std::string>();
}

std::string ScriptClient::prompt_key(const std::string& prompt) {
    std::ostringstream hex;
    hex << std::hex << fnv1a(prompt);
    return hex.str();
}

std::string ScriptClient::complete(const ChatRequest& req) {
    auto it = transcript_.find(prompt_key(req.prompt));
    if (it == transcript_.end()) {
        throw TransportError("transcript has no entry for prompt hash " +
                             prompt_key(req.prompt));
    }
    return it->second;
}

std::unique_ptr<ChatClient> make_client(const std::string& spec, const ProviderProfile& profile,
                                        const std::map<std::string, std::string>& oracle_answers,
                                        bool trace) {
    if (spec == "http" || spec.empty()) {
        return std::make_unique<HttpChatClient>(profile, trace);
    }
    if (spec == "mock:oracle") return std::make_unique<OracleClient>(oracle_answers);
    if (spec.rfind("mock:random:", 0) == 0) {
        return std::make_unique<RandomClient>(std::stoull(spec.substr(12)));
    }
    if (spec.rfind("mock:script:", 0) == 0) {
        return std::make_unique<ScriptClient>(spec.substr(12));
    }
    throw ConfigError("unknown provider spec: " + spec);
}

}  // namespace kgrag
