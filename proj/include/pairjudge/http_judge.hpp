#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "pairjudge/judge.hpp"

namespace pairjudge {

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
/// The bearer token is read from the environment variable named by auth_env
/// (never from a flag or config file), once, at backend construction.
struct HttpJudgeConfig {
    std::string base_url;  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string auth_env;  // empty: endpoint needs no auth
    int timeout_ms = 30000;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    std::string judge_id = "http";
};

/// Request body for one pairwise scoring call. The rendered user text is
/// split at each `<image>` marker and image references are interleaved as
/// image_url content parts; with no image references the content collapses
/// to a plain string. Exposed separately so tests can pin the wire format
/// without a server.
nlohmann::json build_chat_request(const HttpJudgeConfig& config, const JudgeRequest& request);

/// Judge backend speaking the chat-completions wire format over HTTP(S).
/// Network and HTTP-status failures raise TransportError; a 2xx reply whose
/// body cannot be decoded raises DecodeError. Retry is the caller's job.
class HttpChatJudge : public JudgeBackend {
public:
    explicit HttpChatJudge(HttpJudgeConfig config);

    JudgeVerdict compare(const JudgeRequest& request) override;
    std::string name() const override { return "http"; }

    const HttpJudgeConfig& config() const { return config_; }

private:
    HttpJudgeConfig config_;
    std::string bearer_token_;  // empty when auth_env is empty
};

}  // namespace pairjudge
