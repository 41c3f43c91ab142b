#include "pairjudge/http_judge.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

#include <httplib.h>

namespace pairjudge {

namespace {

constexpr std::string_view kImageMarker = "<image>";

nlohmann::json text_part(std::string text) {
    return {{"type", "text"}, {"text", std::move(text)}};
}

nlohmann::json image_part(const std::string& ref) {
    return {{"type", "image_url"}, {"image_url", {{"url", ref}}}};
}

/// Interleaves image parts at the marker positions; marker i consumes
/// image ref i, and refs left over after the last marker are appended there.
nlohmann::json user_content(const RenderedPrompt& rendered) {
    const std::string& text = rendered.user_text;
    const auto& refs = rendered.image_refs;

    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = text.find(kImageMarker, pos);
        if (hit == std::string::npos) {
            segments.push_back(text.substr(pos));
            break;
        }
        segments.push_back(text.substr(pos, hit - pos));
        pos = hit + kImageMarker.size();
    }
    const std::size_t marker_count = segments.size() - 1;

    if (refs.empty()) {
        std::string joined;
        for (const auto& seg : segments) {
            joined += seg;
        }
        return joined;  // text-only request: plain string content
    }

    nlohmann::json parts = nlohmann::json::array();
    std::size_t next_ref = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!segments[i].empty()) {
            parts.push_back(text_part(segments[i]));
        }
        if (i < marker_count) {
            if (next_ref < refs.size()) {
                parts.push_back(image_part(refs[next_ref++]));
            }
            if (i + 1 == marker_count) {
                while (next_ref < refs.size()) {
                    parts.push_back(image_part(refs[next_ref++]));
                }
            }
        }
    }
    if (marker_count == 0) {
        // No marker in the text: put the images first, before the text parts.
        nlohmann::json fronted = nlohmann::json::array();
        for (const auto& ref : refs) {
            fronted.push_back(image_part(ref));
        }
        for (auto& part : parts) {
            fronted.push_back(std::move(part));
        }
        return fronted;
    }
    return parts;
}

}  // namespace

nlohmann::json build_chat_request(const HttpJudgeConfig& config, const JudgeRequest& request) {
    RenderedPrompt rendered = render_judge_prompt(request.context, request.first, request.second);
    nlohmann::json body = {
        {"model", config.model},
        {"messages",
         {{{"role", "system"}, {"content", rendered.system_text}},
          {{"role", "user"}, {"content", user_content(rendered)}}}},
        {"temperature", config.temperature},
    };
    if (config.max_tokens) {
        body["max_tokens"] = *config.max_tokens;
    }
    return body;
}

HttpChatJudge::HttpChatJudge(HttpJudgeConfig config) : config_(std::move(config)) {
    if (!config_.auth_env.empty()) {
        const char* token = std::getenv(config_.auth_env.c_str());
        if (token == nullptr || *token == '\0') {
            throw std::invalid_argument("environment variable '" + config_.auth_env +
                                        "' is not set (expected the API token there)");
        }
        bearer_token_ = token;
    }
}

JudgeVerdict HttpChatJudge::compare(const JudgeRequest& request) {
    const auto started = std::chrono::steady_clock::now();

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(config_.timeout_ms));
    httplib::Headers headers;
    if (!bearer_token_.empty()) {
        headers.emplace("Authorization", "Bearer " + bearer_token_);
    }

    const std::string body = build_chat_request(config_, request).dump();
    httplib::Result res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
        throw TransportError("request to " + config_.base_url + config_.path +
                             " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status),
                             res->status);
    }

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
        throw DecodeError("endpoint returned a 2xx body that is not JSON");
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
        throw DecodeError("endpoint reply has no choices");
    }
    const nlohmann::json& message = reply["choices"][0].value("message", nlohmann::json());
    if (!message.contains("content") || !message["content"].is_string()) {
        throw DecodeError("endpoint reply has no message content");
    }

    JudgeVerdict verdict = make_verdict(request, message["content"].get<std::string>());
    verdict.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - started);
    return verdict;
}

}  // namespace pairjudge
