#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pairjudge/types.hpp"
#include "pairjudge/verdict.hpp"

namespace pairjudge {

/// Version tag baked into request digests; bump on any template change so
/// cached verdicts from older templates never collide with new ones.
inline constexpr std::string_view kPromptTemplateVersion = "grm-pairwise-v1";

/// The scoring prompt as a format string. Placeholders {prompt},
/// {response_1}, {response_2}; doubled braces are literals.
std::string_view judge_prompt_template();

/// A rendered scoring prompt, split into the chat roles the wire format
/// needs. user_text still contains the literal `<image>` slot marker;
/// full_text() is the canonical byte-stable rendering.
struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    std::vector<std::string> image_refs;

    std::string full_text() const { return system_text + user_text; }
};

RenderedPrompt render_judge_prompt(const PromptContext& context, const CandidateResponse& first,
                                   const CandidateResponse& second);

/// One pairwise scoring call. Slot order is meaningful: (first, second)
/// and (second, first) are different requests with different digests.
struct JudgeRequest {
    PromptContext context;
    CandidateResponse first;
    CandidateResponse second;
    std::string judge_id;
    std::string template_version{kPromptTemplateVersion};
};

/// Digest of one image reference (the engine hashes the reference string,
/// never pixel data).
std::string image_ref_digest(std::string_view ref);

/// Order-sensitive digest of (template_version, judge_id, prompt, images,
/// first text, second text). Doubles as the cache key.
std::string request_digest(const JudgeRequest& request);

struct JudgeVerdict {
    std::string request_digest;
    std::string raw_text;
    std::variant<ParsedVerdict, ParseError> parsed;
    std::chrono::microseconds latency{0};
    int attempt_count = 1;
    bool cache_hit = false;
};

/// Score pair when the verdict parsed, nullopt otherwise.
std::optional<ScorePair> verdict_scores(const JudgeVerdict& verdict);

/// Builds a verdict from raw judge output: computes the digest and runs the
/// parser. Malformed text is a ParseError inside the verdict, never a throw.
JudgeVerdict make_verdict(const JudgeRequest& request, std::string raw_text);

/// Retryable failure while obtaining a verdict (network, decode). The
/// scheduler catches these and applies its retry policy.
class JudgeCallError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TransportError : public JudgeCallError {
public:
    explicit TransportError(const std::string& what, int status = 0)
        : JudgeCallError(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class DecodeError : public JudgeCallError {
public:
    using JudgeCallError::JudgeCallError;
};

/// Judge backend interface. compare() must be safe to call from multiple
/// threads concurrently.
class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual JudgeVerdict compare(const JudgeRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// Fixture-backed mock keyed by the ordered (first.text, second.text) pair.
class ScriptedJudge : public JudgeBackend {
public:
    ScriptedJudge() = default;

    void set_reply(std::string first_text, std::string second_text, std::string reply);
    void set_default_reply(std::string reply);

    /// Loads JSONL fixture lines {"first":..., "second":..., "reply":...};
    /// a line {"default":...} sets the fallback reply.
    static std::shared_ptr<ScriptedJudge> load(const std::filesystem::path& path);

    JudgeVerdict compare(const JudgeRequest& request) override;
    std::string name() const override { return "scripted"; }

    std::int64_t call_count() const { return calls_.load(); }

private:
    std::map<std::pair<std::string, std::string>, std::string> replies_;
    std::optional<std::string> default_reply_;
    std::atomic<std::int64_t> calls_{0};
};

/// Wraps a reply function; the workhorse for deterministic test judges.
class CallbackJudge : public JudgeBackend {
public:
    using ReplyFn = std::function<std::string(const JudgeRequest&)>;

    CallbackJudge(std::string name, ReplyFn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

    JudgeVerdict compare(const JudgeRequest& request) override;
    std::string name() const override { return name_; }

private:
    std::string name_;
    ReplyFn fn_;
};

class UnknownResponseIdError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Synthetic judge over latent per-response qualities. Scores are
/// clamp(q + noise, 1, 10) with Gaussian noise derived from
/// (seed, request digest, slot), so every ordered call draws fresh noise yet
/// repeating the same request reproduces the same verdict exactly.
class NoisyOracleJudge : public JudgeBackend {
public:
    NoisyOracleJudge(std::unordered_map<std::string, double> qualities, double noise_sigma,
                     std::uint64_t seed);

    JudgeVerdict compare(const JudgeRequest& request) override;
    std::string name() const override { return "noisy-oracle"; }

private:
    double score_for(const std::string& response_id, const std::string& digest, int slot) const;

    std::unordered_map<std::string, double> qualities_;
    double noise_sigma_;
    std::uint64_t seed_;
};

}  // namespace pairjudge
