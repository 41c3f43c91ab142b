#include "pairjudge/judge.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "pairjudge/digest.hpp"
#include "pairjudge/rng.hpp"

namespace pairjudge {

namespace {

// Byte-exact scoring prompt. The "responeses" misspelling in the final line
// is part of the frozen template: fixing it would change every request digest
// and invalidate existing caches, so it stays until the version tag bumps.
constexpr std::string_view kTemplate =
    "You are a skilled expert at scoring responses. You should first generate a list of "
    "potential criteria to evaluate given responses based on them.\n"
    "\n"
    "Given the context of the conversation (the last round is the User's query) and multiple "
    "responses from the Assistant, you need to generate the [Evaluation Criteria] to score the "
    "responses. Based on the criteria, state potential other specific criteria to the query, "
    "the weights of different criteria, and then provide an overall comprehensive score upon "
    "them.\n"
    "\n"
    "Each score is an integer between 1 and 10, with a higher score indicating that the "
    "response meets the relevant criteria more closely. For example, a score of 1 means the "
    "response does not meet the criteria at all, a score of 6 means the response meets only "
    "some parts, and a score of 10 means the response perfectly meets the evaluation criteria. "
    "Before scoring, please analyze step by step. Your scoring needs to be as strict as "
    "possible.\n"
    "\n"
    "#### Conversation Context ####\n"
    "\n"
    "<image>{prompt}\n"
    "\n"
    "#### Responses to be Scored ####\n"
    "\n"
    "# Response 1: {response_1}\n"
    "\n"
    "# Response 2: {response_2}\n"
    "\n"
    "#### Output Format Requirements ####\n"
    "Output with three lines\n"
    "Specific Criteria: <Other potential criteria specific to the query and the context, and "
    "the weights of each criteria>.\n"
    "Analysis: <Compare different responses based on given Criteria>.\n"
    "Scores: <the overall comprehensive score of all responses in order, separate by comma in "
    "the boxed, e.g., boxed{{x, x}} if there exists 2 responeses>.";

constexpr std::string_view kUserSectionMarker = "#### Conversation Context ####";

// Single-pass substitution: {name} is replaced from `values`, {{ and }} are
// literal braces, and substituted text is never rescanned, so braces inside
// responses cannot trigger further substitution.
std::string render_template(std::string_view tpl,
                            const std::map<std::string_view, std::string_view>& values) {
    std::string out;
    out.reserve(tpl.size() + 256);
    for (std::size_t i = 0; i < tpl.size();) {
        char c = tpl[i];
        if (c == '{') {
            if (i + 1 < tpl.size() && tpl[i + 1] == '{') {
                out.push_back('{');
                i += 2;
                continue;
            }
            std::size_t close = tpl.find('}', i + 1);
            if (close == std::string_view::npos) {
                throw std::logic_error("prompt template has an unterminated placeholder");
            }
            std::string_view key = tpl.substr(i + 1, close - i - 1);
            auto it = values.find(key);
            if (it == values.end()) {
                throw std::logic_error("prompt template references unknown placeholder '" +
                                       std::string(key) + "'");
            }
            out.append(it->second);
            i = close + 1;
            continue;
        }
        if (c == '}' && i + 1 < tpl.size() && tpl[i + 1] == '}') {
            out.push_back('}');
            i += 2;
            continue;
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

std::string format_score(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace

std::string_view judge_prompt_template() { return kTemplate; }

RenderedPrompt render_judge_prompt(const PromptContext& context, const CandidateResponse& first,
                                   const CandidateResponse& second) {
    static const std::size_t split = kTemplate.find(kUserSectionMarker);
    const std::map<std::string_view, std::string_view> values = {
        {"prompt", context.prompt_text},
        {"response_1", first.text},
        {"response_2", second.text},
    };
    RenderedPrompt rendered;
    rendered.system_text = render_template(kTemplate.substr(0, split), values);
    rendered.user_text = render_template(kTemplate.substr(split), values);
    rendered.image_refs = context.image_refs;
    return rendered;
}

std::string image_ref_digest(std::string_view ref) { return sha256_hex(ref); }

std::string request_digest(const JudgeRequest& request) {
    std::vector<std::string> image_digests;
    image_digests.reserve(request.context.image_refs.size());
    for (const auto& ref : request.context.image_refs) {
        image_digests.push_back(image_ref_digest(ref));
    }
    std::vector<std::string_view> fields;
    fields.reserve(5 + image_digests.size());
    fields.push_back(request.template_version);
    fields.push_back(request.judge_id);
    fields.push_back(request.context.prompt_text);
    for (const auto& d : image_digests) {
        fields.push_back(d);
    }
    fields.push_back(request.first.text);
    fields.push_back(request.second.text);
    return digest_fields(std::span<const std::string_view>(fields));
}

std::optional<ScorePair> verdict_scores(const JudgeVerdict& verdict) {
    if (const auto* parsed = std::get_if<ParsedVerdict>(&verdict.parsed)) {
        return parsed->scores;
    }
    return std::nullopt;
}

JudgeVerdict make_verdict(const JudgeRequest& request, std::string raw_text) {
    JudgeVerdict verdict;
    verdict.request_digest = pairjudge::request_digest(request);
    verdict.parsed = parse_verdict_text(raw_text);
    verdict.raw_text = std::move(raw_text);
    return verdict;
}

void ScriptedJudge::set_reply(std::string first_text, std::string second_text,
                              std::string reply) {
    replies_[{std::move(first_text), std::move(second_text)}] = std::move(reply);
}

void ScriptedJudge::set_default_reply(std::string reply) { default_reply_ = std::move(reply); }

std::shared_ptr<ScriptedJudge> ScriptedJudge::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scripted judge fixture: " + path.string());
    }
    auto judge = std::make_shared<ScriptedJudge>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded()) {
            throw std::runtime_error("scripted judge fixture " + path.string() + " line " +
                                     std::to_string(line_no) + ": invalid JSON");
        }
        if (entry.contains("default")) {
            judge->set_default_reply(entry.at("default").get<std::string>());
            continue;
        }
        judge->set_reply(entry.at("first").get<std::string>(),
                         entry.at("second").get<std::string>(),
                         entry.at("reply").get<std::string>());
    }
    return judge;
}

JudgeVerdict ScriptedJudge::compare(const JudgeRequest& request) {
    calls_.fetch_add(1);
    auto it = replies_.find({request.first.text, request.second.text});
    const std::string* reply = nullptr;
    if (it != replies_.end()) {
        reply = &it->second;
    } else if (default_reply_) {
        reply = &*default_reply_;
    } else {
        throw DecodeError("scripted judge has no reply for this response pair");
    }
    return make_verdict(request, *reply);
}

JudgeVerdict CallbackJudge::compare(const JudgeRequest& request) {
    return make_verdict(request, fn_(request));
}

NoisyOracleJudge::NoisyOracleJudge(std::unordered_map<std::string, double> qualities,
                                   double noise_sigma, std::uint64_t seed)
    : qualities_(std::move(qualities)), noise_sigma_(noise_sigma), seed_(seed) {}

double NoisyOracleJudge::score_for(const std::string& response_id, const std::string& digest,
                                   int slot) const {
    auto it = qualities_.find(response_id);
    if (it == qualities_.end()) {
        throw UnknownResponseIdError("noisy oracle has no quality for response '" + response_id +
                                     "'");
    }
    RandomStream stream =
        RandomStream::from_label(seed_, digest + ":slot" + std::to_string(slot));
    double raw = it->second + noise_sigma_ * stream.next_gaussian();
    return std::clamp(raw, 1.0, 10.0);
}

JudgeVerdict NoisyOracleJudge::compare(const JudgeRequest& request) {
    const std::string digest = request_digest(request);
    double s1 = score_for(request.first.response_id, digest, 1);
    double s2 = score_for(request.second.response_id, digest, 2);
    std::string raw = "Specific Criteria: synthetic oracle draw.\n"
                      "Analysis: latent quality plus Gaussian noise, clamped to the score "
                      "range.\n"
                      "Scores: \\boxed{" +
                      format_score(s1) + ", " + format_score(s2) + "}";
    return make_verdict(request, std::move(raw));
}

}  // namespace pairjudge
