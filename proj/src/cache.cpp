#include "pairjudge/cache.hpp"

#include <chrono>
#include <fstream>
#include <utility>

#include <json.hpp>

namespace pairjudge {

VerdictCache::VerdictCache(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path(), ec);
        if (ec) {
            ++io_failures_;
        }
    }
    load_existing();
}

void VerdictCache::load_existing() {
    std::ifstream in(path_);
    if (!in) {
        return;  // fresh cache
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json entry = nlohmann::json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.contains("key") || !entry.contains("raw_text")) {
            ++io_failures_;  // truncated or corrupt line: skip, keep the rest
            continue;
        }
        raw_by_key_[entry.at("key").get<std::string>()] =
            entry.at("raw_text").get<std::string>();
    }
}

std::optional<std::string> VerdictCache::lookup(const std::string& key) {
    std::lock_guard lock(mutex_);
    auto it = raw_by_key_.find(key);
    if (it == raw_by_key_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void VerdictCache::store(const std::string& key, const std::string& raw_text,
                         const std::string& judge_id, const std::string& template_version) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = raw_by_key_.emplace(key, raw_text);
    if (!inserted) {
        return;
    }
    nlohmann::json entry = {
        {"key", key},
        {"raw_text", raw_text},
        {"judge_id", judge_id},
        {"template_version", template_version},
        {"timestamp_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count()},
    };
    std::ofstream out(path_, std::ios::app);
    if (!out) {
        ++io_failures_;
        return;
    }
    out << entry.dump() << '\n';
    out.flush();
    if (!out) {
        ++io_failures_;
    }
}

void VerdictCache::clear() {
    std::lock_guard lock(mutex_);
    raw_by_key_.clear();
    std::ofstream out(path_, std::ios::trunc);
    if (!out) {
        ++io_failures_;
    }
}

std::size_t VerdictCache::size() const {
    std::lock_guard lock(mutex_);
    return raw_by_key_.size();
}

CacheStats VerdictCache::stats() const {
    std::lock_guard lock(mutex_);
    return {raw_by_key_.size(), hits_, misses_, io_failures_};
}

CachedJudge::CachedJudge(std::shared_ptr<JudgeBackend> inner, std::shared_ptr<VerdictCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

JudgeVerdict CachedJudge::compare(const JudgeRequest& request) {
    const std::string key = request_digest(request);
    if (auto raw = cache_->lookup(key)) {
        JudgeVerdict verdict = make_verdict(request, std::move(*raw));
        verdict.cache_hit = true;
        return verdict;
    }
    JudgeVerdict verdict = inner_->compare(request);
    cache_->store(key, verdict.raw_text, request.judge_id, request.template_version);
    return verdict;
}

}  // namespace pairjudge
