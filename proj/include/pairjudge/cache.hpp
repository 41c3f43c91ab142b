#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "pairjudge/judge.hpp"

namespace pairjudge {

struct CacheStats {
    std::size_t entries = 0;
    std::int64_t hits = 0;
    std::int64_t misses = 0;
    std::int64_t io_failures = 0;
};

/// Append-only JSONL verdict store keyed by request digest.
///
/// The full file is indexed into memory on open; store() appends one line and
/// flushes. Persistence failures never fail a run: the entry stays usable in
/// memory and io_failures counts the problem for the operator. Thread-safe.
class VerdictCache {
public:
    explicit VerdictCache(std::filesystem::path path);

    /// Raw judge text for the digest, if cached.
    std::optional<std::string> lookup(const std::string& key);

    /// Records raw text under the digest. A key that is already present is
    /// left untouched (first write wins), keeping the file free of duplicates
    /// when concurrent workers miss on the same request.
    void store(const std::string& key, const std::string& raw_text, const std::string& judge_id,
               const std::string& template_version);

    /// Drops every entry and truncates the backing file.
    void clear();

    std::size_t size() const;
    CacheStats stats() const;
    const std::filesystem::path& path() const { return path_; }

private:
    void load_existing();

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::string> raw_by_key_;
    std::int64_t hits_ = 0;
    std::int64_t misses_ = 0;
    std::int64_t io_failures_ = 0;
};

/// Backend decorator that consults a VerdictCache before the wrapped judge.
/// Hits are re-parsed from the stored raw text, so cached and fresh verdicts
/// go through the identical parsing path; hits carry cache_hit = true.
class CachedJudge : public JudgeBackend {
public:
    CachedJudge(std::shared_ptr<JudgeBackend> inner, std::shared_ptr<VerdictCache> cache);

    JudgeVerdict compare(const JudgeRequest& request) override;
    std::string name() const override { return inner_->name() + "+cache"; }

private:
    std::shared_ptr<JudgeBackend> inner_;
    std::shared_ptr<VerdictCache> cache_;
};

}  // namespace pairjudge
