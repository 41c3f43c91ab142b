#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pairjudge {

enum class ResultFormat { JsonLines, Csv };

struct Provenance {
    std::string judge_id;
    bool cache_hit = false;
    // Omitted by default so result files stay byte-identical across reruns.
    std::optional<std::int64_t> timestamp_ms;

    bool operator==(const Provenance&) const = default;
};

/// One persisted result row. The payload is a flat JSON object of scalars
/// (scores, rewards, counts); record_id is derived from content so it is
/// stable across reruns with the same inputs and seed.
struct ResultRecord {
    std::string record_id;
    nlohmann::json payload = nlohmann::json::object();
    Provenance provenance;

    bool operator==(const ResultRecord&) const = default;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes records to `path`, returns the count written. JsonLines appends one
/// object per line; Csv writes a header row then one row per record, cells
/// JSON-encoded so reading back reproduces types exactly.
std::size_t write_results(std::span<const ResultRecord> records,
                          const std::filesystem::path& path, ResultFormat format);

std::vector<ResultRecord> read_results(const std::filesystem::path& path, ResultFormat format);

}  // namespace pairjudge
