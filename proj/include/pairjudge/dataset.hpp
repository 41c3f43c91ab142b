#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairjudge/types.hpp"

namespace pairjudge {

/// JSONL field names. Override to adapt foreign preference exports without
/// rewriting them; defaults match the schemas in docs/schemas.md.
struct DatasetSchema {
    std::string prompt_key = "prompt";
    std::string image_key = "image";
    std::string images_key = "images";
    std::string response_1_key = "response_1";
    std::string response_2_key = "response_2";
    std::string preferred_key = "preferred";
    std::string score_1_key = "score_1";
    std::string score_2_key = "score_2";
    std::string responses_key = "responses";
};

enum class LoadErrorKind { IoError, MalformedLine, MissingField, InvalidLabel, EmptyResponseSet };

const char* to_string(LoadErrorKind kind);

/// Loader failure with the 1-based line number it occurred on (0 for
/// file-level failures).
class LoadError : public std::runtime_error {
public:
    LoadError(LoadErrorKind kind, std::size_t line_no, std::string detail);

    LoadErrorKind kind() const { return kind_; }
    std::size_t line_no() const { return line_no_; }
    const std::string& detail() const { return detail_; }

private:
    LoadErrorKind kind_;
    std::size_t line_no_;
    std::string detail_;
};

/// One prompt with the candidate responses sampled for it. Grouping of
/// equal prompts happens downstream; the loader never merges lines.
struct Rollout {
    PromptContext context;
    std::vector<CandidateResponse> responses;
};

/// Reads annotated preference pairs, one JSON object per line. Blank lines
/// are skipped; any other irregularity throws LoadError with the line number.
std::vector<PreferenceRecord> load_preference_dataset(const std::filesystem::path& path,
                                                      const DatasetSchema& schema = {});

/// Reads rollout groups. Each response gets the deterministic id
/// "r<line>_<index>", unique within the file.
std::vector<Rollout> load_rollouts(const std::filesystem::path& path,
                                   const DatasetSchema& schema = {});

}  // namespace pairjudge
