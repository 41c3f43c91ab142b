#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pairjudge {

struct DocCheckResult {
    bool ok = true;
    std::vector<std::string> drifts;  // human-readable divergence descriptions
};

/// Verifies that the documentation matches the artifacts it describes:
/// every `<!-- embed: <path> -->` marker's fenced code block must equal the
/// named fixture file byte-for-byte (one trailing newline ignored), and
/// every `--flag` token in a doc page must exist in the CLI flag registry.
/// Divergences are reported, not thrown, so a checker binary can list all
/// of them at once.
DocCheckResult check_docs(const std::filesystem::path& fixtures_dir,
                          const std::filesystem::path& docs_dir);

}  // namespace pairjudge
