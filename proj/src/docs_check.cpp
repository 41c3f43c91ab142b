#include "pairjudge/docs_check.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "pairjudge/cli_app.hpp"

namespace fs = std::filesystem;

namespace pairjudge {

namespace {

constexpr std::string_view kEmbedPrefix = "<!-- embed: ";
constexpr std::string_view kEmbedSuffix = " -->";
constexpr std::string_view kFence = "```";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string::size_type pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            if (pos < text.size()) {
                lines.push_back(text.substr(pos));
            }
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::string strip_one_trailing_newline(std::string text) {
    if (!text.empty() && text.back() == '\n') {
        text.pop_back();
    }
    if (!text.empty() && text.back() == '\r') {
        text.pop_back();
    }
    return text;
}

void check_embeds(const fs::path& doc_path, const std::vector<std::string>& lines,
                  const fs::path& fixtures_dir, DocCheckResult& result) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (!line.starts_with(kEmbedPrefix) || !line.ends_with(kEmbedSuffix)) {
            continue;
        }
        const std::string rel = line.substr(
            kEmbedPrefix.size(), line.size() - kEmbedPrefix.size() - kEmbedSuffix.size());
        const std::string where = doc_path.filename().string() + " line " + std::to_string(i + 1);

        // The fenced block must start on the next line.
        if (i + 1 >= lines.size() || !lines[i + 1].starts_with(kFence)) {
            result.drifts.push_back(where + ": embed marker for '" + rel +
                                    "' is not followed by a fenced code block");
            continue;
        }
        std::size_t close = i + 2;
        while (close < lines.size() && lines[close] != kFence) {
            ++close;
        }
        if (close >= lines.size()) {
            result.drifts.push_back(where + ": unterminated fenced block for '" + rel + "'");
            continue;
        }
        std::string embedded;
        for (std::size_t j = i + 2; j < close; ++j) {
            embedded += lines[j];
            embedded += '\n';
        }

        const fs::path fixture = fixtures_dir / rel;
        if (!fs::exists(fixture)) {
            result.drifts.push_back(where + ": embedded fixture '" + rel + "' does not exist");
            continue;
        }
        if (strip_one_trailing_newline(embedded) !=
            strip_one_trailing_newline(read_file(fixture))) {
            result.drifts.push_back(where + ": embedded copy of '" + rel +
                                    "' differs from the fixture file");
        }
    }
}

void check_flags(const fs::path& doc_path, const std::string& text,
                 const std::set<std::string>& registry, DocCheckResult& result) {
    static const std::regex flag_pattern("--[a-z][a-z0-9-]*");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), flag_pattern);
         it != std::sregex_iterator(); ++it) {
        const std::string flag = it->str();
        if (!registry.contains(flag)) {
            result.drifts.push_back(doc_path.filename().string() + ": documented flag '" + flag +
                                    "' is not accepted by the command-line interface");
        }
    }
}

}  // namespace

DocCheckResult check_docs(const fs::path& fixtures_dir, const fs::path& docs_dir) {
    DocCheckResult result;
    if (!fs::is_directory(fixtures_dir)) {
        result.drifts.push_back("fixtures directory '" + fixtures_dir.string() +
                                "' does not exist");
    }
    if (!fs::is_directory(docs_dir)) {
        result.drifts.push_back("docs directory '" + docs_dir.string() + "' does not exist");
    }
    if (!result.drifts.empty()) {
        result.ok = false;
        return result;
    }

    const std::vector<std::string> registry_list = cli_flag_registry();
    const std::set<std::string> registry(registry_list.begin(), registry_list.end());

    std::vector<fs::path> pages;
    for (const auto& entry : fs::directory_iterator(docs_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".md") {
            pages.push_back(entry.path());
        }
    }
    std::sort(pages.begin(), pages.end());

    for (const fs::path& page : pages) {
        const std::string text = read_file(page);
        check_embeds(page, split_lines(text), fixtures_dir, result);
        check_flags(page, text, registry, result);
    }
    result.ok = result.drifts.empty();
    return result;
}

}  // namespace pairjudge
