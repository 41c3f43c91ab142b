#include "pairjudge/dataset.hpp"

#include <fstream>

#include <json.hpp>

namespace pairjudge {

namespace {

using nlohmann::json;

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

json parse_line(const std::string& line, std::size_t line_no) {
    json object = json::parse(line, nullptr, false);
    if (object.is_discarded() || !object.is_object()) {
        throw LoadError(LoadErrorKind::MalformedLine, line_no, "not a JSON object");
    }
    return object;
}

std::string require_string(const json& object, const std::string& key, std::size_t line_no) {
    auto it = object.find(key);
    if (it == object.end() || !it->is_string()) {
        throw LoadError(LoadErrorKind::MissingField, line_no, key);
    }
    return it->get<std::string>();
}

std::vector<std::string> read_image_refs(const json& object, const DatasetSchema& schema,
                                         std::size_t line_no) {
    std::vector<std::string> refs;
    if (auto it = object.find(schema.image_key); it != object.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw LoadError(LoadErrorKind::MalformedLine, line_no,
                            schema.image_key + " must be a string");
        }
        refs.push_back(it->get<std::string>());
    }
    if (auto it = object.find(schema.images_key); it != object.end() && !it->is_null()) {
        if (!it->is_array()) {
            throw LoadError(LoadErrorKind::MalformedLine, line_no,
                            schema.images_key + " must be an array");
        }
        for (const auto& ref : *it) {
            if (!ref.is_string()) {
                throw LoadError(LoadErrorKind::MalformedLine, line_no,
                                schema.images_key + " entries must be strings");
            }
            refs.push_back(ref.get<std::string>());
        }
    }
    return refs;
}

PromptContext read_context(const json& object, const DatasetSchema& schema, std::size_t line_no) {
    PromptContext context;
    context.prompt_text = require_string(object, schema.prompt_key, line_no);
    if (context.prompt_text.empty()) {
        throw LoadError(LoadErrorKind::MalformedLine, line_no, "empty prompt");
    }
    context.image_refs = read_image_refs(object, schema, line_no);
    if (auto it = object.find("metadata"); it != object.end() && it->is_object()) {
        for (const auto& [key, value] : it->items()) {
            context.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return context;
}

std::optional<double> read_optional_score(const json& object, const std::string& key,
                                          std::size_t line_no) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) {
        throw LoadError(LoadErrorKind::MalformedLine, line_no, key + " must be a number");
    }
    return it->get<double>();
}

template <typename PerLine>
void for_each_line(const std::filesystem::path& path, PerLine&& per_line) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw LoadError(LoadErrorKind::IoError, 0, "cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        per_line(line, line_no);
    }
}

}  // namespace

const char* to_string(LoadErrorKind kind) {
    switch (kind) {
        case LoadErrorKind::IoError: return "io_error";
        case LoadErrorKind::MalformedLine: return "malformed_line";
        case LoadErrorKind::MissingField: return "missing_field";
        case LoadErrorKind::InvalidLabel: return "invalid_label";
        case LoadErrorKind::EmptyResponseSet: return "empty_response_set";
    }
    return "unknown";
}

LoadError::LoadError(LoadErrorKind kind, std::size_t line_no, std::string detail)
    : std::runtime_error("load error (" + std::string(to_string(kind)) + ") at line " +
                         std::to_string(line_no) + ": " + detail),
      kind_(kind),
      line_no_(line_no),
      detail_(std::move(detail)) {}

std::vector<PreferenceRecord> load_preference_dataset(const std::filesystem::path& path,
                                                      const DatasetSchema& schema) {
    std::vector<PreferenceRecord> records;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        json object = parse_line(line, line_no);
        PreferenceRecord record;
        record.record_id = "r" + std::to_string(line_no);
        record.context = read_context(object, schema, line_no);
        record.response_a = {"r" + std::to_string(line_no) + "_a",
                             require_string(object, schema.response_1_key, line_no),
                             FinishState::Unknown};
        record.response_b = {"r" + std::to_string(line_no) + "_b",
                             require_string(object, schema.response_2_key, line_no),
                             FinishState::Unknown};
        auto preferred = object.find(schema.preferred_key);
        if (preferred == object.end() || preferred->is_null()) {
            throw LoadError(LoadErrorKind::MissingField, line_no, schema.preferred_key);
        }
        if (!preferred->is_number_integer()) {
            throw LoadError(LoadErrorKind::InvalidLabel, line_no, preferred->dump());
        }
        const auto label = preferred->get<int>();
        if (label != 1 && label != 2) {
            throw LoadError(LoadErrorKind::InvalidLabel, line_no, std::to_string(label));
        }
        record.preferred_label = label == 1 ? PreferredLabel::First : PreferredLabel::Second;
        record.annotated_score_a = read_optional_score(object, schema.score_1_key, line_no);
        record.annotated_score_b = read_optional_score(object, schema.score_2_key, line_no);
        records.push_back(std::move(record));
    });
    return records;
}

std::vector<Rollout> load_rollouts(const std::filesystem::path& path,
                                   const DatasetSchema& schema) {
    std::vector<Rollout> rollouts;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        json object = parse_line(line, line_no);
        Rollout rollout;
        rollout.context = read_context(object, schema, line_no);
        auto responses = object.find(schema.responses_key);
        if (responses == object.end() || !responses->is_array()) {
            throw LoadError(LoadErrorKind::MissingField, line_no, schema.responses_key);
        }
        if (responses->empty()) {
            throw LoadError(LoadErrorKind::EmptyResponseSet, line_no, "responses array is empty");
        }
        std::size_t index = 0;
        for (const auto& entry : *responses) {
            CandidateResponse response;
            response.response_id = "r" + std::to_string(line_no) + "_" + std::to_string(index);
            if (entry.is_string()) {
                response.text = entry.get<std::string>();
            } else if (entry.is_object()) {
                response.text = require_string(entry, "text", line_no);
                if (auto finish = entry.find("finish_state"); finish != entry.end()) {
                    if (!finish->is_string()) {
                        throw LoadError(LoadErrorKind::MalformedLine, line_no,
                                        "finish_state must be a string");
                    }
                    auto state = finish_state_from_string(finish->get<std::string>());
                    if (!state.has_value()) {
                        throw LoadError(LoadErrorKind::MalformedLine, line_no,
                                        "unknown finish_state " + finish->dump());
                    }
                    response.finish_state = *state;
                }
            } else {
                throw LoadError(LoadErrorKind::MalformedLine, line_no,
                                "responses entries must be strings or objects");
            }
            rollout.responses.push_back(std::move(response));
            ++index;
        }
        rollouts.push_back(std::move(rollout));
    });
    return rollouts;
}

}  // namespace pairjudge
