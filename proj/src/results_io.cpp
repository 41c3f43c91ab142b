#include "pairjudge/results_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace pairjudge {

namespace {

using nlohmann::json;

constexpr const char* kFixedColumns[] = {"record_id", "judge_id", "cache_hit", "timestamp_ms"};

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

json record_to_json(const ResultRecord& record) {
    json provenance{{"judge_id", record.provenance.judge_id},
                    {"cache_hit", record.provenance.cache_hit}};
    if (record.provenance.timestamp_ms.has_value()) {
        provenance["timestamp_ms"] = *record.provenance.timestamp_ms;
    }
    return json{{"record_id", record.record_id},
                {"payload", record.payload},
                {"provenance", provenance}};
}

ResultRecord record_from_json(const json& object) {
    ResultRecord record;
    record.record_id = object.at("record_id").get<std::string>();
    record.payload = object.at("payload");
    const json& provenance = object.at("provenance");
    record.provenance.judge_id = provenance.at("judge_id").get<std::string>();
    record.provenance.cache_hit = provenance.at("cache_hit").get<bool>();
    if (provenance.contains("timestamp_ms")) {
        record.provenance.timestamp_ms = provenance.at("timestamp_ms").get<std::int64_t>();
    }
    return record;
}

std::size_t write_jsonl(std::span<const ResultRecord> records, std::ofstream& out) {
    for (const auto& record : records) {
        out << record_to_json(record).dump() << '\n';
    }
    return records.size();
}

std::size_t write_csv(std::span<const ResultRecord> records, std::ofstream& out) {
    if (records.empty()) return 0;
    std::set<std::string> payload_keys;
    for (const auto& record : records) {
        for (const auto& item : record.payload.items()) payload_keys.insert(item.key());
    }
    std::vector<std::string> columns(std::begin(kFixedColumns), std::end(kFixedColumns));
    columns.insert(columns.end(), payload_keys.begin(), payload_keys.end());

    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_escape(columns[i]);
    }
    out << '\n';

    for (const auto& record : records) {
        json row{{"record_id", record.record_id},
                 {"judge_id", record.provenance.judge_id},
                 {"cache_hit", record.provenance.cache_hit}};
        if (record.provenance.timestamp_ms.has_value()) {
            row["timestamp_ms"] = *record.provenance.timestamp_ms;
        }
        for (const auto& item : record.payload.items()) row[item.key()] = item.value();
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i > 0) out << ',';
            if (row.contains(columns[i])) out << csv_escape(row[columns[i]].dump());
        }
        out << '\n';
    }
    return records.size();
}

std::vector<ResultRecord> read_jsonl(std::ifstream& in, const std::filesystem::path& path) {
    std::vector<ResultRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json object = json::parse(line, nullptr, false);
        if (object.is_discarded()) {
            throw IoError("malformed result line " + std::to_string(line_no) + " in " +
                          path.string());
        }
        records.push_back(record_from_json(object));
    }
    return records;
}

std::vector<ResultRecord> read_csv(std::ifstream& in, const std::filesystem::path& path) {
    std::vector<ResultRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;
    std::vector<std::string> columns = split_csv_row(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_row(line);
        if (cells.size() != columns.size()) {
            throw IoError("csv row " + std::to_string(line_no) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(columns.size()) + " in " + path.string());
        }
        ResultRecord record;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (cells[i].empty()) continue;
            json value = json::parse(cells[i], nullptr, false);
            if (value.is_discarded()) {
                throw IoError("malformed csv cell at row " + std::to_string(line_no));
            }
            const std::string& column = columns[i];
            if (column == "record_id") record.record_id = value.get<std::string>();
            else if (column == "judge_id") record.provenance.judge_id = value.get<std::string>();
            else if (column == "cache_hit") record.provenance.cache_hit = value.get<bool>();
            else if (column == "timestamp_ms")
                record.provenance.timestamp_ms = value.get<std::int64_t>();
            else record.payload[column] = value;
        }
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace

std::size_t write_results(std::span<const ResultRecord> records,
                          const std::filesystem::path& path, ResultFormat format) {
    std::ofstream out(path, std::ios::trunc);
    if (!out.is_open()) {
        throw IoError("cannot open for writing: " + path.string());
    }
    std::size_t written =
        format == ResultFormat::JsonLines ? write_jsonl(records, out) : write_csv(records, out);
    out.flush();
    if (!out.good()) {
        throw IoError("write failed: " + path.string());
    }
    return written;
}

std::vector<ResultRecord> read_results(const std::filesystem::path& path, ResultFormat format) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw IoError("cannot open for reading: " + path.string());
    }
    return format == ResultFormat::JsonLines ? read_jsonl(in, path) : read_csv(in, path);
}

}  // namespace pairjudge
