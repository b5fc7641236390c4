#pragma once

// CSV tables with a versioned header, and JSON run summaries.

#include "calib/verify.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace calib {

inline constexpr int kReportSchema = 1;

struct Table {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string schema_line(const std::string& kind, int version = kReportSchema) {
    return "# calib-report schema=" + std::to_string(version) + " kind=" + kind;
}

inline std::string format_number(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

inline void write_csv(std::ostream& os, const Table& t) {
    os << schema_line(t.kind) << '\n';
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << '\n';
    for (const auto& r : t.rows) {
        if (r.size() != t.columns.size()) throw IoError("row width does not match the column count");
        for (std::size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << format_number(r[j]);
        os << '\n';
    }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write '" + path.string() + "'");
    return os;
}

inline void write_csv(const std::filesystem::path& path, const Table& t) {
    auto os = open_output(path);
    write_csv(os, t);
    if (!os) throw IoError("write failed for '" + path.string() + "'");
}

/// Reads a table written by write_csv; rejects any other schema version.
inline Table read_csv(std::istream& is, int expected = kReportSchema) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty report");
    const std::string prefix = "# calib-report schema=";
    if (line.rfind(prefix, 0) != 0) throw IoError("missing report header");
    std::istringstream h(line.substr(prefix.size()));
    int version = -1;
    h >> version;
    if (version != expected)
        throw IoError("report schema " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(expected) + ")");
    Table t;
    std::string tok;
    while (h >> tok)
        if (tok.rfind("kind=", 0) == 0) t.kind = tok.substr(5);
    if (!std::getline(is, line)) throw IoError("missing column line");
    {
        std::istringstream c(line);
        while (std::getline(c, tok, ',')) t.columns.push_back(tok);
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        std::istringstream c(line);
        while (std::getline(c, tok, ',')) r.push_back(std::stod(tok));
        if (r.size() != t.columns.size()) throw IoError("malformed report row");
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline Table read_csv(const std::filesystem::path& path, int expected = kReportSchema) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    return read_csv(is, expected);
}

inline Table suite_table(const SuiteReport& r) { return {r.suite, r.columns, r.rows}; }

using Json = nlohmann::ordered_json;

inline Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(format_number(x)); }

inline Json suite_json(const SuiteReport& r) {
    Json j;
    j["suite"] = r.suite;
    j["passed"] = r.passed();
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json e;
        e["id"] = c.id;
        e["pass"] = c.pass;
        e["value"] = number_json(c.value);
        e["threshold"] = number_json(c.threshold);
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    Json k = Json::object();
    for (const auto& [name, v] : r.constants) k[name] = number_json(v);
    j["constants"] = std::move(k);
    return j;
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
    auto os = open_output(path);
    os << j.dump(2) << '\n';
    if (!os) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace calib
