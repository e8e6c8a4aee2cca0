#include "resvort/table_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace resvort {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string render_table(const Table& t) {
    std::string out;
    for (const std::string& c : t.comments) out += "# " + c + "\n";
    out += "#";
    for (size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : " ") + t.columns[i].name;
    out += "\n";
    size_t rows = t.columns.empty() ? 0 : t.columns.front().values.size();
    for (const Column& c : t.columns)
        if (c.values.size() != rows)
            throw std::runtime_error("table columns have unequal lengths");
    for (size_t r = 0; r < rows; ++r) {
        for (size_t i = 0; i < t.columns.size(); ++i) {
            if (i) out += ",";
            out += format_g9(t.columns[i].values[r]);
        }
        out += "\n";
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::ios_base::failure("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw std::ios_base::failure("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool_version"] = m.tool_version;
    j["config"] = m.config_echo;
    j["tasks"] = nlohmann::ordered_json::array();
    for (const TaskRecord& t : m.tasks) {
        nlohmann::ordered_json jt;
        jt["name"] = t.name;
        jt["wall_ms"] = t.wall_ms;
        jt["error_estimate"] = t.error_estimate;
        jt["outputs"] = nlohmann::ordered_json::array();
        for (const ManifestEntry& e : t.outputs) {
            char hex[20];
            std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)e.hash);
            jt["outputs"].push_back({{"file", e.file}, {"fnv1a64", hex}, {"bytes", e.bytes}});
        }
        jt["notes"] = t.notes;
        j["tasks"].push_back(jt);
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace resvort
