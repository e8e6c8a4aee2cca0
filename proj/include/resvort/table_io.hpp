#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace resvort {

// Delimited-text emission: comma separated, '#'-prefixed header lines,
// 9 significant digits, locale-independent, newline terminated.  Files are
// written to a temporary and atomically renamed.

std::string format_g9(double v);

struct Column {
    std::string name;
    std::vector<double> values;
};

struct Table {
    std::vector<std::string> comments;  // emitted as "# ..." lines
    std::vector<Column> columns;
};

std::string render_table(const Table& t);
void write_file_atomic(const std::string& path, const std::string& content);

uint64_t fnv1a64(const std::string& bytes);

struct ManifestEntry {
    std::string file;
    uint64_t hash = 0;
    size_t bytes = 0;
};

struct TaskRecord {
    std::string name;
    double wall_ms = 0.0;
    double error_estimate = 0.0;
    std::vector<ManifestEntry> outputs;
    std::vector<std::string> notes;
};

struct RunManifest {
    std::string tool_version;
    std::string config_echo;
    std::vector<TaskRecord> tasks;
};

// Structured manifest (JSON), one per run, self-contained.
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace resvort
