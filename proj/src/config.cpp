#include "resvort/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace resvort {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    int col = 0;
};

using Section = std::map<std::string, RawEntry>;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"model", {"field", "binding_energy"}},
        {"contour",
         {"rotation_angle", "trench_depth", "near_origin_split", "rel_tol", "abs_tol",
          "max_panels", "truncation_bound"}},
        {"seeds", {"values", "im", "level"}},
        {"sweep", {"field_min", "field_max", "initial_step", "max_step"}},
        {"window", {"xmin", "xmax", "ymin", "ymax", "nx", "ny"}},
        {"stabilization", {"bracket_lo", "bracket_hi", "tol_field"}},
        {"run", {"rng_seed", "overlap_tol"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const RawEntry& e, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        throw ConfigError("value of '" + key + "' is not a number: '" + e.value + "'",
                          e.line, e.col);
    return v;
}

long long parse_int(const RawEntry& e, const std::string& key) {
    long long v = 0;
    auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || p != e.value.data() + e.value.size())
        throw ConfigError("value of '" + key + "' is not an integer: '" + e.value + "'",
                          e.line, e.col);
    return v;
}

std::vector<double> parse_list(const RawEntry& e, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("empty entry in list '" + key + "'", e.line, e.col);
        char* end = nullptr;
        out.push_back(std::strtod(item.c_str(), &end));
        if (end == item.c_str() || *end != '\0')
            throw ConfigError("list entry in '" + key + "' is not a number: '" + item + "'",
                              e.line, e.col);
    }
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header", lineno, 1);
            current = trim(line.substr(1, line.size() - 2));
            if (!schema().count(current))
                throw ConfigError("unknown section [" + current + "]", lineno, 1);
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", lineno, 1);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (current.empty())
            throw ConfigError("key '" + key + "' outside any section", lineno, 1);
        if (!schema().at(current).count(key))
            throw ConfigError("unknown key '" + key + "' in section [" + current + "]",
                              lineno, int(raw.find(key)) + 1);
        const int col = int(raw.find('=') + 2);
        sections[current][key] = {val, lineno, col};
    }

    RunConfig cfg;
    auto get = [&](const std::string& sec, const std::string& key) -> const RawEntry* {
        auto si = sections.find(sec);
        if (si == sections.end()) return nullptr;
        auto ki = si->second.find(key);
        return ki == si->second.end() ? nullptr : &ki->second;
    };
    auto dbl = [&](const std::string& sec, const std::string& key, double& out) {
        if (const RawEntry* e = get(sec, key)) out = parse_double(*e, key);
    };

    dbl("model", "field", cfg.model.field);
    dbl("model", "binding_energy", cfg.model.binding_energy);
    dbl("contour", "rotation_angle", cfg.contour.rotation_angle);
    dbl("contour", "trench_depth", cfg.contour.trench_depth);
    dbl("contour", "near_origin_split", cfg.contour.near_origin_split);
    dbl("contour", "rel_tol", cfg.contour.rel_tol);
    dbl("contour", "abs_tol", cfg.contour.abs_tol);
    dbl("contour", "truncation_bound", cfg.contour.truncation_bound);
    if (const RawEntry* e = get("contour", "max_panels"))
        cfg.contour.max_panels = int(parse_int(*e, "max_panels"));
    if (const RawEntry* e = get("seeds", "values")) cfg.seeds_re = parse_list(*e, "values");
    dbl("seeds", "im", cfg.seed_im);
    if (const RawEntry* e = get("seeds", "level")) cfg.level_index = int(parse_int(*e, "level"));
    dbl("sweep", "field_min", cfg.sweep.field_min);
    dbl("sweep", "field_max", cfg.sweep.field_max);
    dbl("sweep", "initial_step", cfg.sweep.initial_step);
    dbl("sweep", "max_step", cfg.sweep.max_step);
    dbl("window", "xmin", cfg.window.xmin);
    dbl("window", "xmax", cfg.window.xmax);
    dbl("window", "ymin", cfg.window.ymin);
    dbl("window", "ymax", cfg.window.ymax);
    if (const RawEntry* e = get("window", "nx")) cfg.window.nx = int(parse_int(*e, "nx"));
    if (const RawEntry* e = get("window", "ny")) cfg.window.ny = int(parse_int(*e, "ny"));
    dbl("stabilization", "bracket_lo", cfg.stabilization.bracket_lo);
    dbl("stabilization", "bracket_hi", cfg.stabilization.bracket_hi);
    dbl("stabilization", "tol_field", cfg.stabilization.tol_field);
    dbl("run", "overlap_tol", cfg.overlap_tol);
    if (const RawEntry* e = get("run", "rng_seed"))
        cfg.rng_seed = (unsigned long long)parse_int(*e, "rng_seed");

    // every numeric field validated before any computation
    auto fail = [&](const std::string& sec, const std::string& key, const std::string& why) {
        const RawEntry* e = get(sec, key);
        throw ConfigError("invalid " + key + ": " + why, e ? e->line : 0, e ? e->col : 0);
    };
    try {
        cfg.model.validate();
    } catch (const DomainError& ex) {
        fail("model", cfg.model.binding_energy >= 0 ? "binding_energy" : "field", ex.what());
    }
    try {
        cfg.contour.validate();
    } catch (const DomainError& ex) {
        fail("contour", "rotation_angle", ex.what());
    }
    if (cfg.window.nx < 2 || cfg.window.ny < 2) fail("window", "nx", "grid needs nx, ny >= 2");
    if (!(cfg.window.xmin < cfg.window.xmax)) fail("window", "xmin", "xmin must be < xmax");
    if (!(cfg.window.ymin < cfg.window.ymax)) fail("window", "ymin", "ymin must be < ymax");
    if (!(cfg.sweep.field_min < cfg.sweep.field_max))
        fail("sweep", "field_min", "field_min must be < field_max");
    if (!(cfg.sweep.initial_step > 0.0 && cfg.sweep.max_step > 0.0))
        fail("sweep", "initial_step", "steps must be positive");
    if (!(cfg.stabilization.tol_field > 0.0))
        fail("stabilization", "tol_field", "tol_field must be positive");
    if (!(cfg.overlap_tol > 0.0)) fail("run", "overlap_tol", "overlap_tol must be positive");
    for (double s : cfg.seeds_re)
        if (!(s > 0.0)) fail("seeds", "values", "seed energies must be positive");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace resvort
