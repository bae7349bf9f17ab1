#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prymsieve/error.hpp"
#include "prymsieve/walk.hpp"

namespace prymsieve {

/// Flat key=value experiment configuration. The canonical serialization
/// (sorted keys, one per line) is what gets hashed into every output file,
/// so reruns are attributable to an exact configuration.
class ExperimentConfig {
  public:
    ExperimentConfig() = default;

    static ExperimentConfig parse_text(const std::string& text) {
        ExperimentConfig cfg;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) +
                                   ": expected key=value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw config_error("config line " + std::to_string(lineno) + ": empty key");
            cfg.set(key, value);
        }
        return cfg;
    }

    static ExperimentConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str());
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw config_error("config: missing required key '" + key + "'");
        return it->second;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        return parse_u64(key, it->second);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw config_error("config: key '" + key + "' is not a boolean: " + it->second);
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error("config: key '" + key + "' is not a number: " + it->second);
        }
    }

    std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                            std::vector<std::uint64_t> fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::vector<std::uint64_t> out;
        for (const std::string& item : split_commas(it->second))
            out.push_back(parse_u64(key, item));
        return out;
    }

    std::vector<std::string> get_string_list(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return {};
        return split_commas(it->second);
    }

    /// Sorted key=value lines; the hashed identity of the run. The worker
    /// count is an execution detail with no effect on results, so it is
    /// excluded: reruns at any parallelism hash identically.
    std::string canonical() const {
        std::ostringstream out;
        for (const auto& [k, v] : kv_) {
            if (k == "workers") continue;
            out << k << "=" << v << "\n";
        }
        return out.str();
    }

    /// FNV-1a 64 over the canonical serialization, as fixed-width hex.
    std::string hash() const {
        const std::string text = canonical();
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const unsigned char ch : text) {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return std::string(buf);
    }

  private:
    static std::string trim(const std::string& s) {
        const auto first = s.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) return "";
        const auto last = s.find_last_not_of(" \t\r\n");
        return s.substr(first, last - first + 1);
    }

    static std::uint64_t parse_u64(const std::string& key, const std::string& value) {
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw config_error("config: key '" + key +
                               "' is not a nonnegative integer: " + value);
        }
    }

    static std::vector<std::string> split_commas(const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) {
            const std::string t = trim(item);
            if (!t.empty()) out.push_back(t);
        }
        return out;
    }

    std::map<std::string, std::string> kv_;
};

inline ClassifierSet classifiers_from_config(const ExperimentConfig& cfg) {
    ClassifierSet cs;
    std::vector<std::string> names = cfg.get_string_list("classifiers");
    if (names.empty() && cfg.has("classifiers")) return cs;  // explicit empty set
    if (names.empty()) names = {"reducible"};
    for (const std::string& name : names) {
        if (name == "reducible")
            cs.reducible = true;
        else if (name == "root_of_unity")
            cs.root_of_unity = true;
        else if (name == "power_substitution")
            cs.power_substitution = true;
        else if (name == "always")
            cs.always = true;
        else
            throw config_error("config: unknown classifier '" + name + "'");
    }
    return cs;
}

inline WalkExperiment walk_experiment_from_config(const ExperimentConfig& cfg) {
    WalkExperiment e;
    const std::string rep = cfg.get_string("representation", "prym");
    const auto genus = static_cast<unsigned>(cfg.get_u64("genus", 3));
    if (rep == "prym") {
        e.representation = RepresentationKind::Prym;
        e.sigma = prym_walk_set(PrymModule(genus));
    } else if (rep == "homology") {
        e.representation = RepresentationKind::Homology;
        e.sigma = homology_walk_set(SurfaceModel(genus));
    } else {
        throw config_error("config: representation must be 'homology' or 'prym'");
    }
    e.k_max = static_cast<unsigned>(cfg.get_u64("k_max", 100));
    e.k_stride = static_cast<unsigned>(cfg.get_u64("k_stride", 5));
    e.walks = cfg.get_u64("walks", 20'000);
    e.seed = cfg.get_u64("seed", 0);
    e.workers = cfg.get_u64("workers", 1);
    e.bootstrap_rounds = cfg.get_u64("bootstrap_rounds", 1000);
    e.certificate_primes = static_cast<unsigned>(cfg.get_u64("certificate_primes", 10));
    e.classifiers = classifiers_from_config(cfg);
    return e;
}

/// Writes content to path via a temporary file and an atomic rename, so a
/// reader never observes a partial file.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw error("rename failed: " + tmp + " -> " + path);
}

}  // namespace prymsieve
