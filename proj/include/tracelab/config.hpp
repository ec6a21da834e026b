#pragma once

// Flat key-value experiment configuration. INI sections are folded into the
// key, so `[grid]` + `h = 0.05` and a top-level `grid.h = 0.05` are the same.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tracelab {

class Config {
public:
    /// Throws ParseError with the offending line.
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    // Typed getters throw DomainError naming the key when the value does not
    // parse or the key is missing without a fallback.
    std::string get_string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const;
    double get_double(const std::string& key, std::optional<double> fallback = std::nullopt) const;
    long long get_int(const std::string& key, std::optional<long long> fallback = std::nullopt) const;
    bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
    std::vector<double> get_doubles(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         std::optional<std::vector<std::string>> fallback = std::nullopt) const;

    /// Keys present in the file that no getter has asked for.
    std::vector<std::string> unused_keys() const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    const std::string* lookup(const std::string& key) const;

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

/// Comma separated fields with surrounding blanks removed; empty fields dropped.
std::vector<std::string> split_list(const std::string& text);

}  // namespace tracelab
