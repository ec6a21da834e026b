#include "tracelab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tracelab/error.hpp"

namespace tracelab {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || trim(text.substr(used)) != "")
        throw DomainError("config key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Config Config::parse(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError("config: " + e.message(), e.line());
    }
    Config cfg;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            cfg.values_[name] = trim(node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) cfg.values_[name + "." + key] = trim(leaf.data());
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const std::string* Config::lookup(const std::string& key) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

std::string Config::get_string(const std::string& key, std::optional<std::string> fallback) const {
    if (const auto* v = lookup(key)) return *v;
    if (fallback) return *fallback;
    throw DomainError("config key '" + key + "' is required");
}

double Config::get_double(const std::string& key, std::optional<double> fallback) const {
    if (const auto* v = lookup(key)) return to_double(key, *v);
    if (fallback) return *fallback;
    throw DomainError("config key '" + key + "' is required");
}

long long Config::get_int(const std::string& key, std::optional<long long> fallback) const {
    if (const auto* v = lookup(key)) {
        const double d = to_double(key, *v);
        if (d != std::floor(d) || std::fabs(d) > 9.0e15)
            throw DomainError("config key '" + key + "': expected an integer, got '" + *v + "'");
        return static_cast<long long>(d);
    }
    if (fallback) return *fallback;
    throw DomainError("config key '" + key + "' is required");
}

bool Config::get_bool(const std::string& key, std::optional<bool> fallback) const {
    if (const auto* v = lookup(key)) {
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw DomainError("config key '" + key + "': expected true or false, got '" + *v + "'");
    }
    if (fallback) return *fallback;
    throw DomainError("config key '" + key + "' is required");
}

std::vector<double> Config::get_doubles(const std::string& key, std::optional<std::vector<double>> fallback) const {
    if (const auto* v = lookup(key)) {
        std::vector<double> out;
        for (const auto& item : split_list(*v)) out.push_back(to_double(key, item));
        if (out.empty()) throw DomainError("config key '" + key + "' is an empty list");
        return out;
    }
    if (fallback) return *fallback;
    throw DomainError("config key '" + key + "' is required");
}

std::vector<std::string> Config::get_strings(const std::string& key,
                                             std::optional<std::vector<std::string>> fallback) const {
    if (const auto* v = lookup(key)) return split_list(*v);
    if (fallback) return *fallback;
    throw DomainError("config key '" + key + "' is required");
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

}  // namespace tracelab
