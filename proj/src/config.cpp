#include "plapsys/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "plapsys/error.hpp"

namespace plapsys {

namespace {

const std::map<std::string, std::set<std::string>> kKnown = {
    {"params", {"N", "p", "mu1", "mu2", "gamma", "lambda", "a", "b", "alpha", "beta"}},
    {"quadrature", {"rel_tol", "max_doublings"}},
    {"sobolev", {"eps", "eps_check", "radii", "r_min", "r_max"}},
    {"coupling", {"resolution", "p2_resolution", "ladder", "variant"}},
    {"energy", {"eps", "samples", "seed", "rel_tol", "random_rel_tol", "R_ladder", "ladder"}},
    {"radial", {"n", "R", "q", "r", "eps", "s_ladder", "R1", "R2"}},
    {"mp", {"rho", "eps_ladder", "lambda_fraction", "lambda1", "n"}},
    {"sweep", {"param", "ladder", "parallel"}},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' expects a number, got '" + v + "'",
                      line, key);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (!kKnown.count(section))
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]", line, section);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + s + "'", line);
        const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' appears before any section", line,
                              key);
        if (!kKnown.at(section).count(key))
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "' in [" + section + "]", line,
                              key);
        if (value.empty())
            throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' has no value", line, key);
        if (c.data_[section].count(key))
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'", line, key);
        c.data_[section][key] = Entry{value, line};
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    return e ? to_double(e->value, key, e->line) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const double x = to_double(e->value, key, e->line);
    if (x != std::floor(x) || std::abs(x) > 2e9)
        throw ConfigError("line " + std::to_string(e->line) + ": key '" + key + "' expects an integer", e->line, key);
    return int(x);
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), key, e->line));
    return out;
}

double Config::require_double(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError("missing required key '" + key + "' in [" + section + "]", 0, key);
    return get_double(section, key, 0);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    if (!kKnown.count(section) || !kKnown.at(section).count(key))
        throw ConfigError("unknown key '" + key + "' in [" + section + "]", 0, key);
    auto& e = data_[section][key];
    e.value = value;
}

nlohmann::json Config::echo() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [s, kv] : data_)
        for (const auto& [k, e] : kv) j[s][k] = e.value;
    return j;
}

std::string Config::text() const {
    std::string out;
    for (const auto& [s, kv] : data_) {
        out += "[" + s + "]\n";
        for (const auto& [k, e] : kv) out += k + " = " + e.value + "\n";
    }
    return out;
}

ProblemParams params_from(const Config& c) {
    const int N = c.get_int("params", "N", 0);
    if (!c.has("params", "N") || !c.has("params", "p"))
        throw ConfigError("[params] must define N and p", 0, c.has("params", "N") ? "p" : "N");
    const double p = c.get_double("params", "p", 0);
    if (N < 3 || !(p > 1 && p < N)) throw ConfigError("[params] need N >= 3 and 1 < p < N", 0, "p");
    const ProblemParams pp =
        ProblemParams::make(N, p, c.get_double("params", "mu1", 1), c.get_double("params", "mu2", 1),
                            c.get_double("params", "gamma", 1), c.get_double("params", "alpha", 0),
                            c.get_double("params", "lambda", 0), c.get_double("params", "a", 0));
    if (c.has("params", "b") && std::abs(c.get_double("params", "b", 0) - pp.b) > 1e-12)
        throw ConfigError("[params] b must equal p - a", 0, "b");
    if (c.has("params", "beta") && std::abs(c.get_double("params", "beta", 0) - pp.beta) > 1e-12)
        throw ConfigError("[params] beta must equal p* - alpha", 0, "beta");
    return pp;
}

}  // namespace plapsys
