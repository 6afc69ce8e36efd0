#pragma once
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "plapsys/params.hpp"

namespace plapsys {

// Flat "key = value" text grouped by "[section]" headers; '#' starts a comment.
// Keys are checked against a fixed table so typos surface as errors.
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;
    // Throws ConfigError when the key is absent.
    double require_double(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    nlohmann::json echo() const;
    std::string text() const;  // canonical re-serialization

private:
    std::map<std::string, std::map<std::string, Entry>> data_;
    const Entry* find(const std::string& section, const std::string& key) const;
};

// [params]: N, p, mu1, mu2, gamma, lambda, a, b, alpha, beta. b and beta are
// optional and must agree with p - a and p* - alpha when given.
ProblemParams params_from(const Config& c);

}  // namespace plapsys
