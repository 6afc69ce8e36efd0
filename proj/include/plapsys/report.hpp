#pragma once
#include <string>
#include <vector>

#include "json.hpp"
#include "plapsys/coupling.hpp"
#include "plapsys/params.hpp"

namespace plapsys {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;

// Canonical text: sorted keys, two-space indent, doubles with 17 significant
// digits, non-finite doubles as the strings "inf", "-inf", "nan".
std::string dump_canonical(const Json& j);

// Doubles as JSON values with non-finite numbers mapped to strings.
Json num(double x);

// %.12g, with inf/nan spelled out.
std::string csv_num(double x);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string str() const;
};

// Writes path.tmp then renames it over path.
void atomic_write(const std::string& path, const std::string& content);

Json to_json(const ProblemParams& pp);
Json to_json(const KLPair& k);

// One verdict per checked quantity.
struct Check {
    std::string name;
    double value = 0;
    double tolerance = 0;
    bool pass = false;
    std::string note;
};
Json to_json(const Check& c);

struct RunReport {
    std::string command;
    std::string timestamp;
    Json params = Json::object();
    Json config = Json::object();
    Json outputs = Json::object();
    Json provenance = Json::object();
    std::vector<Check> checks;
    std::vector<std::string> errors;

    bool passed() const;
    Json json() const;
};

std::string utc_timestamp();

}  // namespace plapsys
