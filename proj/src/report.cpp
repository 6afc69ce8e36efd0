#include "plapsys/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <system_error>

namespace plapsys {

namespace {

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string nonfinite(double x) { return std::isnan(x) ? "nan" : x > 0 ? "inf" : "-inf"; }

void write(const Json& j, std::string& out, int indent) {
    const std::string pad(indent + 2, ' '), end(indent, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                write(it.value(), out, indent + 2);
            }
            out += "\n" + end + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write(j[i], out, indent + 2);
            }
            out += "\n" + end + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? fmt("%.17g", x) : Json(nonfinite(x)).dump();
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_canonical(const Json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nonfinite(x)); }

std::string csv_num(double x) { return std::isfinite(x) ? fmt("%.12g", x) : nonfinite(x); }

std::string CsvTable::str() const {
    std::string out;
    for (size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += "\n";
    }
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw std::runtime_error("rename to " + path + " failed: " + ec.message());
}

Json to_json(const ProblemParams& pp) {
    return Json{{"N", pp.N},          {"p", num(pp.p)},         {"pstar", num(pp.pstar())},
                {"mu1", num(pp.mu1)}, {"mu2", num(pp.mu2)},     {"lambda", num(pp.lambda)},
                {"gamma", num(pp.gamma)}, {"a", num(pp.a)},     {"b", num(pp.b)},
                {"alpha", num(pp.alpha)}, {"beta", num(pp.beta)}};
}

Json to_json(const KLPair& k) {
    return Json{{"k", num(k.k)},       {"l", num(k.l)},           {"res1", num(k.res1)},
                {"res2", num(k.res2)}, {"branch", to_string(k.branch)}, {"accepted", k.accepted()}};
}

Json to_json(const Check& c) {
    Json j{{"name", c.name}, {"value", num(c.value)}, {"tolerance", num(c.tolerance)}, {"pass", c.pass}};
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

bool RunReport::passed() const {
    if (!errors.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Json RunReport::json() const {
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back(to_json(c));
    return Json{{"schema_version", kSchemaVersion},
                {"command", command},
                {"timestamp", timestamp},
                {"params", params},
                {"config", config},
                {"outputs", outputs},
                {"provenance", provenance},
                {"checks", cs},
                {"errors", errors},
                {"passed", passed()}};
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace plapsys
