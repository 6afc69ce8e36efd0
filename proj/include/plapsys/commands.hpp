#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plapsys/config.hpp"
#include "plapsys/params.hpp"
#include "plapsys/report.hpp"

namespace plapsys {

enum ExitCode { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitRegime = 3, kExitConvergence = 4 };

struct RunOptions {
    std::string out_dir;  // empty: nothing is written
    int parallel = 1;
    ConstantVariant variant = ConstantVariant::derived_Np;
    std::optional<std::uint64_t> seed;
};

struct CommandResult {
    RunReport report;
    std::map<std::string, CsvTable> csv;  // file name -> table
};

CommandResult cmd_sobolev(const Config& c, const RunOptions& o);
// action: solve, enumerate, certify, continue
CommandResult cmd_coupling(const Config& c, const std::string& action, const RunOptions& o);
// target: theorem1, theorem2, theorem4, prop1_sec5, eq011, lemma_l4, mp_level
CommandResult cmd_verify(const Config& c, const std::string& target, const RunOptions& o);

struct SweepOutcome {
    std::string param;
    std::vector<double> values;  // ascending
    std::vector<CommandResult> points;
    CsvTable table;
    RunReport summary;
    bool any_failed = false;
};
// Runs "coupling solve" at every ladder value of [sweep] param. Point
// failures are recorded and the sweep continues.
SweepOutcome cmd_sweep(const Config& c, const RunOptions& o);

// report.json plus every CSV table into dir.
void write_outputs(const CommandResult& r, const std::string& dir);
void write_sweep(const SweepOutcome& s, const std::string& dir);

// Maps an exception to its exit code and a one-line remediation hint.
int exit_code_for(const std::exception& e);
std::string hint_for(const std::exception& e);

// Report shell for a command that threw before producing results.
CommandResult failure_result(const std::string& command, const Config* c, const std::exception& e);

}  // namespace plapsys
