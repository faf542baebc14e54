#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "resonance/dynamics.hpp"

namespace resonance::cli {

struct Options {
    std::string config;
    std::string out;  // overrides output.dir when set
    unsigned threads = 0;
    bool verbose = false;
};

// Parses flags and runs one task; returns the process exit code.
int main(int argc, char** argv);

// Runs one task; errors go to `err` as a JSON object. Exit codes: 0 ok, 2 validation, 3 numerical.
int run(const Options& opt, const std::map<std::string, std::string>& env, std::ostream& log, std::ostream& err);

// Applies RESONANCE_<SECTION>__<KEY>=value overrides to config leaves.
void apply_env_overrides(nlohmann::json& config, const std::map<std::string, std::string>& env);

std::map<std::string, std::string> environment();

// %.17g
std::string format_double(double v);

std::string trajectory_csv(const Trajectory& traj);

// Writes via a temporary file in the same directory followed by rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace resonance::cli
