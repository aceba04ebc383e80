#pragma once

#include <filesystem>
#include <string>

#include "sbs/config.hpp"

namespace sbs::cli {

struct Options {
    std::filesystem::path form_file;
    std::filesystem::path path_file;
    std::filesystem::path config_file;
    std::filesystem::path out_dir = ".";
    std::string format = "table"; // json | table | csv
    bool verify_sbs = false;
    std::string scale; // "", "c1", "unit" (overrides config)
};

// Each command returns the process exit code: 0 success, 2 degenerate
// critical structure, 3 near-discriminant input, 4 invalid path, 1 other.
int cmd_critical_points(const Options& opts);
int cmd_skeleton(const Options& opts);
int cmd_exact_loops(const Options& opts);
int cmd_monodromy(const Options& opts);

/// argv-level entry point used by the binary.
int run(int argc, const char* const* argv);

} // namespace sbs::cli
