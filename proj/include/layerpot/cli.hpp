#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace layerpot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConstruction = 3;
inline constexpr int kExitNonConvergence = 4;

// Built-in configuration; every key can be overridden by a config file,
// command-line flags and --set key=value, in that order.
nlohmann::json default_config();

// Applies "a.b.c=value" to the config. The value is parsed as JSON when
// possible, otherwise stored as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Entry point of the layerpot tool. Returns the process exit code.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

std::string sha256_file(const std::string& path);

}  // namespace layerpot::cli
