#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "magbeam/equilibrium.hpp"

namespace magbeam::cli {

// Bad input file, flag, or value. Maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Demonstrator description loaded from JSON; everything converted to SI.
struct RobotConfig {
    equilibrium::Model model;
    equilibrium::SolverSettings settings;
    nlohmann::json document;  // as parsed, for echoing in reports
};

RobotConfig parse_config(const nlohmann::json& document);
RobotConfig load_config(const std::filesystem::path& path);

}  // namespace magbeam::cli
