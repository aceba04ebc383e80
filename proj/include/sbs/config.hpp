#pragma once

#include <filesystem>
#include <string>

namespace sbs {

enum class AreaScaleMode { C1Units, UnitTotal };

/// Runtime knobs shared by the CLI commands. Loaded from a JSON file; every
/// field is optional and defaults as below.
struct RunConfig {
    double newton_tol = 1e-11;
    double flow_tol = 1e-11;
    double action_tol = 1e-6;
    double area_tol = 1e-6;
    int grid_density = 64;
    int loop_samples = 256;
    double psi_cap = 40.0;
    AreaScaleMode area_scale_mode = AreaScaleMode::C1Units;

    /// Throws InvalidInput unless tolerances are positive and loop_samples is
    /// a power of two >= 64.
    void validate() const;

    static RunConfig load(const std::filesystem::path& file);
};

std::string to_string(AreaScaleMode mode);
AreaScaleMode area_scale_mode_from_string(const std::string& s);

} // namespace sbs
