#include "sbs/config.hpp"

#include <fstream>

#include <json.hpp>

#include "sbs/errors.hpp"
#include "sbs/numerics.hpp"

namespace sbs {

void RunConfig::validate() const {
    if (!(newton_tol > 0.0 && flow_tol > 0.0 && action_tol > 0.0 && area_tol > 0.0))
        throw_invalid_input("config: tolerances must be positive");
    if (grid_density < 8) throw_invalid_input("config: grid_density must be at least 8");
    if (loop_samples < 64 || !num::is_power_of_two(static_cast<std::size_t>(loop_samples)))
        throw_invalid_input("config: loop_samples must be a power of two >= 64");
    if (!(psi_cap > 0.0)) throw_invalid_input("config: psi_cap must be positive");
}

RunConfig RunConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw_invalid_input("config: cannot open " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw_invalid_input(std::string("config: parse error: ") + e.what());
    }
    RunConfig c;
    c.newton_tol = j.value("newton_tol", c.newton_tol);
    c.flow_tol = j.value("flow_tol", c.flow_tol);
    c.action_tol = j.value("action_tol", c.action_tol);
    c.area_tol = j.value("area_tol", c.area_tol);
    c.grid_density = j.value("grid_density", c.grid_density);
    c.loop_samples = j.value("loop_samples", c.loop_samples);
    c.psi_cap = j.value("psi_cap", c.psi_cap);
    if (j.contains("area_scale_mode"))
        c.area_scale_mode = area_scale_mode_from_string(j["area_scale_mode"].get<std::string>());
    c.validate();
    return c;
}

std::string to_string(AreaScaleMode mode) {
    return mode == AreaScaleMode::C1Units ? "c1" : "unit";
}

AreaScaleMode area_scale_mode_from_string(const std::string& s) {
    if (s == "c1") return AreaScaleMode::C1Units;
    if (s == "unit") return AreaScaleMode::UnitTotal;
    throw_invalid_input("config: area_scale_mode must be 'c1' or 'unit'");
}

} // namespace sbs
