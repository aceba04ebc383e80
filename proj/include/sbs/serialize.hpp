#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sbs/config.hpp"
#include "sbs/loops.hpp"
#include "sbs/moduli.hpp"
#include "sbs/morse.hpp"

namespace sbs {

using Json = nlohmann::ordered_json;

// ---- file schemas (schema_version 1) ----
// BinaryForm:       {"degree": d, "coefficients": [[re, im], ...]}   (c_0..c_d)
// LoopCurve:        {"n": N, "points": [[chart, re, im], ...]}
// CoefficientPath:  {"steps": [<BinaryForm>, ...]}

BinaryForm form_from_json(const Json& j);
Json form_to_json(const BinaryForm& form);
BinaryForm load_form(const std::filesystem::path& file);

LoopCurve loop_from_json(const Json& j);
Json loop_to_json(const LoopCurve& loop);

CoefficientPath path_from_json(const Json& j);
Json path_to_json(const CoefficientPath& path);
CoefficientPath load_path(const std::filesystem::path& file);

Json point_to_json(const SpherePoint& p);
Json critical_point_to_json(const CriticalPoint& cp);
Json critical_points_to_json(const BinaryForm& form, const std::vector<CriticalPoint>& cps);
Json skeleton_to_json(const BinaryForm& form, const Skeleton& skel);
Json loop_report_to_json(const LoopReport& rep, AreaScaleMode mode, int degree);
Json fiber_to_json(const ModuliFiber& fiber, AreaScaleMode mode);
Json monodromy_to_json(const MonodromyResult& result);

/// One-line permutation notation, e.g. "(2 1 3)" for images of 1..n.
std::string permutation_one_line(const std::vector<int>& perm);

/// Skeleton CSV: arc,t,chart,re,im,psi rows.
std::string skeleton_to_csv(const Skeleton& skel);

/// Trajectory CSV: t,chart,re,im,psi rows.
std::string trajectory_to_csv(const Trajectory& traj);

/// Two 800x800 panels (one per chart) with a psi heat map, skeleton arcs,
/// critical points, and optional loops.
std::string render_svg(const BinaryForm& form, const Skeleton* skel,
                       const std::vector<LoopCurve>* loops);

void write_text_file(const std::filesystem::path& file, const std::string& text);
Json load_json(const std::filesystem::path& file);

} // namespace sbs
