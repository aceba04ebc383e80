#include "sbs/cli.hpp"

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sbs/serialize.hpp"

namespace sbs::cli {

namespace {

RunConfig effective_config(const Options& opts) {
    RunConfig cfg = opts.config_file.empty() ? RunConfig{} : RunConfig::load(opts.config_file);
    if (!opts.scale.empty()) cfg.area_scale_mode = area_scale_mode_from_string(opts.scale);
    cfg.validate();
    return cfg;
}

CriticalFinderOptions finder_options(const RunConfig& cfg) {
    CriticalFinderOptions f;
    f.grid_density = cfg.grid_density;
    f.newton_tol = cfg.newton_tol;
    return f;
}

SkeletonOptions skeleton_options(const RunConfig& cfg) {
    SkeletonOptions s;
    s.finder = finder_options(cfg);
    s.flow.rel_tol = cfg.flow_tol;
    s.flow.abs_tol = cfg.flow_tol * 1e-2;
    s.flow.psi_cap = cfg.psi_cap;
    return s;
}

LoopOptions loop_options(const RunConfig& cfg) {
    LoopOptions l;
    l.samples = cfg.loop_samples;
    l.action_tol = cfg.action_tol;
    return l;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

void ensure_out_dir(const Options& opts) {
    if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);
}

std::string point_str(const SpherePoint& p) {
    std::ostringstream s;
    s.precision(10);
    s << (p.chart == Chart::Affine0 ? "z=" : "w=") << p.coord.real()
      << (p.coord.imag() < 0 ? "" : "+") << p.coord.imag() << "i";
    return s.str();
}

} // namespace

int cmd_critical_points(const Options& opts) {
    return guarded([&]() {
        const RunConfig cfg = effective_config(opts);
        const BinaryForm form = load_form(opts.form_file);
        const auto cps = find_critical_points(form, finder_options(cfg));
        ensure_out_dir(opts);
        const Json j = critical_points_to_json(form, cps);
        write_text_file(opts.out_dir / "critical_points.json", j.dump(2) + "\n");

        if (opts.format == "json") {
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "critical points: " << cps.size() << " (" << j["minima"].get<int>()
                      << " minima, " << j["saddles"].get<int>() << " saddles)\n";
            std::cout << "  type    location                         psi          eigenvalues\n";
            for (const auto& cp : cps) {
                std::ostringstream line;
                line.precision(10);
                line << (cp.index == 0 ? "  min     " : "  saddle  ") << point_str(cp.location)
                     << "   " << cp.value << "   [" << cp.hessian_eigenvalues[0] << ", "
                     << cp.hessian_eigenvalues[1] << "]";
                std::cout << line.str() << "\n";
            }
        }
        return 0;
    });
}

int cmd_skeleton(const Options& opts) {
    return guarded([&]() {
        const RunConfig cfg = effective_config(opts);
        const BinaryForm form = load_form(opts.form_file);
        const Skeleton skel = extract_skeleton(form, skeleton_options(cfg));
        ensure_out_dir(opts);
        const Json j = skeleton_to_json(form, skel);
        const std::string csv = skeleton_to_csv(skel);
        write_text_file(opts.out_dir / "skeleton.json", j.dump(2) + "\n");
        write_text_file(opts.out_dir / "skeleton.csv", csv);
        write_text_file(opts.out_dir / "skeleton.svg", render_svg(form, &skel, nullptr));

        if (opts.format == "json") {
            std::cout << j.dump(2) << "\n";
        } else if (opts.format == "csv") {
            std::cout << csv;
        } else {
            std::cout << "skeleton: " << skel.critical_points.size() << " critical points, "
                      << skel.arcs.size() << " arcs\n";
            for (std::size_t i = 0; i < skel.arcs.size(); ++i) {
                const auto& arc = skel.arcs[i];
                std::cout << "  arc " << i << ": " << point_str(arc.endpoint_a.location) << " -> "
                          << point_str(arc.saddle.location) << " -> "
                          << point_str(arc.endpoint_b.location) << " (" << arc.samples.size()
                          << " samples)" << (arc.saddle_to_saddle ? " [saddle-saddle]" : "") << "\n";
            }
        }
        if (opts.verify_sbs) {
            for (std::size_t i = 0; i < skel.arcs.size(); ++i) {
                const double r = max_sbs_residual(form, skel.arcs[i].samples);
                std::cout << "  arc " << i << " max |Im rho(tangent)| = " << r << "\n";
                if (!(r < 1e-6)) throw_skeleton_incomplete("verify-sbs: residual exceeds 1e-6");
            }
        }
        return 0;
    });
}

int cmd_exact_loops(const Options& opts) {
    return guarded([&]() {
        const RunConfig cfg = effective_config(opts);
        const BinaryForm form = load_form(opts.form_file);
        const ModuliFiber fiber = enumerate_fiber(form, loop_options(cfg));
        ensure_out_dir(opts);
        const Json j = fiber_to_json(fiber, cfg.area_scale_mode);
        write_text_file(opts.out_dir / "exact_loops.json", j.dump(2) + "\n");

        std::vector<LoopCurve> loops;
        for (const auto& s : fiber.sheets)
            if (s.loop) loops.push_back(*s.loop);
        const Skeleton* skel_ptr = nullptr;
        Skeleton skel;
        try {
            skel = extract_skeleton(form, skeleton_options(cfg));
            skel_ptr = &skel;
        } catch (const Error&) {
            // loops render without the skeleton overlay
        }
        write_text_file(opts.out_dir / "exact_loops.svg", render_svg(form, skel_ptr, &loops));

        if (opts.format == "json") {
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "exact loops: " << loops.size() << " of " << fiber.sheets.size()
                      << " sheets\n";
            for (const auto& s : fiber.sheets) {
                std::cout << "  zero " << s.zero_index << " at " << point_str(s.zero) << ": ";
                if (s.report) {
                    std::ostringstream line;
                    line.precision(10);
                    const double area = cfg.area_scale_mode == AreaScaleMode::C1Units
                                            ? s.report->enclosed_area
                                            : s.report->enclosed_area / form.degree;
                    line << "area " << area << " (" << to_string(cfg.area_scale_mode) << "), action "
                         << s.report->action << ", exact " << (s.report->is_exact ? "yes" : "no");
                    std::cout << line.str() << "\n";
                } else {
                    std::cout << "no exact loop in the circle family\n";
                }
            }
        }
        return 0; // a partial fiber is a reported result, not an error
    });
}

int cmd_monodromy(const Options& opts) {
    return guarded([&]() {
        const RunConfig cfg = effective_config(opts);
        const CoefficientPath path = load_path(opts.path_file);
        ContinuationOptions copts;
        copts.loop = loop_options(cfg);
        const ModuliFiber base = enumerate_fiber(path.steps.front(), copts.loop);
        const MonodromyResult result = monodromy(path, base, copts);
        ensure_out_dir(opts);
        Json j = monodromy_to_json(result);
        j["root_braid"] = [&]() {
            Json arr = Json::array();
            for (const int p : root_braid_permutation(path, copts.discriminant_margin)) arr.push_back(p);
            return arr;
        }();
        write_text_file(opts.out_dir / "monodromy.json", j.dump(2) + "\n");

        if (opts.format == "json") {
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "monodromy over " << path.steps.size() << " steps: "
                      << permutation_one_line(result.permutation)
                      << (j["is_identity"].get<bool>() ? " (identity)" : "") << "\n";
        }
        return 0;
    });
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Bohr-Sommerfeld geometry of section complements on the sphere"};
    app.require_subcommand(1);

    Options opts;
    const auto add_common = [&](CLI::App* cmd, bool needs_form, bool needs_path) {
        if (needs_form) cmd->add_option("--form", opts.form_file, "form JSON file")->required();
        if (needs_path) cmd->add_option("--path", opts.path_file, "coefficient path JSON file")->required();
        cmd->add_option("--config", opts.config_file, "config JSON file");
        cmd->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"json", "table", "csv"}));
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--scale", opts.scale, "area scale mode")->check(CLI::IsMember({"c1", "unit"}));
    };

    auto* critical = app.add_subcommand("critical-points", "critical points of psi with Morse data");
    add_common(critical, true, false);
    auto* skeleton = app.add_subcommand("skeleton", "gradient-flow skeleton (CSV + JSON + SVG)");
    add_common(skeleton, true, false);
    skeleton->add_flag("--verify-sbs", opts.verify_sbs, "print per-arc max |Im rho(tangent)|");
    auto* loops = app.add_subcommand("exact-loops", "exact loop around each zero");
    add_common(loops, true, false);
    auto* mono = app.add_subcommand("monodromy", "sheet permutation around a coefficient path");
    add_common(mono, false, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (critical->parsed()) return cmd_critical_points(opts);
    if (skeleton->parsed()) return cmd_skeleton(opts);
    if (loops->parsed()) return cmd_exact_loops(opts);
    if (mono->parsed()) return cmd_monodromy(opts);
    return 1;
}

} // namespace sbs::cli
