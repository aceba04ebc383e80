#include "sbs/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sbs {

Json load_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw_invalid_input("cannot open " + file.string());
    try {
        Json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw_invalid_input(file.string() + ": JSON parse error: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw_invalid_input("cannot write " + file.string());
    out << text;
}

BinaryForm form_from_json(const Json& j) {
    try {
        const int degree = j.at("degree").get<int>();
        std::vector<Complex> coeffs;
        for (const auto& c : j.at("coefficients")) {
            if (!c.is_array() || c.size() != 2) throw_invalid_input("form: coefficient must be [re, im]");
            coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
        }
        return BinaryForm(degree, std::move(coeffs));
    } catch (const nlohmann::json::exception& e) {
        throw_invalid_input(std::string("form: malformed JSON: ") + e.what());
    }
}

Json form_to_json(const BinaryForm& form) {
    Json j;
    j["degree"] = form.degree;
    Json coeffs = Json::array();
    for (const auto& c : form.coefficients) coeffs.push_back(Json::array({c.real(), c.imag()}));
    j["coefficients"] = coeffs;
    return j;
}

BinaryForm load_form(const std::filesystem::path& file) { return form_from_json(load_json(file)); }

LoopCurve loop_from_json(const Json& j) {
    try {
        LoopCurve loop;
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 3) throw_invalid_input("loop: point must be [chart, re, im]");
            const int chart = p[0].get<int>();
            if (chart != 0 && chart != 1) throw_invalid_input("loop: chart must be 0 or 1");
            loop.samples.push_back(SpherePoint{static_cast<Chart>(chart),
                                               Complex{p[1].get<double>(), p[2].get<double>()}}
                                       .normalized());
        }
        if (j.contains("n") && j["n"].get<std::size_t>() != loop.samples.size())
            throw_invalid_input("loop: 'n' does not match the point count");
        return loop;
    } catch (const nlohmann::json::exception& e) {
        throw_invalid_input(std::string("loop: malformed JSON: ") + e.what());
    }
}

Json loop_to_json(const LoopCurve& loop) {
    Json j;
    j["n"] = loop.samples.size();
    Json pts = Json::array();
    for (const auto& p : loop.samples)
        pts.push_back(Json::array({static_cast<int>(p.chart), p.coord.real(), p.coord.imag()}));
    j["points"] = pts;
    return j;
}

CoefficientPath path_from_json(const Json& j) {
    try {
        CoefficientPath path;
        for (const auto& s : j.at("steps")) path.steps.push_back(form_from_json(s));
        if (path.steps.empty()) throw_invalid_input("path: needs at least one step");
        return path;
    } catch (const nlohmann::json::exception& e) {
        throw_invalid_input(std::string("path: malformed JSON: ") + e.what());
    }
}

Json path_to_json(const CoefficientPath& path) {
    Json j;
    Json steps = Json::array();
    for (const auto& s : path.steps) steps.push_back(form_to_json(s));
    j["steps"] = steps;
    return j;
}

CoefficientPath load_path(const std::filesystem::path& file) { return path_from_json(load_json(file)); }

Json point_to_json(const SpherePoint& p) {
    Json j;
    j["chart"] = static_cast<int>(p.chart);
    j["re"] = p.coord.real();
    j["im"] = p.coord.imag();
    return j;
}

Json critical_point_to_json(const CriticalPoint& cp) {
    Json j;
    j["location"] = point_to_json(cp.location);
    j["index"] = cp.index;
    j["value"] = cp.value;
    j["hessian_eigenvalues"] = Json::array({cp.hessian_eigenvalues[0], cp.hessian_eigenvalues[1]});
    if (cp.unstable_direction)
        j["unstable_direction"] =
            Json::array({cp.unstable_direction->value.real(), cp.unstable_direction->value.imag()});
    else
        j["unstable_direction"] = nullptr;
    return j;
}

Json critical_points_to_json(const BinaryForm& form, const std::vector<CriticalPoint>& cps) {
    Json j;
    j["schema_version"] = 1;
    j["form"] = form_to_json(form);
    Json arr = Json::array();
    int minima = 0, saddles = 0;
    for (const auto& cp : cps) {
        arr.push_back(critical_point_to_json(cp));
        (cp.index == 0 ? minima : saddles) += 1;
    }
    j["critical_points"] = arr;
    j["count"] = cps.size();
    j["minima"] = minima;
    j["saddles"] = saddles;
    return j;
}

namespace {

Json samples_to_json(const std::vector<TrajectorySample>& samples) {
    Json arr = Json::array();
    for (const auto& s : samples)
        arr.push_back(Json::array({s.time, static_cast<int>(s.point.chart), s.point.coord.real(),
                                   s.point.coord.imag(), s.psi}));
    return arr;
}

} // namespace

Json skeleton_to_json(const BinaryForm& form, const Skeleton& skel) {
    Json j;
    j["schema_version"] = 1;
    j["form"] = form_to_json(form);
    Json cps = Json::array();
    for (const auto& cp : skel.critical_points) cps.push_back(critical_point_to_json(cp));
    j["critical_points"] = cps;
    Json arcs = Json::array();
    for (const auto& arc : skel.arcs) {
        Json a;
        a["saddle"] = critical_point_to_json(arc.saddle);
        a["endpoint_a"] = critical_point_to_json(arc.endpoint_a);
        a["endpoint_b"] = critical_point_to_json(arc.endpoint_b);
        a["saddle_to_saddle"] = arc.saddle_to_saddle;
        a["sample_count"] = arc.samples.size();
        a["samples"] = samples_to_json(arc.samples);
        arcs.push_back(a);
    }
    j["arcs"] = arcs;
    return j;
}

Json loop_report_to_json(const LoopReport& rep, AreaScaleMode mode, int degree) {
    Json j;
    j["action"] = rep.action;
    j["enclosed_area_c1"] = rep.enclosed_area;
    j["enclosed_area_unit_total"] = rep.enclosed_area / static_cast<double>(degree);
    j["enclosed_area"] = mode == AreaScaleMode::C1Units
                             ? rep.enclosed_area
                             : rep.enclosed_area / static_cast<double>(degree);
    j["area_scale_mode"] = to_string(mode);
    Json winding = Json::array();
    for (const int w : rep.winding) winding.push_back(w);
    j["winding"] = winding;
    j["holonomy"] = Json::array({rep.holonomy.real(), rep.holonomy.imag()});
    j["is_exact"] = rep.is_exact;
    j["is_d_monotonic"] = rep.is_d_monotonic;
    j["fs_length"] = rep.fs_length;
    return j;
}

Json fiber_to_json(const ModuliFiber& fiber, AreaScaleMode mode) {
    Json j;
    j["schema_version"] = 1;
    j["form"] = form_to_json(fiber.form);
    Json sheets = Json::array();
    for (const auto& s : fiber.sheets) {
        Json sj;
        sj["zero_index"] = s.zero_index;
        sj["zero"] = point_to_json(s.zero);
        sj["loop"] = s.loop ? loop_to_json(*s.loop) : Json(nullptr);
        sj["report"] = s.report ? loop_report_to_json(*s.report, mode, fiber.form.degree) : Json(nullptr);
        sheets.push_back(sj);
    }
    j["sheets"] = sheets;
    Json gaps = Json::array();
    for (const int g : fiber.gaps) gaps.push_back(g);
    j["gaps"] = gaps;
    return j;
}

std::string permutation_one_line(const std::vector<int>& perm) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (i) out << " ";
        out << perm[i] + 1;
    }
    out << ")";
    return out.str();
}

Json monodromy_to_json(const MonodromyResult& result) {
    Json j;
    j["schema_version"] = 1;
    j["sheet_count"] = result.permutation.size();
    Json perm = Json::array();
    for (const int p : result.permutation) perm.push_back(p);
    j["permutation"] = perm;
    j["one_line"] = permutation_one_line(result.permutation);
    j["path_steps"] = result.path.steps.size();
    bool identity = true;
    for (std::size_t i = 0; i < result.permutation.size(); ++i)
        identity = identity && result.permutation[i] == static_cast<int>(i);
    j["is_identity"] = identity;
    return j;
}

namespace {

void append_csv_samples(std::ostringstream& out, const std::vector<TrajectorySample>& samples,
                        int arc_index) {
    for (const auto& s : samples) {
        if (arc_index >= 0) out << arc_index << ",";
        out << s.time << "," << static_cast<int>(s.point.chart) << "," << s.point.coord.real() << ","
            << s.point.coord.imag() << "," << s.psi << "\n";
    }
}

} // namespace

std::string skeleton_to_csv(const Skeleton& skel) {
    std::ostringstream out;
    out.precision(17);
    out << "arc,t,chart,re,im,psi\n";
    for (std::size_t i = 0; i < skel.arcs.size(); ++i)
        append_csv_samples(out, skel.arcs[i].samples, static_cast<int>(i));
    return out.str();
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out.precision(17);
    out << "t,chart,re,im,psi\n";
    append_csv_samples(out, traj.samples, -1);
    return out.str();
}

namespace {

struct Panel {
    double x0, y0, size;
    Chart chart;

    std::array<double, 2> map(Complex z) const {
        const double span = 2.2; // coords in [-1.1, 1.1]
        return {x0 + (z.real() + 1.1) / span * size, y0 + (1.1 - z.imag()) / span * size};
    }
};

std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(20 + t * (250 - 20));
    const int g = static_cast<int>(30 + t * (220 - 30));
    const int b = static_cast<int>(90 + t * (70 - 90));
    std::ostringstream s;
    s << "rgb(" << r << "," << g << "," << b << ")";
    return s.str();
}

void draw_heat(std::ostringstream& svg, const BinaryForm& form, const Panel& panel) {
    const int cells = 100;
    const double cell = panel.size / cells;
    // psi range over the visible caps, clipped for contrast
    double lo = 1e300, hi = -1e300;
    std::vector<double> vals(static_cast<std::size_t>(cells * cells));
    for (int i = 0; i < cells; ++i) {
        for (int jj = 0; jj < cells; ++jj) {
            const double re = -1.1 + 2.2 * (i + 0.5) / cells;
            const double im = 1.1 - 2.2 * (jj + 0.5) / cells;
            const SpherePoint p{panel.chart, Complex{re, im}};
            const double a = section_norm(form, p);
            const double psi = a > 0.0 ? -std::log(a) : 30.0;
            vals[static_cast<std::size_t>(i * cells + jj)] = psi;
            lo = std::min(lo, psi);
            hi = std::max(hi, psi);
        }
    }
    hi = std::min(hi, lo + 6.0);
    for (int i = 0; i < cells; ++i) {
        for (int jj = 0; jj < cells; ++jj) {
            const double t = (vals[static_cast<std::size_t>(i * cells + jj)] - lo) / (hi - lo);
            svg << "<rect x=\"" << panel.x0 + i * cell << "\" y=\"" << panel.y0 + jj * cell
                << "\" width=\"" << cell + 0.5 << "\" height=\"" << cell + 0.5 << "\" fill=\""
                << heat_color(t) << "\"/>\n";
        }
    }
}

void draw_polyline(std::ostringstream& svg, const Panel& panel,
                   const std::vector<SpherePoint>& pts, const std::string& color, bool closed) {
    // split into runs living in this panel's chart
    std::vector<std::array<double, 2>> run;
    const auto flush = [&]() {
        if (run.size() < 2) {
            run.clear();
            return;
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& xy : run) svg << xy[0] << "," << xy[1] << " ";
        svg << "\"/>\n";
        run.clear();
    };
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n + (closed ? 1u : 0u); ++k) {
        const SpherePoint& p = pts[k % n];
        const Complex c = p.chart == panel.chart ? p.coord
                          : (p.coord == Complex{0.0, 0.0} ? Complex{1e9, 0.0} : 1.0 / p.coord);
        if (std::abs(c) <= 1.12) {
            run.push_back(panel.map(c));
        } else {
            flush();
        }
    }
    flush();
}

} // namespace

std::string render_svg(const BinaryForm& form, const Skeleton* skel,
                       const std::vector<LoopCurve>* loops) {
    const double pad = 15.0, size = 800.0;
    const Panel panels[2] = {{pad, pad + 20.0, size, Chart::Affine0},
                             {pad * 2 + size, pad + 20.0, size, Chart::Affine1}};
    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size * 2 + pad * 3 << "\" height=\""
        << size + pad * 2 + 20.0 << "\">\n";
    svg << "<text x=\"" << pad << "\" y=\"" << pad + 8.0
        << "\" font-family=\"monospace\" font-size=\"14\">chart z (left), chart w = 1/z (right); "
           "heat: psi = -ln|alpha|</text>\n";
    for (const auto& panel : panels) {
        draw_heat(svg, form, panel);
        if (skel) {
            for (const auto& arc : skel->arcs) {
                std::vector<SpherePoint> pts;
                pts.reserve(arc.samples.size());
                for (const auto& s : arc.samples) pts.push_back(s.point);
                draw_polyline(svg, panel, pts, "white", false);
            }
            for (const auto& cp : skel->critical_points) {
                const Complex c = cp.location.chart == panel.chart
                                      ? cp.location.coord
                                      : (cp.location.coord == Complex{0.0, 0.0} ? Complex{1e9, 0.0}
                                                                                : 1.0 / cp.location.coord);
                if (std::abs(c) > 1.12) continue;
                const auto xy = panel.map(c);
                svg << "<circle cx=\"" << xy[0] << "\" cy=\"" << xy[1] << "\" r=\"6\" fill=\""
                    << (cp.index == 0 ? "#ffffff" : "#ff5050") << "\" stroke=\"black\"/>\n";
            }
        }
        if (loops) {
            const char* palette[] = {"#00e5ff", "#76ff03", "#ff9100", "#e040fb", "#ffff00"};
            for (std::size_t i = 0; i < loops->size(); ++i)
                draw_polyline(svg, panel, (*loops)[i].samples, palette[i % 5], true);
        }
        svg << "<rect x=\"" << panel.x0 << "\" y=\"" << panel.y0 << "\" width=\"" << panel.size
            << "\" height=\"" << panel.size << "\" fill=\"none\" stroke=\"black\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace sbs
