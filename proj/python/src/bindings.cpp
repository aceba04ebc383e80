#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbs/moduli.hpp"
#include "sbs/morse.hpp"

namespace py = pybind11;
using namespace sbs;

namespace {

BinaryForm make_form(int degree, const std::vector<Complex>& coefficients) {
    return BinaryForm(degree, coefficients);
}

SpherePoint point_from_pair(int chart, Complex coord) {
    if (chart != 0 && chart != 1) throw_invalid_input("chart must be 0 or 1");
    return SpherePoint{static_cast<Chart>(chart), coord}.normalized();
}

py::dict point_dict(const SpherePoint& p) {
    py::dict d;
    d["chart"] = static_cast<int>(p.chart);
    d["coord"] = p.coord;
    return d;
}

py::dict critical_point_dict(const CriticalPoint& cp) {
    py::dict d;
    d["location"] = point_dict(cp.location);
    d["index"] = cp.index;
    d["value"] = cp.value;
    d["hessian_eigenvalues"] = py::make_tuple(cp.hessian_eigenvalues[0], cp.hessian_eigenvalues[1]);
    if (cp.unstable_direction)
        d["unstable_direction"] = cp.unstable_direction->value;
    else
        d["unstable_direction"] = py::none();
    return d;
}

LoopCurve loop_from_points(const std::vector<std::tuple<int, double, double>>& points) {
    LoopCurve loop;
    loop.samples.reserve(points.size());
    for (const auto& [chart, re, im] : points)
        loop.samples.push_back(point_from_pair(chart, Complex{re, im}));
    return loop;
}

std::vector<std::tuple<int, double, double>> loop_points(const LoopCurve& loop) {
    std::vector<std::tuple<int, double, double>> out;
    out.reserve(loop.samples.size());
    for (const auto& p : loop.samples)
        out.emplace_back(static_cast<int>(p.chart), p.coord.real(), p.coord.imag());
    return out;
}

py::dict report_dict(const LoopReport& rep) {
    py::dict d;
    d["action"] = rep.action;
    d["enclosed_area"] = rep.enclosed_area;
    d["winding"] = rep.winding;
    d["holonomy"] = rep.holonomy;
    d["is_exact"] = rep.is_exact;
    d["is_d_monotonic"] = rep.is_d_monotonic;
    d["fs_length"] = rep.fs_length;
    return d;
}

CoefficientPath path_from_steps(const std::vector<std::vector<Complex>>& steps) {
    CoefficientPath path;
    for (const auto& coeffs : steps)
        path.steps.push_back(BinaryForm(static_cast<int>(coeffs.size()) - 1, coeffs));
    return path;
}

} // namespace

PYBIND11_MODULE(_sbs, m) {
    m.doc() = "Bohr-Sommerfeld geometry of holomorphic-section complements on the sphere";

    py::register_exception<Error>(m, "SbsError");

    py::class_<BinaryForm>(m, "BinaryForm")
        .def(py::init(&make_form), py::arg("degree"), py::arg("coefficients"))
        .def_readonly("degree", &BinaryForm::degree)
        .def_readonly("coefficients", &BinaryForm::coefficients)
        .def("__repr__", [](const BinaryForm& f) {
            return "BinaryForm(degree=" + std::to_string(f.degree) + ")";
        });

    m.def("section_norm",
          [](const BinaryForm& f, int chart, Complex coord) {
              return section_norm(f, point_from_pair(chart, coord));
          },
          py::arg("form"), py::arg("chart"), py::arg("coord"));
    m.def("kahler_potential",
          [](const BinaryForm& f, int chart, Complex coord) {
              return kahler_potential(f, point_from_pair(chart, coord));
          },
          py::arg("form"), py::arg("chart"), py::arg("coord"));
    m.def("divisor_roots", [](const BinaryForm& f) {
        py::list out;
        for (const auto& e : divisor_roots(f).points) {
            py::dict d = point_dict(e.point);
            d["multiplicity"] = e.multiplicity;
            out.append(d);
        }
        return out;
    });
    m.def("discriminant_distance", &discriminant_distance);

    m.def("critical_points", [](const BinaryForm& f) {
        py::list out;
        for (const auto& cp : find_critical_points(f)) out.append(critical_point_dict(cp));
        return out;
    });

    m.def("skeleton", [](const BinaryForm& f) {
        const Skeleton skel = extract_skeleton(f);
        py::dict d;
        py::list cps;
        for (const auto& cp : skel.critical_points) cps.append(critical_point_dict(cp));
        d["critical_points"] = cps;
        py::list arcs;
        for (const auto& arc : skel.arcs) {
            py::dict a;
            a["saddle"] = critical_point_dict(arc.saddle);
            a["endpoint_a"] = critical_point_dict(arc.endpoint_a);
            a["endpoint_b"] = critical_point_dict(arc.endpoint_b);
            py::list samples;
            for (const auto& s : arc.samples)
                samples.append(py::make_tuple(s.time, static_cast<int>(s.point.chart),
                                              s.point.coord.real(), s.point.coord.imag(), s.psi));
            a["samples"] = samples;
            arcs.append(a);
        }
        d["arcs"] = arcs;
        return d;
    });

    m.def("action_integral",
          [](const BinaryForm& f, const std::vector<std::tuple<int, double, double>>& pts) {
              return action_integral(f, loop_from_points(pts));
          });
    m.def("winding_numbers",
          [](const BinaryForm& f, const std::vector<std::tuple<int, double, double>>& pts) {
              return winding_numbers(f, loop_from_points(pts));
          });
    m.def("enclosed_area",
          [](const BinaryForm& f, const std::vector<std::tuple<int, double, double>>& pts) {
              return enclosed_area(f, loop_from_points(pts));
          });
    m.def("holonomy", [](const BinaryForm& f, const std::vector<std::tuple<int, double, double>>& pts) {
        return holonomy(f, loop_from_points(pts));
    });
    m.def("check_proposition",
          [](const BinaryForm& f, const std::vector<std::tuple<int, double, double>>& pts) {
              return report_dict(check_proposition(f, loop_from_points(pts)));
          });

    m.def("construct_exact_loop",
          [](const BinaryForm& f, int zero_index, int samples) {
              LoopOptions opts;
              opts.samples = samples;
              return loop_points(construct_exact_loop(f, zero_index, opts));
          },
          py::arg("form"), py::arg("zero_index"), py::arg("samples") = 256);

    m.def("exact_loops", [](const BinaryForm& f) {
        const ModuliFiber fiber = enumerate_fiber(f);
        py::list out;
        for (const auto& s : fiber.sheets) {
            py::dict d;
            d["zero_index"] = s.zero_index;
            d["zero"] = point_dict(s.zero);
            d["loop"] = s.loop ? py::object(py::cast(loop_points(*s.loop))) : py::object(py::none());
            d["report"] = s.report ? py::object(report_dict(*s.report)) : py::object(py::none());
            out.append(d);
        }
        return out;
    });

    m.def("monodromy", [](const std::vector<std::vector<Complex>>& steps) {
        const CoefficientPath path = path_from_steps(steps);
        const ModuliFiber base = enumerate_fiber(path.steps.front());
        return monodromy(path, base).permutation;
    });
    m.def("root_braid", [](const std::vector<std::vector<Complex>>& steps) {
        return root_braid_permutation(path_from_steps(steps));
    });
    m.def("locate_discriminant",
          [](const BinaryForm& form, const BinaryForm& direction, double t_max) {
              return locate_discriminant(form, direction, t_max);
          },
          py::arg("form"), py::arg("direction"), py::arg("t_max") = 1.0);
}
