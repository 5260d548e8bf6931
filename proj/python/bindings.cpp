// Python bindings: models, evaluation, Pareto utilities and the campaign
// commands. Input errors surface as ValueError, state errors as RuntimeError.
#include "armsynth/campaign.hpp"
#include "armsynth/config.hpp"
#include "armsynth/kinematics.hpp"
#include "armsynth/pareto.hpp"
#include "armsynth/urdf.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace armsynth;

namespace {

std::vector<ObjectiveVector> to_points(const std::vector<std::pair<double, double>>& pts) {
    std::vector<ObjectiveVector> out;
    out.reserve(pts.size());
    for (const auto& [x, t] : pts) {
        ObjectiveVector o;
        o.e_x = x;
        o.e_tau = t;
        out.push_back(o);
    }
    return out;
}

py::dict objectives_dict(const ObjectiveVector& o) {
    py::dict d;
    d["e_x"] = o.e_x;
    d["e_tau"] = o.e_tau;
    d["feasible"] = o.feasible;
    py::list per;
    for (const auto& t : o.per_target) {
        py::dict e;
        e["position_error"] = t.position_error;
        e["torque_norm"] = t.torque_norm;
        e["converged"] = t.converged;
        per.append(e);
    }
    d["per_target"] = per;
    return d;
}

IkOptions ik_options(std::uint64_t seed, int restarts, double tol) {
    IkOptions ik;
    ik.seed = seed;
    ik.restarts = restarts;
    ik.tol = tol;
    return ik;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Serial-chain design synthesis: kinematics, evaluation and multi-objective search";

    static py::exception<ParseError> input_error(m, "InputError", PyExc_ValueError);
    static py::exception<StateError> state_error(m, "StateError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParseError& e) {
            py::set_error(input_error, e.what());
        } catch (const StateError& e) {
            py::set_error(state_error, e.what());
        } catch (const ContractViolation& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<KinematicModel>(m, "Model")
        .def_property_readonly("dof", &KinematicModel::dof)
        .def_property_readonly("reach", &KinematicModel::reach)
        .def_property_readonly("base_offset", [](const KinematicModel& k) { return k.base_offset; })
        .def_property_readonly("masses",
                               [](const KinematicModel& k) {
                                   std::vector<double> out;
                                   for (const auto& l : k.links) out.push_back(l.mass);
                                   return out;
                               })
        .def(
            "tip", [](const KinematicModel& k, const VecX& theta) { return forward_kinematics(k, theta).tip.position; },
            py::arg("theta"), "End-effector position at joint angles `theta`.")
        .def(
            "joint_origins",
            [](const KinematicModel& k, const VecX& theta) {
                std::vector<Vec3> out;
                for (const auto& f : forward_kinematics(k, theta).joints) out.push_back(f.origin);
                return out;
            },
            py::arg("theta"))
        .def(
            "gravity_torque",
            [](const KinematicModel& k, const VecX& theta, double payload) { return gravity_torque(k, theta, payload); },
            py::arg("theta"), py::arg("payload") = 0.0)
        .def(
            "solve_ik",
            [](const KinematicModel& k, const Vec3& target, std::uint64_t seed, int restarts, double tol) {
                Pose p;
                p.position = target;
                const IkResult r = solve_ik(k, p, ik_options(seed, restarts, tol));
                py::dict d;
                d["angles"] = r.angles;
                d["position"] = r.achieved.position;
                d["position_error"] = r.position_error;
                d["torque"] = r.torque;
                d["converged"] = r.converged;
                d["iterations"] = r.iterations;
                return d;
            },
            py::arg("target"), py::arg("seed") = 0, py::arg("restarts") = 10, py::arg("tol") = 1e-4)
        .def(
            "to_urdf", [](const KinematicModel& k, const std::string& name) { return export_urdf(k, name); },
            py::arg("name") = "design");

    m.def("load_urdf", &load_urdf, py::arg("path"));
    m.def("parse_urdf", &parse_urdf, py::arg("text"));
    m.def(
        "decode",
        [](const std::filesystem::path& space_path, const std::string& genotype_json) {
            SearchSpace space = load_search_space(space_path).space;
            const Genotype g = parse_genotype(genotype_json);
            space.n_joint = static_cast<int>(g.size());
            check_structure(space, g);
            return decode(space, g);
        },
        py::arg("space"), py::arg("genotype"), "Model of a genotype document (JSON text) in a search-space file.");

    m.def(
        "evaluate",
        [](const KinematicModel& k, const std::filesystem::path& targets, std::uint64_t seed, int restarts,
           double tol) { return objectives_dict(evaluate(k, load_targets_file(targets), ik_options(0, restarts, tol), seed)); },
        py::arg("model"), py::arg("targets"), py::arg("seed") = 0, py::arg("restarts") = 10, py::arg("tol") = 1e-4,
        "E_x, E_tau and per-target diagnostics of a model against a target file.");

    m.def(
        "dominates",
        [](std::pair<double, double> u, std::pair<double, double> v) {
            const auto p = to_points({u, v});
            return dominates(p[0], p[1]);
        },
        py::arg("u"), py::arg("v"));
    m.def(
        "nondominated_sort", [](const std::vector<std::pair<double, double>>& pts) { return nondominated_sort(to_points(pts)); },
        py::arg("points"));
    m.def(
        "hypervolume",
        [](const std::vector<std::pair<double, double>>& pts, std::pair<double, double> ref) {
            return hypervolume(to_points(pts), to_points({ref})[0]);
        },
        py::arg("points"), py::arg("reference"));

    m.def(
        "optimize",
        [](const std::filesystem::path& config, std::optional<std::uint64_t> seed, std::optional<int> trials,
           std::optional<std::filesystem::path> out, std::optional<int> jobs) {
            OptimizeOverrides o{seed, trials, out, jobs};
            std::vector<CampaignSummary> summaries;
            {
                py::gil_scoped_release release;
                summaries = run_optimize(load_campaign_config(config), o);
            }
            py::list result;
            for (const auto& s : summaries) {
                py::dict d;
                d["n_joint"] = s.n_joint;
                d["dir"] = s.dir;
                d["trials"] = s.trials;
                d["feasible"] = s.feasible;
                d["front_size"] = s.front_size;
                d["best_e_x"] = s.feasible ? py::object(py::float_(s.best_e_x)) : py::object(py::none());
                d["min_e_tau"] = s.feasible ? py::object(py::float_(s.min_e_tau)) : py::object(py::none());
                d["hypervolume"] = s.hypervolume;
                result.append(d);
            }
            return result;
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("trials") = py::none(), py::arg("out") = py::none(),
        py::arg("jobs") = py::none(), "Runs a campaign sweep; returns one summary per joint count.");
    m.def("report", &render_report, py::arg("campaign"), "Regenerates the SVG report; returns the front size.");
    m.def("export_trial", &export_campaign_trial, py::arg("campaign"), py::arg("trial"));
}
