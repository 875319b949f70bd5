#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fluctlab/asymptotics.hpp"
#include "fluctlab/exit.hpp"
#include "fluctlab/green.hpp"
#include "fluctlab/harness.hpp"
#include "fluctlab/ladder.hpp"
#include "fluctlab/series.hpp"
#include "fluctlab/stepdist.hpp"
#include "fluctlab/util.hpp"

namespace py = pybind11;
using namespace fluctlab;

namespace {

LadderData ladder_py(const StepDistribution& d, std::int64_t n, double tol, int grid_log2,
                     int engine) {
    LadderOptions o;
    o.n = n;
    o.tol = tol;
    o.grid_log2 = grid_log2;
    o.engine = engine;
    return compute_ladder(d, o);
}

py::dict report_dict(const ConvergenceReport& rep) {
    py::dict out;
    out["formula"] = rep.formula_id;
    out["grid"] = rep.grid;
    out["exact"] = rep.exact;
    out["predicted"] = rep.predicted;
    out["ratio"] = rep.ratio;
    out["trend_stat"] = rep.trend_stat;
    out["verdict"] = rep.verdict;
    out["note"] = rep.note;
    out["applicable"] = rep.applicable;
    return out;
}

}  // namespace

PYBIND11_MODULE(_fluctlab, m) {
    m.doc() = "Exact fluctuation-theory quantities for integer-lattice random walks";

    py::register_exception<applicability_error>(m, "ApplicabilityError");

    py::class_<DistTags>(m, "DistTags")
        .def_readonly("family", &DistTags::family)
        .def_readonly("p", &DistTags::p)
        .def_readonly("q", &DistTags::q)
        .def_readonly("alpha", &DistTags::alpha)
        .def_readonly("symmetric", &DistTags::symmetric)
        .def_readonly("bounded", &DistTags::bounded)
        .def_readonly("mean_zero", &DistTags::mean_zero)
        .def_readonly("rs_class", &DistTags::rs_class)
        .def_readonly("recurrence_class", &DistTags::recurrence_class);

    py::class_<StepDistribution>(m, "StepDistribution")
        .def("pmf", &StepDistribution::pmf)
        .def("tail_plus", &StepDistribution::tail_plus)
        .def("tail_minus", &StepDistribution::tail_minus)
        .def("H", &StepDistribution::H)
        .def("truncated_mean_A", &StepDistribution::truncated_mean_A)
        .def("mean", &StepDistribution::mean)
        .def("mass_check", &StepDistribution::mass_check)
        .def("spec_string", &StepDistribution::spec_string)
        .def_property_readonly("tags", &StepDistribution::tags)
        .def(
            "sample",
            [](const StepDistribution& d, std::uint64_t seed, std::uint64_t stream,
               std::int64_t n) {
                Rng rng(seed, stream);
                std::vector<std::int64_t> out(static_cast<std::size_t>(n));
                for (auto& v : out) v = d.sample(rng);
                return out;
            },
            py::arg("seed"), py::arg("stream") = 0, py::arg("n") = 1)
        .def("__repr__", [](const StepDistribution& d) {
            return "<StepDistribution " + d.spec_string() + ">";
        });

    m.def("srw", &srw);
    m.def("lazy_srw", &lazy_srw, py::arg("hold_prob"));
    m.def("zipf_pair", &zipf_pair, py::arg("p"), py::arg("q"));
    m.def("stable_like", &stable_like, py::arg("alpha"), py::arg("p"), py::arg("q"));
    m.def("log_regular", &log_regular, py::arg("p"), py::arg("q"));
    m.def("finite", [](const std::map<std::int64_t, double>& t) { return finite(t); });
    m.def("parse_dist_spec", &parse_dist_spec);

    py::class_<LadderData>(m, "LadderData")
        .def_readonly("z_pmf", &LadderData::z_pmf)
        .def_readonly("zhat_pmf", &LadderData::zhat_pmf)
        .def_readonly("u_a", &LadderData::u_a)
        .def_readonly("U_a", &LadderData::U_a)
        .def_readonly("v_d", &LadderData::v_d)
        .def_readonly("V_d", &LadderData::V_d)
        .def_readonly("v0", &LadderData::v0)
        .def_readonly("z_defect", &LadderData::z_defect)
        .def_readonly("zhat_defect", &LadderData::zhat_defect)
        .def_readonly("defective", &LadderData::defective)
        .def_readonly("method", &LadderData::method)
        .def("green_halfline", &LadderData::green_halfline)
        .def("ua_error_bound", &LadderData::ua_error_bound);

    m.def("compute_ladder", &ladder_py, py::arg("dist"), py::arg("n") = 1 << 14,
          py::arg("tol") = 1e-10, py::arg("grid_log2") = 20, py::arg("engine") = 0);
    m.def("mirror", &mirror);
    m.def("ell_star", &ell_star);
    m.def("hat_ell_star", &hat_ell_star);
    m.def("renewal_sequence", [](const std::vector<double>& pmf, std::int64_t n) {
        return renewal_sequence(pmf, static_cast<std::size_t>(n));
    });
    m.def("nagaev_check", [](const std::vector<double>& q, double beyond, std::int64_t n,
                             const std::vector<std::int64_t>& grid) {
        return report_dict(nagaev_check(q, beyond, n, grid));
    });

    py::class_<IntervalGreen>(m, "IntervalGreen")
        .def(py::init<const StepDistribution&, std::int64_t, std::int64_t>(), py::arg("dist"),
             py::arg("R"), py::arg("dense_limit") = 4096)
        .def("value", &IntervalGreen::value)
        .def("row", &IntervalGreen::row)
        .def("exit_up", &IntervalGreen::exit_up)
        .def_property_readonly("R", &IntervalGreen::R)
        .def("max_residual", &IntervalGreen::max_residual);

    py::class_<LatticeKernels>(m, "LatticeKernels")
        .def(py::init<const StepDistribution&>())
        .def("potential", [](LatticeKernels& k, std::int64_t x) { return k.potential(x).value; })
        .def("green", [](LatticeKernels& k, std::int64_t x) { return k.green(x).value; });

    m.def("potential_series", [](const StepDistribution& d, std::int64_t x) {
        auto v = potential_series(d, x);
        return py::make_tuple(v.value, v.bound);
    });

    m.def("exit_upward",
          [](const StepDistribution& d, std::int64_t R) { return exit_upward(d, R).p_up; });
    m.def("hit_before", &hit_before);
    m.def("conditioned_hit", &conditioned_hit);
    m.def("exit_position", [](const StepDistribution& d, std::int64_t R, std::int64_t x) {
        IntervalGreen ig(d, R);
        return exit_position(d, ig, x);
    });
    m.def(
        "overshoot_law",
        [](const StepDistribution& d, std::int64_t R, std::int64_t x, double tail_tol) {
            IntervalGreen ig(d, R);
            auto law = overshoot_law(d, ig, x, tail_tol);
            return py::make_tuple(law.pmf, law.tail_bound);
        },
        py::arg("dist"), py::arg("R"), py::arg("x"), py::arg("tail_tol") = 1e-12);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("estimate", &McEstimate::estimate)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("n_paths", &McEstimate::n_paths)
        .def_readonly("n_conditioning", &McEstimate::n_conditioning)
        .def_readonly("seed", &McEstimate::seed)
        .def_readonly("layout", &McEstimate::layout)
        .def_readonly("cap_hits", &McEstimate::cap_hits);

    m.def(
        "mc_exit",
        [](const StepDistribution& d, std::int64_t R, std::int64_t x, std::int64_t n_paths,
           std::uint64_t seed, const std::string& what, std::int64_t y, int threads) {
            McWhat w;
            if (what == "p_up")
                w = McWhat::p_up;
            else if (what == "p_hit")
                w = McWhat::p_hit;
            else if (what == "overshoot_cdf")
                w = McWhat::overshoot_cdf;
            else if (what == "exit_pos_low")
                w = McWhat::exit_pos_low;
            else
                throw std::invalid_argument("unknown estimand '" + what + "'");
            McOptions o;
            o.threads = threads;
            return mc_exit(d, R, x, n_paths, seed, w, y, o);
        },
        py::arg("dist"), py::arg("R"), py::arg("x"), py::arg("n_paths"), py::arg("seed"),
        py::arg("what") = "p_up", py::arg("y") = 0, py::arg("threads") = 1);

    m.def("h_lambda", &h_lambda, py::arg("xi"), py::arg("lambda_"), py::arg("alpha"));
    m.def("overshoot_cdf_prediction", &overshoot_cdf_prediction);
    m.def("formula_catalogue", &formula_catalogue);
    m.def(
        "evaluate_formula",
        [](const std::string& id, const StepDistribution& d, const LadderData& ld,
           const std::vector<std::int64_t>& grid, const std::map<std::string, double>& params) {
            FormulaInputs in;
            in.d = &d;
            in.ld = &ld;
            LatticeKernels ker(d);
            in.ker = &ker;
            in.exact_pup_0 = [&](std::int64_t R) { return exit_upward(d, R).p_up[0]; };
            in.exact_pup_x = [&](std::int64_t x, std::int64_t R) {
                return exit_upward(d, R).p_up[static_cast<std::size_t>(x)];
            };
            in.params = params;
            return report_dict(evaluate_formula(id, in, grid));
        },
        py::arg("formula"), py::arg("dist"), py::arg("ladder"), py::arg("grid"),
        py::arg("params") = std::map<std::string, double>{});

    m.def(
        "run_suite",
        [](const std::string& out_dir, bool quick, std::int64_t mc_paths) {
            SuiteOptions o;
            o.quick = quick;
            o.mc_paths = mc_paths;
            std::ostringstream log;
            auto res = run_suite(o, out_dir, log);
            py::dict out;
            out["all_pass"] = res.all_pass;
            py::list items;
            for (const auto& c : res.items) {
                py::dict it;
                it["name"] = c.name;
                it["pass"] = c.pass;
                it["detail"] = c.detail;
                it["seconds"] = c.seconds;
                items.append(it);
            }
            out["items"] = items;
            out["log"] = log.str();
            return out;
        },
        py::arg("out_dir"), py::arg("quick") = true, py::arg("mc_paths") = 100000);
}
