#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "araim/error.hpp"
#include "araim/gmpfa.hpp"
#include "araim/integrity.hpp"
#include "araim/navsol.hpp"
#include "araim/scenario.hpp"
#include "araim/stats.hpp"

namespace py = pybind11;
using namespace araim;

namespace {

template <class F>
std::vector<double> column(const PfaSeries& s, F field) {
    std::vector<double> v;
    v.reserve(s.steps.size());
    for (const auto& step : s.steps) {
        v.push_back(static_cast<double>(field(step)));
    }
    return v;
}

GeometryEpoch sky_geometry(const std::vector<std::tuple<std::string, double, double>>& sky) {
    std::vector<SkyPoint> points;
    for (const auto& [id, el, az] : sky) {
        points.push_back({id, el, az});
    }
    return geometry_from_sky(points);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Solution-separation ARAIM and conditional false-alert probability under Gauss-Markov noise.";

    auto base = py::register_exception<Error>(m, "AraimError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SingularGeometryError>(m, "SingularGeometryError", base.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<DepletionError>(m, "DepletionError", numerical.ptr());

    m.def("q_tail", [](double x) { return q_tail(x).value(); }, py::arg("x"),
          "Probability that a standard normal variable exceeds x.");
    m.def("q_tail_inv", [](double p) { return q_tail_inv(p).value(); }, py::arg("p"));
    m.def("erf", &araim::erf, py::arg("x"));

    py::class_<GmParams>(m, "GmParams")
        .def_readonly("tau", &GmParams::tau)
        .def_readonly("dt", &GmParams::dt)
        .def_readonly("a", &GmParams::a)
        .def_readonly("q_var", &GmParams::q_var)
        .def_readonly("p_x", &GmParams::p_x)
        .def("__repr__", [](const GmParams& g) {
            return "GmParams(tau=" + std::to_string(g.tau) + ", a=" + std::to_string(g.a) +
                   ", q_var=" + std::to_string(g.q_var) + ", p_x=" + std::to_string(g.p_x) + ")";
        });
    m.def("gm_params", &gm_params, py::arg("tau"), py::arg("dt"), py::arg("q_var"));
    m.def("gm_from_coefficient", &gm_from_coefficient, py::arg("a"), py::arg("q_var"), py::arg("dt") = 1.0);
    m.def("quantile_bound", &quantile_bound, py::arg("p_out_0"), py::arg("p_x"));
    m.def("conditional_pdf_k1", &conditional_pdf_k1, py::arg("x1"), py::arg("gm"), py::arg("q"), py::arg("p_out_0"));
    m.def("pout1_analytic", [](const GmParams& gm, double q, double p0) { return pout1_analytic(gm, q, p0).value(); },
          py::arg("gm"), py::arg("q"), py::arg("p_out_0"));

    py::class_<PfaSeries>(m, "PfaSeries")
        .def_readonly("p_out_0", &PfaSeries::p_out_0)
        .def_readonly("q", &PfaSeries::q)
        .def_readonly("gm", &PfaSeries::gm)
        .def_readonly("total_samples", &PfaSeries::total_samples)
        .def_readonly("initial_survivors", &PfaSeries::initial_survivors)
        .def_readonly("seed", &PfaSeries::seed)
        .def_property_readonly("k_end", &PfaSeries::k_end)
        .def_property_readonly("p_out", [](const PfaSeries& s) { return column(s, [](auto& x) { return x.p_out; }); })
        .def_property_readonly("moving_avg",
                               [](const PfaSeries& s) { return column(s, [](auto& x) { return x.moving_avg; }); })
        .def_property_readonly("ratio", [](const PfaSeries& s) { return column(s, [](auto& x) { return x.ratio; }); })
        .def_property_readonly("survivors", [](const PfaSeries& s) {
            std::vector<std::uint64_t> v;
            for (const auto& x : s.steps) v.push_back(x.survivors);
            return v;
        })
        .def_property_readonly("events", [](const PfaSeries& s) {
            std::vector<std::uint64_t> v;
            for (const auto& x : s.steps) v.push_back(x.events);
            return v;
        });
    m.def(
        "mc_conditional_pout",
        [](const GmParams& gm, double p0, std::size_t k_end, std::uint64_t m_total, std::uint64_t seed,
           std::size_t batch_size, unsigned threads) {
            py::gil_scoped_release release;
            return mc_conditional_pout(gm, p0, k_end, m_total, seed, McOptions{batch_size, threads});
        },
        py::arg("gm"), py::arg("p_out_0"), py::arg("k_end"), py::arg("m_total"), py::arg("seed"),
        py::arg("batch_size") = 10'000'000, py::arg("threads") = 0);
    m.def("correction_coefficient", &correction_coefficient, py::arg("series"), py::arg("k_end"));

    py::class_<GeometryEpoch>(m, "GeometryEpoch")
        .def_property_readonly("sat_ids", &GeometryEpoch::sat_ids)
        .def_property_readonly("h0", &GeometryEpoch::h0)
        .def("__len__", &GeometryEpoch::size);
    m.def("geometry_from_sky", &sky_geometry, py::arg("sky"), "Geometry from (sat_id, elevation_deg, azimuth_deg).");
    m.def("synth_constellation", &synth_constellation, py::arg("seed"), py::arg("n_sats"), py::arg("mask_angle_deg"));

    py::class_<ErrorBudget>(m, "ErrorBudget")
        .def_readwrite("sigma_cont", &ErrorBudget::sigma_cont)
        .def_readwrite("sigma_int", &ErrorBudget::sigma_int)
        .def_readwrite("b_nom", &ErrorBudget::b_nom)
        .def_readwrite("b_max", &ErrorBudget::b_max)
        .def_static("uniform", &ErrorBudget::uniform, py::arg("n_sats"), py::arg("sigma_cont"),
                    py::arg("sigma_int"), py::arg("b_nom") = 0.0, py::arg("b_max") = 0.0);

    py::class_<BudgetConfig>(m, "BudgetConfig")
        .def_readwrite("b_nom", &BudgetConfig::b_nom)
        .def_readwrite("b_max", &BudgetConfig::b_max)
        .def_readwrite("mask_angle_deg", &BudgetConfig::mask_angle_deg);
    m.def("default_budget_config", &default_budget_config);
    m.def("load_budget", &load_budget, py::arg("path"));
    m.def("apply_budget", &apply_budget, py::arg("config"), py::arg("geometry"));

    py::class_<SubSolution>(m, "SubSolution")
        .def_readonly("excluded", &SubSolution::excluded)
        .def_readonly("sn", &SubSolution::sn)
        .def_readonly("pn_cont", &SubSolution::pn_cont)
        .def_readonly("pn_int", &SubSolution::pn_int)
        .def_readonly("dpn", &SubSolution::dpn);
    py::class_<SolutionSet>(m, "SolutionSet")
        .def_readonly("s0", &SolutionSet::s0)
        .def_readonly("p0", &SolutionSet::p0)
        .def_readonly("subs", &SolutionSet::subs);
    m.def("build_solution_set", &build_solution_set, py::arg("geometry"), py::arg("budget"));

    py::enum_<PfaMode>(m, "PfaMode")
        .value("WHITE", PfaMode::White)
        .value("COMMON", PfaMode::CorrCommon)
        .value("COND", PfaMode::Cond);
    py::class_<IntegrityConfig>(m, "IntegrityConfig")
        .def(py::init<>())
        .def_readwrite("pfa_total_vertical", &IntegrityConfig::pfa_total_vertical)
        .def_readwrite("window_seconds", &IntegrityConfig::window_seconds)
        .def_readwrite("sample_dt", &IntegrityConfig::sample_dt)
        .def_readwrite("p_md", &IntegrityConfig::p_md)
        .def_readwrite("pfa_mode", &IntegrityConfig::pfa_mode)
        .def_readwrite("c_corr", &IntegrityConfig::c_corr)
        .def_readwrite("val", &IntegrityConfig::val);
    m.def("pfa_per_sample", [](const IntegrityConfig& c) { return pfa_per_sample(c).value(); }, py::arg("config"));

    py::class_<SubsolutionIntegrity>(m, "SubsolutionIntegrity")
        .def_readonly("excluded", &SubsolutionIntegrity::excluded)
        .def_readonly("d_v", &SubsolutionIntegrity::d_v)
        .def_readonly("db_v", &SubsolutionIntegrity::db_v)
        .def_readonly("a_v", &SubsolutionIntegrity::a_v)
        .def_readonly("ab_v", &SubsolutionIntegrity::ab_v)
        .def_readonly("vpl", &SubsolutionIntegrity::vpl);
    py::class_<IntegrityOutput>(m, "IntegrityOutput")
        .def_readonly("subs", &IntegrityOutput::subs)
        .def_readonly("vpl", &IntegrityOutput::vpl)
        .def_readonly("alert", &IntegrityOutput::alert);
    m.def("evaluate_integrity", &evaluate_integrity, py::arg("solutions"), py::arg("budget"), py::arg("config"));
    m.def("detect", [](const std::vector<double>& d, const std::vector<double>& t) { return detect(d, t); },
          py::arg("separations"), py::arg("thresholds"));

    py::class_<AvailabilityStats>(m, "AvailabilityStats")
        .def_readonly("availability", &AvailabilityStats::availability)
        .def_readonly("vpl_at_99pct", &AvailabilityStats::vpl_at_99pct);
    m.def("availability_stats", [](const std::vector<double>& v, double val) { return availability_stats(v, val); },
          py::arg("vpl_samples"), py::arg("val"));
}
