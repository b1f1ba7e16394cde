#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccnet/analytics.hpp"
#include "ccnet/config.hpp"
#include "ccnet/errors.hpp"
#include "ccnet/results.hpp"
#include "ccnet/selftest.hpp"

namespace py = pybind11;
using namespace ccnet;

namespace {

Protocol protocol_arg(std::string const& name) { return parse_protocol(name); }

py::dict analytic_dict(AnalyticValue const& v)
{
    py::dict d;
    d["value"] = v.value;
    d["abs_error"] = v.abs_error;
    d["cancellation_ratio"] = v.cancellation_ratio;
    d["precision_warning"] = v.precision_warning;
    return d;
}

ExperimentConfig config_from(std::string const& text, std::vector<std::string> const& overrides)
{
    return parse_config(text, overrides);
}

}  // namespace

PYBIND11_MODULE(_ccnet, m)
{
    m.doc() = "ccnet native extension";
    m.attr("__version__") = version_string();

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<QuadratureFailure>(m, "QuadratureFailure", PyExc_ArithmeticError);

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<>())
        .def_readwrite("tx_power", &ChannelParams::tx_power)
        .def_readwrite("pathloss_const", &ChannelParams::pathloss_const)
        .def_readwrite("pathloss_exp", &ChannelParams::pathloss_exp)
        .def_readwrite("noise_power", &ChannelParams::noise_power)
        .def_readwrite("sinr_threshold", &ChannelParams::sinr_threshold)
        .def("noise_exponent", &ChannelParams::noise_exponent, py::arg("typical_distance"));
    m.def("default_channel", &default_channel);

    py::class_<QuadratureSpec>(m, "QuadratureSpec")
        .def(py::init<>())
        .def_readwrite("outer_limit", &QuadratureSpec::outer_limit)
        .def_readwrite("rel_tol", &QuadratureSpec::rel_tol)
        .def_readwrite("abs_tol", &QuadratureSpec::abs_tol)
        .def_readwrite("max_subdivisions", &QuadratureSpec::max_subdivisions)
        .def_readwrite("infinite_plane", &QuadratureSpec::infinite_plane)
        .def_readwrite("max_frequency", &QuadratureSpec::max_frequency)
        .def_readwrite("cf_tol", &QuadratureSpec::cf_tol);

    py::class_<NetworkModel>(m, "NetworkModel")
        .def(py::init([](double lambda, double r0, ChannelParams const& ch) {
                 NetworkModel model{lambda, r0, ch};
                 model.validate();
                 return model;
             }),
             py::arg("lambda_"), py::arg("typical_distance") = 10.0, py::arg("channel") = default_channel())
        .def_readwrite("lambda_", &NetworkModel::lambda)
        .def_readwrite("typical_distance", &NetworkModel::typical_distance)
        .def_readwrite("channel", &NetworkModel::channel);

    m.def("run_ccdf_demoivre", &run_ccdf_demoivre, py::arg("T"), py::arg("v"), py::arg("p"));
    m.def("binomial_tail", &binomial_tail, py::arg("T"), py::arg("v"), py::arg("p"));
    m.def("minimal_poly_degree", [](Matrix const& a) { return minimal_poly_degree(a); }, py::arg("A"));

    m.def(
        "sample_ppp",
        [](double intensity, double window_radius, double typical_distance, std::uint64_t seed) {
            PppConfig cfg{intensity, window_radius, typical_distance};
            cfg.validate();
            Engine rng = make_stream(seed, {0});
            return sample_ppp(cfg, rng).interferer_distances;
        },
        py::arg("intensity"), py::arg("window_radius"), py::arg("typical_distance") = 10.0, py::arg("seed") = 1,
        "Interferer distances of one realization.");

    m.def(
        "cond_success_prob_block",
        [](std::vector<double> distances, double r0, ChannelParams const& ch) {
            NetworkRealization r;
            r.interferer_distances = std::move(distances);
            r.typical_distance = r0;
            std::vector<std::size_t> all(r.size());
            for (std::size_t i = 0; i < all.size(); ++i) {
                all[i] = i;
            }
            return cond_success_prob_block(r, all, ch);
        },
        py::arg("active_distances"), py::arg("typical_distance"), py::arg("channel"));
    m.def(
        "cond_success_prob_classical",
        [](std::vector<double> distances, double r0, double q, ChannelParams const& ch) {
            NetworkRealization r;
            r.interferer_distances = std::move(distances);
            r.typical_distance = r0;
            return cond_success_prob_classical(r, q, ch);
        },
        py::arg("distances"), py::arg("typical_distance"), py::arg("q"), py::arg("channel"));

    m.def(
        "moment_zeta",
        [](int l, double q, NetworkModel const& model, QuadratureSpec const& quad, std::string const& protocol) {
            return moment_zeta(l, q, model, quad, protocol_arg(protocol));
        },
        py::arg("l"), py::arg("q"), py::arg("model"), py::arg("quad") = QuadratureSpec{},
        py::arg("protocol") = "block");
    m.def(
        "prob_block_controllable_restless",
        [](int T, int v, double q, NetworkModel const& model, QuadratureSpec const& quad, std::string const& p) {
            return analytic_dict(prob_block_controllable_restless(T, v, q, model, quad, protocol_arg(p)));
        },
        py::arg("T"), py::arg("v"), py::arg("q"), py::arg("model"), py::arg("quad") = QuadratureSpec{},
        py::arg("protocol") = "block");
    m.def(
        "prob_block_controllable_rested",
        [](int T, int v, double q, NetworkModel const& model, QuadratureSpec const& quad, std::string const& p) {
            return analytic_dict(prob_block_controllable_rested(T, v, q, model, quad, protocol_arg(p)));
        },
        py::arg("T"), py::arg("v"), py::arg("q"), py::arg("model"), py::arg("quad") = QuadratureSpec{},
        py::arg("protocol") = "block");
    m.def(
        "inverse_tail_threshold",
        [](int T, int v, double q, double beta, std::string const& p) {
            return inverse_tail_threshold(T, v, q, beta, protocol_arg(p));
        },
        py::arg("T"), py::arg("v"), py::arg("q"), py::arg("beta"), py::arg("protocol") = "block");
    m.def(
        "meta_distribution_rested",
        [](int T, int v, double q, double beta, NetworkModel const& model, QuadratureSpec const& quad,
           std::string const& p) {
            MetaQuery query{v, beta, T, q, model};
            return analytic_dict(meta_distribution_rested(query, quad, protocol_arg(p)));
        },
        py::arg("T"), py::arg("v"), py::arg("q"), py::arg("beta"), py::arg("model"),
        py::arg("quad") = QuadratureSpec{}, py::arg("protocol") = "block");

    m.def("regret_envelope", &regret_envelope, py::arg("K"), py::arg("T"), py::arg("D"), py::arg("C"));
    m.def("regret_envelope_explicit", &regret_envelope_explicit, py::arg("K"), py::arg("T"), py::arg("D"));

    m.def(
        "parse_config", [](std::string const& text, std::vector<std::string> const& overrides) {
            return to_config_text(config_from(text, overrides));
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Validate a configuration and return its resolved text.");
    m.def(
        "to_config_text", [](std::string const& text) { return to_config_text(config_from(text, {})); },
        py::arg("text"));

    m.def(
        "estimate_block_controllability",
        [](std::string const& text, std::vector<std::string> const& overrides, bool with_analytic) {
            ExperimentConfig const config = config_from(text, overrides);
            std::vector<SweepResult> rows;
            {
                py::gil_scoped_release release;
                rows = estimate_block_controllability(config, with_analytic);
            }
            py::list out;
            for (auto const& r : rows) {
                py::dict d;
                d["protocol"] = to_string(r.protocol);
                d["system"] = to_string(r.system);
                d["q"] = r.q;
                d["lambda"] = r.lambda;
                d["v"] = r.v;
                d["estimate"] = r.estimate;
                d["ci95"] = r.half_width_95;
                d["n_samples"] = r.n_samples;
                d["analytic"] = r.analytic ? py::cast(*r.analytic) : py::none();
                out.append(d);
            }
            return out;
        },
        py::arg("config_text") = "", py::arg("overrides") = std::vector<std::string>{},
        py::arg("with_analytic") = false);

    m.def(
        "run_ts",
        [](std::string const& text, std::vector<std::string> const& overrides) {
            ExperimentConfig const config = config_from(text, overrides);
            std::vector<TsOutcome> outcomes;
            {
                py::gil_scoped_release release;
                outcomes = run_ts_experiment(config);
            }
            py::list out;
            for (auto const& o : outcomes) {
                py::dict d;
                d["lambda"] = o.lambda;
                d["oracle_arm"] = o.run.oracle.index;
                d["mu"] = o.run.oracle.mu;
                d["chosen_arm"] = o.run.trace.chosen_arm;
                d["block_reward"] = o.run.trace.block_reward;
                d["cumulative_regret"] = o.run.trace.cumulative;
                d["distances"] = o.realization.interferer_distances;
                out.append(d);
            }
            return out;
        },
        py::arg("config_text") = "", py::arg("overrides") = std::vector<std::string>{});

    m.def("selftest", [] {
        std::ostringstream os;
        int const failures = run_selftest(os);
        return py::make_tuple(failures, os.str());
    });
}
