#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavecontrol/config.hpp"
#include "wavecontrol/coupling.hpp"
#include "wavecontrol/errors.hpp"
#include "wavecontrol/moments.hpp"
#include "wavecontrol/pipeline.hpp"
#include "wavecontrol/spectrum.hpp"

namespace py = pybind11;
namespace wc = wavecontrol;

namespace {

wc::CouplingSystem make_system(const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
    std::vector<double> flat;
    for (const auto& row : a) {
        if (row.size() != a.size()) throw wc::Error(wc::ErrorKind::BadInput, "A must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return wc::CouplingSystem(a.size(), std::move(flat), b);
}

py::dict conditions_dict(const wc::ConditionsReport& c) {
    py::list res;
    for (const auto& r : c.resonances) res.append(py::make_tuple(r.k, r.l, r.i, r.j));
    py::dict d;
    d["n"] = c.n;
    d["kalman_rank"] = c.kalman_rank;
    d["kalman_ok"] = c.kalman_ok;
    d["beta_magnitudes"] = c.beta_magnitudes;
    d["vanishing_beta"] = c.vanishing_beta;
    d["resonances"] = res;
    d["t_min"] = c.t_min;
    d["t_ok"] = c.t_ok;
    d["overall_controllable"] = c.overall_controllable;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Moment-method boundary control of coupled wave systems";

    py::register_exception<wc::Error>(m, "WaveControlError");

    m.def(
        "decompose",
        [](const std::vector<std::vector<double>>& a, const std::vector<double>& b) {
            const auto spec = wc::decompose(make_system(a, b));
            std::vector<std::vector<wc::Complex>> phi, psi;
            for (std::size_t l = 0; l < spec.size(); ++l) {
                phi.push_back(spec.phi(l));
                psi.push_back(spec.psi(l));
            }
            py::dict d;
            d["eigenvalues"] = spec.eigenvalues;
            d["phi"] = phi;
            d["psi"] = psi;
            d["beta"] = spec.beta;
            return d;
        },
        py::arg("A"), py::arg("b"), "Eigenvalues, eigenvectors, biorthogonal vectors and beta = <b, psi>.");

    m.def(
        "analyze",
        [](const std::vector<std::vector<double>>& a, const std::vector<double>& b, double t) {
            return conditions_dict(wc::analyze(make_system(a, b), t));
        },
        py::arg("A"), py::arg("b"), py::arg("T"));

    m.def(
        "frequencies",
        [](const std::vector<std::vector<double>>& a, const std::vector<double>& b, std::size_t k_max) {
            const auto grid = wc::build_frequencies(wc::decompose(make_system(a, b)), k_max);
            std::vector<std::vector<wc::Complex>> out(k_max);
            for (std::size_t k = 1; k <= k_max; ++k)
                for (std::size_t l = 0; l < grid.n(); ++l) out[k - 1].push_back(grid.omega(static_cast<int>(k), l));
            return out;
        },
        py::arg("A"), py::arg("b"), py::arg("K"), "omega_{k,l} for k = 1..K.");

    m.def("divided_difference_weights", [](const std::vector<wc::Complex>& nodes) { return wc::divided_difference_weights(nodes); });
    m.def("gram_entry", &wc::gram_entry, py::arg("omega_a"), py::arg("omega_b"), py::arg("T"));
    m.def("resonance_check", [](const std::vector<wc::Complex>& lambda) {
        py::list out;
        for (const auto& r : wc::resonance_check(lambda)) out.append(py::make_tuple(r.k, r.l, r.i, r.j));
        return out;
    });

    m.def("normalize_config", [](const std::string& text) { return wc::serialize_config(wc::parse_config(text)); },
          "Parse, validate and re-serialize a configuration document.");

    m.def(
        "run",
        [](const std::string& command, const std::string& config_text, std::optional<std::string> method, bool force) {
            const auto cmd = wc::parse_command(command);
            if (!cmd) throw wc::Error(wc::ErrorKind::BadInput, "unknown command '" + command + "'");
            wc::RunOptions opts;
            opts.force = force;
            if (method) {
                opts.method = wc::parse_method(*method);
                if (!opts.method) throw wc::Error(wc::ErrorKind::BadInput, "unknown method '" + *method + "'");
            }
            const auto result = wc::run(*cmd, wc::parse_config(config_text), opts);
            py::dict d;
            d["report"] = wc::report_to_json(result.report).dump();
            if (result.control) {
                std::vector<std::tuple<wc::Complex, wc::Complex>> terms;
                for (const auto& term : result.control->combo) terms.emplace_back(term.frequency, term.weight);
                d["control_terms"] = terms;
            } else {
                d["control_terms"] = py::none();
            }
            return d;
        },
        py::arg("command"), py::arg("config"), py::arg("method") = py::none(), py::arg("force") = false,
        "Run a CLI command in-process; the report is returned as a JSON string.");
}
