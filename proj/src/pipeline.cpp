#include "wavecontrol/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "wavecontrol/errors.hpp"
#include "wavecontrol/spectrum.hpp"

namespace wavecontrol {

using nlohmann::json;

std::optional<Command> parse_command(const std::string& name) {
    if (name == "analyze") return Command::analyze;
    if (name == "synthesize") return Command::synthesize;
    if (name == "verify") return Command::verify;
    if (name == "sweep") return Command::sweep;
    return std::nullopt;
}

const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::analyze: return "analyze";
        case Command::synthesize: return "synthesize";
        case Command::verify: return "verify";
        case Command::sweep: return "sweep";
    }
    return "analyze";
}

namespace {

class Stopwatch {
public:
    Stopwatch(std::map<std::string, double>& sink, std::string name)
        : sink_(sink), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~Stopwatch() {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
        sink_[name_] += d.count();
    }

private:
    std::map<std::string, double>& sink_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::BadInput:
        case ErrorKind::DimensionTooLarge:
            return kExitBadInput;
        case ErrorKind::RepeatedEigenvalues:
            return kExitConditionsViolated;
        default:
            return kExitNumericalFailure;
    }
}

struct CaseOutcome {
    std::optional<ConditionsReport> conditions;
    std::optional<SynthesisSummary> synthesis;
    std::optional<VerificationSummary> verification;
    std::optional<ControlSignal> control;
    std::optional<FieldValues> state;
    std::optional<double> gram_cond;
    bool gram_cond_extended = false;
    int exit_code = kExitOk;
    std::string status = "ok";
    std::string error;
};

void fail(CaseOutcome& out, const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.status = to_string(e.kind());
    out.error = e.what();
}

// Runs analysis and, unless `analyze_only`, synthesis plus verification.
CaseOutcome solve_case(const ProblemConfig& cfg, Method method, bool analyze_only, bool force, bool with_state,
                       std::map<std::string, double>& timings) {
    CaseOutcome out;
    try {
        const CouplingSystem sys = cfg.system();
        const Tolerances tol = cfg.resolved_tolerances();
        {
            Stopwatch sw(timings, "analyze");
            out.conditions = analyze(sys, cfg.t, tol);
        }
        const bool controllable = out.conditions->overall_controllable;
        if (!controllable) {
            out.exit_code = kExitConditionsViolated;
            out.status = "conditions_violated";
        }
        if (analyze_only || (!controllable && !force)) return out;

        SpectralDecomposition spec = decompose(sys, tol);
        std::optional<N2Normalization> norm;
        if (method == Method::n2_sharp) {
            norm = n2_normalize_eigvecs(sys, spec);
            spec = norm->spec;
        }
        const FrequencyGrid grid = build_frequencies(spec, cfg.k, tol.zero_tol, tol.coll_rel * (1.0 + static_cast<double>(cfg.k)));

        ModalState target;
        if (norm)
            target = n2_sharp_targets(cfg.target(), *norm, grid).modal;
        else
            target = target_to_modal(cfg.target(), spec, grid);

        SynthesisResult synth;
        MomentSystem ms;
        {
            Stopwatch sw(timings, "synthesize");
            std::optional<EddFamily> edd;
            const BasisKind basis = method == Method::raw ? BasisKind::raw : BasisKind::edd;
            if (basis == BasisKind::edd) edd = build_edd(grid, tol.coll_rel * (1.0 + static_cast<double>(cfg.k)));
            ms = assemble_gram(grid, edd ? &*edd : nullptr, cfg.t, basis);
            out.gram_cond = ms.cond_estimate;
            out.gram_cond_extended = ms.cond_extended;
            attach_moments(ms, moments_from_target(target, spec, grid, cfg.t, tol.beta_tol));
            synth = synthesize(ms, tol);
        }
        const ControlSignal real = realify(synth.control);

        SynthesisSummary sum;
        sum.basis = ms.basis == BasisKind::raw ? "raw" : "edd";
        sum.cond_estimate = ms.cond_estimate;
        sum.cond_extended = ms.cond_extended;
        sum.moment_residual = synth.moment_residual;
        sum.raw_moment_residual = raw_moment_residual(synth.control, ms);
        sum.realification_residual = real.realification_residual;
        sum.control_l2 = l2_norm(real);
        sum.terms = real.combo.size();
        out.synthesis = sum;

        {
            Stopwatch sw(timings, "verify");
            const VerificationReport rep = verify(spec, grid, real, target, cfg.t, tol.verify_tol);
            VerificationSummary v;
            v.tol = tol.verify_tol;
            v.max_relative_error = rep.max_relative_error;
            v.worst_k = rep.worst_k;
            v.worst_l = rep.worst_l;
            v.pass = rep.pass && controllable;
            v.wellposedness_ratio = rep.wellposedness_ratio;
            out.verification = v;
            if (with_state) {
                std::vector<double> xs(513);
                for (std::size_t i = 0; i < xs.size(); ++i)
                    xs[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
                out.state = reconstruct(rep.achieved, spec, xs);
            }
        }

        // A control for an uncontrollable configuration is never published.
        if (!controllable) return out;
        out.control = real;
        if (!out.verification->pass) {
            out.exit_code = kExitNumericalFailure;
            out.status = "verification_failed";
        }
    } catch (const Error& e) {
        fail(out, e);
    }
    return out;
}

}  // namespace

RunResult run(Command command, const ProblemConfig& cfg, const RunOptions& options) {
    RunResult result;
    RunReport& rep = result.report;
    rep.command = command;
    rep.method = options.method.value_or(cfg.method);
    rep.seed = options.seed;
    rep.forced = options.force;
    result.samples = cfg.samples;

    if (command == Command::sweep) {
        if (!cfg.sweep) {
            rep.exit_code = kExitBadInput;
            rep.status = "BadInput";
            rep.error = "sweep needs a \"sweep\" section in the config";
            return result;
        }
        rep.sweep_param = cfg.sweep->param;
        Stopwatch sw(rep.timings, "sweep");
        std::map<std::string, double> inner;
        for (double value : cfg.sweep->values) {
            ProblemConfig point = cfg;
            point.sweep.reset();
            if (cfg.sweep->param == "T")
                point.t = value;
            else
                point.k = static_cast<std::size_t>(value);
            SweepRow row;
            row.value = value;
            int max_mode = 0;
            for (const auto& [m, _] : point.z0) max_mode = std::max(max_mode, m);
            for (const auto& [m, _] : point.z1) max_mode = std::max(max_mode, m);
            if (static_cast<std::size_t>(max_mode) > point.k) {
                row.status = "BadInput";
                rep.sweep.push_back(row);
                continue;
            }
            // Sweep points always reach the Gram assembly: conditioning below
            // the minimal time is the quantity of interest there.
            const CaseOutcome c = solve_case(point, rep.method, false, true, false, inner);
            row.controllable = c.conditions && c.conditions->overall_controllable;
            row.cond_estimate = c.gram_cond.value_or(std::numeric_limits<double>::infinity());
            row.cond_extended = c.gram_cond_extended;
            if (c.synthesis) row.moment_residual = c.synthesis->moment_residual;
            if (c.verification) row.verify_error = c.verification->max_relative_error;
            row.status = c.status;
            rep.sweep.push_back(row);
        }
        return result;
    }

    CaseOutcome c = solve_case(cfg, rep.method, command == Command::analyze, options.force,
                               command == Command::verify, rep.timings);
    rep.conditions = std::move(c.conditions);
    rep.synthesis = std::move(c.synthesis);
    rep.verification = std::move(c.verification);
    rep.exit_code = c.exit_code;
    rep.status = c.status;
    rep.error = c.error;
    result.control = std::move(c.control);
    if (result.control) result.state = std::move(c.state);
    if (command == Command::synthesize) result.state.reset();
    return result;
}

namespace {

// JSON has no infinity; large condition numbers are reported as a string.
json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json conditions_json(const ConditionsReport& c) {
    json res = json::array();
    for (const auto& r : c.resonances) res.push_back({{"k", r.k}, {"l", r.l}, {"i", r.i}, {"j", r.j}, {"defect", r.defect}});
    json betas = json::array();
    for (double b : c.beta_magnitudes) betas.push_back(number(b));
    return {{"n", c.n},
            {"kalman_rank", c.kalman_rank},
            {"kalman_ok", c.kalman_ok},
            {"beta_magnitudes", betas},
            {"vanishing_beta", c.vanishing_beta},
            {"resonances", res},
            {"t_min", c.t_min},
            {"T", c.t},
            {"t_ok", c.t_ok},
            {"overall_controllable", c.overall_controllable}};
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

json report_to_json(const RunReport& r) {
    json doc;
    doc["command"] = to_string(r.command);
    doc["method"] = to_string(r.method);
    doc["seed"] = r.seed;
    doc["forced"] = r.forced;
    doc["exit_code"] = r.exit_code;
    doc["status"] = r.status;
    doc["error"] = r.error;
    doc["conditions"] = r.conditions ? conditions_json(*r.conditions) : json(nullptr);
    if (r.synthesis) {
        const auto& s = *r.synthesis;
        doc["synthesis"] = {{"basis", s.basis},
                            {"cond_estimate", number(s.cond_estimate)},
                            {"cond_extended", s.cond_extended},
                            {"moment_residual", number(s.moment_residual)},
                            {"raw_moment_residual", number(s.raw_moment_residual)},
                            {"realification_residual", number(s.realification_residual)},
                            {"control_l2", number(s.control_l2)},
                            {"terms", s.terms}};
    } else {
        doc["synthesis"] = nullptr;
    }
    if (r.verification) {
        const auto& v = *r.verification;
        doc["verification"] = {{"tol", v.tol},
                               {"max_relative_error", number(v.max_relative_error)},
                               {"worst_mode", {v.worst_k, v.worst_l}},
                               {"pass", v.pass},
                               {"wellposedness_ratio", number(v.wellposedness_ratio)}};
    } else {
        doc["verification"] = nullptr;
    }
    if (r.command == Command::sweep) {
        json rows = json::array();
        for (const auto& row : r.sweep)
            rows.push_back({{"value", row.value},
                            {"controllable", row.controllable},
                            {"cond_estimate", number(row.cond_estimate)},
                            {"cond_extended", row.cond_extended},
                            {"moment_residual", number(row.moment_residual)},
                            {"verify_error", number(row.verify_error)},
                            {"status", row.status}});
        doc["sweep"] = {{"param", r.sweep_param}, {"rows", rows}};
    }
    return doc;
}

json timings_to_json(const RunReport& r) {
    json t = json::object();
    for (const auto& [k, v] : r.timings) t[k] = v;
    return t;
}

void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto open = [&](const char* name) {
        std::ofstream f(out_dir / name);
        if (!f) throw Error(ErrorKind::BadInput, "cannot write " + (out_dir / name).string());
        return f;
    };
    open("report.json") << report_to_json(result.report).dump(2) << "\n";
    open("timings.json") << timings_to_json(result.report).dump(2) << "\n";

    if (result.control) {
        const ControlSignal& f = *result.control;
        auto csv = open("control.csv");
        csv << "t,f\n";
        const Samples s = f.sample(std::max<std::size_t>(2, result.samples));
        for (std::size_t i = 0; i < s.values.size(); ++i) csv << fmt17(s.times[i]) << "," << fmt17(s.values[i].real()) << "\n";

        json terms = json::array();
        for (const auto& term : f.combo)
            terms.push_back({term.frequency.real(), term.frequency.imag(), term.weight.real(), term.weight.imag()});
        open("control_combo.json") << json({{"T", f.t}, {"columns", {"freq_re", "freq_im", "amp_re", "amp_im"}}, {"terms", terms}}).dump(2)
                                   << "\n";
    }
    if (result.state) {
        const FieldValues& st = *result.state;
        const std::size_t n = st.u.empty() ? 0 : st.u.front().size();
        auto csv = open("state.csv");
        csv << "x";
        for (std::size_t m = 1; m <= n; ++m) csv << ",u" << m;
        for (std::size_t m = 1; m <= n; ++m) csv << ",ut" << m;
        csv << "\n";
        for (std::size_t i = 0; i < st.x.size(); ++i) {
            csv << fmt17(st.x[i]);
            for (std::size_t m = 0; m < n; ++m) csv << "," << fmt17(st.u[i][m].real());
            for (std::size_t m = 0; m < n; ++m) csv << "," << fmt17(st.ut[i][m].real());
            csv << "\n";
        }
    }
    if (result.report.command == Command::sweep) {
        auto csv = open("sweep.csv");
        csv << result.report.sweep_param << ",controllable,cond_estimate,cond_extended,moment_residual,verify_error,status\n";
        for (const auto& row : result.report.sweep)
            csv << fmt17(row.value) << "," << (row.controllable ? 1 : 0) << "," << fmt17(row.cond_estimate) << ","
                << (row.cond_extended ? 1 : 0) << "," << fmt17(row.moment_residual) << "," << fmt17(row.verify_error) << ","
                << row.status << "\n";
    }
}

}  // namespace wavecontrol
