#include "wavecontrol/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wavecontrol/errors.hpp"

namespace wavecontrol {

using nlohmann::json;

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::raw: return "raw";
        case Method::edd: return "edd";
        case Method::n2_sharp: return "n2_sharp";
    }
    return "raw";
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "raw") return Method::raw;
    if (name == "edd") return Method::edd;
    if (name == "n2_sharp") return Method::n2_sharp;
    return std::nullopt;
}

TargetSpec ProblemConfig::target() const {
    TargetSpec t;
    auto lift = [](const RealModes& src, std::vector<std::pair<int, CVector>>& dst) {
        for (const auto& [mode, v] : src) dst.emplace_back(mode, CVector(v.begin(), v.end()));
    };
    lift(z0, t.z0);
    lift(z1, t.z1);
    return t;
}

Tolerances ProblemConfig::resolved_tolerances() const {
    Tolerances tol = Tolerances::from_environment();
    tol.apply(tolerances);
    return tol;
}

namespace {

class Validator {
public:
    void fail(const std::string& field, const std::string& message) { errors_.push_back(field + ": " + message); }
    bool ok() const { return errors_.empty(); }

    [[noreturn]] void raise() const {
        std::string all;
        for (const auto& e : errors_) {
            if (!all.empty()) all += "; ";
            all += e;
        }
        throw Error(ErrorKind::BadInput, all);
    }

private:
    std::vector<std::string> errors_;
};

bool finite_number(const json& v) { return v.is_number() && std::isfinite(v.get<double>()); }

RealModes parse_modes(const json& src, const std::string& field, std::size_t n, Validator& val) {
    RealModes out;
    if (!src.is_array()) {
        val.fail(field, "must be an array of [n, [components]]");
        return out;
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
        const auto& entry = src[i];
        const std::string where = field + "[" + std::to_string(i) + "]";
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() || !entry[1].is_array()) {
            val.fail(where, "must be [n, [components]]");
            continue;
        }
        const auto mode = entry[0].get<long long>();
        if (mode < 1) {
            val.fail(where, "mode index must be >= 1");
            continue;
        }
        std::vector<double> comps;
        bool good = true;
        for (const auto& c : entry[1]) {
            if (!finite_number(c)) {
                good = false;
                break;
            }
            comps.push_back(c.get<double>());
        }
        if (!good) {
            val.fail(where, "components must be finite numbers");
            continue;
        }
        if (n > 0 && comps.size() != n) {
            val.fail(where, "needs " + std::to_string(n) + " components");
            continue;
        }
        out.emplace_back(static_cast<int>(mode), std::move(comps));
    }
    return out;
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::BadInput, std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::BadInput, "config must be a JSON object");

    static const std::vector<std::string> known = {"A", "b", "T", "K", "method", "target", "samples", "tolerances", "sweep"};
    Validator val;
    ProblemConfig cfg;
    for (const auto& [key, _] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) val.fail(key, "unknown key");

    // A
    if (!doc.contains("A")) {
        val.fail("A", "required");
    } else if (const auto& a = doc["A"]; !a.is_array() || a.empty()) {
        val.fail("A", "must be a non-empty array of rows");
    } else {
        cfg.n = a.size();
        bool good = true;
        for (const auto& row : a) {
            if (!row.is_array() || row.size() != cfg.n) {
                good = false;
                break;
            }
            for (const auto& v : row) {
                if (!finite_number(v)) {
                    good = false;
                    break;
                }
                cfg.a.push_back(v.get<double>());
            }
        }
        if (!good) {
            val.fail("A", "must be a square matrix of finite numbers");
            cfg.a.clear();
        }
    }

    // b
    if (!doc.contains("b")) {
        val.fail("b", "required");
    } else if (const auto& b = doc["b"]; !b.is_array()) {
        val.fail("b", "must be an array");
    } else {
        for (const auto& v : b) {
            if (!finite_number(v)) {
                val.fail("b", "entries must be finite numbers");
                cfg.b.clear();
                break;
            }
            cfg.b.push_back(v.get<double>());
        }
        if (cfg.n > 0 && !cfg.b.empty() && cfg.b.size() != cfg.n) val.fail("b", "needs " + std::to_string(cfg.n) + " entries");
        if (!cfg.b.empty() && std::all_of(cfg.b.begin(), cfg.b.end(), [](double v) { return v == 0.0; }))
            val.fail("b", "must not be identically zero");
    }

    // T
    if (!doc.contains("T")) {
        val.fail("T", "required");
    } else if (!finite_number(doc["T"]) || !(doc["T"].get<double>() > 0.0)) {
        val.fail("T", "must be a positive number");
    } else {
        cfg.t = doc["T"].get<double>();
    }

    if (doc.contains("K")) {
        if (!doc["K"].is_number_integer() || doc["K"].get<long long>() < 1)
            val.fail("K", "must be an integer >= 1");
        else
            cfg.k = static_cast<std::size_t>(doc["K"].get<long long>());
    }

    if (doc.contains("method")) {
        const auto m = doc["method"].is_string() ? parse_method(doc["method"].get<std::string>()) : std::nullopt;
        if (!m)
            val.fail("method", "must be one of raw, edd, n2_sharp");
        else
            cfg.method = *m;
    }

    if (doc.contains("target")) {
        const auto& tg = doc["target"];
        if (!tg.is_object()) {
            val.fail("target", "must be an object with z0 / z1");
        } else {
            for (const auto& [key, _] : tg.items())
                if (key != "z0" && key != "z1") val.fail("target." + key, "unknown key");
            if (tg.contains("z0")) cfg.z0 = parse_modes(tg["z0"], "target.z0", cfg.n, val);
            if (tg.contains("z1")) cfg.z1 = parse_modes(tg["z1"], "target.z1", cfg.n, val);
        }
    }

    if (doc.contains("samples")) {
        if (!doc["samples"].is_number_integer() || doc["samples"].get<long long>() < 2)
            val.fail("samples", "must be an integer >= 2");
        else
            cfg.samples = static_cast<std::size_t>(doc["samples"].get<long long>());
    }

    if (doc.contains("tolerances")) {
        const auto& tl = doc["tolerances"];
        if (!tl.is_object()) {
            val.fail("tolerances", "must be an object of name: value");
        } else {
            const auto names = Tolerances{}.as_map();
            for (const auto& [key, v] : tl.items()) {
                if (!names.contains(key))
                    val.fail("tolerances." + key, "unknown tolerance");
                else if (!finite_number(v) || !(v.get<double>() > 0.0))
                    val.fail("tolerances." + key, "must be a positive number");
                else
                    cfg.tolerances[key] = v.get<double>();
            }
        }
    }

    if (doc.contains("sweep")) {
        const auto& sw = doc["sweep"];
        if (!sw.is_object() || !sw.contains("param") || !sw.contains("values") || !sw["param"].is_string() ||
            !sw["values"].is_array() || sw["values"].empty()) {
            val.fail("sweep", "must be {\"param\": \"T\"|\"K\", \"values\": [...]}");
        } else {
            SweepSpec spec;
            spec.param = sw["param"].get<std::string>();
            if (spec.param != "T" && spec.param != "K") val.fail("sweep.param", "must be T or K");
            for (const auto& v : sw["values"]) {
                if (!finite_number(v) || !(v.get<double>() > 0.0)) {
                    val.fail("sweep.values", "must be positive numbers");
                    break;
                }
                if (spec.param == "K" && (!v.is_number_integer())) {
                    val.fail("sweep.values", "K values must be integers");
                    break;
                }
                spec.values.push_back(v.get<double>());
            }
            cfg.sweep = std::move(spec);
        }
    }

    int max_mode = 0;
    for (const auto& [mode, _] : cfg.z0) max_mode = std::max(max_mode, mode);
    for (const auto& [mode, _] : cfg.z1) max_mode = std::max(max_mode, mode);
    if (static_cast<std::size_t>(max_mode) > cfg.k)
        val.fail("K", "must be >= the largest target mode (" + std::to_string(max_mode) + ")");

    if (!val.ok()) val.raise();
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::BadInput, "cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ProblemConfig& cfg) {
    json doc;
    json a = json::array();
    for (std::size_t i = 0; i < cfg.n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < cfg.n; ++j) row.push_back(cfg.a[i * cfg.n + j]);
        a.push_back(row);
    }
    doc["A"] = a;
    doc["b"] = cfg.b;
    doc["T"] = cfg.t;
    doc["K"] = cfg.k;
    doc["method"] = to_string(cfg.method);
    auto modes = [](const RealModes& src) {
        json arr = json::array();
        for (const auto& [mode, v] : src) arr.push_back(json::array({mode, v}));
        return arr;
    };
    doc["target"] = {{"z0", modes(cfg.z0)}, {"z1", modes(cfg.z1)}};
    doc["samples"] = cfg.samples;
    doc["tolerances"] = json::object();
    for (const auto& [k, v] : cfg.tolerances) doc["tolerances"][k] = v;
    if (cfg.sweep) {
        json values = json::array();
        for (double v : cfg.sweep->values) {
            if (cfg.sweep->param == "K")
                values.push_back(static_cast<long long>(v));
            else
                values.push_back(v);
        }
        doc["sweep"] = {{"param", cfg.sweep->param}, {"values", values}};
    }
    return doc.dump(2) + "\n";
}

}  // namespace wavecontrol
