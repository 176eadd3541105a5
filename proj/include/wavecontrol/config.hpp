#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavecontrol/coupling.hpp"
#include "wavecontrol/moments.hpp"
#include "wavecontrol/tolerances.hpp"

namespace wavecontrol {

enum class Method { raw, edd, n2_sharp };

const char* to_string(Method m) noexcept;
std::optional<Method> parse_method(const std::string& name);

struct SweepSpec {
    std::string param;  // "T" or "K"
    std::vector<double> values;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

using RealModes = std::vector<std::pair<int, std::vector<double>>>;

/// One problem instance as read from a JSON configuration document.
struct ProblemConfig {
    std::size_t n = 0;
    std::vector<double> a;  // row-major
    std::vector<double> b;
    double t = 0.0;
    std::size_t k = 16;
    Method method = Method::raw;
    RealModes z0;
    RealModes z1;
    std::size_t samples = 2048;
    std::map<std::string, double> tolerances;
    std::optional<SweepSpec> sweep;

    CouplingSystem system() const { return CouplingSystem(n, a, b); }
    TargetSpec target() const;
    /// Environment profile with the config's overrides applied.
    Tolerances resolved_tolerances() const;

    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

/// Parse and validate; throws BadInput listing every problem found.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const ProblemConfig& cfg);

}  // namespace wavecontrol
