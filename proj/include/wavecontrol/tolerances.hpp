#pragma once

#include <map>
#include <string>

namespace wavecontrol {

/// Numerical thresholds shared by the pipeline. Defaults are the "default"
/// profile; `profile()` resolves named profiles ("strict", "relaxed").
struct Tolerances {
    double eig_tol = 1e-10;
    double pivot_tol = 1e-12;
    double rank_tol = 1e-9;
    double sep_rel = 1e-8;  // sep_tol = sep_rel * (1 + ||A||)
    double res_tol = 1e-9;
    double time_tol = 1e-12;
    double beta_tol = 1e-10;
    double zero_tol = 1e-10;
    double coll_rel = 1e-8;  // coll_tol = coll_rel * (1 + K)
    double cond_cap = 1e12;
    double verify_tol = 1e-6;

    static Tolerances profile(const std::string& name);

    /// Profile named by WAVECONTROL_TOL_PROFILE, or the default profile.
    static Tolerances from_environment();

    /// Apply named overrides; unknown names are reported through `unknown`.
    void apply(const std::map<std::string, double>& overrides, std::string* unknown = nullptr);

    std::map<std::string, double> as_map() const;
};

}  // namespace wavecontrol
