#include "wavecontrol/tolerances.hpp"

#include <cstdlib>

#include "wavecontrol/errors.hpp"

namespace wavecontrol {

namespace {

template <typename F>
void for_each_field(Tolerances& t, F&& f) {
    f("eig_tol", t.eig_tol);
    f("pivot_tol", t.pivot_tol);
    f("rank_tol", t.rank_tol);
    f("sep_rel", t.sep_rel);
    f("res_tol", t.res_tol);
    f("time_tol", t.time_tol);
    f("beta_tol", t.beta_tol);
    f("zero_tol", t.zero_tol);
    f("coll_rel", t.coll_rel);
    f("cond_cap", t.cond_cap);
    f("verify_tol", t.verify_tol);
}

}  // namespace

Tolerances Tolerances::profile(const std::string& name) {
    Tolerances t;
    if (name.empty() || name == "default") return t;
    if (name == "strict") {
        t.verify_tol = 1e-8;
        t.cond_cap = 1e10;
        return t;
    }
    if (name == "relaxed") {
        t.eig_tol = 1e-8;
        t.res_tol = 1e-7;
        t.verify_tol = 1e-4;
        t.cond_cap = 1e14;
        return t;
    }
    throw Error(ErrorKind::BadInput, "unknown tolerance profile '" + name + "'");
}

Tolerances Tolerances::from_environment() {
    const char* env = std::getenv("WAVECONTROL_TOL_PROFILE");
    return profile(env ? std::string(env) : std::string());
}

void Tolerances::apply(const std::map<std::string, double>& overrides, std::string* unknown) {
    for (const auto& [name, value] : overrides) {
        bool found = false;
        for_each_field(*this, [&](const char* key, double& field) {
            if (name == key) {
                field = value;
                found = true;
            }
        });
        if (!found && unknown) {
            if (!unknown->empty()) *unknown += ", ";
            *unknown += name;
        }
    }
}

std::map<std::string, double> Tolerances::as_map() const {
    std::map<std::string, double> out;
    Tolerances copy = *this;
    for_each_field(copy, [&](const char* key, double& field) { out[key] = field; });
    return out;
}

}  // namespace wavecontrol
