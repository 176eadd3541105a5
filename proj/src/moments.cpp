#include "wavecontrol/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wavecontrol/errors.hpp"
#include "wavecontrol/exponentials.hpp"

namespace wavecontrol {

namespace {

constexpr Complex kI{0.0, 1.0};

// Threshold above which the double-precision condition number is recomputed
// in extended precision.
constexpr double kExtendedConditionThreshold = 1e10;

std::size_t position_of(const std::vector<ModeIndex>& order, ModeIndex m) {
    const auto it = std::find(order.begin(), order.end(), m);
    return static_cast<std::size_t>(it - order.begin());
}

}  // namespace

std::size_t ModalState::slot(int k, std::size_t l) const {
    if (k < 1 || static_cast<std::size_t>(k) > k_max_ || l >= n_)
        throw Error(ErrorKind::ModeOutOfRange,
                    "mode (" + std::to_string(k) + ", " + std::to_string(l) + ") outside the modal table");
    return (static_cast<std::size_t>(k) - 1) * n_ + l;
}

CVector ModalState::c(const FrequencyGrid& grid) const {
    CVector out;
    for (const auto& m : grid.index_order()) {
        const int kabs = std::abs(m.k);
        out.push_back(kI * grid.omega(m.k, m.l) * a(kabs, m.l) + adot(kabs, m.l));
    }
    return out;
}

bool ModalState::is_zero() const {
    auto zero = [](Complex z) { return z == Complex{}; };
    return std::all_of(a_.begin(), a_.end(), zero) && std::all_of(adot_.begin(), adot_.end(), zero);
}

int TargetSpec::max_mode() const {
    int m = 0;
    for (const auto& [n, v] : z0) m = std::max(m, n);
    for (const auto& [n, v] : z1) m = std::max(m, n);
    return m;
}

Complex gram_entry(Complex omega_a, Complex omega_b, double t) {
    return exp_integral(omega_a - std::conj(omega_b), t);
}

MomentSystem assemble_gram(const FrequencyGrid& grid, const EddFamily* edd, double t, BasisKind basis) {
    if (!(t > 0.0)) throw Error(ErrorKind::BadInput, "T must be positive");
    if ((basis == BasisKind::edd) != (edd != nullptr))
        throw Error(ErrorKind::BadInput, "EDD family must be supplied exactly for the edd basis");

    MomentSystem ms;
    ms.basis = basis;
    ms.t = t;
    ms.index_order = grid.index_order();
    const std::size_t n = grid.n();

    if (basis == BasisKind::raw) {
        for (std::size_t r = 0; r < ms.index_order.size(); ++r) {
            const auto& m = ms.index_order[r];
            ms.functions.push_back({{std::conj(grid.omega(m.k, m.l)), 1.0}});
            ms.moment_map.push_back({{r, 1.0}});
        }
    } else {
        if (edd->k_max != grid.k_max() || edd->n != n) throw Error(ErrorKind::BadInput, "EDD family does not match grid");
        for (const auto& blk : edd->blocks) {
            for (std::size_t p = 0; p < n; ++p) {
                std::vector<ExpTerm> terms;
                std::vector<std::pair<std::size_t, Complex>> map;
                for (std::size_t j = 0; j <= p; ++j) {
                    // divided differences over conj(w) carry conj(weights)
                    terms.push_back({std::conj(blk.nodes[j]), std::conj(blk.weights[p][j])});
                    map.emplace_back(position_of(ms.index_order, {blk.k, blk.order[j]}), blk.weights[p][j]);
                }
                ms.functions.push_back(std::move(terms));
                ms.moment_map.push_back(std::move(map));
            }
        }
    }

    const std::size_t dim = ms.functions.size();
    ms.gram = ComplexMatrix(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t s = r; s < dim; ++s) {
            Complex g{};
            for (const auto& tr : ms.functions[r])
                for (const auto& ts : ms.functions[s]) g += ts.weight * std::conj(tr.weight) * gram_entry(ts.frequency, tr.frequency, t);
            ms.gram(r, s) = g;
            ms.gram(s, r) = std::conj(g);
        }
        ms.gram(r, r) = ms.gram(r, r).real();
    }

    ComplexMatrix scaled = ms.gram;
    std::vector<double> d(dim);
    for (std::size_t r = 0; r < dim; ++r) d[r] = 1.0 / std::sqrt(std::max(ms.gram(r, r).real(), 1e-300));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t s = 0; s < dim; ++s) scaled(r, s) *= d[r] * d[s];
    ms.cond_estimate = condition_1norm(scaled);
    if (!(ms.cond_estimate <= kExtendedConditionThreshold)) {
        ms.cond_estimate = gram_condition_extended(ms.functions, t);
        ms.cond_extended = true;
    }
    return ms;
}

void attach_moments(MomentSystem& ms, CVector gamma) {
    if (gamma.size() != ms.index_order.size()) throw Error(ErrorKind::BadInput, "moment vector has the wrong length");
    ms.basis_moments.assign(ms.moment_map.size(), Complex{});
    for (std::size_t r = 0; r < ms.moment_map.size(); ++r)
        for (const auto& [src, w] : ms.moment_map[r]) ms.basis_moments[r] += w * gamma[src];
    ms.gamma = std::move(gamma);
}

ModalState target_to_modal(const TargetSpec& target, const SpectralDecomposition& spec, const FrequencyGrid& grid) {
    const std::size_t n = spec.size();
    ModalState modal(grid.k_max(), n);
    auto fill = [&](const std::vector<std::pair<int, CVector>>& coeffs, bool velocity) {
        for (const auto& [mode, z] : coeffs) {
            if (mode < 1 || static_cast<std::size_t>(mode) > grid.k_max())
                throw Error(ErrorKind::ModeOutOfRange, "target mode " + std::to_string(mode) + " exceeds K");
            if (z.size() != n) throw Error(ErrorKind::BadInput, "target vector has the wrong dimension");
            for (std::size_t j = 0; j < n; ++j) {
                const CVector psi = spec.psi(j);
                const Complex v = inner(z, psi);
                (velocity ? modal.adot(mode, j) : modal.a(mode, j)) += v;
            }
        }
    };
    fill(target.z0, false);
    fill(target.z1, true);
    return modal;
}

CVector moments_from_target(const ModalState& modal, const SpectralDecomposition& spec, const FrequencyGrid& grid,
                            double t, double beta_tol) {
    for (std::size_t l = 0; l < spec.size(); ++l)
        if (std::abs(spec.beta[l]) <= beta_tol)
            throw Error(ErrorKind::BetaZero, "beta_" + std::to_string(l) + " vanishes; Kalman condition fails");
    const CVector c = modal.c(grid);
    const auto order = grid.index_order();
    CVector gamma(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& m = order[r];
        const double factor = 2.0 * std::abs(m.k) / std::numbers::pi;
        gamma[r] = c[r] / (factor * spec.beta[m.l] * std::exp(kI * grid.omega(m.k, m.l) * t));
    }
    return gamma;
}

Complex ControlSignal::operator()(double time) const {
    Complex s{};
    for (const auto& term : combo) s += term.weight * std::exp(kI * term.frequency * time);
    return s;
}

Samples ControlSignal::sample(std::size_t count) const {
    if (count < 2) throw Error(ErrorKind::BadInput, "need at least two samples");
    Samples s;
    s.dt = t / static_cast<double>(count - 1);
    s.times.resize(count);
    s.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        s.times[i] = (i + 1 == count) ? t : s.dt * static_cast<double>(i);
        s.values[i] = (*this)(s.times[i]);
    }
    return s;
}

Complex moment(const ControlSignal& f, Complex nu) {
    Complex s{};
    for (const auto& term : f.combo) s += term.weight * gram_entry(term.frequency, nu, f.t);
    return s;
}

double l2_norm(const ControlSignal& f) {
    double s = 0.0;
    for (const auto& p : f.combo)
        for (const auto& q : f.combo) s += (p.weight * std::conj(q.weight) * gram_entry(p.frequency, q.frequency, f.t)).real();
    return std::sqrt(std::max(s, 0.0));
}

double l2_distance(const ControlSignal& f, const ControlSignal& g) {
    ControlSignal diff = f;
    for (const auto& term : g.combo) diff.combo.push_back({term.frequency, -term.weight});
    diff.combo = merge_terms(std::move(diff.combo));
    return l2_norm(diff);
}

std::vector<ExpTerm> merge_terms(std::vector<ExpTerm> terms, double rel) {
    std::vector<ExpTerm> out;
    for (const auto& term : terms) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ExpTerm& e) {
            return std::abs(e.frequency - term.frequency) <= rel * (1.0 + std::abs(term.frequency));
        });
        if (it == out.end())
            out.push_back(term);
        else
            it->weight += term.weight;
    }
    std::erase_if(out, [](const ExpTerm& e) { return e.weight == Complex{}; });
    return out;
}

SynthesisResult synthesize(const MomentSystem& ms, const Tolerances& tol) {
    const std::size_t dim = ms.functions.size();
    if (ms.basis_moments.size() != dim) throw Error(ErrorKind::BadInput, "moments not attached to the moment system");

    std::vector<double> d(dim);
    for (std::size_t r = 0; r < dim; ++r) d[r] = 1.0 / std::sqrt(std::max(ms.gram(r, r).real(), 1e-300));
    ComplexMatrix scaled = ms.gram;
    CVector rhs(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        rhs[r] = d[r] * ms.basis_moments[r];
        for (std::size_t s = 0; s < dim; ++s) scaled(r, s) *= d[r] * d[s];
    }
    const HermitianSolution sol = solve_hermitian(scaled, rhs, tol.pivot_tol);
    if (ms.cond_estimate > tol.cond_cap) {
        throw Error(ErrorKind::ConditioningExceeded,
                    "Gram condition " + std::to_string(ms.cond_estimate) + " exceeds cap " + std::to_string(tol.cond_cap));
    }

    SynthesisResult out;
    out.cond_estimate = ms.cond_estimate;
    out.coefficients.resize(dim);
    for (std::size_t r = 0; r < dim; ++r) out.coefficients[r] = d[r] * sol.x[r];

    const CVector g_alpha = ms.gram * std::span<const Complex>(out.coefficients);
    CVector resid(dim);
    for (std::size_t r = 0; r < dim; ++r) resid[r] = g_alpha[r] - ms.basis_moments[r];
    const double gnorm = norm2(ms.basis_moments);
    out.moment_residual = gnorm > 0.0 ? norm2(resid) / gnorm : norm2(resid);

    std::vector<ExpTerm> terms;
    for (std::size_t r = 0; r < dim; ++r)
        for (const auto& term : ms.functions[r]) terms.push_back({term.frequency, out.coefficients[r] * term.weight});
    out.control.t = ms.t;
    out.control.combo = merge_terms(std::move(terms), 0.0);
    return out;
}

double raw_moment_residual(const ControlSignal& f, const MomentSystem& ms) {
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t r = 0; r < ms.gamma.size(); ++r) scale = std::max(scale, std::abs(ms.gamma[r]));
    // raw basis frequencies are the conj(w) in index order, independent of ms.basis
    for (std::size_t r = 0; r < ms.index_order.size(); ++r) {
        Complex nu;
        if (ms.basis == BasisKind::raw) {
            nu = ms.functions[r].front().frequency;
        } else {
            bool found = false;
            for (std::size_t q = 0; q < ms.moment_map.size() && !found; ++q)
                for (std::size_t j = 0; j < ms.moment_map[q].size(); ++j)
                    if (ms.moment_map[q][j].first == r) {
                        nu = ms.functions[q][j].frequency;
                        found = true;
                        break;
                    }
        }
        worst = std::max(worst, std::abs(moment(f, nu) - ms.gamma[r]));
    }
    return scale > 0.0 ? worst / scale : worst;
}

ControlSignal realify(const ControlSignal& f) {
    ControlSignal re;
    ControlSignal im;
    re.t = im.t = f.t;
    for (const auto& term : f.combo) {
        const Complex mirrored = -std::conj(term.frequency);
        re.combo.push_back({term.frequency, term.weight / 2.0});
        re.combo.push_back({mirrored, std::conj(term.weight) / 2.0});
        im.combo.push_back({term.frequency, term.weight / (2.0 * kI)});
        im.combo.push_back({mirrored, -std::conj(term.weight) / (2.0 * kI)});
    }
    re.combo = merge_terms(std::move(re.combo));
    im.combo = merge_terms(std::move(im.combo));
    const double fnorm = l2_norm(f);
    re.realification_residual = l2_norm(im) / std::max(fnorm, 1e-300);
    if (fnorm == 0.0) re.realification_residual = 0.0;
    return re;
}

N2Normalization n2_normalize_eigvecs(const CouplingSystem& sys, const SpectralDecomposition& spec) {
    sys.validate();
    if (sys.n != 2 || spec.size() != 2) throw Error(ErrorKind::BadInput, "the sharp procedure needs N = 2");
    if (sys.b[1] != 0.0 || sys.b[0] == 0.0) throw Error(ErrorKind::BadInput, "the sharp procedure needs b = (s, 0)");

    N2Normalization out;
    out.spec = spec;
    for (std::size_t l = 0; l < 2; ++l) {
        const CVector phi = spec.phi(l);
        if (std::abs(phi[1]) <= 1e-12 * norm2(phi))
            throw Error(ErrorKind::DegenerateEigenvector,
                        "eigenvector " + std::to_string(l) + " has a vanishing second component (contradicts Kalman)");
    }
    // larger eigenvalue: second component +1; the other: -1
    const CVector phi0 = spec.phi(0);
    const CVector phi1 = spec.phi(1);
    const Complex s0 = -1.0 / phi0[1];
    const Complex s1 = 1.0 / phi1[1];
    const CVector r0{phi0[0] * s0, -1.0};
    const CVector r1{phi1[0] * s1, 1.0};
    out.spec.right.set_column(0, r0);
    out.spec.right.set_column(1, r1);
    out.alpha = r0[0] + r1[0];
    if (std::abs(out.alpha) <= 1e-12 * (norm2(r0) + norm2(r1)))
        throw Error(ErrorKind::DegenerateEigenvector, "rescaled eigenvectors sum to zero");
    complete_biorthogonal(out.spec, sys.control_vector());
    return out;
}

N2SharpState n2_sharp_targets(const TargetSpec& target, const N2Normalization& norm, const FrequencyGrid& grid) {
    if (norm.spec.size() != 2 || grid.n() != 2) throw Error(ErrorKind::BadInput, "the sharp procedure needs N = 2");
    const std::size_t kmax = grid.k_max();
    N2SharpState out;
    out.modal = ModalState(kmax, 2);
    out.tilde_a.assign(2 * kmax, Complex{});
    out.tilde_adot.assign(2 * kmax, Complex{});

    const CVector phi2 = norm.spec.phi(1);
    const Complex first_c = phi2[0];
    const Complex second_c = phi2[1];
    if (std::abs(second_c) == 0.0) throw Error(ErrorKind::DegenerateEigenvector, "second component of phi_2 vanishes");

    auto solve = [&](const std::vector<std::pair<int, CVector>>& coeffs, CVector& tilde, bool velocity) {
        for (const auto& [mode, z] : coeffs) {
            if (mode < 1 || static_cast<std::size_t>(mode) > kmax)
                throw Error(ErrorKind::ModeOutOfRange, "target mode " + std::to_string(mode) + " exceeds K");
            if (z.size() != 2) throw Error(ErrorKind::BadInput, "target vector has the wrong dimension");
            const Complex gap = grid.omega(mode, 1) - grid.omega(mode, 0);
            const Complex t2 = z[1] / (second_c * gap);
            const Complex t1 = (z[0] - first_c * gap * t2) / norm.alpha;
            const std::size_t base = (static_cast<std::size_t>(mode) - 1) * 2;
            tilde[base] += t1;
            tilde[base + 1] += t2;
        }
        for (std::size_t k = 1; k <= kmax; ++k) {
            const int kk = static_cast<int>(k);
            const Complex t1 = tilde[(k - 1) * 2];
            const Complex t2 = tilde[(k - 1) * 2 + 1];
            const Complex gap = grid.omega(kk, 1) - grid.omega(kk, 0);
            (velocity ? out.modal.adot(kk, 0) : out.modal.a(kk, 0)) = t1;
            (velocity ? out.modal.adot(kk, 1) : out.modal.a(kk, 1)) = t1 + gap * t2;
        }
    };
    solve(target.z0, out.tilde_a, false);
    solve(target.z1, out.tilde_adot, true);
    return out;
}

}  // namespace wavecontrol
