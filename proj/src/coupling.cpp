#include "wavecontrol/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wavecontrol/errors.hpp"

namespace wavecontrol {

CouplingSystem::CouplingSystem(std::size_t n_, std::vector<double> a_, std::vector<double> b_)
    : n(n_), a(std::move(a_)), b(std::move(b_)) {
    validate();
}

void CouplingSystem::validate() const {
    if (n == 0) throw Error(ErrorKind::BadInput, "system dimension must be at least 1");
    if (a.size() != n * n) throw Error(ErrorKind::BadInput, "A must be " + std::to_string(n) + "x" + std::to_string(n));
    if (b.size() != n) throw Error(ErrorKind::BadInput, "b must have " + std::to_string(n) + " entries");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(a.begin(), a.end(), finite) || !std::all_of(b.begin(), b.end(), finite))
        throw Error(ErrorKind::BadInput, "A and b must be finite");
    if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; }))
        throw Error(ErrorKind::BadInput, "b must not be identically zero");
}

void complete_biorthogonal(SpectralDecomposition& spec, std::span<const Complex> b) {
    const std::size_t n = spec.right.rows();
    const ComplexMatrix inv = inverse(spec.right);
    spec.biorthogonal = ComplexMatrix(n, n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m) spec.biorthogonal(m, l) = std::conj(inv(l, m));
    spec.beta.resize(n);
    for (std::size_t l = 0; l < n; ++l) {
        const CVector psi = spec.psi(l);
        spec.beta[l] = inner(b, psi);
    }
}

double max_biorthogonality_defect(const SpectralDecomposition& spec) {
    double worst = 0.0;
    const std::size_t n = spec.size();
    for (std::size_t i = 0; i < n; ++i) {
        const CVector phi = spec.phi(i);
        for (std::size_t j = 0; j < n; ++j) {
            const CVector psi = spec.psi(j);
            const Complex expected = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(inner(phi, psi) - expected));
        }
    }
    return worst;
}

SpectralDecomposition decompose(const CouplingSystem& sys, const Tolerances& tol) {
    sys.validate();
    const ComplexMatrix a = sys.matrix();
    EigenResult eig = eig_dense(a, tol.eig_tol);

    SpectralDecomposition spec;
    spec.eigenvalues = std::move(eig.eigenvalues);
    spec.right = std::move(eig.eigenvectors);

    const std::size_t n = sys.n;
    // A is real: eigenvalues within rounding of the real axis are real, with real eigenvectors.
    const double real_tol = 1e-12 * (1.0 + a.norm_frobenius());
    for (std::size_t l = 0; l < n; ++l) {
        if (std::abs(spec.eigenvalues[l].imag()) > real_tol) continue;
        spec.eigenvalues[l] = spec.eigenvalues[l].real();
        CVector v = spec.phi(l);
        for (auto& c : v) c = c.real();
        const double nv = norm2(v);
        for (auto& c : v) c /= nv;
        spec.right.set_column(l, v);
    }

    spec.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            spec.min_separation = std::min(spec.min_separation, std::abs(spec.eigenvalues[i] - spec.eigenvalues[j]));

    const double sep_tol = tol.sep_rel * (1.0 + a.norm_frobenius());
    if (n > 1 && !(spec.min_separation > sep_tol)) {
        throw Error(ErrorKind::RepeatedEigenvalues,
                    "eigenvalue separation " + std::to_string(spec.min_separation) + " <= " + std::to_string(sep_tol));
    }

    const CVector b = sys.control_vector();
    complete_biorthogonal(spec, b);
    return spec;
}

KalmanResult kalman_check(const CouplingSystem& sys, const Tolerances& tol) {
    sys.validate();
    const std::size_t n = sys.n;
    const ComplexMatrix a = sys.matrix();
    ComplexMatrix kalman(n, n);
    CVector col = sys.control_vector();
    // column n-1 holds b, column 0 holds A^{N-1} b
    for (std::size_t p = 0; p < n; ++p) {
        kalman.set_column(n - 1 - p, col);
        col = a * std::span<const Complex>(col);
    }
    KalmanResult out;
    out.rank = rank_qr(kalman, tol.rank_tol);
    out.ok = out.rank == n;
    return out;
}

std::vector<Resonance> resonance_check(std::span<const Complex> lambda, double res_tol) {
    std::vector<Resonance> out;
    const std::size_t n = lambda.size();
    if (n < 2) return out;

    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) spread = std::max(spread, std::abs(lambda[i] - lambda[j]));

    // |k^2 - l^2| >= k + l for k != l, so k + l <= spread + 1 bounds the search.
    const int bound = static_cast<int>(std::floor(spread + 1.0));
    for (int k = 1; k <= bound; ++k) {
        for (int l = 1; l + k <= bound + 1; ++l) {
            if (k == l) continue;
            const double gap = static_cast<double>(k) * k - static_cast<double>(l) * l;
            if (std::abs(gap) > spread + 1.0) continue;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const Complex diff = lambda[i] - lambda[j];
                    if (std::abs(diff.imag()) > res_tol) continue;
                    const double defect = std::abs(Complex(gap) - diff);
                    if (defect <= res_tol) out.push_back({k, l, i, j, defect});
                }
            }
        }
    }
    return out;
}

double minimal_time(std::size_t n) { return 2.0 * std::numbers::pi * static_cast<double>(n); }

ConditionsReport analyze(const CouplingSystem& sys, double t, const Tolerances& tol) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::BadInput, "T must be positive");
    const SpectralDecomposition spec = decompose(sys, tol);
    const KalmanResult kalman = kalman_check(sys, tol);

    ConditionsReport r;
    r.n = sys.n;
    r.kalman_rank = kalman.rank;
    for (std::size_t l = 0; l < spec.size(); ++l) {
        const double mag = std::abs(spec.beta[l]);
        r.beta_magnitudes.push_back(mag);
        if (mag <= tol.beta_tol) r.vanishing_beta.push_back(l);
    }
    r.kalman_ok = kalman.ok && r.vanishing_beta.empty();
    r.resonances = resonance_check(spec.eigenvalues, tol.res_tol);
    r.t_min = minimal_time(sys.n);
    r.t = t;
    r.t_ok = t >= r.t_min - tol.time_tol;
    r.overall_controllable = r.kalman_ok && r.resonances.empty() && r.t_ok;
    return r;
}

}  // namespace wavecontrol
