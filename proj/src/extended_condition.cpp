// Extended-precision conditioning of exponential Gram matrices. Beyond
// cond ~ 1e16 a double Gram matrix is dominated by its rounding error, while
// the families below the critical time have condition numbers far past that.

#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "wavecontrol/moments.hpp"

namespace wavecontrol {

namespace {

namespace mp = boost::multiprecision;
using Real = mp::cpp_bin_float_100;
using MpComplex = mp::cpp_complex_100;

MpComplex lift(Complex z) { return MpComplex(Real(z.real()), Real(z.imag())); }

MpComplex gram_entry_mp(const MpComplex& wa, const MpComplex& wb, const Real& t) {
    const MpComplex i(Real(0), Real(1));
    const MpComplex d = wa - conj(wb);
    if (abs(d) < Real("1e-40")) return MpComplex(t) + i * d * t * t / 2 - d * d * t * t * t / 6;
    return (exp(i * d * t) - MpComplex(1)) / (i * d);
}

Real norm1(const std::vector<MpComplex>& m, std::size_t n) {
    Real best = 0;
    for (std::size_t j = 0; j < n; ++j) {
        Real s = 0;
        for (std::size_t i = 0; i < n; ++i) s += abs(m[i * n + j]);
        if (s > best) best = s;
    }
    return best;
}

}  // namespace

double gram_condition_extended(const std::vector<std::vector<ExpTerm>>& functions, double t) {
    // distinct frequencies, each function as weights over them
    std::vector<Complex> freqs;
    std::vector<std::vector<std::pair<std::size_t, Complex>>> terms(functions.size());
    for (std::size_t r = 0; r < functions.size(); ++r) {
        for (const auto& term : functions[r]) {
            std::size_t idx = 0;
            while (idx < freqs.size() && freqs[idx] != term.frequency) ++idx;
            if (idx == freqs.size()) freqs.push_back(term.frequency);
            terms[r].emplace_back(idx, term.weight);
        }
    }

    const Real tt(t);
    const std::size_t m = freqs.size();
    std::vector<MpComplex> lifted;
    for (const auto& f : freqs) lifted.push_back(lift(f));
    std::vector<MpComplex> raw(m * m);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = p; q < m; ++q) {
            raw[p * m + q] = gram_entry_mp(lifted[q], lifted[p], tt);  // (e_q, e_p)
            raw[q * m + p] = conj(raw[p * m + q]);
        }

    const std::size_t n = functions.size();
    std::vector<MpComplex> g(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
            MpComplex acc(0);
            for (const auto& [pr, wr] : terms[r])
                for (const auto& [ps, ws] : terms[s]) acc += lift(ws) * conj(lift(wr)) * raw[pr * m + ps];
            g[r * n + s] = acc;
        }

    std::vector<Real> d(n);
    for (std::size_t r = 0; r < n; ++r) {
        const Real diag = g[r * n + r].real();
        if (!(diag > 0)) return std::numeric_limits<double>::infinity();
        d[r] = 1 / sqrt(diag);
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) g[r * n + s] *= MpComplex(d[r] * d[s]);

    const Real gnorm = norm1(g, n);
    std::vector<MpComplex> w = g;
    std::vector<MpComplex> inv(n * n, MpComplex(0));
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = MpComplex(1);
    const Real tiny = gnorm * Real("1e-90");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(w[i * n + k]) > abs(w[piv * n + k])) piv = i;
        if (!(abs(w[piv * n + k]) > tiny)) return std::numeric_limits<double>::infinity();
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w[k * n + j], w[piv * n + j]);
                std::swap(inv[k * n + j], inv[piv * n + j]);
            }
        const MpComplex p = w[k * n + k];
        for (std::size_t j = 0; j < n; ++j) {
            w[k * n + j] /= p;
            inv[k * n + j] /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const MpComplex f = w[i * n + k];
            for (std::size_t j = k; j < n; ++j) w[i * n + j] -= f * w[k * n + j];
            for (std::size_t j = 0; j < n; ++j) inv[i * n + j] -= f * inv[k * n + j];
        }
    }
    const Real cond = gnorm * norm1(inv, n);
    const double out = cond.convert_to<double>();
    return std::isfinite(out) ? out : std::numeric_limits<double>::infinity();
}

}  // namespace wavecontrol
