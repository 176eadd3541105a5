#include "wavecontrol/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wavecontrol/errors.hpp"
#include "wavecontrol/exponentials.hpp"

namespace wavecontrol {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kResonanceSwitch = 1e-8;

// int_0^t (t - tau) e^{i nu tau} dtau
Complex ramp_integral(Complex nu, double t) {
    const Complex z = kI * nu * t;
    if (std::abs(z) < 1.0) {
        // t^2 sum_m z^m / (m + 2)!
        Complex sum{};
        Complex term = 0.5;
        for (int m = 0; m < 30; ++m) {
            sum += term;
            term *= z / static_cast<double>(m + 3);
        }
        return t * t * sum;
    }
    return -(expm1(z) - z) / (nu * nu);
}

// int_0^1 e^{z u} du and int_0^1 u e^{z u} du
struct SegmentWeights {
    Complex phi1;
    Complex ramp;
};

SegmentWeights segment_weights(Complex z) {
    SegmentWeights w;
    if (std::abs(z) < 0.5) {
        Complex zm = 1.0;  // z^m / m!
        for (int m = 0; m < 25; ++m) {
            w.phi1 += zm / static_cast<double>(m + 1);
            w.ramp += zm / static_cast<double>(m + 2);
            zm *= z / static_cast<double>(m + 1);
        }
        return w;
    }
    const Complex ez = std::exp(z);
    w.phi1 = expm1(z) / z;
    w.ramp = (ez * (z - 1.0) + 1.0) / (z * z);
    return w;
}

// int_0^t f(tau) e^{i mu (t - tau)} dtau for piecewise-linear samples.
Complex oscillatory_sum(const Samples& f, Complex mu, double t) {
    const std::size_t count = f.values.size();
    const double h = f.dt;
    const SegmentWeights w = segment_weights(-kI * mu * h);
    const Complex left = w.phi1 - w.ramp;
    const Complex right = w.ramp;
    const Complex step = std::exp(-kI * mu * h);
    Complex phase{};
    Complex sum{};
    for (std::size_t j = 0; j + 1 < count; ++j) {
        if (j % 256 == 0)
            phase = std::exp(kI * mu * (t - f.times[j]));
        else
            phase *= step;
        sum += phase * (f.values[j] * left + f.values[j + 1] * right);
    }
    return h * sum;
}

}  // namespace

ModalState duhamel_exact(const SpectralDecomposition& spec, const FrequencyGrid& grid, const ControlSignal& f, double t) {
    const std::size_t n = grid.n();
    ModalState out(grid.k_max(), n);
    for (std::size_t k = 1; k <= grid.k_max(); ++k) {
        const int kk = static_cast<int>(k);
        for (std::size_t l = 0; l < n; ++l) {
            const Complex omega = grid.omega(kk, l);
            const Complex factor = 2.0 * static_cast<double>(k) / std::numbers::pi * spec.beta[l];
            Complex a{};
            Complex adot{};
            for (const auto& term : f.combo) {
                const Complex nu = term.frequency;
                if (std::abs(omega) <= kZeroFrequencyKernel) {
                    a += term.weight * ramp_integral(nu, t);
                    adot += term.weight * exp_integral(nu, t, kResonanceSwitch);
                    continue;
                }
                const Complex plus = std::exp(kI * omega * t) * exp_integral(nu - omega, t, kResonanceSwitch);
                const Complex minus = std::exp(-kI * omega * t) * exp_integral(nu + omega, t, kResonanceSwitch);
                a += term.weight * (plus - minus) / (2.0 * kI * omega);
                adot += term.weight * (plus + minus) / 2.0;
            }
            out.a(kk, l) = factor * a;
            out.adot(kk, l) = factor * adot;
        }
    }
    return out;
}

ModalState evolve_quadrature(const SpectralDecomposition& spec, const FrequencyGrid& grid, const Samples& f, double t) {
    const std::size_t count = f.values.size();
    if (count < 2 || f.times.size() != count) throw Error(ErrorKind::BadInput, "need at least two uniform samples");
    if (std::abs(f.dt * static_cast<double>(count - 1) - t) > 1e-9 * std::max(1.0, t))
        throw Error(ErrorKind::BadInput, "samples do not cover [0, T]");

    double wmax = 0.0;
    for (std::size_t k = 1; k <= grid.k_max(); ++k)
        for (std::size_t l = 0; l < grid.n(); ++l) wmax = std::max(wmax, std::abs(grid.omega(static_cast<int>(k), l)));
    if (wmax > 0.0 && f.dt > std::numbers::pi / (4.0 * wmax)) {
        throw Error(ErrorKind::GridTooCoarse,
                    "dt = " + std::to_string(f.dt) + " exceeds pi / (4 max|w|) = " + std::to_string(std::numbers::pi / (4.0 * wmax)));
    }

    const std::size_t n = grid.n();
    ModalState out(grid.k_max(), n);
    for (std::size_t k = 1; k <= grid.k_max(); ++k) {
        const int kk = static_cast<int>(k);
        for (std::size_t l = 0; l < n; ++l) {
            const Complex omega = grid.omega(kk, l);
            const Complex factor = 2.0 * static_cast<double>(k) / std::numbers::pi * spec.beta[l];
            Complex a{};
            Complex adot{};
            if (std::abs(omega) <= kZeroFrequencyKernel) {
                const double h = f.dt;
                for (std::size_t j = 0; j + 1 < count; ++j) {
                    const Complex mean = 0.5 * (f.values[j] + f.values[j + 1]);
                    adot += h * mean;
                    a += h * ((t - f.times[j]) * mean - h * (f.values[j] / 6.0 + f.values[j + 1] / 3.0));
                }
            } else {
                const Complex plus = oscillatory_sum(f, omega, t);
                const Complex minus = oscillatory_sum(f, -omega, t);
                a = (plus - minus) / (2.0 * kI * omega);
                adot = (plus + minus) / 2.0;
            }
            out.a(kk, l) = factor * a;
            out.adot(kk, l) = factor * adot;
        }
    }
    return out;
}

FieldValues reconstruct(const ModalState& modal, const SpectralDecomposition& spec, std::span<const double> x) {
    const std::size_t n = modal.n();
    FieldValues out;
    out.x.assign(x.begin(), x.end());
    for (double xi : x) {
        CVector u(n);
        CVector ut(n);
        for (std::size_t k = 1; k <= modal.k_max(); ++k) {
            const double s = std::sin(static_cast<double>(k) * xi);
            if (s == 0.0) continue;
            const int kk = static_cast<int>(k);
            for (std::size_t j = 0; j < n; ++j) {
                const Complex ca = modal.a(kk, j) * s;
                const Complex cv = modal.adot(kk, j) * s;
                for (std::size_t m = 0; m < n; ++m) {
                    u[m] += ca * spec.right(m, j);
                    ut[m] += cv * spec.right(m, j);
                }
            }
        }
        out.u.push_back(std::move(u));
        out.ut.push_back(std::move(ut));
    }
    return out;
}

double sobolev_norm(const ModalState& modal, int s, Coefficients which) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= modal.k_max(); ++k) {
        const double weight = std::pow(static_cast<double>(k), 2.0 * s);
        for (std::size_t l = 0; l < modal.n(); ++l) {
            const Complex c = which == Coefficients::position ? modal.a(static_cast<int>(k), l)
                                                              : modal.adot(static_cast<int>(k), l);
            sum += weight * std::norm(c);
        }
    }
    return std::sqrt(sum);
}

double state_norm(const ModalState& modal) {
    const double p = sobolev_norm(modal, 0, Coefficients::position);
    const double v = sobolev_norm(modal, -1, Coefficients::velocity);
    return std::sqrt(p * p + v * v);
}

double PhysicalNorms::l2_total() const {
    double s = 0.0;
    for (double v : l2_sq) s += v;
    return s;
}

double PhysicalNorms::velocity_hm1_total() const {
    double s = 0.0;
    for (double v : velocity_hm1_sq) s += v;
    return s;
}

PhysicalNorms physical_norms(const ModalState& modal, const SpectralDecomposition& spec) {
    const std::size_t n = modal.n();
    PhysicalNorms out;
    out.l2_sq.assign(n, 0.0);
    out.h1_sq.assign(n, 0.0);
    out.velocity_hm1_sq.assign(n, 0.0);
    const double half_pi = 0.5 * std::numbers::pi;
    for (std::size_t k = 1; k <= modal.k_max(); ++k) {
        const int kk = static_cast<int>(k);
        const double k2 = static_cast<double>(k) * static_cast<double>(k);
        for (std::size_t m = 0; m < n; ++m) {
            Complex pos{};
            Complex vel{};
            for (std::size_t j = 0; j < n; ++j) {
                pos += modal.a(kk, j) * spec.right(m, j);
                vel += modal.adot(kk, j) * spec.right(m, j);
            }
            out.l2_sq[m] += half_pi * std::norm(pos);
            out.h1_sq[m] += half_pi * k2 * std::norm(pos);
            out.velocity_hm1_sq[m] += half_pi * std::norm(vel) / k2;
        }
    }
    return out;
}

double eigenbasis_condition(const SpectralDecomposition& spec) { return condition_1norm(spec.right); }

EvolutionResult evolve(const SpectralDecomposition& spec, const FrequencyGrid& grid, const ControlSignal& f, double t,
                       std::size_t oracle_samples) {
    EvolutionResult out;
    out.modal = duhamel_exact(spec, grid, f, t);
    if (oracle_samples > 1) {
        ControlSignal window = f;
        window.t = t;
        // Richardson step on dt and dt/2 lifts the second-order oracle to fourth order.
        const ModalState coarse = evolve_quadrature(spec, grid, window.sample(oracle_samples), t);
        const ModalState fine = evolve_quadrature(spec, grid, window.sample(2 * oracle_samples - 1), t);
        for (std::size_t k = 1; k <= grid.k_max(); ++k)
            for (std::size_t l = 0; l < grid.n(); ++l) {
                const int kk = static_cast<int>(k);
                const Complex a = (4.0 * fine.a(kk, l) - coarse.a(kk, l)) / 3.0;
                const Complex adot = (4.0 * fine.adot(kk, l) - coarse.adot(kk, l)) / 3.0;
                const double r = std::max(std::abs(out.modal.a(kk, l) - a), std::abs(out.modal.adot(kk, l) - adot));
                out.per_mode_residuals.push_back(r);
            }
    }
    ControlSignal window = f;
    window.t = t;
    const double fnorm = l2_norm(window);
    out.wellposedness_ratio = fnorm > 0.0 ? state_norm(out.modal) / fnorm : 0.0;
    return out;
}

VerificationReport verify(const SpectralDecomposition& spec, const FrequencyGrid& grid, const ControlSignal& f,
                          const ModalState& target, double t, double tol) {
    if (target.k_max() != grid.k_max() || target.n() != grid.n())
        throw Error(ErrorKind::BadInput, "target and grid truncations differ");
    const EvolutionResult ev = evolve(spec, grid, f, t);
    VerificationReport rep;
    rep.achieved = ev.modal;
    rep.wellposedness_ratio = ev.wellposedness_ratio;
    for (std::size_t k = 1; k <= grid.k_max(); ++k) {
        const int kk = static_cast<int>(k);
        for (std::size_t l = 0; l < grid.n(); ++l) {
            const double ea = std::abs(ev.modal.a(kk, l) - target.a(kk, l)) / (1.0 + std::abs(target.a(kk, l)));
            const double ev_ = std::abs(ev.modal.adot(kk, l) - target.adot(kk, l)) / (1.0 + std::abs(target.adot(kk, l)));
            const double e = std::max(ea, ev_);
            if (e > rep.max_relative_error) {
                rep.max_relative_error = e;
                rep.worst_k = kk;
                rep.worst_l = l;
            }
        }
    }
    rep.pass = rep.max_relative_error <= tol;
    return rep;
}

}  // namespace wavecontrol
