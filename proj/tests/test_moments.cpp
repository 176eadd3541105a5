#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "wavecontrol/coupling.hpp"
#include "wavecontrol/errors.hpp"
#include "wavecontrol/moments.hpp"
#include "wavecontrol/waveform.hpp"

using namespace wavecontrol;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// (f, e^{i nu t}) by Gauss-Legendre quadrature of the sampled combo.
Complex quad_moment(const ControlSignal& f, Complex nu) {
    return oracle::integrate([&](double t) { return f(t) * std::conj(std::exp(kI * nu * t)); }, 0.0, f.t, 800);
}

struct Problem {
    CouplingSystem sys;
    SpectralDecomposition spec;
    FrequencyGrid grid;
    double t;
};

Problem two_by_two(double t, std::size_t k_max) {
    Problem p{CouplingSystem(2, {0.5, 0, 1, -0.3}, {1, 0}), {}, {}, t};
    p.spec = decompose(p.sys);
    p.grid = build_frequencies(p.spec, k_max);
    return p;
}

MomentSystem moment_system(const Problem& p, BasisKind basis, const CVector& gamma) {
    std::optional<EddFamily> edd;
    if (basis == BasisKind::edd) edd = build_edd(p.grid);
    MomentSystem ms = assemble_gram(p.grid, edd ? &*edd : nullptr, p.t, basis);
    attach_moments(ms, gamma);
    return ms;
}

CVector random_gamma(std::mt19937_64& rng, const FrequencyGrid& g, double decay) {
    CVector gamma;
    for (const auto& m : g.index_order()) gamma.push_back(oracle::cuniform(rng) / std::pow(double(std::abs(m.k)), decay));
    return gamma;
}

TargetSpec real_target() {
    TargetSpec t;
    t.z0 = {{1, CVector{1.0, 0.0}}, {2, CVector{0.0, 1.0}}};
    t.z1 = {{1, CVector{0.0, 1.0}}};
    return t;
}

}  // namespace

TEST_CASE("gram_entry examples") {
    CHECK(std::abs(gram_entry(1.0, 1.0, 2 * kPi) - 2 * kPi) < 1e-14);
    CHECK(std::abs(gram_entry(1.0, 0.0, 2 * kPi)) < 1e-14);
    CHECK(std::abs(gram_entry(0.5, 0.0, 2 * kPi) - Complex(0, 4)) < 1e-14);
    const Complex oracle_value = oracle::integrate([](double t) { return std::exp(kI * 0.5 * t); }, 0.0, 2 * kPi);
    CHECK(std::abs(gram_entry(0.5, 0.0, 2 * kPi) - oracle_value) < 1e-13);
}

TEST_CASE("gram_entry is continuous across the small-difference switch") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const double t = oracle::uniform(rng, 0.5, 20.0);
        const Complex w = oracle::cuniform(rng, 3.0);
        const Complex d = std::polar(std::pow(10.0, oracle::uniform(rng, -12.0, -2.0)), oracle::uniform(rng, 0, 6.28));
        const Complex got = gram_entry(w + d, w, t) ;
        const Complex want = oracle::integrate(
            [&](double s) { return std::exp(kI * (w + d) * s) * std::conj(std::exp(kI * w * s)); }, 0.0, t, 200);
        CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("scalar wave on one period has an orthogonal Gram matrix") {
    const auto spec = decompose(CouplingSystem(1, {0}, {1}));
    const auto grid = build_frequencies(spec, 1);
    const auto ms = assemble_gram(grid, nullptr, 2 * kPi, BasisKind::raw);
    CHECK(std::abs(ms.gram(0, 0) - 2 * kPi) < 1e-14);
    CHECK(std::abs(ms.gram(0, 1)) < 1e-14);
    CHECK(ms.cond_estimate == doctest::Approx(1.0));

    const auto edd = build_edd(grid);
    const auto me = assemble_gram(grid, &edd, 2 * kPi, BasisKind::edd);
    CHECK(me.gram == ms.gram);
}

TEST_CASE("Gram matrices are Hermitian positive semidefinite") {
    for (BasisKind basis : {BasisKind::raw, BasisKind::edd}) {
        for (double t : {2 * kPi, 4 * kPi, 5.5}) {
            const auto p = two_by_two(t, 4);
            const auto ms = moment_system(p, basis, CVector(16));
            const double gn = ms.gram.norm1();
            for (std::size_t i = 0; i < 16; ++i)
                for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(ms.gram(i, j) - std::conj(ms.gram(j, i))) <= 1e-10 * gn);
            const auto eig = eig_dense(ms.gram, 1e-6);
            for (auto ev : eig.eigenvalues) CHECK(ev.real() >= -1e-8 * gn);
        }
    }
}

TEST_CASE("Gram entries match quadrature of the basis functions") {
    const auto p = two_by_two(4 * kPi, 2);
    for (BasisKind basis : {BasisKind::raw, BasisKind::edd}) {
        const auto ms = moment_system(p, basis, CVector(8));
        auto eval = [&](std::size_t r, double t) {
            Complex s{};
            for (const auto& term : ms.functions[r]) s += term.weight * std::exp(kI * term.frequency * t);
            return s;
        };
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t s = 0; s < 8; ++s) {
                const Complex q = oracle::integrate([&](double t) { return eval(s, t) * std::conj(eval(r, t)); }, 0.0, p.t);
                CHECK(std::abs(ms.gram(r, s) - q) < 1e-11);
            }
    }
}

TEST_CASE("target_to_modal uses the biorthogonal family") {
    const auto spec = decompose(CouplingSystem(2, {0.5, 0, 1, -0.3}, {1, 0}));
    const auto grid = build_frequencies(spec, 3);
    TargetSpec t1;
    t1.z0 = {{1, spec.phi(0)}};
    const auto m1 = target_to_modal(t1, spec, grid);
    CHECK(std::abs(m1.a(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(m1.a(1, 1)) < 1e-14);
    CHECK(std::abs(m1.adot(1, 0)) == 0.0);

    TargetSpec t2;
    t2.z1 = {{2, spec.phi(1)}};
    const auto m2 = target_to_modal(t2, spec, grid);
    CHECK(std::abs(m2.adot(2, 1) - 1.0) < 1e-14);
    CHECK(std::abs(m2.adot(2, 0)) < 1e-14);
    CHECK(m2.a(2, 1) == Complex{});

    TargetSpec t3;
    const CVector sum{spec.phi(0)[0] + spec.phi(1)[0], spec.phi(0)[1] + spec.phi(1)[1]};
    t3.z0 = {{1, sum}};
    const auto m3 = target_to_modal(t3, spec, grid);
    CHECK(std::abs(m3.a(1, 0) - 1.0) < 1e-14);
    CHECK(std::abs(m3.a(1, 1) - 1.0) < 1e-14);

    TargetSpec bad;
    bad.z0 = {{4, sum}};
    try {
        target_to_modal(bad, spec, grid);
        FAIL("expected ModeOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ModeOutOfRange);
    }
}

TEST_CASE("c table extends to negative k") {
    const auto p = two_by_two(4 * kPi, 2);
    ModalState m(2, 2);
    m.a(1, 0) = Complex(0.3, 0.1);
    m.adot(1, 0) = Complex(-0.2, 0.4);
    const CVector c = m.c(p.grid);
    const auto idx = p.grid.index_order();
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (idx[r].l != 0 || std::abs(idx[r].k) != 1) continue;
        const Complex w = p.grid.omega(1, 0);
        const Complex want = idx[r].k > 0 ? kI * w * m.a(1, 0) + m.adot(1, 0) : -kI * w * m.a(1, 0) + m.adot(1, 0);
        CHECK(std::abs(c[r] - want) < 1e-15);
    }
}

TEST_CASE("moments_from_target examples") {
    const auto spec = decompose(CouplingSystem(1, {0}, {1}));
    const auto grid = build_frequencies(spec, 2);
    ModalState zero(2, 1);
    for (auto g : moments_from_target(zero, spec, grid, 2 * kPi)) CHECK(g == Complex{});

    ModalState m(2, 1);
    m.adot(1, 0) = 1.0;
    const CVector gamma = moments_from_target(m, spec, grid, 2 * kPi);
    const auto idx = grid.index_order();
    for (std::size_t r = 0; r < idx.size(); ++r)
        if (idx[r].k == 1) CHECK(std::abs(gamma[r] - kPi / 2) < 1e-14);

    ModalState m2 = m;
    m2.adot(1, 0) = 2.0;
    const CVector gamma2 = moments_from_target(m2, spec, grid, 2 * kPi);
    for (std::size_t r = 0; r < gamma.size(); ++r) CHECK(std::abs(gamma2[r] - 2.0 * gamma[r]) < 1e-14);

    const auto bad = decompose(CouplingSystem(2, {0.5, 0, 1, -0.3}, {0, 1}));
    try {
        moments_from_target(ModalState(2, 2), bad, build_frequencies(bad, 2), 4 * kPi);
        FAIL("expected BetaZero");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BetaZero);
    }
}

TEST_CASE("synthesize: zero moments give the zero control") {
    const auto p = two_by_two(4 * kPi, 4);
    const auto res = synthesize(moment_system(p, BasisKind::raw, CVector(16)));
    CHECK(res.control.combo.empty());
    CHECK(l2_norm(res.control) == 0.0);
}

TEST_CASE("synthesize: scalar wave, one mode") {
    const auto spec = decompose(CouplingSystem(1, {0}, {1}));
    const auto grid = build_frequencies(spec, 1);
    MomentSystem ms = assemble_gram(grid, nullptr, 2 * kPi, BasisKind::raw);
    attach_moments(ms, CVector{kPi / 2, kPi / 2});  // (k=-1, k=1)
    const auto res = synthesize(ms);
    CHECK(std::abs(res.coefficients[0] - 0.25) < 1e-14);
    CHECK(std::abs(res.coefficients[1] - 0.25) < 1e-14);
    CHECK(std::abs(quad_moment(res.control, 1.0) - kPi / 2) < 1e-12);
    CHECK(std::abs(quad_moment(res.control, -1.0) - kPi / 2) < 1e-12);
}

TEST_CASE("moment consistency: quadrature of the synthesized control reproduces gamma") {
    std::mt19937_64 rng(17);
    for (BasisKind basis : {BasisKind::raw, BasisKind::edd}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto p = two_by_two(4 * kPi + oracle::uniform(rng, 0.0, 2.0), 6);
            const CVector gamma = random_gamma(rng, p.grid, 1.0);
            const auto ms = moment_system(p, basis, gamma);
            const auto res = synthesize(ms);
            CHECK(res.moment_residual <= 1e-8 * res.cond_estimate);
            double scale = 0.0;
            for (auto g : gamma) scale = std::max(scale, std::abs(g));
            const auto idx = p.grid.index_order();
            for (std::size_t r = 0; r < idx.size(); ++r) {
                const Complex nu = std::conj(p.grid.omega(idx[r].k, idx[r].l));
                CHECK(std::abs(quad_moment(res.control, nu) - gamma[r]) <= 1e-7 * scale);
            }
            CHECK(raw_moment_residual(res.control, ms) <= 1e-9);
        }
    }
}

TEST_CASE("real spectrum and real target give a real control") {
    const auto p = two_by_two(4 * kPi, 8);
    const auto modal = target_to_modal(real_target(), p.spec, p.grid);
    for (BasisKind basis : {BasisKind::raw, BasisKind::edd}) {
        const auto ms = moment_system(p, basis, moments_from_target(modal, p.spec, p.grid, p.t));
        const auto real = realify(synthesize(ms).control);
        CHECK(real.realification_residual <= 1e-8);
    }
}

TEST_CASE("raw and EDD synthesis give the same minimal-norm control") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = two_by_two(4 * kPi + oracle::uniform(rng, 0.0, 3.0), 8);
        const CVector gamma = random_gamma(rng, p.grid, 1.0);
        const auto raw = moment_system(p, BasisKind::raw, gamma);
        const auto edd = moment_system(p, BasisKind::edd, gamma);
        REQUIRE(raw.cond_estimate <= 1e6);
        REQUIRE(edd.cond_estimate <= 1e6);
        const auto fr = synthesize(raw).control;
        const auto fe = synthesize(edd).control;
        CHECK(l2_distance(fr, fe) <= 1e-6 * l2_norm(fr));
    }
}

TEST_CASE("synthesis failures below the threshold and at resonance") {
    // T = 2 pi for N = 2: the family is far from a Riesz sequence
    const auto p = two_by_two(2 * kPi, 8);
    const auto ms = moment_system(p, BasisKind::edd, CVector(32, 1.0));
    CHECK(ms.cond_extended);
    try {
        synthesize(ms);
        FAIL("expected a numerical failure");
    } catch (const Error& e) {
        CHECK((e.kind() == ErrorKind::ConditioningExceeded || e.kind() == ErrorKind::SingularSystem));
    }

    // resonance: repeated exponential in the raw family
    const auto spec = decompose(CouplingSystem(2, {0, 0, 1, 3}, {1, 0}));
    const auto grid = build_frequencies(spec, 2);
    MomentSystem rs = assemble_gram(grid, nullptr, 4 * kPi, BasisKind::raw);
    attach_moments(rs, CVector(8, 1.0));
    try {
        synthesize(rs);
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
    }
}

TEST_CASE("realify examples") {
    ControlSignal cos2;
    cos2.t = 2 * kPi;
    cos2.combo = {{1.0, 1.0}, {-1.0, 1.0}};
    const auto r1 = realify(cos2);
    CHECK(r1.realification_residual < 1e-15);
    CHECK(l2_distance(r1, cos2) < 1e-14);

    ControlSignal sin2;
    sin2.t = 2 * kPi;
    sin2.combo = {{1.0, kI}, {-1.0, -kI}};
    const auto r2 = realify(sin2);
    CHECK(r2.realification_residual < 1e-15);
    CHECK(l2_distance(r2, sin2) < 1e-14);

    ControlSignal e;
    e.t = 2 * kPi;
    e.combo = {{1.0, 1.0}};
    const auto r3 = realify(e);
    CHECK(r3.realification_residual == doctest::Approx(1.0 / std::sqrt(2.0)));
    for (double t : {0.0, 0.4, 2.0, 5.0}) CHECK(std::abs(r3(t) - std::cos(t)) < 1e-15);
}

TEST_CASE("merge_terms combines equal frequencies and drops zeros") {
    const auto m = merge_terms({{1.0, 1.0}, {2.0, 0.5}, {1.0, -1.0}, {2.0, 0.5}});
    REQUIRE(m.size() == 1);
    CHECK(m[0].frequency == Complex(2.0));
    CHECK(m[0].weight == Complex(1.0));
}

TEST_CASE("n2_normalize_eigvecs examples") {
    const CouplingSystem sys(2, {0.5, 0, 1, -0.3}, {1, 0});
    const auto norm = n2_normalize_eigvecs(sys, decompose(sys));
    CHECK(std::abs(norm.alpha - 0.8) < 1e-13);
    const CVector p0 = norm.spec.phi(0), p1 = norm.spec.phi(1);
    CHECK(std::abs(p0[0]) < 1e-14);
    CHECK(std::abs(p0[1] + 1.0) < 1e-14);
    CHECK(std::abs(p0[1] + p1[1]) < 1e-14);
    CHECK(max_biorthogonality_defect(norm.spec) < 1e-12);

    // eigenvectors (1, 1) and (1, -1)
    const CouplingSystem sym(2, {1.5, 0.5, 0.5, 1.5}, {2, 0});
    const auto ns = n2_normalize_eigvecs(sym, decompose(sym));
    CHECK(std::abs(ns.alpha - 2.0) < 1e-13);

    const CouplingSystem wrong_b(2, {0.5, 0, 1, -0.3}, {1, 1});
    CHECK_THROWS_AS(n2_normalize_eigvecs(wrong_b, decompose(wrong_b)), Error);
}

TEST_CASE("n2_sharp_targets examples") {
    const CouplingSystem sys(2, {0.5, 0, 1, -0.3}, {1, 0});
    const auto norm = n2_normalize_eigvecs(sys, decompose(sys));
    const auto grid = build_frequencies(norm.spec, 3);
    const Complex gap = grid.omega(1, 1) - grid.omega(1, 0);
    const CVector phi2 = norm.spec.phi(1);

    TargetSpec first;
    first.z0 = {{1, CVector{1.0, 0.0}}};
    const auto s1 = n2_sharp_targets(first, norm, grid);
    CHECK(std::abs(s1.tilde_a[1]) < 1e-15);
    CHECK(std::abs(s1.tilde_a[0] - 1.0 / norm.alpha) < 1e-14);

    TargetSpec second;
    second.z0 = {{1, CVector{0.0, 1.0}}};
    const auto s2 = n2_sharp_targets(second, norm, grid);
    const Complex t2 = 1.0 / (phi2[1] * gap);
    CHECK(std::abs(s2.tilde_a[1] - t2) < 1e-13);
    CHECK(std::abs(s2.tilde_a[0] + phi2[0] / norm.alpha * t2 * gap) < 1e-13);

    // the equivalent modal state reconstructs the target componentwise
    for (const auto* tg : {&first, &second}) {
        const auto st = n2_sharp_targets(*tg, norm, grid);
        for (std::size_t m = 0; m < 2; ++m) {
            Complex u{};
            for (std::size_t j = 0; j < 2; ++j) u += st.modal.a(1, j) * norm.spec.right(m, j);
            CHECK(std::abs(u - tg->z0[0].second[m]) < 1e-13);
        }
    }

    const auto zero = n2_sharp_targets(TargetSpec{}, norm, grid);
    CHECK(zero.modal.is_zero());
}

TEST_CASE("coefficient norm and physical energy stay equivalent as K doubles") {
    std::mt19937_64 rng(41);
    const auto spec = decompose(CouplingSystem(2, {0.5, 0, 1, -0.3}, {1, 0}));
    std::vector<std::pair<double, double>> bands;
    for (std::size_t k_max : {8u, 16u, 32u}) {
        const auto grid = build_frequencies(spec, k_max);
        double lo = 1e300, hi = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            ModalState m(k_max, 2);
            for (std::size_t k = 1; k <= k_max; ++k)
                for (std::size_t l = 0; l < 2; ++l) {
                    m.a(int(k), l) = oracle::cuniform(rng) / double(k);
                    m.adot(int(k), l) = oracle::cuniform(rng);
                }
            const CVector c = m.c(grid);
            const auto idx = grid.index_order();
            double coeff = 0.0;
            for (std::size_t r = 0; r < idx.size(); ++r) coeff += std::norm(c[r]) / double(idx[r].k * idx[r].k);
            const auto phys = physical_norms(m, spec);
            const double ratio = coeff / (phys.l2_total() + phys.velocity_hm1_total());
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        bands.emplace_back(lo, hi);
    }
    for (std::size_t i = 1; i < bands.size(); ++i) {
        CHECK(bands[i].first >= bands[0].first / 2.0);
        CHECK(bands[i].second <= bands[0].second * 2.0);
    }
}

TEST_CASE("moments in the weighted sequence space stay reachable as K doubles") {
    // gamma_{k,l} ~ k^{-N} u: sum |k^{N-1} gamma|^2 < infinity
    std::vector<double> norms;
    for (std::size_t k_max : {8u, 16u, 32u}) {
        std::mt19937_64 local(43);
        const auto p = two_by_two(4 * kPi, k_max);
        const CVector gamma = random_gamma(local, p.grid, 2.0);
        const auto res = synthesize(moment_system(p, BasisKind::edd, gamma));
        norms.push_back(l2_norm(res.control));
    }
    CHECK(norms[1] <= 2.0 * norms[0]);
    CHECK(norms[2] <= 2.0 * norms[1]);
}
