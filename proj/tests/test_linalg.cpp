#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "wavecontrol/errors.hpp"
#include "wavecontrol/linalg.hpp"

using namespace wavecontrol;

namespace {

CVector sorted(CVector v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

}  // namespace

TEST_CASE("eig_dense on a diagonal matrix returns the standard basis") {
    const auto r = eig_dense(ComplexMatrix{{1.0, 0.0}, {0.0, 2.0}});
    CHECK(std::abs(r.eigenvalues[0] - 1.0) < 1e-14);
    CHECK(std::abs(r.eigenvalues[1] - 2.0) < 1e-14);
    CHECK(std::abs(r.eigenvectors(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(r.eigenvectors(1, 0)) < 1e-14);
    CHECK(std::abs(r.eigenvectors(1, 1) - 1.0) < 1e-14);
}

TEST_CASE("eig_dense on the identity") {
    const auto r = eig_dense(ComplexMatrix::identity(2));
    CHECK(std::abs(r.eigenvalues[0] - 1.0) < 1e-14);
    CHECK(std::abs(r.eigenvalues[1] - 1.0) < 1e-14);
}

TEST_CASE("companion matrix of z^2 - z - 1 against bisection roots") {
    const auto p = [](double z) { return z * z - z - 1.0; };
    const double lo = oracle::bisect(p, -2.0, 0.0);
    const double hi = oracle::bisect(p, 0.5, 3.0);
    const auto r = eig_dense(ComplexMatrix{{0.0, 1.0}, {1.0, 1.0}});
    CHECK(std::abs(r.eigenvalues[0] - lo) < 1e-12);
    CHECK(std::abs(r.eigenvalues[1] - hi) < 1e-12);
    CHECK(std::abs(r.eigenvalues[0].imag()) < 1e-14);
}

TEST_CASE("eig_dense rejects dimensions above 32") {
    ComplexMatrix big = ComplexMatrix::identity(33);
    try {
        eig_dense(big);
        FAIL("expected DimensionTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionTooLarge);
    }
}

TEST_CASE("eig_dense reproduces a known similarity spectrum") {
    std::mt19937_64 rng(11);
    int tested = 0;
    while (tested < 200) {
        const std::size_t n = 1 + rng() % 8;
        const ComplexMatrix v = oracle::random_matrix(rng, n, n);
        if (condition_1norm(v) > 100.0) continue;
        ComplexMatrix d(n, n);
        CVector diag(n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = diag[i] = oracle::cuniform(rng, 3.0);
        const ComplexMatrix a = v * d * inverse(v);
        const auto r = eig_dense(a);
        const CVector want = sorted(diag);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r.eigenvalues[i] - want[i]) <= 1e-10 * std::max(1.0, a.norm_frobenius()));
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(r.residuals[j] <= 1e-10 * std::max(1.0, a.norm_frobenius()));
            CHECK(std::abs(norm2(r.eigenvectors.column(j)) - 1.0) < 1e-12);
        }
        ++tested;
    }
}

TEST_CASE("eig_dense handles nonnormal and real defective-free matrices up to 32") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {16u, 24u, 32u}) {
        const ComplexMatrix a = oracle::random_matrix(rng, n, n, false);
        const auto r = eig_dense(a);
        for (std::size_t j = 0; j < n; ++j) {
            const CVector v = r.eigenvectors.column(j);
            CVector av = a * v;
            for (std::size_t i = 0; i < n; ++i) av[i] -= r.eigenvalues[j] * v[i];
            CHECK(norm2(av) <= 1e-10 * std::max(1.0, a.norm_frobenius()));
        }
        for (std::size_t j = 1; j < n; ++j) {
            const Complex p = r.eigenvalues[j - 1], q = r.eigenvalues[j];
            CHECK((p.real() < q.real() + 1e-9 * n));
        }
    }
}

TEST_CASE("solve_hermitian examples") {
    const CVector rhs{1.0, Complex(0, 2)};
    const auto s = solve_hermitian(ComplexMatrix::identity(2), rhs);
    CHECK(oracle::max_abs_diff(s.x, rhs) < 1e-15);
    CHECK(s.cond_estimate == doctest::Approx(1.0));

    const auto d = solve_hermitian(ComplexMatrix{{2.0, 0.0}, {0.0, 4.0}}, CVector{2.0, 4.0});
    CHECK(oracle::max_abs_diff(d.x, CVector{1.0, 1.0}) < 1e-15);
    CHECK(d.cond_estimate == doctest::Approx(2.0));
}

TEST_CASE("solve_hermitian residual bound on 1000 random positive-definite systems") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 16;
        const ComplexMatrix b = oracle::random_matrix(rng, n, n);
        ComplexMatrix g = b * b.adjoint();
        for (std::size_t i = 0; i < n; ++i) g(i, i) += 1e-3;
        CVector rhs(n);
        for (auto& v : rhs) v = oracle::cuniform(rng);
        const auto s = solve_hermitian(g, rhs);
        CVector r = g * s.x;
        for (std::size_t i = 0; i < n; ++i) r[i] -= rhs[i];
        CHECK(norm2(r) <= 1e-10 * s.cond_estimate * norm2(rhs));
        CHECK(s.cond_estimate >= 1.0 - 1e-12);
    }
}

TEST_CASE("solve_hermitian error paths") {
    try {
        solve_hermitian(ComplexMatrix{{1.0, 1.0}, {1.0, 1.0}}, CVector{1.0, 0.0});
        FAIL("expected SingularSystem");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
    }
    try {
        solve_hermitian(ComplexMatrix{{1.0, 2.0}, {0.0, 1.0}}, CVector{1.0, 0.0});
        FAIL("expected BadInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadInput);
    }
}

TEST_CASE("rank_qr examples") {
    CHECK(rank_qr(ComplexMatrix(2, 2)) == 0);
    CHECK(rank_qr(ComplexMatrix::identity(3)) == 3);
    CHECK(rank_qr(ComplexMatrix{{1.0, 1.0}, {0.0, 0.0}}) == 1);
    CHECK(rank_qr(ComplexMatrix()) == 0);
}

TEST_CASE("rank_qr is invariant under column permutation and scaling") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 2 + rng() % 7, cols = 2 + rng() % 7;
        const std::size_t r = 1 + rng() % std::min(rows, cols);
        const ComplexMatrix m = oracle::random_matrix(rng, rows, r) * oracle::random_matrix(rng, r, cols);
        const std::size_t base = rank_qr(m);
        CHECK(base == r);

        std::vector<std::size_t> perm(cols);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        ComplexMatrix p(rows, cols);
        for (std::size_t j = 0; j < cols; ++j) {
            const double mag = std::pow(10.0, oracle::uniform(rng, -3.0, 3.0));
            const Complex s = std::polar(mag, oracle::uniform(rng, 0.0, 6.28));
            CVector c = m.column(perm[j]);
            for (auto& v : c) v *= s;
            p.set_column(j, c);
        }
        CHECK(rank_qr(p) == base);
    }
}

TEST_CASE("inverse and condition number") {
    const ComplexMatrix a{{2.0, 1.0}, {1.0, 3.0}};
    const ComplexMatrix prod = a * inverse(a);
    CHECK(std::abs(prod(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(prod(0, 1)) < 1e-14);
    CHECK(condition_1norm(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}) == std::numeric_limits<double>::infinity());
    // ||A||_1 = 4, ||A^-1||_1 = 4/5
    CHECK(condition_1norm(a) == doctest::Approx(3.2));
}
