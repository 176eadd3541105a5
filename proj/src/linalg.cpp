#include "wavecontrol/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wavecontrol/errors.hpp"

namespace wavecontrol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Plane rotation G = [[c, s], [-conj(s), c]] with G [x; y] = [r; 0].
struct Givens {
    double c = 1.0;
    Complex s{0.0, 0.0};

    static Givens make(Complex x, Complex y) {
        Givens g;
        const double ax = std::abs(x);
        const double ay = std::abs(y);
        if (ay == 0.0) return g;
        const double nrm = std::hypot(ax, ay);
        if (ax == 0.0) {
            g.c = 0.0;
            g.s = std::conj(y) / ay;
            return g;
        }
        g.c = ax / nrm;
        g.s = (x / ax) * std::conj(y) / nrm;
        return g;
    }
};

// H <- G H on rows (p, p+1), columns [first, last].
void rotate_rows(ComplexMatrix& h, const Givens& g, std::size_t p, std::size_t first, std::size_t last) {
    for (std::size_t j = first; j <= last; ++j) {
        const Complex a = h(p, j);
        const Complex b = h(p + 1, j);
        h(p, j) = g.c * a + g.s * b;
        h(p + 1, j) = -std::conj(g.s) * a + g.c * b;
    }
}

// H <- H G^H on columns (p, p+1), rows [first, last].
void rotate_cols(ComplexMatrix& h, const Givens& g, std::size_t p, std::size_t first, std::size_t last) {
    for (std::size_t i = first; i <= last; ++i) {
        const Complex a = h(i, p);
        const Complex b = h(i, p + 1);
        h(i, p) = g.c * a + std::conj(g.s) * b;
        h(i, p + 1) = -g.s * a + g.c * b;
    }
}

// Householder reduction to upper Hessenberg form, accumulating Q (A = Q H Q^H).
void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    CVector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm = std::hypot(xnorm, std::abs(h(i, k)));
        if (xnorm == 0.0) continue;
        const Complex x0 = h(k + 1, k);
        const Complex phase = (std::abs(x0) == 0.0) ? Complex(1.0) : x0 / std::abs(x0);
        const Complex alpha = -phase * xnorm;

        std::fill(v.begin(), v.end(), Complex{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        const double vnorm = norm2(v);
        if (vnorm == 0.0) continue;
        for (auto& z : v) z /= vnorm;

        // H <- (I - 2 v v^H) H
        for (std::size_t j = 0; j < n; ++j) {
            Complex dot{};
            for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * dot;
        }
        // H <- H (I - 2 v v^H), Q <- Q (I - 2 v v^H)
        for (ComplexMatrix* m : {&h, &q}) {
            for (std::size_t i = 0; i < n; ++i) {
                Complex dot{};
                for (std::size_t j = k + 1; j < n; ++j) dot += (*m)(i, j) * v[j];
                for (std::size_t j = k + 1; j < n; ++j) (*m)(i, j) -= 2.0 * dot * std::conj(v[j]);
            }
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{};
    }
}

// Shifted QR iteration on a Hessenberg matrix down to upper triangular form.
void schur_triangularize(ComplexMatrix& h, ComplexMatrix& z) {
    const std::size_t n = h.rows();
    if (n < 2) return;
    const std::size_t max_iter = 100 * n * n;
    const double hnorm = std::max(h.norm_frobenius(), std::numeric_limits<double>::min());

    std::size_t hi = n - 1;
    std::size_t iter = 0;
    std::size_t total = 0;
    while (hi > 0) {
        std::size_t lo = hi;
        while (lo > 0) {
            double s = abs1(h(lo - 1, lo - 1)) + abs1(h(lo, lo));
            if (s == 0.0) s = hnorm;
            if (abs1(h(lo, lo - 1)) <= kEps * s) {
                h(lo, lo - 1) = Complex{};
                break;
            }
            --lo;
        }
        if (lo == hi) {
            --hi;
            iter = 0;
            continue;
        }
        if (++total > max_iter) {
            throw Error(ErrorKind::NonConvergence, "QR iteration exceeded " + std::to_string(max_iter) + " steps");
        }
        ++iter;

        Complex shift;
        if (iter % 10 == 0) {
            // exceptional shift to break cycles
            shift = h(hi, hi) + std::abs(h(hi, hi - 1).real());
            if (hi >= 2) shift += std::abs(h(hi - 1, hi - 2).real());
        } else {
            const Complex a = h(hi - 1, hi - 1);
            const Complex b = h(hi - 1, hi);
            const Complex c = h(hi, hi - 1);
            const Complex d = h(hi, hi);
            const Complex half = 0.5 * (a - d);
            const Complex disc = std::sqrt(half * half + b * c);
            const Complex m1 = 0.5 * (a + d) + disc;
            const Complex m2 = 0.5 * (a + d) - disc;
            shift = (std::abs(m1 - d) <= std::abs(m2 - d)) ? m1 : m2;
        }

        Complex x = h(lo, lo) - shift;
        Complex y = h(lo + 1, lo);
        for (std::size_t k = lo; k < hi; ++k) {
            const Givens g = Givens::make(x, y);
            rotate_rows(h, g, k, k == lo ? lo : k - 1, n - 1);
            rotate_cols(h, g, k, 0, std::min(k + 2, hi));
            rotate_cols(z, g, k, 0, n - 1);
            if (k > lo) h(k + 1, k - 1) = Complex{};
            if (k + 1 < hi) {
                x = h(k + 1, k);
                y = h(k + 2, k);
            }
        }
    }
}

bool precedes(Complex a, Complex b, double tie) {
    if (std::abs(a.real() - b.real()) > tie) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::BadInput, "ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::from_real(std::size_t rows, std::size_t cols, std::span<const double> row_major) {
    if (row_major.size() != rows * cols) throw Error(ErrorKind::BadInput, "entry count does not match dimensions");
    ComplexMatrix m(rows, cols);
    std::copy(row_major.begin(), row_major.end(), m.data_.begin());
    return m;
}

CVector ComplexMatrix::column(std::size_t j) const {
    CVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void ComplexMatrix::set_column(std::size_t j, std::span<const Complex> values) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
    return t;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexMatrix::norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::norm_frobenius() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::BadInput, "matrix product dimension mismatch");
    ComplexMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Complex aik = a(i, k);
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
    if (a.cols_ != x.size()) throw Error(ErrorKind::BadInput, "matrix-vector dimension mismatch");
    CVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        Complex s{};
        for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    Complex s{};
    for (std::size_t m = 0; m < x.size(); ++m) s += x[m] * std::conj(y[m]);
    return s;
}

EigenResult eig_dense(const ComplexMatrix& a, double eig_tol) {
    if (!a.square()) throw Error(ErrorKind::BadInput, "eig_dense needs a square matrix");
    const std::size_t n = a.rows();
    if (n > kMaxEigenDimension) {
        throw Error(ErrorKind::DimensionTooLarge, "dimension " + std::to_string(n) + " exceeds 32");
    }
    if (!a.all_finite()) throw Error(ErrorKind::BadInput, "matrix has non-finite entries");

    EigenResult out;
    if (n == 0) return out;

    ComplexMatrix t = a;
    ComplexMatrix z = ComplexMatrix::identity(n);
    hessenberg(t, z);
    schur_triangularize(t, z);

    const double scale = std::max(1.0, a.norm_frobenius());
    const double small = kEps * scale;
    CVector lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = t(i, i);

    // Eigenvectors of the triangular factor by back substitution, mapped back through Z.
    ComplexMatrix vecs(n, n);
    CVector y(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::fill(y.begin(), y.end(), Complex{});
        y[k] = 1.0;
        for (std::size_t jj = k; jj-- > 0;) {
            Complex s{};
            for (std::size_t m = jj + 1; m <= k; ++m) s += t(jj, m) * y[m];
            Complex d = t(jj, jj) - lambda[k];
            if (std::abs(d) < small) d = small;
            y[jj] = -s / d;
        }
        CVector v = z * std::span<const Complex>(y);
        const double nv = norm2(v);
        std::size_t imax = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v[i]) > std::abs(v[imax]) * (1.0 + 1e-12)) imax = i;
        const Complex phase = std::conj(v[imax]) / std::abs(v[imax]);
        for (auto& c : v) c *= phase / nv;
        vecs.set_column(k, v);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-12 * scale;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t p, std::size_t q) { return precedes(lambda[p], lambda[q], tie); });

    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    out.residuals.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.eigenvalues[j] = lambda[src];
        const CVector v = vecs.column(src);
        out.eigenvectors.set_column(j, v);
        CVector r = a * std::span<const Complex>(v);
        for (std::size_t i = 0; i < n; ++i) r[i] -= lambda[src] * v[i];
        out.residuals[j] = norm2(r) / norm2(v);
        if (!(out.residuals[j] <= eig_tol * scale)) {
            throw Error(ErrorKind::NonConvergence,
                        "eigenpair residual " + std::to_string(out.residuals[j]) + " above tolerance");
        }
    }
    return out;
}

HermitianSolution solve_hermitian(const ComplexMatrix& g, std::span<const Complex> rhs, double pivot_tol) {
    if (!g.square() || g.rows() != rhs.size()) throw Error(ErrorKind::BadInput, "solve_hermitian dimension mismatch");
    const std::size_t n = g.rows();
    HermitianSolution out;
    if (n == 0) return out;

    const double gnorm = g.norm1();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (std::abs(g(i, j) - std::conj(g(j, i))) > 1e-10 * gnorm)
                throw Error(ErrorKind::BadInput, "matrix is not Hermitian");

    // G = L D L^H, unit lower L, real D.
    ComplexMatrix l = ComplexMatrix::identity(n);
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        double dj = g(j, j).real();
        for (std::size_t k = 0; k < j; ++k) dj -= std::norm(l(j, k)) * d[k];
        if (!(std::abs(dj) > pivot_tol * gnorm)) {
            throw Error(ErrorKind::SingularSystem,
                        "pivot " + std::to_string(j) + " is " + std::to_string(dj) + " (||G||_1 = " +
                            std::to_string(gnorm) + ")");
        }
        d[j] = dj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k)) * d[k];
            l(i, j) = s / dj;
        }
    }

    auto solve = [&](std::span<const Complex> b) {
        CVector x(b.begin(), b.end());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
        for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
        for (std::size_t i = n; i-- > 0;)
            for (std::size_t k = i + 1; k < n; ++k) x[i] -= std::conj(l(k, i)) * x[k];
        return x;
    };

    out.x = solve(rhs);

    double inv_norm = 0.0;
    CVector e(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), Complex{});
        e[j] = 1.0;
        const CVector col = solve(e);
        double s = 0.0;
        for (const auto& c : col) s += std::abs(c);
        inv_norm = std::max(inv_norm, s);
    }
    out.cond_estimate = gnorm * inv_norm;
    return out;
}

std::size_t rank_qr(const ComplexMatrix& m, double rank_tol) {
    if (m.empty()) return 0;
    ComplexMatrix r = m;
    const std::size_t rows = r.rows();
    const std::size_t cols = r.cols();
    const std::size_t steps = std::min(rows, cols);
    std::vector<double> diag;
    diag.reserve(steps);

    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t piv = k;
        double best = -1.0;
        for (std::size_t j = k; j < cols; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < rows; ++i) s += std::norm(r(i, j));
            if (s > best) {
                best = s;
                piv = j;
            }
        }
        if (piv != k)
            for (std::size_t i = 0; i < rows; ++i) std::swap(r(i, k), r(i, piv));

        const double xnorm = std::sqrt(best);
        diag.push_back(xnorm);
        if (xnorm == 0.0) break;

        const Complex x0 = r(k, k);
        const Complex phase = (std::abs(x0) == 0.0) ? Complex(1.0) : x0 / std::abs(x0);
        CVector v(rows);
        for (std::size_t i = k; i < rows; ++i) v[i] = r(i, k);
        v[k] += phase * xnorm;
        const double vnorm = norm2(v);
        if (vnorm == 0.0) continue;
        for (auto& z : v) z /= vnorm;
        for (std::size_t j = k; j < cols; ++j) {
            Complex dot{};
            for (std::size_t i = k; i < rows; ++i) dot += std::conj(v[i]) * r(i, j);
            for (std::size_t i = k; i < rows; ++i) r(i, j) -= 2.0 * v[i] * dot;
        }
    }

    if (diag.empty() || diag.front() == 0.0) return 0;
    const double threshold = rank_tol * diag.front();
    return static_cast<std::size_t>(
        std::count_if(diag.begin(), diag.end(), [&](double v) { return v > threshold; }));
}

ComplexMatrix inverse(const ComplexMatrix& a) {
    if (!a.square()) throw Error(ErrorKind::BadInput, "inverse of a non-square matrix");
    const std::size_t n = a.rows();
    ComplexMatrix w = a;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(w(i, k)) > std::abs(w(piv, k))) piv = i;
        if (std::abs(w(piv, k)) == 0.0) throw Error(ErrorKind::SingularSystem, "zero pivot in inverse");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(k, j), w(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        }
        const Complex p = w(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            w(k, j) /= p;
            inv(k, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const Complex f = w(i, k);
            if (f == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                w(i, j) -= f * w(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

double condition_1norm(const ComplexMatrix& a) {
    try {
        const ComplexMatrix inv = inverse(a);
        const double c = a.norm1() * inv.norm1();
        return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace wavecontrol
