#include "wavecontrol/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wavecontrol/errors.hpp"

namespace wavecontrol {

namespace {

bool lex_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::string describe(const ModeIndex& m) { return "(" + std::to_string(m.k) + ", " + std::to_string(m.l) + ")"; }

}  // namespace

FrequencyGrid::FrequencyGrid(std::size_t k_max, std::size_t n, CVector positive)
    : k_max_(k_max), n_(n), positive_(std::move(positive)) {
    if (positive_.size() != k_max_ * n_) throw Error(ErrorKind::BadInput, "frequency table has the wrong size");
}

Complex FrequencyGrid::omega(int k, std::size_t l) const {
    const auto mag = static_cast<std::size_t>(std::abs(k));
    if (k == 0 || mag > k_max_ || l >= n_) {
        throw Error(ErrorKind::ModeOutOfRange, "mode " + describe({k, l}) + " outside the grid");
    }
    const Complex w = positive_[(mag - 1) * n_ + l];
    return k > 0 ? w : -w;
}

std::vector<ModeIndex> FrequencyGrid::index_order() const {
    std::vector<ModeIndex> out;
    out.reserve(2 * k_max_ * n_);
    const int kk = static_cast<int>(k_max_);
    for (int k = -kk; k <= kk; ++k) {
        if (k == 0) continue;
        for (std::size_t l = 0; l < n_; ++l) out.push_back({k, l});
    }
    return out;
}

Complex branch_sqrt(Complex z) {
    Complex w = std::sqrt(z);
    if (w.real() < 0.0 || (w.real() == 0.0 && w.imag() < 0.0)) w = -w;
    return w;
}

double default_collision_tolerance(std::size_t k_max) { return 1e-8 * (1.0 + static_cast<double>(k_max)); }

FrequencyGrid build_frequencies(const SpectralDecomposition& spec, std::size_t k_max, double zero_tol, double coll_tol) {
    if (k_max < 1) throw Error(ErrorKind::BadInput, "truncation order K must be at least 1");
    const std::size_t n = spec.size();
    CVector table(k_max * n);
    for (std::size_t k = 1; k <= k_max; ++k) {
        const double k2 = static_cast<double>(k) * static_cast<double>(k);
        for (std::size_t l = 0; l < n; ++l) table[(k - 1) * n + l] = branch_sqrt(k2 + std::conj(spec.eigenvalues[l]));
    }
    FrequencyGrid grid(k_max, n, std::move(table));
    for (const auto& m : grid.index_order())
        if (m.k > 0 && std::abs(grid.omega(m.k, m.l)) <= zero_tol) grid.zero_modes.push_back(m);
    grid.collisions = detect_collisions(grid, coll_tol < 0.0 ? default_collision_tolerance(k_max) : coll_tol);
    return grid;
}

std::vector<Collision> detect_collisions(const FrequencyGrid& grid, double coll_tol) {
    std::vector<Collision> out;
    const auto order = grid.index_order();
    for (std::size_t p = 0; p < order.size(); ++p) {
        const Complex wp = grid.omega(order[p].k, order[p].l);
        for (std::size_t q = p + 1; q < order.size(); ++q) {
            const double dist = std::abs(wp - grid.omega(order[q].k, order[q].l));
            if (dist <= coll_tol) out.push_back({order[p], order[q], dist});
        }
    }
    return out;
}

std::vector<Complex> divided_difference_weights(std::span<const Complex> nodes) {
    std::vector<Complex> w(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        Complex denom = 1.0;
        for (std::size_t r = 0; r < nodes.size(); ++r)
            if (r != j) denom *= nodes[j] - nodes[r];
        w[j] = 1.0 / denom;
    }
    return w;
}

std::vector<ExpTerm> EddBlock::function(std::size_t p) const {
    std::vector<ExpTerm> terms;
    terms.reserve(p + 1);
    for (std::size_t j = 0; j <= p; ++j) terms.push_back({nodes[j], weights[p][j]});
    return terms;
}

const EddBlock& EddFamily::block(int k) const {
    const int kk = static_cast<int>(k_max);
    if (k == 0 || std::abs(k) > kk) throw Error(ErrorKind::ModeOutOfRange, "block " + std::to_string(k) + " outside family");
    const std::size_t pos = k < 0 ? static_cast<std::size_t>(k + kk) : static_cast<std::size_t>(k + kk - 1);
    return blocks[pos];
}

EddFamily build_edd(const FrequencyGrid& grid, double coll_tol) {
    if (coll_tol < 0.0) coll_tol = default_collision_tolerance(grid.k_max());
    EddFamily fam;
    fam.k_max = grid.k_max();
    fam.n = grid.n();
    const int kk = static_cast<int>(grid.k_max());
    for (int k = -kk; k <= kk; ++k) {
        if (k == 0) continue;
        EddBlock blk;
        blk.k = k;
        blk.order.resize(grid.n());
        std::iota(blk.order.begin(), blk.order.end(), std::size_t{0});
        std::sort(blk.order.begin(), blk.order.end(), [&](std::size_t a, std::size_t b) {
            return lex_less(grid.omega(k, a), grid.omega(k, b));
        });
        for (std::size_t l : blk.order) blk.nodes.push_back(grid.omega(k, l));

        for (std::size_t i = 0; i < blk.nodes.size(); ++i)
            for (std::size_t j = i + 1; j < blk.nodes.size(); ++j)
                if (std::abs(blk.nodes[i] - blk.nodes[j]) <= coll_tol)
                    throw Error(ErrorKind::CollisionInBlock,
                                "frequencies " + describe({k, blk.order[i]}) + " and " + describe({k, blk.order[j]}) +
                                    " coincide");

        const double kabs = std::abs(static_cast<double>(k));
        for (std::size_t p = 0; p < blk.nodes.size(); ++p) {
            blk.weights.push_back(divided_difference_weights(std::span<const Complex>(blk.nodes).first(p + 1)));
            double wmax = 0.0;
            for (const auto& w : blk.weights.back()) wmax = std::max(wmax, std::abs(w));
            blk.weight_scale.push_back(wmax / std::pow(kabs, static_cast<double>(p)));
        }
        fam.blocks.push_back(std::move(blk));
    }
    return fam;
}

GapReport gap_diagnostics(const FrequencyGrid& grid) {
    GapReport rep;
    if (grid.n() < 2) return rep;
    const int kk = static_cast<int>(grid.k_max());
    for (int k = 1; k <= kk; ++k) {
        double d = 0.0;
        for (std::size_t i = 0; i < grid.n(); ++i)
            for (std::size_t j = i + 1; j < grid.n(); ++j) d = std::max(d, std::abs(grid.omega(k, i) - grid.omega(k, j)));
        rep.k.push_back(k);
        rep.diameter.push_back(d);
        rep.scaled.push_back(k * d);
    }
    std::vector<double> upper;
    for (std::size_t p = 0; p < rep.k.size(); ++p)
        if (2 * rep.k[p] > kk) upper.push_back(rep.scaled[p]);
    std::sort(upper.begin(), upper.end());
    const std::size_t m = upper.size();
    rep.reference = (m % 2 == 1) ? upper[m / 2] : 0.5 * (upper[m / 2 - 1] + upper[m / 2]);
    for (std::size_t p = 0; p < rep.k.size(); ++p) {
        if (2 * rep.k[p] <= kk) continue;
        if (rep.scaled[p] < 0.5 * rep.reference || rep.scaled[p] > 2.0 * rep.reference) rep.non_asymptotic.push_back(rep.k[p]);
    }
    return rep;
}

}  // namespace wavecontrol
