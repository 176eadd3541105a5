#pragma once

#include <cstddef>
#include <vector>

#include "wavecontrol/coupling.hpp"
#include "wavecontrol/linalg.hpp"

namespace wavecontrol {

/// Signed mode number k in {-K..-1, 1..K} paired with an eigen index l.
struct ModeIndex {
    int k = 0;
    std::size_t l = 0;

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

struct Collision {
    ModeIndex first;
    ModeIndex second;
    double distance = 0.0;
};

/// Frequencies w_{k,l} with w_{k,l}^2 = k^2 + conj(lambda_l). Only k > 0 is
/// stored; w_{-k,l} = -w_{k,l} by construction.
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    FrequencyGrid(std::size_t k_max, std::size_t n, CVector positive);

    std::size_t k_max() const noexcept { return k_max_; }
    std::size_t n() const noexcept { return n_; }

    Complex omega(int k, std::size_t l) const;

    /// Index order used everywhere: k = -K..-1, 1..K, then l = 0..N-1.
    std::vector<ModeIndex> index_order() const;

    std::vector<ModeIndex> zero_modes;
    std::vector<Collision> collisions;

private:
    std::size_t k_max_ = 0;
    std::size_t n_ = 0;
    CVector positive_;  // (k-1) * n + l
};

/// Principal root, Re w >= 0 and Im w >= 0 when Re w == 0.
Complex branch_sqrt(Complex z);

FrequencyGrid build_frequencies(const SpectralDecomposition& spec, std::size_t k_max, double zero_tol = 1e-10,
                                double coll_tol = -1.0);

/// Default coll_tol = 1e-8 (1 + K).
double default_collision_tolerance(std::size_t k_max);

std::vector<Collision> detect_collisions(const FrequencyGrid& grid, double coll_tol);

struct ExpTerm {
    Complex frequency;
    Complex weight;
};

/// Exponential divided differences per block k. Position p within a block
/// refers to the ascending (Re, Im) order of the block's frequencies;
/// `order[p]` maps back to the eigen index l.
struct EddBlock {
    int k = 0;
    std::vector<std::size_t> order;
    std::vector<Complex> nodes;                   // sorted frequencies
    std::vector<std::vector<Complex>> weights;    // weights[p][j], j <= p
    std::vector<double> weight_scale;             // max_j |weights[p][j]| / |k|^p

    std::vector<ExpTerm> function(std::size_t p) const;
};

struct EddFamily {
    std::size_t k_max = 0;
    std::size_t n = 0;
    std::vector<EddBlock> blocks;  // same k order as FrequencyGrid::index_order

    const EddBlock& block(int k) const;
};

/// Weights 1 / prod_{r != j, r <= p} (w_j - w_r) of [w_0, ..., w_p].
std::vector<Complex> divided_difference_weights(std::span<const Complex> nodes);

EddFamily build_edd(const FrequencyGrid& grid, double coll_tol = -1.0);

struct GapReport {
    std::vector<int> k;
    std::vector<double> diameter;        // d_k
    std::vector<double> scaled;          // k * d_k
    double reference = 0.0;              // median of k d_k over the upper half
    std::vector<int> non_asymptotic;     // k in the upper half outside [ref/2, 2 ref]

    bool asymptotic() const noexcept { return non_asymptotic.empty(); }
};

GapReport gap_diagnostics(const FrequencyGrid& grid);

}  // namespace wavecontrol
