#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "wavecontrol/coupling.hpp"
#include "wavecontrol/linalg.hpp"
#include "wavecontrol/spectrum.hpp"
#include "wavecontrol/tolerances.hpp"

namespace wavecontrol {

/// Modal amplitudes a_{k,l} and their time derivatives for k = 1..K. The
/// negative-k extension is implicit: a_{-k,l} = a_{k,l}, adot_{-k,l} = adot_{k,l}.
class ModalState {
public:
    ModalState() = default;
    ModalState(std::size_t k_max, std::size_t n) : k_max_(k_max), n_(n), a_(k_max * n), adot_(k_max * n) {}

    std::size_t k_max() const noexcept { return k_max_; }
    std::size_t n() const noexcept { return n_; }

    Complex& a(int k, std::size_t l) { return a_[slot(k, l)]; }
    Complex a(int k, std::size_t l) const { return a_[slot(k, l)]; }
    Complex& adot(int k, std::size_t l) { return adot_[slot(k, l)]; }
    Complex adot(int k, std::size_t l) const { return adot_[slot(k, l)]; }

    std::span<const Complex> a_table() const noexcept { return a_; }
    std::span<const Complex> adot_table() const noexcept { return adot_; }

    /// c_{k,l} = i w_{k,l} a_{k,l} + adot_{k,l} over grid.index_order().
    CVector c(const FrequencyGrid& grid) const;

    bool is_zero() const;

private:
    std::size_t slot(int k, std::size_t l) const;

    std::size_t k_max_ = 0;
    std::size_t n_ = 0;
    CVector a_;
    CVector adot_;
};

/// Sine coefficients of the terminal data: z0(x) = sum_n z0_n sin(n x), same for z1.
struct TargetSpec {
    std::vector<std::pair<int, CVector>> z0;
    std::vector<std::pair<int, CVector>> z1;

    int max_mode() const;
};

enum class BasisKind { raw, edd };

/// (e^{i wa t}, e^{i wb t}) on L^2(0, T).
Complex gram_entry(Complex omega_a, Complex omega_b, double t);

struct MomentSystem {
    BasisKind basis = BasisKind::raw;
    double t = 0.0;
    std::vector<ModeIndex> index_order;
    /// Basis functions; raw: e^{i conj(w_{k,l}) t} in index order. edd: the
    /// divided differences of those exponentials, block by block.
    std::vector<std::vector<ExpTerm>> functions;
    /// Moment-vector map for edd: row r of the basis moments is
    /// sum_j conj(weight) gamma[source]; identity for raw.
    std::vector<std::vector<std::pair<std::size_t, Complex>>> moment_map;
    ComplexMatrix gram;            // G[r][s] = (f_s, f_r)
    double cond_estimate = 0.0;    // 1-norm condition of the unit-diagonal Gram
    bool cond_extended = false;    // cond_estimate came from the extended-precision route
    CVector gamma;                 // raw moments, index order
    CVector basis_moments;         // gamma for raw, gamma-tilde for edd
};

/// Assemble the Gram matrix. `edd` must be present iff basis == edd.
MomentSystem assemble_gram(const FrequencyGrid& grid, const EddFamily* edd, double t, BasisKind basis);

/// Attach raw moments gamma (index order) and derive basis moments.
void attach_moments(MomentSystem& ms, CVector gamma);

/// 1-norm condition of the unit-diagonal Gram of `functions`, computed in
/// 100-digit arithmetic; +inf when singular at that precision.
double gram_condition_extended(const std::vector<std::vector<ExpTerm>>& functions, double t);

ModalState target_to_modal(const TargetSpec& target, const SpectralDecomposition& spec, const FrequencyGrid& grid);

/// gamma_{k,l} = c_{k,l}(T) / ((2|k|/pi) beta_l e^{i w_{k,l} T}).
CVector moments_from_target(const ModalState& modal, const SpectralDecomposition& spec, const FrequencyGrid& grid,
                            double t, double beta_tol = 1e-10);

struct Samples {
    double dt = 0.0;
    std::vector<double> times;
    CVector values;
};

/// f(t) = sum alpha e^{i nu t} on [0, T].
struct ControlSignal {
    double t = 0.0;
    std::vector<ExpTerm> combo;  // (nu, alpha)
    std::optional<Samples> samples;
    double realification_residual = 0.0;

    Complex operator()(double time) const;
    Samples sample(std::size_t count) const;
};

double l2_norm(const ControlSignal& f);
double l2_distance(const ControlSignal& f, const ControlSignal& g);

/// (f, e^{i nu t}) in closed form.
Complex moment(const ControlSignal& f, Complex nu);

/// Merge terms with equal frequencies (|dnu| <= rel (1 + |nu|)) and drop zeros.
std::vector<ExpTerm> merge_terms(std::vector<ExpTerm> terms, double rel = 1e-12);

struct SynthesisResult {
    ControlSignal control;
    CVector coefficients;        // solution of the Gram system
    double moment_residual = 0.0;  // ||G alpha - gamma|| / ||gamma|| in the chosen basis
    double cond_estimate = 0.0;
};

/// Minimal-norm control solving the moment equations of `ms`.
SynthesisResult synthesize(const MomentSystem& ms, const Tolerances& tol = {});

/// max_{k,l} |(f, e_{k,l}) - gamma_{k,l}| / max |gamma| over the raw family.
double raw_moment_residual(const ControlSignal& f, const MomentSystem& ms);

/// Re f, with the relative L^2 size of Im f recorded first.
ControlSignal realify(const ControlSignal& f);

struct N2Normalization {
    SpectralDecomposition spec;  // rescaled phi, recomputed psi and beta
    Complex alpha;               // phi_1 + phi_2 = (alpha, 0)
};

/// Rescale eigenvectors of a 2x2 system with b = (s, 0) so their second
/// components cancel.
N2Normalization n2_normalize_eigvecs(const CouplingSystem& sys, const SpectralDecomposition& spec);

struct N2SharpState {
    ModalState modal;   // standard (a, adot) in the rescaled eigenbasis
    CVector tilde_a;    // (n-1) * 2 + j, first-order EDD coordinates of z0
    CVector tilde_adot; // same for z1
};

/// Choose the EDD coordinates from the second target component first, then
/// the first component, and return the equivalent modal state.
N2SharpState n2_sharp_targets(const TargetSpec& target, const N2Normalization& norm, const FrequencyGrid& grid);

}  // namespace wavecontrol
