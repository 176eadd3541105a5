#pragma once

#include <cstddef>
#include <vector>

#include "wavecontrol/linalg.hpp"
#include "wavecontrol/tolerances.hpp"

namespace wavecontrol {

/// The pair (A, b) of u_tt - u_xx + A u = 0, u(0,t) = b f(t).
struct CouplingSystem {
    std::size_t n = 0;
    std::vector<double> a;  // row-major n x n
    std::vector<double> b;

    CouplingSystem() = default;
    CouplingSystem(std::size_t n, std::vector<double> a, std::vector<double> b);

    /// Throws BadInput unless dimensions agree, entries are finite and b != 0.
    void validate() const;

    ComplexMatrix matrix() const { return ComplexMatrix::from_real(n, n, a); }
    CVector control_vector() const { return CVector(b.begin(), b.end()); }
};

struct SpectralDecomposition {
    CVector eigenvalues;             // lambda_l, ascending (Re, Im)
    ComplexMatrix right;             // phi_l as columns
    ComplexMatrix biorthogonal;      // psi_l as columns, <phi_i, psi_j> = delta_ij
    CVector beta;                    // <b, psi_l>
    double min_separation = 0.0;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    CVector phi(std::size_t l) const { return right.column(l); }
    CVector psi(std::size_t l) const { return biorthogonal.column(l); }
};

/// Biorthogonal family psi from the eigenvector matrix (conjugated rows of
/// its inverse), and beta_l = <b, psi_l>. Shared by decompose and the N = 2
/// renormalization.
void complete_biorthogonal(SpectralDecomposition& spec, std::span<const Complex> b);

double max_biorthogonality_defect(const SpectralDecomposition& spec);

SpectralDecomposition decompose(const CouplingSystem& sys, const Tolerances& tol = {});

struct KalmanResult {
    std::size_t rank = 0;
    bool ok = false;
};

/// rank [A^{N-1} b, ..., A b, b].
KalmanResult kalman_check(const CouplingSystem& sys, const Tolerances& tol = {});

struct Resonance {
    int k = 0;
    int l = 0;
    std::size_t i = 0;  // eigenvalue indices, 0-based
    std::size_t j = 0;
    double defect = 0.0;

    friend bool operator==(const Resonance&, const Resonance&) = default;
};

/// All (k, l, i, j) with k != l, i != j and k^2 - l^2 = lambda_i - lambda_j
/// within res_tol.
std::vector<Resonance> resonance_check(std::span<const Complex> lambda, double res_tol = 1e-9);

struct ConditionsReport {
    std::size_t n = 0;
    std::size_t kalman_rank = 0;
    bool kalman_ok = false;
    std::vector<double> beta_magnitudes;
    std::vector<std::size_t> vanishing_beta;  // indices with |beta_l| <= beta_tol
    std::vector<Resonance> resonances;
    double t_min = 0.0;
    double t = 0.0;
    bool t_ok = false;
    bool overall_controllable = false;
};

double minimal_time(std::size_t n);

ConditionsReport analyze(const CouplingSystem& sys, double t, const Tolerances& tol = {});

}  // namespace wavecontrol
