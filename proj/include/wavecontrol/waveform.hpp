#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavecontrol/coupling.hpp"
#include "wavecontrol/moments.hpp"
#include "wavecontrol/spectrum.hpp"

namespace wavecontrol {

/// |w| at or below which sin(w s)/w is replaced by its limit s.
inline constexpr double kZeroFrequencyKernel = 1e-6;

/// Modal state at time t produced by the control f on [0, t], per mode
///   a(t)    = (2k/pi) beta_l int_0^t f(tau) sin(w (t - tau)) / w dtau
///   adot(t) = (2k/pi) beta_l int_0^t f(tau) cos(w (t - tau)) dtau
/// integrated in closed form term by term.
ModalState duhamel_exact(const SpectralDecomposition& spec, const FrequencyGrid& grid, const ControlSignal& f, double t);

/// Same quantities from uniformly sampled f, integrating the piecewise-linear
/// interpolant exactly against the oscillatory kernel (second order in dt).
/// Throws GridTooCoarse when dt > pi / (4 max |w|).
ModalState evolve_quadrature(const SpectralDecomposition& spec, const FrequencyGrid& grid, const Samples& f, double t);

struct FieldValues {
    std::vector<double> x;
    std::vector<CVector> u;   // N-vector per x
    std::vector<CVector> ut;
};

/// Truncated sine series u = sum a_{n,j} sin(n x) phi_j. The boundary trace
/// u(0, t) = b f(t) is not represented: the series vanishes at both ends.
FieldValues reconstruct(const ModalState& modal, const SpectralDecomposition& spec, std::span<const double> x);

enum class Coefficients { position, velocity };

/// (sum_{k>0,l} k^{2s} |coefficient|^2)^{1/2} in eigenbasis coordinates;
/// equivalent to the Sobolev-s norm up to the eigenvector conditioning.
double sobolev_norm(const ModalState& modal, int s, Coefficients which = Coefficients::position);

/// (sum |a|^2 + |adot|^2 / k^2)^{1/2}: the L^2 x H^{-1} energy in eigenbasis coordinates.
double state_norm(const ModalState& modal);

/// Squared component norms computed from the physical sine coefficients
/// U_n = sum_j a_{n,j} phi_j (Parseval on (0, pi)).
struct PhysicalNorms {
    std::vector<double> l2_sq;             // ||u_m||^2_{L^2}
    std::vector<double> h1_sq;             // |u_m|^2_{H^1_0}
    std::vector<double> velocity_hm1_sq;   // ||u_{t,m}||^2_{H^{-1}}
    double l2_total() const;
    double velocity_hm1_total() const;
};

PhysicalNorms physical_norms(const ModalState& modal, const SpectralDecomposition& spec);

/// 1-norm condition of the eigenvector matrix: the equivalence constant
/// between eigenbasis and physical norms.
double eigenbasis_condition(const SpectralDecomposition& spec);

struct EvolutionResult {
    ModalState modal;
    std::vector<double> per_mode_residuals;  // filled when the quadrature oracle ran
    double wellposedness_ratio = 0.0;        // state_norm / ||f||_{L^2}
};

/// Closed-form evolution, optionally cross-checked by the quadrature oracle
/// on `oracle_samples` uniform points and on the grid with half the spacing,
/// combined by one Richardson step (0 disables the oracle).
EvolutionResult evolve(const SpectralDecomposition& spec, const FrequencyGrid& grid, const ControlSignal& f, double t,
                       std::size_t oracle_samples = 0);

struct VerificationReport {
    ModalState achieved;
    double max_relative_error = 0.0;  // max |achieved - target| / (1 + |target|)
    int worst_k = 0;
    std::size_t worst_l = 0;
    bool pass = false;
    double wellposedness_ratio = 0.0;
};

VerificationReport verify(const SpectralDecomposition& spec, const FrequencyGrid& grid, const ControlSignal& f,
                          const ModalState& target, double t, double tol);

}  // namespace wavecontrol
