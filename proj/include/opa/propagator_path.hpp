#ifndef OPA_PROPAGATOR_PATH_HPP
#define OPA_PROPAGATOR_PATH_HPP

#include <optional>
#include <string>
#include <vector>

#include "opa/fockspace.hpp"
#include "opa/meanfield.hpp"

namespace opa {

/// Time-sliced coherent-state path: labels[j] is the label at
/// t_a + j * (t_b - t_a) / n, with labels[0] and labels[n] the fixed endpoints.
struct SlicedPath {
    double t_a = 0.0;
    double t_b = 0.0;
    std::vector<ModeTriple> labels;

    std::size_t slices() const noexcept { return labels.empty() ? 0 : labels.size() - 1; }
    double eta() const { return (t_b - t_a) / static_cast<double>(slices()); }

    /// Throws InvalidArgument unless there is at least one slice, t_b >= t_a
    /// and every label is finite.
    void validate() const;
};

/// Continuum action along a path (hbar = 1). Real for any path; kept complex
/// so that kernels and actions share one representation.
struct ActionValue {
    Complex value;
};

/// Samples of a mean-field trajectory as path labels over [t0, t0 + (n-1) dt].
SlicedPath path_from_trajectory(const Trajectory& trajectory);

/// Three-mode coherent overlap <bra|ket> = prod_j exp(-|b_j|^2/2 - |k_j|^2/2 + conj(b_j) k_j).
Complex coherent_overlap(const ModeTriple& bra, const ModeTriple& ket);

/// <bra|H|ket> / <bra|ket> for normal-ordered H: every creation operator
/// contributes conj(bra) and every annihilation operator contributes ket.
Complex hamiltonian_symbol(const ModeTriple& bra, const ModeTriple& ket, const ModeParams& params);

/// Short-time kernel <next|prev> (1 - i eta h(next*, prev)).
Complex slice_kernel(const ModeTriple& prev, const ModeTriple& next, double eta, const ModeParams& params);

/// Set when eta * max(omega) exceeds 0.1, where the linearised kernel loses accuracy.
std::optional<std::string> slice_step_warning(double eta, const ModeParams& params);

/// Ordered product of slice kernels along the path. Throws DivergenceError
/// when the accumulated |log K| exceeds 700 or a kernel vanishes.
Complex product_propagator(const SlicedPath& path, const ModeParams& params);

/// L = sum_j (i/2)(conj(a_j) da_j - conj(da_j) a_j) - sum_j w_j |a_j|^2
///     - k' a0 conj(a1) conj(a2) - conj(k') conj(a0) a1 a2  [- zero point]
Complex lagrangian(const ModeTriple& alpha, const ModeTriple& velocity, const ModeParams& params);

/// Same free part with the interaction written as
///     U = eta a0 conj(a1) conj(a2) + conj(eta) conj(a0) a1 a2.
Complex lagrangian_with_potential(const ModeTriple& alpha, const ModeTriple& velocity,
                                  const ModeParams& params, Complex eta);

/// Finite-difference velocities: centred inside, one-sided at both ends.
std::vector<ModeTriple> path_velocities(const SlicedPath& path);

/// Trapezoid-rule integral of the Lagrangian along the path (needs n >= 2).
ActionValue classical_action(const SlicedPath& path, const ModeParams& params);

/// Central finite-difference gradient of classical_action with respect to
/// the real and imaginary parts of every interior label, as one flat vector
/// (interior label m contributes six entries). Only the three action terms
/// that depend on a label are re-evaluated.
std::vector<double> action_gradient(const SlicedPath& path, const ModeParams& params, double step = 1e-6);

/// Euclidean norm of all labels of the path.
double path_norm(const SlicedPath& path);

/// max over samples of |L(sample) - L_U(sample; eta)|; zero when eta = -k'.
double action_equivalence_check(const SlicedPath& path, const ModeParams& params, Complex eta);

struct StationaryPropagator {
    Complex value;          ///< slice product along the classical skeleton
    ModeTriple endpoint;    ///< where the classical path actually ends
    std::vector<std::string> warnings;
};

/// Slice product on the stationary skeleton: labels 0..n-1 follow the RK4
/// classical path launched from @p alpha_a with step t/n, and the last label
/// is the bra @p alpha_b. The Gaussian fluctuation prefactor is not included.
StationaryPropagator stationary_propagator(const ModeTriple& alpha_a, const ModeTriple& alpha_b, double t,
                                           const ModeParams& params, int n_slices);

} // namespace opa

#endif // OPA_PROPAGATOR_PATH_HPP
