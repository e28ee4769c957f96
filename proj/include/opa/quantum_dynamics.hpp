#ifndef OPA_QUANTUM_DYNAMICS_HPP
#define OPA_QUANTUM_DYNAMICS_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "opa/fockspace.hpp"

namespace opa {

/// Exact unitary exp(-iHt) built from the eigendecomposition of H.
///
/// H is first split into the connected components of its sparsity graph
/// (for the parametric Hamiltonian these are the sectors of fixed n0+n1 and
/// n0+n2), and each block is diagonalised densely. The result is the same as
/// a full dense eigendecomposition but scales to the desk-size spaces used
/// here.
class SpectralPropagator {
public:
    /// Throws InvalidArgument if max|H - H^dagger| > 1e-10.
    explicit SpectralPropagator(const OperatorMatrix& hamiltonian);

    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t block_count() const noexcept { return blocks_.size(); }

    /// exp(-iHt) psi
    Vector apply(const Vector& psi, double t) const;

private:
    struct Block {
        std::vector<Eigen::Index> indices;
        Eigen::VectorXd eigenvalues;
        Eigen::MatrixXcd eigenvectors;
    };

    Eigen::Index dim_ = 0;
    std::vector<Block> blocks_;
};

struct EvolutionResult {
    std::vector<double> times;
    /// One state per time, or only the final state when states were not kept.
    std::vector<StateVector> states;
    /// (<n0>, <n1>, <n2>) per time.
    std::vector<std::array<double, 3>> expectations;
    /// <H> per time.
    std::vector<double> energies;
    /// ||psi(t)|| - 1 per time.
    std::vector<double> norm_deviations;
    double max_norm_deviation = 0.0;
    std::vector<std::string> warnings;
};

/// Evolves @p psi0 under @p hamiltonian to each of @p times (all >= 0).
EvolutionResult evolve_state(const OperatorMatrix& hamiltonian, const TruncationDims& dims,
                             const StateVector& psi0, std::span<const double> times,
                             bool keep_states = true);

/// Uniform sampling: n_samples points from 0 to t_final inclusive
/// (a single sample is taken at t_final).
EvolutionResult evolve_state(const OperatorMatrix& hamiltonian, const TruncationDims& dims,
                             const StateVector& psi0, double t_final, int n_samples,
                             bool keep_states = true);

/// <psi| n_mode |psi>, clamped at zero.
double expectation_number(const StateVector& psi, int mode, const TruncationDims& dims);

/// <psi| H |psi> (real part).
double expectation_energy(const OperatorMatrix& hamiltonian, const StateVector& psi);

/// Largest population found in the top Fock level of any mode.
std::array<double, 3> top_level_population(const StateVector& psi, const TruncationDims& dims);

/// <alpha_b| exp(-iHt) |alpha_a> on the truncated space.
Complex propagator_exact(const ModeParams& params, const TruncationDims& dims,
                         const ModeTriple& alpha_a, const ModeTriple& alpha_b, double t);

/// Evolution of |alpha0, 0, 0> with alpha0 = params.pump_alpha0.
EvolutionResult fluorescence_from_vacuum(const ModeParams& params, const TruncationDims& dims,
                                         double t_final, int n_samples);

struct ChainRuleCheck {
    Complex direct;    ///< <b| U(t) |a>
    Complex composed;  ///< sum over grid labels of <b|U(t/2)|c><c|U(t/2)|a> d^2c / pi
};

/// Single-mode composition check for H = omega n: the intermediate
/// resolution of identity is a square grid (grid x grid points spanning
/// [-radius, radius]^2 in Re/Im) of truncated coherent projectors.
ChainRuleCheck chain_rule_check(double omega, Complex alpha_a, Complex alpha_b, double t, int d,
                                int grid = 41, double radius = 4.0);

} // namespace opa

#endif // OPA_QUANTUM_DYNAMICS_HPP
