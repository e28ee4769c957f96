#include "opa/quantum_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "opa/errors.hpp"

namespace opa {

namespace {

constexpr double kHermiticityTol = 1e-10;
constexpr double kLeakageWarn = 1e-6;

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

SpectralPropagator::SpectralPropagator(const OperatorMatrix& hamiltonian) : dim_(hamiltonian.dim()) {
    const double herm = hamiltonian.hermiticity_error();
    if (herm > kHermiticityTol) {
        std::ostringstream msg;
        msg << "Hamiltonian is not Hermitian (max |H - H^dagger| = " << herm << ")";
        throw InvalidArgument(msg.str());
    }

    const auto& h = hamiltonian.sparse();
    const auto n = static_cast<std::size_t>(dim_);
    DisjointSets sets(n);
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
        for (OperatorMatrix::Storage::InnerIterator it(h, k); it; ++it) {
            if (it.value() != Complex{0.0, 0.0}) {
                sets.unite(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()));
            }
        }
    }

    // group indices by root, preserving index order inside every block
    std::vector<std::size_t> block_of(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        if (block_of[root] == n) {
            block_of[root] = blocks_.size();
            blocks_.emplace_back();
        }
        blocks_[block_of[root]].indices.push_back(static_cast<Eigen::Index>(i));
    }

    std::vector<Eigen::Index> local(n, -1);
    for (auto& block : blocks_) {
        const auto size = static_cast<Eigen::Index>(block.indices.size());
        for (Eigen::Index k = 0; k < size; ++k) local[static_cast<std::size_t>(block.indices[k])] = k;

        Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(size, size);
        for (Eigen::Index k = 0; k < size; ++k) {
            for (OperatorMatrix::Storage::InnerIterator it(h, block.indices[static_cast<std::size_t>(k)]); it; ++it) {
                dense(local[static_cast<std::size_t>(it.row())], k) = it.value();
            }
        }
        if (size == 1) {
            block.eigenvalues = Eigen::VectorXd::Constant(1, dense(0, 0).real());
            block.eigenvectors = Eigen::MatrixXcd::Identity(1, 1);
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
            if (solver.info() != Eigen::Success) {
                throw DivergenceError("eigendecomposition of Hamiltonian block failed", 0.0);
            }
            block.eigenvalues = solver.eigenvalues();
            block.eigenvectors = solver.eigenvectors();
        }
    }
}

Vector SpectralPropagator::apply(const Vector& psi, double t) const {
    if (psi.size() != dim_) throw InvalidArgument("state/Hamiltonian dimension mismatch");
    Vector out = Vector::Zero(dim_);
    for (const auto& block : blocks_) {
        const auto size = static_cast<Eigen::Index>(block.indices.size());
        Vector local(size);
        bool any = false;
        for (Eigen::Index k = 0; k < size; ++k) {
            local[k] = psi[block.indices[static_cast<std::size_t>(k)]];
            any = any || local[k] != Complex{0.0, 0.0};
        }
        if (!any) continue;
        Vector coeffs = block.eigenvectors.adjoint() * local;
        for (Eigen::Index k = 0; k < size; ++k) coeffs[k] *= std::polar(1.0, -block.eigenvalues[k] * t);
        local = block.eigenvectors * coeffs;
        for (Eigen::Index k = 0; k < size; ++k) out[block.indices[static_cast<std::size_t>(k)]] = local[k];
    }
    return out;
}

double expectation_number(const StateVector& psi, int mode, const TruncationDims& dims) {
    if (mode < 0 || mode > 2) throw InvalidArgument("mode index must be 0, 1 or 2");
    if (static_cast<std::size_t>(psi.dim()) != dims.total()) throw InvalidArgument("state/dims mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < dims.total(); ++i) {
        const int n = dims.occupation(i)[static_cast<std::size_t>(mode)];
        if (n != 0) sum += n * std::norm(psi[static_cast<Eigen::Index>(i)]);
    }
    return std::max(sum, 0.0);
}

double expectation_energy(const OperatorMatrix& hamiltonian, const StateVector& psi) {
    return psi.amplitudes().dot(hamiltonian.apply(psi.amplitudes())).real();
}

std::array<double, 3> top_level_population(const StateVector& psi, const TruncationDims& dims) {
    if (static_cast<std::size_t>(psi.dim()) != dims.total()) throw InvalidArgument("state/dims mismatch");
    std::array<double, 3> pop{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < dims.total(); ++i) {
        const auto occ = dims.occupation(i);
        const double p = std::norm(psi[static_cast<Eigen::Index>(i)]);
        for (int j = 0; j < 3; ++j) {
            if (occ[static_cast<std::size_t>(j)] == dims[j] - 1) pop[static_cast<std::size_t>(j)] += p;
        }
    }
    return pop;
}

EvolutionResult evolve_state(const OperatorMatrix& hamiltonian, const TruncationDims& dims,
                             const StateVector& psi0, std::span<const double> times, bool keep_states) {
    if (static_cast<std::size_t>(hamiltonian.dim()) != dims.total() ||
        static_cast<std::size_t>(psi0.dim()) != dims.total()) {
        throw InvalidArgument("Hamiltonian, state and truncation dimensions disagree");
    }
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("evolution times must be finite and >= 0");
    }

    const SpectralPropagator propagator(hamiltonian);
    EvolutionResult result;
    result.times.assign(times.begin(), times.end());
    result.warnings = psi0.warnings();
    std::array<bool, 3> leaked{false, false, false};

    for (double t : times) {
        Vector amplitudes = propagator.apply(psi0.amplitudes(), t);
        const double deviation = amplitudes.norm() - 1.0;
        result.norm_deviations.push_back(deviation);
        result.max_norm_deviation = std::max(result.max_norm_deviation, std::abs(deviation));
        StateVector state(std::move(amplitudes));

        result.expectations.push_back({expectation_number(state, 0, dims), expectation_number(state, 1, dims),
                                       expectation_number(state, 2, dims)});
        result.energies.push_back(expectation_energy(hamiltonian, state));

        const auto top = top_level_population(state, dims);
        for (int j = 0; j < 3; ++j) {
            if (!leaked[static_cast<std::size_t>(j)] && top[static_cast<std::size_t>(j)] > kLeakageWarn) {
                leaked[static_cast<std::size_t>(j)] = true;
                std::ostringstream msg;
                msg << "mode " << j << ": top Fock level population " << top[static_cast<std::size_t>(j)]
                    << " at t=" << t << " (truncation boundary reached)";
                result.warnings.push_back(msg.str());
            }
        }
        if (keep_states || result.states.empty()) {
            result.states.push_back(std::move(state));
        } else {
            result.states.back() = std::move(state);
        }
    }
    return result;
}

EvolutionResult evolve_state(const OperatorMatrix& hamiltonian, const TruncationDims& dims,
                             const StateVector& psi0, double t_final, int n_samples, bool keep_states) {
    if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
    if (!(t_final >= 0.0)) throw InvalidArgument("t_final must be >= 0");
    std::vector<double> times;
    if (n_samples == 1) {
        times.push_back(t_final);
    } else {
        for (int k = 0; k < n_samples; ++k) times.push_back(t_final * k / (n_samples - 1));
    }
    return evolve_state(hamiltonian, dims, psi0, times, keep_states);
}

Complex propagator_exact(const ModeParams& params, const TruncationDims& dims, const ModeTriple& alpha_a,
                         const ModeTriple& alpha_b, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("propagation time must be >= 0");
    const OperatorMatrix h = build_hamiltonian(params, dims);
    const StateVector a = product_coherent_state(alpha_a, dims);
    const StateVector b = product_coherent_state(alpha_b, dims);
    const SpectralPropagator propagator(h);
    return b.amplitudes().dot(propagator.apply(a.amplitudes(), t));
}

EvolutionResult fluorescence_from_vacuum(const ModeParams& params, const TruncationDims& dims, double t_final,
                                         int n_samples) {
    const OperatorMatrix h = build_hamiltonian(params, dims);
    const StateVector psi0 = product_coherent_state({params.pump_alpha0, 0.0, 0.0}, dims);
    return evolve_state(h, dims, psi0, t_final, n_samples);
}

ChainRuleCheck chain_rule_check(double omega, Complex alpha_a, Complex alpha_b, double t, int d, int grid,
                                double radius) {
    if (grid < 2) throw InvalidArgument("grid must have at least 2 points per axis");
    const OperatorMatrix h = Complex{omega, 0.0} * build_number(d);
    const SpectralPropagator propagator(h);
    const StateVector a = coherent_state(alpha_a, d);
    const StateVector b = coherent_state(alpha_b, d);

    ChainRuleCheck out;
    out.direct = b.amplitudes().dot(propagator.apply(a.amplitudes(), t));

    // U(t/2)|a> and U(t/2)^dagger |b>
    const Vector forward = propagator.apply(a.amplitudes(), 0.5 * t);
    const Vector backward = propagator.apply(b.amplitudes(), -0.5 * t);

    const double step = 2.0 * radius / (grid - 1);
    const double weight = step * step / std::numbers::pi;
    Complex sum{0.0, 0.0};
    for (int i = 0; i < grid; ++i) {
        for (int k = 0; k < grid; ++k) {
            const Complex label{-radius + i * step, -radius + k * step};
            // projection of the untruncated coherent state onto the kept levels
            const Vector c = coherent_coefficients(label, d);
            sum += weight * backward.dot(c) * c.dot(forward);
        }
    }
    out.composed = sum;
    return out;
}

} // namespace opa
