#ifndef OPA_FOCKSPACE_HPP
#define OPA_FOCKSPACE_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace opa {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

/// Amplitudes (pump, signal, idler), in that order.
using ModeTriple = std::array<Complex, 3>;

inline constexpr std::size_t kDefaultDimensionCap = 262144;

/// Per-mode Fock truncation. Level n of mode j runs over 0..dims[j]-1.
///
/// The product basis is ordered with mode 0 slowest:
///     index = ((n0 * d1) + n1) * d2 + n2
/// Every module shares this ordering.
class TruncationDims {
public:
    /// Throws InvalidArgument if any dimension is below 2 and ResourceError
    /// if d0*d1*d2 exceeds @p cap.
    TruncationDims(int d0, int d1, int d2, std::size_t cap = kDefaultDimensionCap);

    int operator[](int mode) const { return dims_.at(static_cast<std::size_t>(mode)); }
    std::size_t total() const noexcept { return total_; }

    std::size_t index(int n0, int n1, int n2) const noexcept {
        return (static_cast<std::size_t>(n0) * static_cast<std::size_t>(dims_[1]) +
                static_cast<std::size_t>(n1)) *
                   static_cast<std::size_t>(dims_[2]) +
               static_cast<std::size_t>(n2);
    }
    std::array<int, 3> occupation(std::size_t index) const noexcept;

    bool operator==(const TruncationDims&) const = default;

private:
    std::array<int, 3> dims_;
    std::size_t total_;
};

/// Physical configuration of the three-mode parametric system (hbar = 1).
struct ModeParams {
    std::array<double, 3> omega{2.0, 1.0, 1.0};
    double kappa = 0.0;         ///< coupling magnitude, >= 0
    double phi = 0.0;           ///< phase-mismatch phase (dk . r)
    Complex pump_alpha0{0.0, 0.0};
    bool include_zero_point = false;

    /// Effective coupling kappa * exp(-i phi).
    Complex kappa_prime() const { return kappa * std::polar(1.0, -phi); }

    /// Throws InvalidArgument unless omega0 == omega1 + omega2 (to 1e-12),
    /// kappa >= 0 and all fields are finite.
    void validate() const;
};

/// Operator on a truncated Fock space. Stored sparse; entries are finite.
class OperatorMatrix {
public:
    using Storage = Eigen::SparseMatrix<Complex>;

    OperatorMatrix() = default;
    explicit OperatorMatrix(Storage entries);

    static OperatorMatrix identity(Eigen::Index dim);
    static OperatorMatrix from_dense(const Eigen::MatrixXcd& dense);

    Eigen::Index dim() const noexcept { return entries_.rows(); }
    const Storage& sparse() const noexcept { return entries_; }
    Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(entries_); }
    Complex coeff(Eigen::Index row, Eigen::Index col) const { return entries_.coeff(row, col); }

    OperatorMatrix adjoint() const;
    double max_abs() const noexcept;
    /// max |H - H^dagger| over all entries.
    double hermiticity_error() const;

    Vector apply(const Vector& v) const;

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a);

private:
    Storage entries_;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Unit-norm state in a truncated Fock basis, with any truncation warnings
/// raised while it was built.
class StateVector {
public:
    StateVector() = default;
    /// Throws InvalidArgument if the norm is off by more than 1e-9.
    explicit StateVector(Vector amplitudes, std::vector<std::string> warnings = {});

    /// Rescales @p amplitudes to unit norm. Throws on a zero vector.
    static StateVector normalized(Vector amplitudes, std::vector<std::string> warnings = {});

    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    const Vector& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// <this|other>
    Complex overlap(const StateVector& other) const;

private:
    Vector amplitudes_;
    std::vector<std::string> warnings_;
};

/// Truncated annihilation operator: A[n-1, n] = sqrt(n).
OperatorMatrix build_annihilation(int d);
OperatorMatrix build_creation(int d);
OperatorMatrix build_number(int d);

/// Embeds a single-mode operator into the three-mode space (op placed in slot
/// @p mode, identity elsewhere).
OperatorMatrix embed_mode(const OperatorMatrix& op, int mode, const TruncationDims& dims);

/// H = sum_j omega_j n_j [+ (omega0+omega1+omega2)/2]
///     + kappa' a0 a1^dag a2^dag + conj(kappa') a0^dag a1 a2
OperatorMatrix build_hamiltonian(const ModeParams& params, const TruncationDims& dims);

/// Pre-normalisation coefficients e^{-|a|^2/2} a^n / sqrt(n!), n < d.
Vector coherent_coefficients(Complex alpha, int d);

/// Single-mode coherent state, renormalised after truncation. A warning is
/// attached when |alpha|^2 > d/4 or the truncated norm deficit exceeds 1e-6.
StateVector coherent_state(Complex alpha, int d);

StateVector product_coherent_state(const ModeTriple& alpha, const TruncationDims& dims);

StateVector basis_state(const std::array<int, 3>& occupation, const TruncationDims& dims);

} // namespace opa

#endif // OPA_FOCKSPACE_HPP
