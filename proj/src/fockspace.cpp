#include "opa/fockspace.hpp"

#include <cmath>
#include <sstream>

#include "opa/errors.hpp"

namespace opa {

namespace {

using Triplet = Eigen::Triplet<Complex>;

constexpr double kFrequencyMatchTol = 1e-12;
constexpr double kNormTol = 1e-9;
constexpr double kCoherentDeficitWarn = 1e-6;

bool all_finite(const OperatorMatrix::Storage& m) {
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (OperatorMatrix::Storage::InnerIterator it(m, k); it; ++it) {
            if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag())) {
                return false;
            }
        }
    }
    return true;
}

OperatorMatrix from_triplets(Eigen::Index dim, const std::vector<Triplet>& triplets) {
    OperatorMatrix::Storage m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return OperatorMatrix(std::move(m));
}

} // namespace

TruncationDims::TruncationDims(int d0, int d1, int d2, std::size_t cap) : dims_{d0, d1, d2} {
    for (int d : dims_) {
        if (d < 2) {
            throw InvalidArgument("truncation dimension must be >= 2, got " + std::to_string(d));
        }
    }
    // guard the product against overflow before comparing with the cap
    const double product = static_cast<double>(d0) * static_cast<double>(d1) * static_cast<double>(d2);
    if (product > static_cast<double>(cap)) {
        std::ostringstream msg;
        msg << "total Fock dimension " << d0 << "x" << d1 << "x" << d2 << " exceeds cap " << cap;
        throw ResourceError(msg.str());
    }
    total_ = static_cast<std::size_t>(d0) * static_cast<std::size_t>(d1) * static_cast<std::size_t>(d2);
}

std::array<int, 3> TruncationDims::occupation(std::size_t index) const noexcept {
    const auto d1 = static_cast<std::size_t>(dims_[1]);
    const auto d2 = static_cast<std::size_t>(dims_[2]);
    const auto n2 = static_cast<int>(index % d2);
    index /= d2;
    const auto n1 = static_cast<int>(index % d1);
    const auto n0 = static_cast<int>(index / d1);
    return {n0, n1, n2};
}

void ModeParams::validate() const {
    for (double w : omega) {
        if (!std::isfinite(w)) throw InvalidArgument("mode frequency is not finite");
    }
    if (!std::isfinite(kappa) || !std::isfinite(phi) || !std::isfinite(pump_alpha0.real()) ||
        !std::isfinite(pump_alpha0.imag())) {
        throw InvalidArgument("mode parameters must be finite");
    }
    if (kappa < 0.0) throw InvalidArgument("kappa must be >= 0");
    const double mismatch = omega[0] - (omega[1] + omega[2]);
    if (std::abs(mismatch) > kFrequencyMatchTol * std::max(1.0, std::abs(omega[0]))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "frequency matching violated: omega1 + omega2 = " << omega[1] + omega[2]
            << " but omega0 = " << omega[0];
        throw InvalidArgument(msg.str());
    }
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(Storage entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw InvalidArgument("operator matrix must be square");
    if (!all_finite(entries_)) throw InvalidArgument("operator matrix has non-finite entries");
    entries_.makeCompressed();
}

OperatorMatrix OperatorMatrix::identity(Eigen::Index dim) {
    Storage m(dim, dim);
    m.setIdentity();
    return OperatorMatrix(std::move(m));
}

OperatorMatrix OperatorMatrix::from_dense(const Eigen::MatrixXcd& dense) {
    return OperatorMatrix(Storage(dense.sparseView()));
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(Storage(entries_.adjoint()));
}

double OperatorMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (Eigen::Index k = 0; k < entries_.outerSize(); ++k) {
        for (Storage::InnerIterator it(entries_, k); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
}

double OperatorMatrix::hermiticity_error() const {
    const Storage diff = entries_ - Storage(entries_.adjoint());
    double m = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
        for (Storage::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
}

Vector OperatorMatrix::apply(const Vector& v) const {
    if (v.size() != dim()) throw InvalidArgument("operator/vector dimension mismatch");
    return entries_ * v;
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("operator dimension mismatch");
    return OperatorMatrix(OperatorMatrix::Storage(a.entries_ + b.entries_));
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("operator dimension mismatch");
    return OperatorMatrix(OperatorMatrix::Storage(a.entries_ - b.entries_));
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("operator dimension mismatch");
    return OperatorMatrix(OperatorMatrix::Storage(a.entries_ * b.entries_));
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
    return OperatorMatrix(OperatorMatrix::Storage(s * a.entries_));
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    return a * b - b * a;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(Vector amplitudes, std::vector<std::string> warnings)
    : amplitudes_(std::move(amplitudes)), warnings_(std::move(warnings)) {
    if (!amplitudes_.allFinite()) throw InvalidArgument("state has non-finite amplitudes");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol) {
        throw InvalidArgument("state vector is not normalised (norm " + std::to_string(norm) + ")");
    }
}

StateVector StateVector::normalized(Vector amplitudes, std::vector<std::string> warnings) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("cannot normalise a zero or non-finite vector");
    amplitudes /= norm;
    return StateVector(std::move(amplitudes), std::move(warnings));
}

Complex StateVector::overlap(const StateVector& other) const {
    if (dim() != other.dim()) throw InvalidArgument("state dimension mismatch");
    return amplitudes_.dot(other.amplitudes_);
}

// ---------------------------------------------------------------------------
// construction

OperatorMatrix build_annihilation(int d) {
    if (d < 2) throw InvalidArgument("annihilation operator needs d >= 2, got " + std::to_string(d));
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d));
    for (int n = 1; n < d; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    return from_triplets(d, t);
}

OperatorMatrix build_creation(int d) { return build_annihilation(d).adjoint(); }

OperatorMatrix build_number(int d) {
    if (d < 2) throw InvalidArgument("number operator needs d >= 2, got " + std::to_string(d));
    std::vector<Triplet> t;
    for (int n = 1; n < d; ++n) t.emplace_back(n, n, static_cast<double>(n));
    return from_triplets(d, t);
}

OperatorMatrix embed_mode(const OperatorMatrix& op, int mode, const TruncationDims& dims) {
    if (mode < 0 || mode > 2) throw InvalidArgument("mode index must be 0, 1 or 2");
    if (op.dim() != dims[mode]) {
        throw InvalidArgument("operator dimension " + std::to_string(op.dim()) +
                              " does not match mode " + std::to_string(mode) + " dimension " +
                              std::to_string(dims[mode]));
    }
    const auto& local = op.sparse();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(local.nonZeros()) * dims.total() / static_cast<std::size_t>(dims[mode]));

    // the two spectator modes, in basis order
    const int a = (mode == 0) ? 1 : 0;
    const int b = (mode == 2) ? 1 : 2;
    for (Eigen::Index col = 0; col < local.outerSize(); ++col) {
        for (OperatorMatrix::Storage::InnerIterator it(local, col); it; ++it) {
            for (int na = 0; na < dims[a]; ++na) {
                for (int nb = 0; nb < dims[b]; ++nb) {
                    std::array<int, 3> from{}, to{};
                    from[a] = to[a] = na;
                    from[b] = to[b] = nb;
                    from[mode] = static_cast<int>(it.col());
                    to[mode] = static_cast<int>(it.row());
                    t.emplace_back(static_cast<Eigen::Index>(dims.index(to[0], to[1], to[2])),
                                   static_cast<Eigen::Index>(dims.index(from[0], from[1], from[2])),
                                   it.value());
                }
            }
        }
    }
    return from_triplets(static_cast<Eigen::Index>(dims.total()), t);
}

OperatorMatrix build_hamiltonian(const ModeParams& params, const TruncationDims& dims) {
    params.validate();
    const Complex kp = params.kappa_prime();
    const double zero_point =
        params.include_zero_point ? 0.5 * (params.omega[0] + params.omega[1] + params.omega[2]) : 0.0;

    std::vector<Triplet> t;
    t.reserve(3 * dims.total());
    for (std::size_t i = 0; i < dims.total(); ++i) {
        const auto [n0, n1, n2] = dims.occupation(i);
        const double diag = params.omega[0] * n0 + params.omega[1] * n1 + params.omega[2] * n2 + zero_point;
        if (diag != 0.0) t.emplace_back(i, i, diag);

        // kappa' a0 a1^dag a2^dag |n0,n1,n2> and its hermitian partner
        if (params.kappa != 0.0 && n0 >= 1 && n1 + 1 < dims[1] && n2 + 1 < dims[2]) {
            const double amp = std::sqrt(static_cast<double>(n0) * (n1 + 1) * (n2 + 1));
            const auto j = static_cast<Eigen::Index>(dims.index(n0 - 1, n1 + 1, n2 + 1));
            t.emplace_back(j, static_cast<Eigen::Index>(i), kp * amp);
            t.emplace_back(static_cast<Eigen::Index>(i), j, std::conj(kp) * amp);
        }
    }
    return from_triplets(static_cast<Eigen::Index>(dims.total()), t);
}

Vector coherent_coefficients(Complex alpha, int d) {
    if (d < 1) throw InvalidArgument("coherent state needs d >= 1");
    Vector c(d);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < d; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

StateVector coherent_state(Complex alpha, int d) {
    if (d < 2) throw InvalidArgument("coherent state needs d >= 2, got " + std::to_string(d));
    Vector c = coherent_coefficients(alpha, d);
    const double deficit = 1.0 - c.squaredNorm();
    std::vector<std::string> warnings;
    if (std::norm(alpha) > d / 4.0 || deficit > kCoherentDeficitWarn) {
        std::ostringstream msg;
        msg << "coherent state |alpha|^2=" << std::norm(alpha) << " truncated at d=" << d
            << " (norm deficit " << deficit << ")";
        warnings.push_back(msg.str());
    }
    return StateVector::normalized(std::move(c), std::move(warnings));
}

StateVector product_coherent_state(const ModeTriple& alpha, const TruncationDims& dims) {
    std::vector<std::string> warnings;
    std::array<Vector, 3> factors;
    for (int j = 0; j < 3; ++j) {
        StateVector s = coherent_state(alpha[static_cast<std::size_t>(j)], dims[j]);
        for (const auto& w : s.warnings()) warnings.push_back("mode " + std::to_string(j) + ": " + w);
        factors[static_cast<std::size_t>(j)] = s.amplitudes();
    }
    Vector psi(static_cast<Eigen::Index>(dims.total()));
    for (std::size_t i = 0; i < dims.total(); ++i) {
        const auto [n0, n1, n2] = dims.occupation(i);
        psi[static_cast<Eigen::Index>(i)] = factors[0][n0] * factors[1][n1] * factors[2][n2];
    }
    return StateVector::normalized(std::move(psi), std::move(warnings));
}

StateVector basis_state(const std::array<int, 3>& occupation, const TruncationDims& dims) {
    for (int j = 0; j < 3; ++j) {
        const int n = occupation[static_cast<std::size_t>(j)];
        if (n < 0 || n >= dims[j]) throw InvalidArgument("occupation outside truncation");
    }
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(dims.total()));
    psi[static_cast<Eigen::Index>(dims.index(occupation[0], occupation[1], occupation[2]))] = 1.0;
    return StateVector(std::move(psi));
}

} // namespace opa
