#ifndef OPA_TESTS_SUPPORT_HPP
#define OPA_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "opa/fockspace.hpp"
#include "opa/meanfield.hpp"
#include "opa/propagator_path.hpp"

namespace opa::testing {

/// Hand-rolled generators for property checks. Every property runs from a
/// fixed seed so failures are reproducible.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    /// Uniform in the disc of radius r.
    Complex disc(double r) {
        const double rad = r * std::sqrt(uniform(0.0, 1.0));
        return std::polar(rad, uniform(-std::numbers::pi, std::numbers::pi));
    }

    ModeTriple triple(double r) { return {disc(r), disc(r), disc(r)}; }

    ModeParams params(double kappa_max = 1.0) {
        ModeParams p;
        p.omega[1] = uniform(0.2, 3.0);
        p.omega[2] = uniform(0.2, 3.0);
        p.omega[0] = p.omega[1] + p.omega[2];
        p.kappa = uniform(0.0, kappa_max);
        p.phi = uniform(-std::numbers::pi, std::numbers::pi);
        return p;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

/// Dense Kronecker product, independent of the library's embedding code.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Dense truncated annihilation operator built from its definition.
inline Eigen::MatrixXcd dense_annihilation(int d) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// Single-mode free propagator <b| exp(-i w t n) |a> in closed form.
inline Complex free_overlap(Complex bra, Complex ket, double omega, double t) {
    return std::exp(-0.5 * std::norm(bra) - 0.5 * std::norm(ket) + std::conj(bra) * ket * std::polar(1.0, -omega * t));
}

inline ModeParams resonant(double w1, double w2, double kappa, double phi = 0.0, Complex pump = 0.0) {
    ModeParams p;
    p.omega = {w1 + w2, w1, w2};
    p.kappa = kappa;
    p.phi = phi;
    p.pump_alpha0 = pump;
    return p;
}

struct BumpResponse {
    double first_order;   ///< |dS/d eps| at eps = 0, per unit bump norm
    double second_ratio;  ///< even part at eps = 1e-3 over eps = 1e-4 (100 for a quadratic)
};

/// Action response to eps * sin^2(pi k / n) * dir on the interior labels.
inline BumpResponse bump_response(const SlicedPath& path, const ModeParams& params, const ModeTriple& dir) {
    const double s0 = classical_action(path, params).value.real();
    const std::size_t n = path.slices();
    double norm2 = 0.0;
    auto shifted = [&](double eps) {
        SlicedPath b = path;
        norm2 = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double w = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
            for (std::size_t j = 0; j < 3; ++j) {
                b.labels[k][j] += eps * w * w * dir[j];
                norm2 += std::norm(w * w * dir[j]);
            }
        }
        return classical_action(b, params).value.real() - s0;
    };
    const double p3 = shifted(1e-3), m3 = shifted(-1e-3);
    const double p4 = shifted(1e-4), m4 = shifted(-1e-4);
    return {std::abs(p4 - m4) / 2e-4 / std::sqrt(norm2), (p3 + m3) / (p4 + m4)};
}

} // namespace opa::testing

#endif // OPA_TESTS_SUPPORT_HPP
