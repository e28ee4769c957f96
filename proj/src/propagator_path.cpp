#include "opa/propagator_path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opa/errors.hpp"

namespace opa {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kLogOverflow = 700.0;
constexpr double kStepWarn = 0.1;

double zero_point(const ModeParams& params) {
    return params.include_zero_point ? 0.5 * (params.omega[0] + params.omega[1] + params.omega[2]) : 0.0;
}

Complex free_lagrangian(const ModeTriple& a, const ModeTriple& v, const ModeParams& params) {
    Complex l{0.0, 0.0};
    for (std::size_t j = 0; j < 3; ++j) {
        l += 0.5 * kI * (std::conj(a[j]) * v[j] - std::conj(v[j]) * a[j]);
        l -= params.omega[j] * std::conj(a[j]) * a[j];
    }
    return l - zero_point(params);
}

// trapezoid weight of sample k out of n+1
double trapezoid_weight(std::size_t k, std::size_t n, double dt) {
    return (k == 0 || k == n) ? 0.5 * dt : dt;
}

ModeTriple velocity_at(const std::vector<ModeTriple>& labels, std::size_t k, double dt) {
    const std::size_t n = labels.size() - 1;
    ModeTriple v{};
    for (std::size_t j = 0; j < 3; ++j) {
        if (k == 0) {
            v[j] = (labels[1][j] - labels[0][j]) / dt;
        } else if (k == n) {
            v[j] = (labels[n][j] - labels[n - 1][j]) / dt;
        } else {
            v[j] = (labels[k + 1][j] - labels[k - 1][j]) / (2.0 * dt);
        }
    }
    return v;
}

} // namespace

void SlicedPath::validate() const {
    if (labels.size() < 2) throw InvalidArgument("sliced path needs at least one slice");
    if (!(t_b >= t_a) || !std::isfinite(t_a) || !std::isfinite(t_b)) {
        throw InvalidArgument("sliced path needs finite t_a <= t_b");
    }
    for (const auto& l : labels) {
        for (Complex z : l) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw InvalidArgument("sliced path has non-finite labels");
            }
        }
    }
}

SlicedPath path_from_trajectory(const Trajectory& trajectory) {
    SlicedPath path;
    path.t_a = trajectory.t0;
    path.t_b = trajectory.time(trajectory.size() - 1);
    path.labels.reserve(trajectory.size());
    for (const auto& s : trajectory.samples) path.labels.push_back(s.alpha);
    return path;
}

Complex coherent_overlap(const ModeTriple& bra, const ModeTriple& ket) {
    Complex exponent{0.0, 0.0};
    for (std::size_t j = 0; j < 3; ++j) {
        exponent += -0.5 * std::norm(bra[j]) - 0.5 * std::norm(ket[j]) + std::conj(bra[j]) * ket[j];
    }
    return std::exp(exponent);
}

Complex hamiltonian_symbol(const ModeTriple& bra, const ModeTriple& ket, const ModeParams& params) {
    const Complex kp = params.kappa_prime();
    Complex h = zero_point(params);
    for (std::size_t j = 0; j < 3; ++j) h += params.omega[j] * std::conj(bra[j]) * ket[j];
    h += kp * ket[0] * std::conj(bra[1]) * std::conj(bra[2]);
    h += std::conj(kp) * std::conj(bra[0]) * ket[1] * ket[2];
    return h;
}

Complex slice_kernel(const ModeTriple& prev, const ModeTriple& next, double eta, const ModeParams& params) {
    return coherent_overlap(next, prev) * (1.0 - kI * eta * hamiltonian_symbol(next, prev, params));
}

std::optional<std::string> slice_step_warning(double eta, const ModeParams& params) {
    const double w = std::max({std::abs(params.omega[0]), std::abs(params.omega[1]), std::abs(params.omega[2])});
    if (eta * w > kStepWarn) {
        std::ostringstream msg;
        msg << "slice step eta*omega = " << eta * w << " exceeds " << kStepWarn;
        return msg.str();
    }
    return std::nullopt;
}

Complex product_propagator(const SlicedPath& path, const ModeParams& params) {
    path.validate();
    const double eta = path.eta();
    Complex product{1.0, 0.0};
    double log_magnitude = 0.0;
    for (std::size_t j = 0; j + 1 < path.labels.size(); ++j) {
        const Complex k = slice_kernel(path.labels[j], path.labels[j + 1], eta, params);
        const double mag = std::abs(k);
        const double t = path.t_a + static_cast<double>(j + 1) * eta;
        if (!(mag > 0.0) || !std::isfinite(mag)) {
            throw DivergenceError("slice kernel vanished or overflowed", t);
        }
        log_magnitude += std::log(mag);
        if (std::abs(log_magnitude) > kLogOverflow) {
            throw DivergenceError("slice product overflow: |log K| > 700", t);
        }
        product *= k;
    }
    return product;
}

Complex lagrangian(const ModeTriple& alpha, const ModeTriple& velocity, const ModeParams& params) {
    const Complex kp = params.kappa_prime();
    const Complex interaction = kp * alpha[0] * std::conj(alpha[1]) * std::conj(alpha[2]) +
                                std::conj(kp) * std::conj(alpha[0]) * alpha[1] * alpha[2];
    return free_lagrangian(alpha, velocity, params) - interaction;
}

Complex lagrangian_with_potential(const ModeTriple& alpha, const ModeTriple& velocity, const ModeParams& params,
                                  Complex eta) {
    const Complex potential = eta * alpha[0] * std::conj(alpha[1]) * std::conj(alpha[2]) +
                              std::conj(eta) * std::conj(alpha[0]) * alpha[1] * alpha[2];
    return free_lagrangian(alpha, velocity, params) + potential;
}

std::vector<ModeTriple> path_velocities(const SlicedPath& path) {
    path.validate();
    const double dt = path.eta();
    std::vector<ModeTriple> v;
    v.reserve(path.labels.size());
    for (std::size_t k = 0; k < path.labels.size(); ++k) v.push_back(velocity_at(path.labels, k, dt));
    return v;
}

ActionValue classical_action(const SlicedPath& path, const ModeParams& params) {
    path.validate();
    if (path.slices() < 2) throw InvalidArgument("classical_action needs at least two slices");
    const std::size_t n = path.slices();
    const double dt = path.eta();
    Complex sum{0.0, 0.0};
    for (std::size_t k = 0; k <= n; ++k) {
        sum += trapezoid_weight(k, n, dt) * lagrangian(path.labels[k], velocity_at(path.labels, k, dt), params);
    }
    return {sum};
}

std::vector<double> action_gradient(const SlicedPath& path, const ModeParams& params, double step) {
    path.validate();
    if (path.slices() < 2) throw InvalidArgument("action_gradient needs at least two slices");
    if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
    const std::size_t n = path.slices();
    const double dt = path.eta();
    std::vector<ModeTriple> labels = path.labels;

    // terms k = m-1, m, m+1 are the only ones that see label m
    const auto local_action = [&](std::size_t m) {
        double s = 0.0;
        for (std::size_t k = m - 1; k <= m + 1; ++k) {
            s += trapezoid_weight(k, n, dt) * lagrangian(labels[k], velocity_at(labels, k, dt), params).real();
        }
        return s;
    };

    std::vector<double> grad;
    grad.reserve(6 * (n - 1));
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (const Complex dir : {Complex{1.0, 0.0}, kI}) {
                const Complex saved = labels[m][j];
                labels[m][j] = saved + step * dir;
                const double plus = local_action(m);
                labels[m][j] = saved - step * dir;
                const double minus = local_action(m);
                labels[m][j] = saved;
                grad.push_back((plus - minus) / (2.0 * step));
            }
        }
    }
    return grad;
}

double path_norm(const SlicedPath& path) {
    double s = 0.0;
    for (const auto& l : path.labels) {
        for (Complex z : l) s += std::norm(z);
    }
    return std::sqrt(s);
}

double action_equivalence_check(const SlicedPath& path, const ModeParams& params, Complex eta) {
    const auto velocities = path_velocities(path);
    double worst = 0.0;
    for (std::size_t k = 0; k < path.labels.size(); ++k) {
        const Complex a = lagrangian(path.labels[k], velocities[k], params);
        const Complex b = lagrangian_with_potential(path.labels[k], velocities[k], params, eta);
        worst = std::max(worst, std::abs(a - b));
    }
    return worst;
}

StationaryPropagator stationary_propagator(const ModeTriple& alpha_a, const ModeTriple& alpha_b, double t,
                                           const ModeParams& params, int n_slices) {
    if (n_slices < 1) throw InvalidArgument("n_slices must be >= 1");
    if (!(t >= 0.0)) throw InvalidArgument("propagation time must be >= 0");
    if (t == 0.0) return {Complex{1.0, 0.0}, alpha_a, {}};

    const double dt = t / n_slices;
    const Trajectory classical = integrate_rk4(MeanFieldState{alpha_a}, params, t, dt);
    const auto n = static_cast<std::size_t>(n_slices);

    SlicedPath path{0.0, t, {}};
    path.labels.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) path.labels.push_back(classical.samples[k].alpha);
    path.labels.push_back(alpha_b);

    StationaryPropagator out{product_propagator(path, params), classical.samples[n].alpha, {}};
    if (auto w = slice_step_warning(dt, params)) out.warnings.push_back(*w);
    return out;
}

} // namespace opa
