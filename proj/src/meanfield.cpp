#include "opa/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opa/errors.hpp"

namespace opa {

namespace {

constexpr double kDivergenceBound = 1e6;
constexpr Complex kI{0.0, 1.0};

} // namespace

bool MeanFieldState::is_finite() const {
    return std::all_of(alpha.begin(), alpha.end(),
                       [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double MeanFieldState::max_abs() const {
    double m = 0.0;
    for (Complex z : alpha) m = std::max(m, std::abs(z));
    return m;
}

MeanFieldState operator+(const MeanFieldState& a, const MeanFieldState& b) {
    return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}};
}

MeanFieldState operator*(double s, const MeanFieldState& a) { return {{s * a[0], s * a[1], s * a[2]}}; }

std::size_t step_count(double t_final, double dt) {
    return static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
}

MeanFieldState derivatives(const MeanFieldState& s, const ModeParams& params) {
    const Complex kp = params.kappa_prime();
    const auto& w = params.omega;
    return {{-kI * w[0] * s[0] - kI * std::conj(kp) * s[1] * s[2],
             -kI * w[1] * s[1] - kI * kp * s[0] * std::conj(s[2]),
             -kI * w[2] * s[2] - kI * kp * s[0] * std::conj(s[1])}};
}

Trajectory integrate_rk4(const MeanFieldState& s0, const ModeParams& params, double t_final, double dt) {
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
    if (!(t_final >= dt)) throw InvalidArgument("t_final must be >= dt");
    if (!s0.is_finite()) throw InvalidArgument("initial state is not finite");

    const std::size_t steps = step_count(t_final, dt);
    Trajectory traj{0.0, dt, {}};
    traj.samples.reserve(steps + 1);
    traj.samples.push_back(s0);

    MeanFieldState s = s0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const MeanFieldState k1 = derivatives(s, params);
        const MeanFieldState k2 = derivatives(s + (0.5 * dt) * k1, params);
        const MeanFieldState k3 = derivatives(s + (0.5 * dt) * k2, params);
        const MeanFieldState k4 = derivatives(s + dt * k3, params);
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!s.is_finite() || s.max_abs() > kDivergenceBound) {
            const double t = traj.time(k);
            std::ostringstream msg;
            msg << "mean-field integration diverged at t=" << t;
            throw DivergenceError(msg.str(), t);
        }
        traj.samples.push_back(s);
    }
    return traj;
}

std::array<double, 3> manley_rowe(const MeanFieldState& s) {
    const double n0 = std::norm(s[0]);
    const double n1 = std::norm(s[1]);
    const double n2 = std::norm(s[2]);
    return {n0 + n1, n0 + n2, n1 - n2};
}

double manley_rowe_drift(const Trajectory& trajectory) {
    if (trajectory.samples.empty()) return 0.0;
    const auto& first = trajectory.samples.front();
    const auto ref = manley_rowe(first);
    const double scale = std::norm(first[0]) + std::norm(first[1]) + std::norm(first[2]);
    if (scale == 0.0) return 0.0;
    double drift = 0.0;
    for (const auto& s : trajectory.samples) {
        const auto mr = manley_rowe(s);
        for (std::size_t i = 0; i < 3; ++i) drift = std::max(drift, std::abs(mr[i] - ref[i]));
    }
    return drift / scale;
}

std::pair<Complex, Complex> undepleted_pump_solution(Complex b1_0, Complex b2_0, const ModeParams& params,
                                                     double t) {
    const double g = params.kappa * std::abs(params.pump_alpha0);
    const double theta = std::arg(params.pump_alpha0) - params.phi;
    const Complex mix = -kI * std::polar(1.0, theta) * std::sinh(g * t);
    const double c = std::cosh(g * t);
    const Complex b1 = b1_0 * c + mix * std::conj(b2_0);
    const Complex b2 = b2_0 * c + mix * std::conj(b1_0);
    return {b1 * std::polar(1.0, -params.omega[1] * t), b2 * std::polar(1.0, -params.omega[2] * t)};
}

} // namespace opa
