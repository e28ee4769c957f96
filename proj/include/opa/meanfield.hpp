#ifndef OPA_MEANFIELD_HPP
#define OPA_MEANFIELD_HPP

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "opa/fockspace.hpp"

namespace opa {

/// c-number amplitudes (alpha0, alpha1, alpha2); |alpha_j|^2 is the mean
/// photon number of mode j.
struct MeanFieldState {
    ModeTriple alpha{};

    Complex& operator[](std::size_t j) { return alpha[j]; }
    const Complex& operator[](std::size_t j) const { return alpha[j]; }

    bool is_finite() const;
    double max_abs() const;

    friend MeanFieldState operator+(const MeanFieldState& a, const MeanFieldState& b);
    friend MeanFieldState operator*(double s, const MeanFieldState& a);
};

/// Uniformly sampled trajectory: samples[k] is the state at t0 + k*dt.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<MeanFieldState> samples;

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    std::size_t size() const noexcept { return samples.size(); }
};

/// Number of whole steps of size dt that fit in t_final (tolerant of the
/// rounding in t_final/dt).
std::size_t step_count(double t_final, double dt);

/// Euler-Lagrange equations of the three-mode Lagrangian:
///   da0/dt = -i w0 a0 - i conj(k') a1 a2
///   da1/dt = -i w1 a1 - i k' a0 conj(a2)
///   da2/dt = -i w2 a2 - i k' a0 conj(a1)
MeanFieldState derivatives(const MeanFieldState& s, const ModeParams& params);

/// Classic fixed-step RK4. The last sample sits at the largest multiple of
/// dt not exceeding t_final. Throws DivergenceError (carrying the time) when
/// a component becomes non-finite or exceeds 1e6 in modulus.
Trajectory integrate_rk4(const MeanFieldState& s0, const ModeParams& params, double t_final, double dt);

/// (|a0|^2 + |a1|^2, |a0|^2 + |a2|^2, |a1|^2 - |a2|^2)
std::array<double, 3> manley_rowe(const MeanFieldState& s);

/// Largest change of any Manley-Rowe quantity along the trajectory, divided
/// by the initial total photon number.
double manley_rowe_drift(const Trajectory& trajectory);

/// Signal and idler amplitudes at time t under a non-depleting pump
/// a0(t) = a0(0) exp(-i w0 t), with a0(0) = params.pump_alpha0.
///
/// In the frame b_j = a_j exp(i w_j t) the linear system closes into
///   b1(t) = b1(0) cosh(gt) - i e^{i theta} conj(b2(0)) sinh(gt)
///   b2(t) = b2(0) cosh(gt) - i e^{i theta} conj(b1(0)) sinh(gt)
/// with g = kappa |a0(0)| and theta = arg a0(0) - phi. Returned amplitudes
/// are in the lab frame.
std::pair<Complex, Complex> undepleted_pump_solution(Complex b1_0, Complex b2_0, const ModeParams& params,
                                                     double t);

} // namespace opa

#endif // OPA_MEANFIELD_HPP
