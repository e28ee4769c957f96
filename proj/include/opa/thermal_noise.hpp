#ifndef OPA_THERMAL_NOISE_HPP
#define OPA_THERMAL_NOISE_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "opa/fockspace.hpp"

namespace opa {

/// Temperature in frequency units (k_B = hbar = 1) and the master RNG seed.
struct ThermalParams {
    double temperature = 0.0;
    std::uint64_t seed = 0;
};

/// Bose-Einstein occupancy 1 / (exp(omega/T) - 1); zero at T = 0.
double mean_occupancy(double omega, double temperature);

/// Isotropic complex Gaussian with E|alpha|^2 = mean_occupancy(omega, T).
/// Returns exactly zero at T = 0 without drawing from @p rng.
Complex sample_thermal_amplitude(double omega, double temperature, std::mt19937_64& rng);

/// Counter-based seed for sample @p index of an ensemble (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct EnsembleStatistics {
    std::vector<double> times;
    std::vector<double> mean_n1;
    std::vector<double> var_n1;
    std::vector<double> mean_n2;
    std::vector<double> var_n2;
    std::size_t samples_used = 0;
    std::size_t failures = 0;
    /// (sample index, divergence time) for every excluded sample.
    std::vector<std::pair<std::size_t, double>> failed_samples;
};

/// Mean-field fluorescence seeded by thermal signal/idler amplitudes: every
/// sample starts from (pump_alpha0, thermal(omega1), thermal(omega2)) and is
/// integrated with RK4. Statistics of |alpha1|^2 and |alpha2|^2 are reduced in
/// sample order, so results are bit-identical for a fixed master seed
/// regardless of the number of worker threads.
EnsembleStatistics fluorescence_ensemble(const ModeParams& params, const ThermalParams& thermal, double t_final,
                                         double dt, int n_samples, unsigned threads = 0);

} // namespace opa

#endif // OPA_THERMAL_NOISE_HPP
