#include "opa/thermal_noise.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "opa/errors.hpp"
#include "opa/meanfield.hpp"

namespace opa {

namespace {

constexpr std::size_t kBlockSize = 64;

// Welford accumulator fed in sample-index order.
struct RunningMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

struct SampleOutcome {
    std::vector<double> n1;
    std::vector<double> n2;
    std::optional<double> divergence_time;
};

SampleOutcome run_sample(const ModeParams& params, const ThermalParams& thermal, double t_final, double dt,
                         std::size_t index) {
    std::mt19937_64 rng(derive_seed(thermal.seed, index));
    const Complex a1 = sample_thermal_amplitude(params.omega[1], thermal.temperature, rng);
    const Complex a2 = sample_thermal_amplitude(params.omega[2], thermal.temperature, rng);

    SampleOutcome out;
    try {
        const Trajectory traj = integrate_rk4(MeanFieldState{{params.pump_alpha0, a1, a2}}, params, t_final, dt);
        out.n1.reserve(traj.size());
        out.n2.reserve(traj.size());
        for (const auto& s : traj.samples) {
            out.n1.push_back(std::norm(s[1]));
            out.n2.push_back(std::norm(s[2]));
        }
    } catch (const DivergenceError& e) {
        out.divergence_time = e.time();
    }
    return out;
}

} // namespace

double mean_occupancy(double omega, double temperature) {
    if (!(omega > 0.0)) throw InvalidArgument("mean occupancy needs omega > 0");
    if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

Complex sample_thermal_amplitude(double omega, double temperature, std::mt19937_64& rng) {
    const double nbar = mean_occupancy(omega, temperature);
    if (nbar == 0.0) return {0.0, 0.0};
    std::normal_distribution<double> quadrature(0.0, std::sqrt(0.5 * nbar));
    const double re = quadrature(rng);
    const double im = quadrature(rng);
    return {re, im};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

EnsembleStatistics fluorescence_ensemble(const ModeParams& params, const ThermalParams& thermal, double t_final,
                                         double dt, int n_samples, unsigned threads) {
    if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
    params.validate();
    // surface domain errors before spawning work
    mean_occupancy(params.omega[1], thermal.temperature);
    mean_occupancy(params.omega[2], thermal.temperature);
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(t_final >= dt)) throw InvalidArgument("t_final must be >= dt");

    const std::size_t steps = step_count(t_final, dt);
    EnsembleStatistics stats;
    for (std::size_t k = 0; k <= steps; ++k) stats.times.push_back(static_cast<double>(k) * dt);

    std::vector<RunningMoments> m1(steps + 1), m2(steps + 1);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    const auto total = static_cast<std::size_t>(n_samples);
    std::vector<SampleOutcome> block(kBlockSize);
    for (std::size_t first = 0; first < total; first += kBlockSize) {
        const std::size_t count = std::min(kBlockSize, total - first);
        const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(count));
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    for (std::size_t i = w; i < count; i += workers) {
                        block[i] = run_sample(params, thermal, t_final, dt, first + i);
                    }
                });
            }
        }
        for (std::size_t i = 0; i < count; ++i) {
            const auto& s = block[i];
            if (s.divergence_time) {
                ++stats.failures;
                stats.failed_samples.emplace_back(first + i, *s.divergence_time);
                continue;
            }
            ++stats.samples_used;
            for (std::size_t k = 0; k <= steps; ++k) {
                m1[k].add(s.n1[k]);
                m2[k].add(s.n2[k]);
            }
        }
    }

    for (std::size_t k = 0; k <= steps; ++k) {
        stats.mean_n1.push_back(m1[k].mean);
        stats.var_n1.push_back(m1[k].variance());
        stats.mean_n2.push_back(m2[k].mean);
        stats.var_n2.push_back(m2[k].variance());
    }
    return stats;
}

} // namespace opa
