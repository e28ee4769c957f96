#include "opa/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opa/errors.hpp"
#include "opa/meanfield.hpp"
#include "opa/propagator_path.hpp"
#include "opa/quantum_dynamics.hpp"
#include "opa/thermal_noise.hpp"

namespace opa {

namespace fs = std::filesystem;

namespace {

constexpr double kMaxManleyRoweDrift = 1e-6;
constexpr double kMaxNormDeviation = 1e-9;
constexpr double kMaxEnergyDrift = 1e-8;
constexpr double kMaxEquivalenceResidual = 1e-12;
constexpr double kMaxGradientRatio = 1e-5;

class Csv {
public:
    explicit Csv(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) text_ += ',';
            text_ += h;
            first = false;
        }
        text_ += '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) text_ += ',';
            text_ += format_number(v);
            first = false;
        }
        text_ += '\n';
        ++rows_;
    }

    std::size_t rows() const noexcept { return rows_; }
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
    std::size_t rows_ = 0;
};

void write_atomically(const fs::path& target, const std::string& content) {
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + target.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + target.string());
    }
}

class Summary {
public:
    template <typename T>
    void add(std::string_view key, const T& value) {
        std::ostringstream line;
        line.precision(10);
        line << key << ": " << value << '\n';
        text_ += line.str();
    }
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

std::string complex_text(Complex z) {
    std::ostringstream s;
    s.precision(10);
    s << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return s.str();
}

class Runner {
public:
    Runner(const RunConfig& config, const RunOptions& options) : config_(config), options_(options) {}

    RunReport execute() {
        summary_.add("scenario", scenario_name(config_.scenario));
        switch (config_.scenario) {
        case Scenario::meanfield: meanfield(config_, output_path(config_.output_path)); break;
        case Scenario::quantum: quantum(config_.initial); break;
        case Scenario::fluorescence: quantum({config_.initial[0], 0.0, 0.0}); break;
        case Scenario::propagator_convergence: propagator_convergence(); break;
        case Scenario::action_check: action_check(); break;
        case Scenario::thermal_ensemble: thermal_ensemble(); break;
        case Scenario::sweep: sweep(); break;
        }
        for (const auto& w : report_.warnings) summary_.add("warning", w);
        for (const auto& v : report_.violations) summary_.add("violation", v);
        report_.summary = summary_.text();
        if (!report_.violations.empty()) report_.exit_code = kExitInvariant;
        return report_;
    }

private:
    fs::path output_path(const std::string& name) const { return options_.output_dir / name; }

    void emit(const fs::path& path, const Csv& csv) {
        write_atomically(path, csv.text());
        report_.files.push_back(path);
        summary_.add("output", path.string());
        summary_.add("rows", csv.rows());
    }

    void violation(const std::string& what) { report_.violations.push_back(what); }

    const TruncationDims& dims() const {
        if (!config_.dims) throw InvalidArgument("scenario needs truncation dimensions d0, d1, d2");
        return *config_.dims;
    }

    struct MeanFieldOutcome {
        MeanFieldState initial;
        MeanFieldState final;
        double drift;
    };

    MeanFieldOutcome meanfield(const RunConfig& cfg, const fs::path& path) {
        const Trajectory traj = integrate_rk4(MeanFieldState{cfg.initial}, cfg.params, cfg.t_final, cfg.dt);
        Csv csv({"t", "re_a0", "im_a0", "re_a1", "im_a1", "re_a2", "im_a2", "n0", "n1", "n2", "mr1", "mr2", "mr3"});
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const auto& s = traj.samples[k];
            const auto mr = manley_rowe(s);
            csv.row({traj.time(k), s[0].real(), s[0].imag(), s[1].real(), s[1].imag(), s[2].real(), s[2].imag(),
                     std::norm(s[0]), std::norm(s[1]), std::norm(s[2]), mr[0], mr[1], mr[2]});
        }
        emit(path, csv);

        const double drift = manley_rowe_drift(traj);
        summary_.add("max_manley_rowe_drift", drift);
        if (drift > kMaxManleyRoweDrift) {
            violation("Manley-Rowe drift " + format_number(drift) + " exceeds " + format_number(kMaxManleyRoweDrift));
        }
        return {traj.samples.front(), traj.samples.back(), drift};
    }

    void quantum(const ModeTriple& initial) {
        const TruncationDims& d = dims();
        const OperatorMatrix h = build_hamiltonian(config_.params, d);
        const StateVector psi0 = product_coherent_state(initial, d);
        const std::size_t steps = step_count(config_.t_final, config_.dt);
        std::vector<double> times;
        for (std::size_t k = 0; k <= steps; ++k) times.push_back(static_cast<double>(k) * config_.dt);

        const EvolutionResult result = evolve_state(h, d, psi0, times, /*keep_states=*/false);
        Csv csv({"t", "n0", "n1", "n2", "norm_dev", "energy"});
        double energy_drift = 0.0;
        const double e0 = result.energies.front();
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto& n = result.expectations[k];
            csv.row({times[k], n[0], n[1], n[2], result.norm_deviations[k], result.energies[k]});
            energy_drift = std::max(energy_drift, std::abs(result.energies[k] - e0) / std::max(1.0, std::abs(e0)));
        }
        emit(output_path(config_.output_path), csv);

        summary_.add("max_norm_deviation", result.max_norm_deviation);
        summary_.add("max_relative_energy_drift", energy_drift);
        const auto& last = result.expectations.back();
        summary_.add("final_n1", last[1]);
        summary_.add("final_n2", last[2]);
        if (config_.scenario == Scenario::fluorescence) {
            const double g = config_.params.kappa * std::abs(config_.initial[0]);
            const double reference = std::pow(std::sinh(g * times.back()), 2);
            summary_.add("undepleted_reference_n1", reference);
        }
        report_.warnings.insert(report_.warnings.end(), result.warnings.begin(), result.warnings.end());
        if (result.max_norm_deviation > kMaxNormDeviation) {
            violation("norm deviation " + format_number(result.max_norm_deviation) + " exceeds " +
                      format_number(kMaxNormDeviation));
        }
        if (energy_drift > kMaxEnergyDrift) {
            violation("energy drift " + format_number(energy_drift) + " exceeds " + format_number(kMaxEnergyDrift));
        }
    }

    void propagator_convergence() {
        const TruncationDims& d = dims();
        const double t = config_.t_final;
        std::vector<int> resolutions;
        for (int n = config_.n_slices; n >= 1; n /= 2) {
            resolutions.push_back(n);
            if (n < 16) break;
        }
        std::reverse(resolutions.begin(), resolutions.end());

        // the bra is the classical endpoint at the finest resolution
        const auto finest = stationary_propagator(config_.initial, config_.initial, t, config_.params, config_.n_slices);
        const ModeTriple alpha_b = finest.endpoint;
        const Complex exact = propagator_exact(config_.params, d, config_.initial, alpha_b, t);

        Csv csv({"n", "re_product", "im_product", "abs_error"});
        std::vector<double> errors;
        for (int n : resolutions) {
            const auto sp = stationary_propagator(config_.initial, alpha_b, t, config_.params, n);
            const double err = std::abs(sp.value - exact);
            errors.push_back(err);
            csv.row({static_cast<double>(n), sp.value.real(), sp.value.imag(), err});
            if (n == config_.n_slices) {
                report_.warnings.insert(report_.warnings.end(), sp.warnings.begin(), sp.warnings.end());
            }
        }
        emit(output_path(config_.output_path), csv);

        const bool monotone = std::is_sorted(errors.rbegin(), errors.rend());
        summary_.add("exact_propagator", complex_text(exact));
        summary_.add("finest_error", errors.back());
        summary_.add("monotone_decrease", monotone ? "yes" : "no");
    }

    void action_check() {
        const Trajectory traj = integrate_rk4(MeanFieldState{config_.initial}, config_.params, config_.t_final, config_.dt);
        const SlicedPath path = path_from_trajectory(traj);
        if (path.slices() < 2) throw InvalidArgument("action-check needs t_final >= 2 dt");
        const Complex eta = -config_.params.kappa_prime();
        const auto velocities = path_velocities(path);

        Csv csv({"t", "lagrangian", "lagrangian_surface", "abs_diff"});
        double scale = 1.0;
        for (std::size_t k = 0; k < path.labels.size(); ++k) {
            const Complex a = lagrangian(path.labels[k], velocities[k], config_.params);
            const Complex b = lagrangian_with_potential(path.labels[k], velocities[k], config_.params, eta);
            scale = std::max(scale, std::abs(a));
            csv.row({traj.time(k), a.real(), b.real(), std::abs(a - b)});
        }
        emit(output_path(config_.output_path), csv);

        const double equivalence = action_equivalence_check(path, config_.params, eta);
        const auto grad = action_gradient(path, config_.params);
        double grad_norm = 0.0;
        for (double g : grad) grad_norm += g * g;
        grad_norm = std::sqrt(grad_norm);
        const double ratio = grad_norm / std::max(path_norm(path), 1e-300);

        summary_.add("action", complex_text(classical_action(path, config_.params).value));
        summary_.add("max_equivalence_residual", equivalence);
        summary_.add("gradient_norm_over_path_norm", ratio);
        if (equivalence > kMaxEquivalenceResidual * scale) {
            violation("Lagrangian equivalence residual " + format_number(equivalence) + " exceeds threshold");
        }
        if (ratio > kMaxGradientRatio) {
            violation("action gradient ratio " + format_number(ratio) + " exceeds " + format_number(kMaxGradientRatio));
        }
    }

    void thermal_ensemble() {
        const EnsembleStatistics stats = fluorescence_ensemble(config_.params, config_.thermal, config_.t_final,
                                                               config_.dt, config_.n_samples);
        if (stats.samples_used == 0) {
            throw DivergenceError("every ensemble sample diverged", stats.failed_samples.front().second);
        }
        Csv csv({"t", "mean_n1", "var_n1", "mean_n2", "var_n2"});
        for (std::size_t k = 0; k < stats.times.size(); ++k) {
            csv.row({stats.times[k], stats.mean_n1[k], stats.var_n1[k], stats.mean_n2[k], stats.var_n2[k]});
        }
        emit(output_path(config_.output_path), csv);

        summary_.add("samples_used", stats.samples_used);
        summary_.add("failures", stats.failures);
        summary_.add("nbar_signal", mean_occupancy(config_.params.omega[1], config_.thermal.temperature));
        summary_.add("nbar_idler", mean_occupancy(config_.params.omega[2], config_.thermal.temperature));
        summary_.add("initial_mean_n1", stats.mean_n1.front());
        summary_.add("initial_mean_n2", stats.mean_n2.front());
        for (const auto& [index, time] : stats.failed_samples) {
            report_.warnings.push_back("sample " + std::to_string(index) + " diverged at t=" + format_number(time));
        }
    }

    void sweep() {
        const SweepAxis& axis = *config_.sweep;
        const fs::path base(config_.output_path);
        const std::string stem = base.stem().string();
        const std::string ext = base.has_extension() ? base.extension().string() : ".csv";
        const fs::path dir = base.parent_path();

        Csv aggregate({axis.key, "n1_initial", "n1_final", "n2_final", "gain1", "max_mr_drift"});
        for (int i = 0; i < axis.count; ++i) {
            const double v = axis.value(i);
            const RunConfig point = with_value(config_, axis.key, v);
            const auto outcome =
                meanfield(point, output_path((dir / (stem + "_" + std::to_string(i) + ext)).string()));
            const double n1_initial = std::norm(outcome.initial[1]);
            const double n1_final = std::norm(outcome.final[1]);
            const double gain = n1_initial > 0.0 ? n1_final / n1_initial : std::nan("");
            aggregate.row({v, n1_initial, n1_final, std::norm(outcome.final[2]), gain, outcome.drift});
        }
        emit(output_path((dir / (stem + "_aggregate" + ext)).string()), aggregate);
    }

    const RunConfig& config_;
    const RunOptions& options_;
    RunReport report_;
    Summary summary_;
};

} // namespace

std::string format_number(double value) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

RunReport run(const RunConfig& config, const RunOptions& options) {
    return Runner(config, options).execute();
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ResourceError*>(&error)) return kExitResource;
    if (dynamic_cast<const DivergenceError*>(&error)) return kExitDivergence;
    if (dynamic_cast<const IoError*>(&error)) return kExitIo;
    if (dynamic_cast<const std::filesystem::filesystem_error*>(&error)) return kExitIo;
    if (dynamic_cast<const InvalidArgument*>(&error)) return kExitConfig;
    return kExitConfig;
}

} // namespace opa
