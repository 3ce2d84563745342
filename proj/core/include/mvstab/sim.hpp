#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mvstab/measure.hpp"
#include "mvstab/model.hpp"

namespace mvstab {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// State threshold past which a trajectory is flagged as exploded instead
/// of being integrated into non-finite values.
inline constexpr double kExplosionGuard = 1e12;

struct SimConfig {
    int N = 1;
    double dt = 1e-3;
    double delta = 1e-3;  // observation gap; exact integer multiple of dt
    double T = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> x0;  // deterministic common initial state
    int record_stride = 1;
    std::vector<double> snapshot_times;
    int extra_moment_order = 0;  // record (1/N) sum |x_i|^p when p >= 2
    int hold_err_order = 0;      // record (1/N) sum |x_i(t)-x_i(sigma_t)|^p

    void validate(int d) const;
    int steps_per_delta() const;
    int num_steps() const;
};

/// Control values computed at the most recent observation time and held
/// constant until the next one.
struct HeldControl {
    std::vector<double> values;  // N x d, row-major
    double sigma_time = 0.0;
};

enum class RunStatus { ok, explosion, non_finite };

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> m1;           // times.size() x d, row-major ensemble means
    std::vector<double> msq;          // (1/N) sum |x_i|^2
    std::vector<double> m_p;          // optional higher moment (empty if unused)
    std::vector<double> hold_err_p;   // optional holding error (empty if unused)
    int d = 1;
    std::map<double, EmpiricalMeasure> snapshots;

    RunStatus status = RunStatus::ok;
    double abort_time = 0.0;
    int abort_particle = -1;

    std::span<const double> mean_at(std::size_t idx) const {
        return {m1.data() + idx * d, static_cast<std::size_t>(d)};
    }
};

/// Euler-Maruyama integration of the N-particle system with the control
/// refreshed only at multiples of delta. Output is a pure function of
/// (model, config); the worker count never changes the result.
TrajectoryRecord run_particle_system(const McKeanVlasovModel& model,
                                     const SimConfig& config, int threads = 1);

struct CoupledErrorRecord {
    std::vector<double> times;
    std::vector<double> sq_error;  // (1/N) sum |x^i - x^{i,N}|^2 per recorded time
};

/// Integrates the interacting particle system and the limit processes
/// (mean field replaced by the supplied oracle mean path) with identical
/// Brownian increments per particle index; returns the index-aligned
/// squared-error time series. limit_mean_path must hold num_steps()+1
/// values on the simulation grid.
CoupledErrorRecord run_coupled_pair(const LinearMeanFieldParams& params,
                                    const SimConfig& config,
                                    std::span<const double> limit_mean_path,
                                    int threads = 1);

}  // namespace mvstab
