#include "mvstab/sim.hpp"

#include <cmath>
#include <thread>

#include "mvstab/rng.hpp"

namespace mvstab {

namespace {

// Splits [0, n) into contiguous chunks and runs fn(begin, end) on each.
// Chunk boundaries depend only on n and the thread count, and every write
// target is particle-indexed, so the result is schedule-independent.
void parallel_for(int n, int threads, const std::function<void(int, int)>& fn) {
    if (threads <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    const int chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

double norm_sq(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

}  // namespace

void SimConfig::validate(int d) const {
    if (N < 1) throw SimError("SimConfig: N must be >= 1");
    if (!(dt > 0)) throw SimError("SimConfig: dt must be > 0");
    if (delta < dt) throw SimError("SimConfig: delta must be >= dt");
    if (T < delta) throw SimError("SimConfig: T must be >= delta");
    if (record_stride < 1) throw SimError("SimConfig: record_stride must be >= 1");
    if (static_cast<int>(x0.size()) != d)
        throw SimError("SimConfig: x0 dimension does not match the model");
    const double k = std::round(delta / dt);
    if (std::abs(k * dt - delta) > 1e-9 * delta)
        throw SimError("SimConfig: observation gap misaligned (delta must be an integer multiple of dt)");
    if (extra_moment_order != 0 && extra_moment_order < 2)
        throw SimError("SimConfig: extra_moment_order must be 0 or >= 2");
    if (hold_err_order != 0 && hold_err_order < 2)
        throw SimError("SimConfig: hold_err_order must be 0 or >= 2");
    for (double t : snapshot_times) {
        const double s = std::round(t / dt);
        if (t < 0 || t > T + 1e-9 || std::abs(s * dt - t) > 1e-9 * std::max(t, dt))
            throw SimError("SimConfig: snapshot time off the integration grid");
    }
}

int SimConfig::steps_per_delta() const {
    return static_cast<int>(std::llround(delta / dt));
}

int SimConfig::num_steps() const {
    return static_cast<int>(std::llround(T / dt));
}

TrajectoryRecord run_particle_system(const McKeanVlasovModel& model,
                                     const SimConfig& config, int threads) {
    config.validate(model.d);
    const int N = config.N;
    const int d = model.d;
    const int m = model.m;
    const int spd = config.steps_per_delta();
    const int steps = config.num_steps();

    std::vector<double> state(static_cast<std::size_t>(N) * d);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < d; ++j)
            state[static_cast<std::size_t>(i) * d + j] = config.x0[j];
    std::vector<double> next(state.size());
    std::vector<double> frozen(state.size());
    HeldControl held;
    held.values.assign(state.size(), 0.0);

    std::vector<long long> snapshot_steps;
    snapshot_steps.reserve(config.snapshot_times.size());
    for (double t : config.snapshot_times)
        snapshot_steps.push_back(std::llround(t / config.dt));

    TrajectoryRecord rec;
    rec.d = d;
    std::vector<char> bad(N, 0);

    auto row = [d](std::vector<double>& buf, int i) {
        return std::span<double>(buf.data() + static_cast<std::size_t>(i) * d, d);
    };
    auto crow = [d](const std::vector<double>& buf, int i) {
        return std::span<const double>(buf.data() + static_cast<std::size_t>(i) * d, d);
    };

    for (int k = 0; k <= steps; ++k) {
        const double t = k * config.dt;

        // Ensemble summary, reduced sequentially in ascending index order.
        MeasureSummary summary;
        summary.N = N;
        summary.mean.assign(d, 0.0);
        for (int i = 0; i < N; ++i) {
            auto r = crow(state, i);
            for (int j = 0; j < d; ++j) summary.mean[j] += r[j];
            summary.raw2 += norm_sq(r);
        }
        for (int j = 0; j < d; ++j) summary.mean[j] /= N;
        summary.raw2 /= N;

        if (k % spd == 0) {
            frozen = state;
            held.sigma_time = t;
            parallel_for(N, threads, [&](int lo, int hi) {
                for (int i = lo; i < hi; ++i)
                    model.control(crow(frozen, i), summary, row(held.values, i));
            });
        }

        if (k % config.record_stride == 0 || k == steps) {
            rec.times.push_back(t);
            rec.m1.insert(rec.m1.end(), summary.mean.begin(), summary.mean.end());
            rec.msq.push_back(summary.raw2);
            if (config.extra_moment_order >= 2) {
                double acc = 0.0;
                for (int i = 0; i < N; ++i)
                    acc += std::pow(norm_sq(crow(state, i)),
                                    0.5 * config.extra_moment_order);
                rec.m_p.push_back(acc / N);
            }
            if (config.hold_err_order >= 2) {
                double acc = 0.0;
                for (int i = 0; i < N; ++i) {
                    auto xs = crow(state, i);
                    auto xf = crow(frozen, i);
                    double nsq = 0.0;
                    for (int j = 0; j < d; ++j) {
                        const double diff = xs[j] - xf[j];
                        nsq += diff * diff;
                    }
                    acc += (config.hold_err_order == 2)
                               ? nsq
                               : std::pow(nsq, 0.5 * config.hold_err_order);
                }
                rec.hold_err_p.push_back(acc / N);
            }
        }
        for (std::size_t s = 0; s < snapshot_steps.size(); ++s)
            if (snapshot_steps[s] == k)
                rec.snapshots.emplace(config.snapshot_times[s],
                                      EmpiricalMeasure(N, d, state));

        if (k == steps) break;

        parallel_for(N, threads, [&](int lo, int hi) {
            std::vector<double> fvec(d), gmat(static_cast<std::size_t>(d) * m), db(m);
            for (int i = lo; i < hi; ++i) {
                auto x = crow(state, i);
                auto xn = row(next, i);
                model.drift(x, summary, fvec);
                model.diffusion(x, summary, gmat);
                rng::brownian_increment(config.seed, i, k, config.dt, db);
                auto u = crow(held.values, i);
                bool ok = true;
                for (int j = 0; j < d; ++j) {
                    double noise = 0.0;
                    for (int c = 0; c < m; ++c)
                        noise += gmat[static_cast<std::size_t>(j) * m + c] * db[c];
                    xn[j] = x[j] + (fvec[j] + u[j]) * config.dt + noise;
                    if (!std::isfinite(xn[j]) || std::abs(xn[j]) > kExplosionGuard)
                        ok = false;
                }
                bad[i] = ok ? 0 : 1;
            }
        });

        // First offending particle index, scanned sequentially for a
        // schedule-independent diagnostic.
        for (int i = 0; i < N; ++i) {
            if (!bad[i]) continue;
            bool finite = true;
            for (int j = 0; j < d; ++j)
                finite = finite && std::isfinite(next[static_cast<std::size_t>(i) * d + j]);
            rec.status = finite ? RunStatus::explosion : RunStatus::non_finite;
            rec.abort_time = (k + 1) * config.dt;
            rec.abort_particle = i;
            return rec;
        }
        state.swap(next);
    }
    return rec;
}

CoupledErrorRecord run_coupled_pair(const LinearMeanFieldParams& params,
                                    const SimConfig& config,
                                    std::span<const double> limit_mean_path,
                                    int threads) {
    config.validate(1);
    const int N = config.N;
    const int spd = config.steps_per_delta();
    const int steps = config.num_steps();
    if (limit_mean_path.size() != static_cast<std::size_t>(steps) + 1)
        throw SimError("run_coupled_pair: oracle mean path does not match the time grid");

    std::vector<double> xp(N, config.x0[0]);  // interacting particles
    std::vector<double> xl(N, config.x0[0]);  // limit processes
    std::vector<double> xp_next(N), xl_next(N);
    std::vector<double> up_held(N), ul_held(N);
    std::vector<double> xp_frozen(N), xl_frozen(N);

    CoupledErrorRecord rec;

    for (int k = 0; k <= steps; ++k) {
        double mean_p = 0.0;
        for (int i = 0; i < N; ++i) mean_p += xp[i];
        mean_p /= N;
        const double mean_l = limit_mean_path[k];

        if (k % spd == 0) {
            xp_frozen = xp;
            xl_frozen = xl;
            const double frozen_mean_p = mean_p;
            const double frozen_mean_l = mean_l;
            parallel_for(N, threads, [&](int lo, int hi) {
                for (int i = lo; i < hi; ++i) {
                    up_held[i] = -params.k1 * xp_frozen[i] - params.k2 * frozen_mean_p;
                    ul_held[i] = -params.k1 * xl_frozen[i] - params.k2 * frozen_mean_l;
                }
            });
        }

        if (k % config.record_stride == 0 || k == steps) {
            double acc = 0.0;
            for (int i = 0; i < N; ++i) {
                const double diff = xl[i] - xp[i];
                acc += diff * diff;
            }
            rec.times.push_back(k * config.dt);
            rec.sq_error.push_back(acc / N);
        }
        if (k == steps) break;

        parallel_for(N, threads, [&](int lo, int hi) {
            for (int i = lo; i < hi; ++i) {
                const double db =
                    rng::standard_normal(config.seed, i, k, 0) * std::sqrt(config.dt);
                xp_next[i] = xp[i] +
                             (params.a * xp[i] + params.b * mean_p + up_held[i]) * config.dt +
                             params.gdiag * xp[i] * db;
                xl_next[i] = xl[i] +
                             (params.a * xl[i] + params.b * mean_l + ul_held[i]) * config.dt +
                             params.gdiag * xl[i] * db;
            }
        });
        for (int i = 0; i < N; ++i)
            if (!std::isfinite(xp_next[i]) || !std::isfinite(xl_next[i]))
                throw SimError("run_coupled_pair: non-finite state at t=" +
                               std::to_string((k + 1) * config.dt) +
                               ", particle " + std::to_string(i));
        xp.swap(xp_next);
        xl.swap(xl_next);
    }
    return rec;
}

}  // namespace mvstab
