#include "mvstab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mvstab/rng.hpp"

namespace mvstab {

namespace {
// Squared-error floor below which a coupled run is treated as noise-free
// (particle and limit systems pathwise identical).
constexpr double kChaosNoiseFloor = 1e-30;
}  // namespace

MomentPath moment_ode_oracle(const LinearMeanFieldParams& params, double x0,
                             double delta, double T, double grid_dt) {
    if (!(grid_dt > 0) || delta < grid_dt || T < delta)
        throw AnalysisError("moment_ode_oracle: need 0 < grid_dt <= delta <= T");
    const double spd_real = delta / grid_dt;
    const long long spd = std::llround(spd_real);
    if (std::abs(spd * grid_dt - delta) > 1e-9 * delta)
        throw AnalysisError("moment_ode_oracle: grid_dt does not divide delta");
    const long long steps = std::llround(T / grid_dt);

    MomentPath path;
    path.times.reserve(steps + 1);
    path.m1.reserve(steps + 1);
    path.m2.reserve(steps + 1);
    path.q.reserve(steps + 1);
    path.m3.reserve(steps + 1);
    path.m4.reserve(steps + 1);

    // Mixed moments M[j][k] = E[x(t)^j x(sigma_t)^k], j + k <= 4.
    using Moments = std::array<std::array<double, 5>, 5>;
    Moments M{};
    for (int j = 0; j <= 4; ++j) M[j][0] = std::pow(x0, j);
    double mu_l = x0;  // frozen mean at the interval start

    const double a = params.a, b = params.b, g = params.gdiag;
    const double k1 = params.k1, k2 = params.k2;

    // Ito: the held state is constant inside the interval, so only the
    // first index evolves; M_{0,k} stays fixed until the next reset.
    auto rhs = [&](const Moments& y) {
        Moments d{};
        for (int j = 1; j <= 4; ++j)
            for (int kk = 0; j + kk <= 4; ++kk)
                d[j][kk] = (j * a + 0.5 * j * (j - 1) * g * g) * y[j][kk] +
                           j * b * y[1][0] * y[j - 1][kk] -
                           j * k1 * y[j - 1][kk + 1] -
                           j * k2 * mu_l * y[j - 1][kk];
        return d;
    };
    auto axpy = [](const Moments& y, double h, const Moments& d) {
        Moments out = y;
        for (int j = 1; j <= 4; ++j)
            for (int kk = 0; j + kk <= 4; ++kk) out[j][kk] += h * d[j][kk];
        return out;
    };

    for (long long k = 0; k <= steps; ++k) {
        if (k % spd == 0) {  // observation instant: hold the current state
            Moments next{};
            for (int j = 0; j <= 4; ++j)
                for (int kk = 0; j + kk <= 4; ++kk) next[j][kk] = M[j + kk][0];
            M = next;
            mu_l = M[1][0];
        }
        path.times.push_back(k * grid_dt);
        path.m1.push_back(M[1][0]);
        path.m2.push_back(M[2][0]);
        path.q.push_back(M[1][1]);
        path.m3.push_back(M[3][0]);
        path.m4.push_back(M[4][0]);
        if (k == steps) break;

        // Classical 4th-order step; coefficients stay frozen inside the
        // interval so steps never straddle an observation boundary.
        const auto k1v = rhs(M);
        const auto y1 = axpy(M, 0.5 * grid_dt, k1v);
        const auto k2v = rhs(y1);
        const auto y2 = axpy(M, 0.5 * grid_dt, k2v);
        const auto k3v = rhs(y2);
        const auto y3 = axpy(M, grid_dt, k3v);
        const auto k4v = rhs(y3);
        for (int j = 1; j <= 4; ++j)
            for (int kk = 0; j + kk <= 4; ++kk)
                M[j][kk] += grid_dt / 6.0 *
                            (k1v[j][kk] + 2 * k2v[j][kk] + 2 * k3v[j][kk] +
                             k4v[j][kk]);
    }
    return path;
}

RateEstimate estimate_decay_rate(std::span<const double> times,
                                 std::span<const double> msq, double t_lo,
                                 double t_hi) {
    if (times.size() != msq.size())
        throw AnalysisError("estimate_decay_rate: times/msq length mismatch");
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(msq[i] > 0))
            throw AnalysisError("estimate_decay_rate: nonpositive msq in window");
        ts.push_back(times[i]);
        ys.push_back(std::log(msq[i]));
    }
    const std::size_t n = ts.size();
    if (n < 10)
        throw AnalysisError("estimate_decay_rate: window contains fewer than 10 points");

    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st += ts[i];
        sy += ys[i];
    }
    const double tbar = st / n, ybar = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (ts[i] - tbar) * (ts[i] - tbar);
        sxy += (ts[i] - tbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - ybar - slope * (ts[i] - tbar);
        ss_res += r * r;
    }
    RateEstimate est;
    est.rate = -slope;
    est.t_lo = t_lo;
    est.t_hi = t_hi;
    est.r_squared = (syy > 0) ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    est.stderr_ = (n > 2) ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
    return est;
}

double hinf_time_average(std::span<const double> times,
                         std::span<const double> msq, double T) {
    if (times.size() != msq.size() || times.size() < 2)
        throw AnalysisError("hinf_time_average: need at least two samples");
    if (times.front() > 0 || times.back() < T - 1e-12)
        throw AnalysisError("hinf_time_average: record does not cover [0, T]");
    double integral = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i - 1] >= T) break;
        const double hi = std::min(times[i], T);
        const double w = hi - times[i - 1];
        // Linear interpolation of the right endpoint when T cuts a segment.
        double y_hi = msq[i];
        if (times[i] > T) {
            const double frac = (T - times[i - 1]) / (times[i] - times[i - 1]);
            y_hi = msq[i - 1] + frac * (msq[i] - msq[i - 1]);
        }
        integral += 0.5 * (msq[i - 1] + y_hi) * w;
    }
    return integral / T;
}

HoldingRatioResult holding_ratio_check(const TrajectoryRecord& record, int p,
                                       const ConditionConstants& c, double delta) {
    if (record.hold_err_p.empty())
        throw AnalysisError("holding_ratio_check: record has no holding-error series");
    const std::vector<double>& moment =
        (p == 2) ? record.msq : record.m_p;
    if (moment.empty() || moment.size() != record.hold_err_p.size())
        throw AnalysisError("holding_ratio_check: record lacks the p-th moment series");

    const double h = h_delta_p(delta, p, c.L1, c.L2);
    const double scale = std::pow(2.0, p - 1);
    if (scale * h >= 1.0)
        throw AnalysisError(
            "holding_ratio_check: 2^{p-1} H(delta,p) >= 1; max admissible delta is " +
            std::to_string(max_delta(c, Criterion::moment, p)));

    const double floor = 1e-12 * moment.front();
    HoldingRatioResult res;
    res.bound = scale * h / (1.0 - scale * h);
    for (std::size_t i = 0; i < moment.size(); ++i) {
        if (moment[i] < floor) continue;
        res.max_ratio = std::max(res.max_ratio, record.hold_err_p[i] / moment[i]);
    }
    res.pass = res.max_ratio <= res.bound;
    return res;
}

ChaosScalingResult chaos_scaling(const LinearMeanFieldParams& params,
                                 const SimConfig& base_config,
                                 std::span<const int> sizes, int replications,
                                 int threads) {
    if (sizes.size() < 4)
        throw AnalysisError("chaos_scaling: need >= 4 sizes for fit");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw AnalysisError("chaos_scaling: sizes must be ascending");
    if (replications < 1)
        throw AnalysisError("chaos_scaling: replications must be >= 1");

    const MomentPath oracle = moment_ode_oracle(
        params, base_config.x0.at(0), base_config.delta, base_config.T,
        base_config.dt);

    ChaosScalingResult res;
    for (int n : sizes) {
        double acc = 0.0;
        for (int r = 0; r < replications; ++r) {
            SimConfig cfg = base_config;
            cfg.N = n;
            cfg.seed = rng::derive_seed(base_config.seed, static_cast<std::uint64_t>(n), r);
            const CoupledErrorRecord rec =
                run_coupled_pair(params, cfg, oracle.m1, threads);
            acc += *std::max_element(rec.sq_error.begin(), rec.sq_error.end());
        }
        res.sizes.push_back(n);
        res.errors.push_back(acc / replications);
    }

    int at_floor = 0;
    for (double e : res.errors)
        if (e <= kChaosNoiseFloor) ++at_floor;
    if (at_floor * 2 >= static_cast<int>(res.errors.size())) {
        res.degenerate = true;
        res.slope = std::numeric_limits<double>::quiet_NaN();
        return res;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(res.sizes.size());
    for (std::size_t i = 0; i < res.sizes.size(); ++i) {
        const double x = std::log(static_cast<double>(res.sizes[i]));
        const double y = std::log(std::max(res.errors[i], kChaosNoiseFloor));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return res;
}

TransferCheckResult stability_transfer_check(const LinearMeanFieldParams& params,
                                             const SimConfig& config,
                                             std::span<const int> sizes,
                                             double window_lo, double window_hi,
                                             int threads) {
    if (sizes.empty())
        throw AnalysisError("stability_transfer_check: need at least one size");

    const McKeanVlasovModel model = linear_model(params);
    const MomentPath oracle = moment_ode_oracle(params, config.x0.at(0),
                                                config.delta, config.T, config.dt);
    const RateEstimate oracle_est =
        estimate_decay_rate(oracle.times, oracle.m2, window_lo, window_hi);

    TransferCheckResult res;
    res.oracle_rate = oracle_est.rate;
    for (int n : sizes) {
        SimConfig cfg = config;
        cfg.N = n;
        const TrajectoryRecord rec = run_particle_system(model, cfg, threads);
        if (rec.status != RunStatus::ok)
            throw AnalysisError("stability_transfer_check: simulation aborted at t=" +
                                std::to_string(rec.abort_time));
        const RateEstimate est =
            estimate_decay_rate(rec.times, rec.msq, window_lo, window_hi);
        res.sizes.push_back(n);
        res.rates.push_back(est.rate);
    }
    res.stable = std::all_of(res.rates.begin(), res.rates.end(),
                             [](double r) { return r > 0; });
    if (res.sizes.size() >= 2) {
        const double r1 = res.rates[res.rates.size() - 2];
        const double r2 = res.rates.back();
        res.spread = std::abs(r1 - r2) /
                     std::max(std::abs(r1), std::abs(r2));
        res.spread_checked = true;
    }
    return res;
}

}  // namespace mvstab
