#include "mvstab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvstab/rng.hpp"

namespace mvstab {

EmpiricalMeasure::EmpiricalMeasure(int n, int dim, std::vector<double> data)
    : N(n), d(dim), samples(std::move(data)) {
    if (N < 1 || d < 1)
        throw MeasureError("EmpiricalMeasure: N and d must be positive");
    if (samples.size() != static_cast<std::size_t>(N) * d)
        throw MeasureError("EmpiricalMeasure: sample buffer has wrong size");
    for (double v : samples)
        if (!std::isfinite(v))
            throw MeasureError("EmpiricalMeasure: non-finite sample");
}

EmpiricalMeasure EmpiricalMeasure::from_scalars(std::span<const double> values) {
    return EmpiricalMeasure(static_cast<int>(values.size()), 1,
                            std::vector<double>(values.begin(), values.end()));
}

EmpiricalMeasure EmpiricalMeasure::zeros(int n, int dim) {
    return EmpiricalMeasure(n, dim, std::vector<double>(static_cast<std::size_t>(n) * dim, 0.0));
}

std::vector<double> mean(const EmpiricalMeasure& m) {
    std::vector<double> out(m.d, 0.0);
    for (int i = 0; i < m.N; ++i) {
        auto r = m.row(i);
        for (int j = 0; j < m.d; ++j) out[j] += r[j];
    }
    for (int j = 0; j < m.d; ++j) out[j] /= m.N;
    return out;
}

MeasureSummary summarize(const EmpiricalMeasure& m) {
    MeasureSummary s;
    s.N = m.N;
    s.mean.assign(m.d, 0.0);
    s.raw2 = 0.0;
    for (int i = 0; i < m.N; ++i) {
        auto r = m.row(i);
        double nsq = 0.0;
        for (int j = 0; j < m.d; ++j) {
            s.mean[j] += r[j];
            nsq += r[j] * r[j];
        }
        s.raw2 += nsq;
    }
    for (int j = 0; j < m.d; ++j) s.mean[j] /= m.N;
    s.raw2 /= m.N;
    return s;
}

double raw_moment(const EmpiricalMeasure& m, int p) {
    if (p < 2) throw MeasureError("raw_moment: p must be >= 2");
    double acc = 0.0;
    for (int i = 0; i < m.N; ++i) {
        auto r = m.row(i);
        double nsq = 0.0;
        for (int j = 0; j < m.d; ++j) nsq += r[j] * r[j];
        acc += (p == 2) ? nsq : std::pow(nsq, 0.5 * p);
    }
    return acc / m.N;
}

double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.d != 1 || b.d != 1)
        throw MeasureError("wasserstein2_1d: requires d=1");
    if (a.N != b.N)
        throw MeasureError("wasserstein2_1d: requires equal sample counts");
    std::vector<double> xs(a.samples), ys(b.samples);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double acc = 0.0;
    for (int i = 0; i < a.N; ++i) {
        const double diff = xs[i] - ys[i];
        acc += diff * diff;
    }
    return std::sqrt(acc / a.N);
}

namespace {

double sq_dist(const EmpiricalMeasure& a, int i, const EmpiricalMeasure& b, int j) {
    auto ra = a.row(i);
    auto rb = b.row(j);
    double acc = 0.0;
    for (int k = 0; k < a.d; ++k) {
        const double diff = ra[k] - rb[k];
        acc += diff * diff;
    }
    return acc;
}

// Shortest-augmenting-path assignment with dual potentials, O(N^3).
// Returns the minimal total cost of a perfect matching.
double assignment_min_cost(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    const int n = a.N;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = sq_dist(a, i0 - 1, b, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j)
        total += sq_dist(a, match[j] - 1, b, j - 1);
    return total;
}

}  // namespace

double wasserstein2_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.d != b.d)
        throw MeasureError("wasserstein2_exact: dimension mismatch");
    if (a.N != b.N)
        throw MeasureError("wasserstein2_exact: requires equal sample counts");
    if (a.N > kExactW2Guard)
        throw MeasureError("wasserstein2_exact: N exceeds guard (" +
                           std::to_string(kExactW2Guard) +
                           "); use wasserstein2_sliced");
    return std::sqrt(assignment_min_cost(a, b) / a.N);
}

double wasserstein2_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                           int num_projections, std::uint64_t seed) {
    if (a.d != b.d)
        throw MeasureError("wasserstein2_sliced: dimension mismatch");
    if (a.N != b.N)
        throw MeasureError("wasserstein2_sliced: requires equal sample counts");
    if (num_projections < 1)
        throw MeasureError("wasserstein2_sliced: num_projections must be >= 1");

    const int n = a.N;
    const int d = a.d;
    std::vector<double> dir(d), pa(n), pb(n);
    double acc = 0.0;
    for (int k = 0; k < num_projections; ++k) {
        // Uniform direction on the sphere via a normalized Gaussian vector.
        double norm = 0.0;
        do {
            norm = 0.0;
            for (int j = 0; j < d; ++j) {
                dir[j] = rng::standard_normal(seed, 0x51cedULL, k, j);
                norm += dir[j] * dir[j];
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        for (int j = 0; j < d; ++j) dir[j] /= norm;

        for (int i = 0; i < n; ++i) {
            auto ra = a.row(i);
            auto rb = b.row(i);
            double sa = 0.0, sb = 0.0;
            for (int j = 0; j < d; ++j) {
                sa += dir[j] * ra[j];
                sb += dir[j] * rb[j];
            }
            pa[i] = sa;
            pb[i] = sb;
        }
        std::sort(pa.begin(), pa.end());
        std::sort(pb.begin(), pb.end());
        double w2sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double diff = pa[i] - pb[i];
            w2sq += diff * diff;
        }
        acc += w2sq / n;
    }
    return std::sqrt(acc / num_projections);
}

double coupling_w2_bound(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.d != b.d || a.N != b.N)
        throw MeasureError("coupling_w2_bound: shape mismatch");
    double acc = 0.0;
    for (int i = 0; i < a.N; ++i)
        acc += sq_dist(a, i, b, i);
    return std::sqrt(acc / a.N);
}

}  // namespace mvstab
