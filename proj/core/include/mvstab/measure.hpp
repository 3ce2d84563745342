#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvstab {

struct MeasureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Empirical measure (1/N) sum of point masses at N samples in R^d,
/// all weights equal. Samples stored row-major, N rows by d columns.
struct EmpiricalMeasure {
    int N = 0;
    int d = 0;
    std::vector<double> samples;

    EmpiricalMeasure() = default;
    EmpiricalMeasure(int n, int dim, std::vector<double> data);

    std::span<const double> row(int i) const {
        return {samples.data() + static_cast<std::size_t>(i) * d,
                static_cast<std::size_t>(d)};
    }

    static EmpiricalMeasure from_scalars(std::span<const double> values);
    static EmpiricalMeasure zeros(int n, int dim);
};

/// The measure statistics the coefficient models consume: first moment
/// and raw second moment of the ensemble.
struct MeasureSummary {
    std::vector<double> mean;
    double raw2 = 0.0;
    int N = 0;

    static MeasureSummary delta_zero(int d) { return {std::vector<double>(d, 0.0), 0.0, 1}; }
};

MeasureSummary summarize(const EmpiricalMeasure& m);

/// Arithmetic mean of the rows, summed in ascending sample order.
std::vector<double> mean(const EmpiricalMeasure& m);

/// (1/N) sum |x_i|^p, p >= 2.
double raw_moment(const EmpiricalMeasure& m, int p);

/// Exact W2 for d=1, equal N, via order statistics.
double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// Exact W2 via minimum-cost perfect matching on squared Euclidean costs.
/// Equal N required, N <= 512.
double wasserstein2_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

inline constexpr int kExactW2Guard = 512;

/// Sliced-W2 estimate: RMS over random unit directions of the 1D W2 of the
/// projections. Deterministic for a fixed seed. Lower-bounds W2.
double wasserstein2_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                           int num_projections, std::uint64_t seed);

/// sqrt((1/N) sum |a_i - b_i|^2) on index-aligned samples; upper bound for W2.
double coupling_w2_bound(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

}  // namespace mvstab
