#include "mvstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mvstab {

McKeanVlasovModel linear_model(const LinearMeanFieldParams& p) {
    McKeanVlasovModel model;
    model.d = 1;
    model.m = 1;
    model.drift = [p](std::span<const double> x, const MeasureSummary& mu,
                      std::span<double> out) {
        out[0] = p.a * x[0] + p.b * mu.mean[0];
    };
    model.diffusion = [p](std::span<const double> x, const MeasureSummary&,
                          std::span<double> out) {
        out[0] = p.gdiag * x[0];
    };
    model.control = [p](std::span<const double> x, const MeasureSummary& mu,
                        std::span<double> out) {
        out[0] = -p.k1 * x[0] - p.k2 * mu.mean[0];
    };
    return model;
}

LipschitzConstants linear_lipschitz_constants(const LinearMeanFieldParams& p) {
    // |a dx + b dm|^2 <= 2 max(a^2,b^2) (|dx|^2 + W2^2) since |dm| <= W2.
    LipschitzConstants c;
    c.L1 = 2.0 * std::max(p.a * p.a, p.b * p.b);
    c.L2 = p.gdiag * p.gdiag;
    c.L3 = 2.0 * std::max(p.k1 * p.k1, p.k2 * p.k2);
    return c;
}

bool has_zero_equilibrium(const McKeanVlasovModel& model, double tol) {
    const MeasureSummary d0 = MeasureSummary::delta_zero(model.d);
    const std::vector<double> zero(model.d, 0.0);
    std::vector<double> out(static_cast<std::size_t>(model.d) * model.m, 0.0);

    auto ok = [&](const McKeanVlasovModel::VectorField& fn, std::size_t n) {
        std::fill(out.begin(), out.end(), 1.0);
        fn(zero, d0, std::span<double>(out.data(), n));
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(out[i]) > tol) return false;
        return true;
    };
    return ok(model.drift, model.d) &&
           ok(model.diffusion, static_cast<std::size_t>(model.d) * model.m) &&
           ok(model.control, model.d);
}

}  // namespace mvstab
