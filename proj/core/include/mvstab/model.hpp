#pragma once

#include <functional>
#include <span>
#include <stdexcept>

#include "mvstab/measure.hpp"

namespace mvstab {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Coefficient model of the controlled distribution-dependent SDE
///   dx = (f(x, mu) + u(x(sigma_t), mu_{sigma_t})) dt + g(x, mu) dB.
/// All three maps consume the measure through its summary statistics and
/// must vanish at (0, delta_0).
struct McKeanVlasovModel {
    int d = 1;  // state dimension
    int m = 1;  // noise dimension

    using VectorField =
        std::function<void(std::span<const double> x, const MeasureSummary& mu,
                           std::span<double> out)>;

    VectorField drift;      // f: out is a d-vector
    VectorField diffusion;  // g: out is d*m, row-major
    VectorField control;    // u: out is a d-vector
};

struct LinearMeanFieldParams {
    double a = 0.0;      // state drift gain
    double b = 0.0;      // mean-field drift gain
    double gdiag = 0.0;  // multiplicative noise gain
    double k1 = 0.0;     // state feedback gain
    double k2 = 0.0;     // mean feedback gain
};

/// Scalar linear mean-field model:
///   f(x, mu) = a*x + b*mean(mu),  g(x, mu) = gdiag*x,
///   u(x, mu) = -k1*x - k2*mean(mu).
McKeanVlasovModel linear_model(const LinearMeanFieldParams& p);

struct LipschitzConstants {
    double L1 = 0.0;  // drift
    double L2 = 0.0;  // diffusion
    double L3 = 0.0;  // control
};

/// Certified Lipschitz constants for the linear model:
/// L1 = 2 max(a^2, b^2), L2 = gdiag^2, L3 = 2 max(k1^2, k2^2).
LipschitzConstants linear_lipschitz_constants(const LinearMeanFieldParams& p);

/// Checks f, g, u all vanish at (0, delta_0).
bool has_zero_equilibrium(const McKeanVlasovModel& model, double tol = 0.0);

}  // namespace mvstab
