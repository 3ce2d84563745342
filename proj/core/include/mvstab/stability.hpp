#pragma once

#include <optional>
#include <stdexcept>

namespace mvstab {

struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Constants feeding the stability certificates. decay_coeff is the
/// effective quadratic decay coefficient gamma1*c1 of the Lyapunov
/// inequality; gamma2 is the H-infinity offset (0 for strict stability).
struct ConditionConstants {
    double L1 = 0.0;
    double L2 = 0.0;
    double L3 = 0.0;
    double lambda1 = 0.5;
    double lambda2 = 0.5;
    double decay_coeff = 0.0;  // gamma1 * c1
    double gamma2 = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    int p = 2;

    void validate() const;
};

enum class Criterion { hinf, asymptotic, moment };

struct StabilityReport {
    double delta = 0.0;
    std::optional<double> theta;      // absent if 8*L3*delta^2 >= 1
    std::optional<double> lambda4;    // absent with theta
    std::optional<double> K;          // absent if H(delta) >= 1/2 or theta absent
    std::optional<double> alpha_max;  // absent unless lambda4 > 0 and K finite
    double h_delta = 0.0;
    double h_delta_p = 0.0;
    double delta_max_hinf = 0.0;
    double delta_max_asymptotic = 0.0;
    double delta_max_moment = 0.0;
    bool feasible_hinf = false;
    bool feasible_asymptotic = false;
    bool feasible_moment = false;
    bool feasible_exponential = false;
};

/// Burkholder-Davis-Gundy constant c_p = (p^{p+1} / (2 (p-1)^{p-1}))^{p/2}.
double bdg_constant(int p);

/// Holding-error coefficient
/// H(delta,p) = (3^{p-1} d^2 2^{L1+p/2} + 3^{p-1} c_p d^2 2^{L2+p/2}
///              + 3^{p-1} d^2 2^{L2+p/2})
///              * exp(3^{p-1} d 2^{L1+p/2} + 3^{p-1} d c_p 2^{L2+p/2}).
double h_delta_p(double delta, int p, double L1, double L2);

/// H(delta) = (12 d^2 L1 + 6 d^2 L3 + 12 d L2) exp((12 d L1 + 12 L2) d).
double h_delta(double delta, double L1, double L2, double L3);

/// Minimal admissible theta = (1/lambda1 + 1/lambda2) L3 / (1 - 8 L3 delta^2).
/// Requires 8 L3 delta^2 < 1.
double theta_min(double delta, double lambda1, double lambda2, double L3);

/// lambda4 = decay_coeff - 8 L1 theta d^2 - 8 L3 theta d^2 - 2 L2 theta d.
double lambda4(double theta, double delta, const ConditionConstants& c);

/// K = 8 theta d^2 L3 H(d)/(1 - 2 H(d)) + 4 theta d^2 L1 + 8 theta d^2 L3
///     + 2 theta d L2. Requires H(delta) < 1/2.
double k_const(double theta, double delta, const ConditionConstants& c);

/// Largest alpha with alpha*K*delta*e^{alpha delta} + alpha*c2 - lambda4 < 0,
/// found by bisection to relative tolerance 1e-10. Empty if no certificate
/// exists at this delta (lambda4 <= 0 or preconditions fail).
std::optional<double> alpha_max(const ConditionConstants& c, double delta);

/// Supremum of delta satisfying the criterion's smallness conditions
/// (theta = theta_min substituted where theta appears). Returns +infinity
/// when the criterion holds for every delta.
double max_delta(const ConditionConstants& c, Criterion criterion, int p = 2);

/// tau(N) = C N^{-1/2} (d<4), C N^{-1/2} ln N (d=4), C N^{-2/d} (d>4).
double tau_rate(int N, int d, double C);

/// Aggregates every constant and feasibility flag at the given gap.
StabilityReport certify(const ConditionConstants& c, double delta);

}  // namespace mvstab
