#include "mvstab/stability.hpp"

#include <cmath>
#include <limits>

namespace mvstab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void ConditionConstants::validate() const {
    if (L1 < 0 || L2 < 0 || L3 < 0)
        throw StabilityError("ConditionConstants: Lipschitz constants must be >= 0");
    if (lambda1 <= 0 || lambda2 <= 0)
        throw StabilityError("ConditionConstants: lambda1, lambda2 must be > 0");
    if (decay_coeff <= 0)
        throw StabilityError("ConditionConstants: decay_coeff must be > 0");
    if (gamma2 < 0)
        throw StabilityError("ConditionConstants: gamma2 must be >= 0");
    if (c1 <= 0 || c2 < c1)
        throw StabilityError("ConditionConstants: need 0 < c1 <= c2");
    if (p < 2) throw StabilityError("ConditionConstants: p must be >= 2");
}

double bdg_constant(int p) {
    if (p < 2) throw StabilityError("bdg_constant: p must be >= 2");
    const double pd = p;
    return std::pow(std::pow(pd, pd + 1.0) / (2.0 * std::pow(pd - 1.0, pd - 1.0)),
                    pd / 2.0);
}

double h_delta_p(double delta, int p, double L1, double L2) {
    if (delta < 0) throw StabilityError("h_delta_p: delta must be >= 0");
    const double cp = bdg_constant(p);
    const double three = std::pow(3.0, p - 1.0);
    const double pow1 = std::pow(2.0, L1 + 0.5 * p);
    const double pow2 = std::pow(2.0, L2 + 0.5 * p);
    const double coeff =
        three * delta * delta * pow1 + three * cp * delta * delta * pow2 +
        three * delta * delta * pow2;
    const double expo = three * delta * pow1 + three * delta * cp * pow2;
    return coeff * std::exp(expo);
}

double h_delta(double delta, double L1, double L2, double L3) {
    if (delta < 0) throw StabilityError("h_delta: delta must be >= 0");
    const double coeff =
        12.0 * delta * delta * L1 + 6.0 * delta * delta * L3 + 12.0 * delta * L2;
    return coeff * std::exp((12.0 * delta * L1 + 12.0 * L2) * delta);
}

double theta_min(double delta, double lambda1, double lambda2, double L3) {
    const double denom = 1.0 - 8.0 * L3 * delta * delta;
    if (denom <= 0)
        throw StabilityError("theta_min: gap infeasible, 8*L3*delta^2 >= 1");
    return (1.0 / lambda1 + 1.0 / lambda2) * L3 / denom;
}

double lambda4(double theta, double delta, const ConditionConstants& c) {
    return c.decay_coeff - 8.0 * c.L1 * theta * delta * delta -
           8.0 * c.L3 * theta * delta * delta - 2.0 * c.L2 * theta * delta;
}

double k_const(double theta, double delta, const ConditionConstants& c) {
    const double h = h_delta(delta, c.L1, c.L2, c.L3);
    if (h >= 0.5)
        throw StabilityError("k_const: gap infeasible, H(delta) >= 1/2");
    return 8.0 * theta * delta * delta * c.L3 * h / (1.0 - 2.0 * h) +
           4.0 * theta * delta * delta * c.L1 +
           8.0 * theta * delta * delta * c.L3 + 2.0 * theta * delta * c.L2;
}

std::optional<double> alpha_max(const ConditionConstants& c, double delta) {
    double theta, l4, K;
    try {
        theta = theta_min(delta, c.lambda1, c.lambda2, c.L3);
        l4 = lambda4(theta, delta, c);
        if (l4 <= 0) return std::nullopt;
        K = k_const(theta, delta, c);
    } catch (const StabilityError&) {
        return std::nullopt;
    }
    if (K == 0.0) return l4 / c.c2;  // closed form: alpha*c2 - lambda4 = 0

    auto phi = [&](double alpha) {
        return alpha * K * delta * std::exp(alpha * delta) + alpha * c.c2 - l4;
    };
    // phi is strictly increasing, phi(0) = -lambda4 < 0, phi(l4/c2) > 0.
    double lo = 0.0, hi = l4 / c.c2;
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < 0.0 ? lo : hi) = mid;
    }
    return lo;
}

namespace {

bool criterion_feasible(const ConditionConstants& c, Criterion crit, int p,
                        double delta) {
    switch (crit) {
        case Criterion::hinf: {
            if (c.L3 == 0.0) return true;
            if (8.0 * c.L3 * delta * delta >= 1.0) return false;
            const double theta = theta_min(delta, c.lambda1, c.lambda2, c.L3);
            return lambda4(theta, delta, c) >= 0.0;
        }
        case Criterion::asymptotic:
            return h_delta(delta, c.L1, c.L2, c.L3) < 0.5;
        case Criterion::moment:
            return h_delta_p(delta, p, c.L1, c.L2) < std::pow(2.0, -p);
    }
    return false;
}

}  // namespace

double max_delta(const ConditionConstants& c, Criterion criterion, int p) {
    c.validate();
    auto feasible = [&](double delta) {
        return criterion_feasible(c, criterion, p, delta);
    };
    if (!feasible(1e-300))
        throw StabilityError("max_delta: criterion infeasible as delta -> 0+");

    // Find an infeasible upper bracket by doubling; give up at the sentinel.
    double hi = 1e-6;
    while (feasible(hi)) {
        hi *= 2.0;
        if (hi > 1e12) return kInf;
    }
    double lo = hi / 2.0;

    // Assert monotone feasibility on a log grid below the bracket.
    bool seen_infeasible = false;
    for (int i = 0; i <= 256; ++i) {
        const double delta = hi * std::pow(2.0, (i - 256) / 8.0);
        const bool f = feasible(delta);
        if (!f) seen_infeasible = true;
        if (f && seen_infeasible)
            throw StabilityError("max_delta: feasibility not monotone in delta");
    }

    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double tau_rate(int N, int d, double C) {
    if (N < 2) throw StabilityError("tau_rate: N must be >= 2");
    if (d < 1) throw StabilityError("tau_rate: d must be >= 1");
    if (C <= 0) throw StabilityError("tau_rate: C must be > 0");
    const double n = N;
    if (d < 4) return C / std::sqrt(n);
    if (d == 4) return C * std::log(n) / std::sqrt(n);
    return C * std::pow(n, -2.0 / d);
}

StabilityReport certify(const ConditionConstants& c, double delta) {
    c.validate();
    StabilityReport r;
    r.delta = delta;
    r.h_delta = h_delta(delta, c.L1, c.L2, c.L3);
    r.h_delta_p = h_delta_p(delta, c.p, c.L1, c.L2);
    r.delta_max_hinf = max_delta(c, Criterion::hinf);
    r.delta_max_asymptotic = max_delta(c, Criterion::asymptotic);
    r.delta_max_moment = max_delta(c, Criterion::moment, c.p);

    if (c.L3 == 0.0 || 8.0 * c.L3 * delta * delta < 1.0) {
        r.theta = (c.L3 == 0.0)
                      ? 0.0
                      : theta_min(delta, c.lambda1, c.lambda2, c.L3);
        r.lambda4 = lambda4(*r.theta, delta, c);
        r.feasible_hinf = *r.lambda4 >= 0.0;
        if (r.h_delta < 0.5) r.K = k_const(*r.theta, delta, c);
    }
    r.feasible_asymptotic = r.h_delta < 0.5;
    r.feasible_moment = r.h_delta_p < std::pow(2.0, -c.p);
    r.alpha_max = alpha_max(c, delta);
    r.feasible_exponential = r.alpha_max.has_value();
    return r;
}

}  // namespace mvstab
