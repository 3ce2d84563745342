#include <doctest.h>

#include <cmath>
#include <limits>

#include "mvstab/stability.hpp"

using namespace mvstab;

namespace {

ConditionConstants example_constants() {
    ConditionConstants c;
    c.L1 = 8.0;
    c.L2 = 1.0;
    c.L3 = 128.0;
    c.lambda1 = 0.5;
    c.lambda2 = 0.5;
    c.decay_coeff = 3.5;
    c.c1 = 1.0;
    c.c2 = 2.0;
    c.p = 2;
    return c;
}

ConditionConstants zero_constants() {
    ConditionConstants c;
    c.lambda1 = c.lambda2 = 0.5;
    c.decay_coeff = 3.5;
    c.c1 = 1.0;
    c.c2 = 2.0;
    return c;
}

}  // namespace

TEST_CASE("bdg constant") {
    CHECK(bdg_constant(2) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(bdg_constant(4) ==
          doctest::Approx(std::pow(1024.0 / 54.0, 2.0)).epsilon(1e-13));
    CHECK(bdg_constant(2) < bdg_constant(4));
    CHECK(bdg_constant(4) < bdg_constant(6));
    CHECK_THROWS_AS(bdg_constant(1), StabilityError);
}

TEST_CASE("holding-error coefficient H(delta, p)") {
    CHECK(h_delta_p(0.0, 2, 3.0, 5.0) == 0.0);
    // With L1 = L2 = 0, p = 2 the formula collapses to 36 d^2 e^{30 d}.
    const double d = 0.01;
    CHECK(h_delta_p(d, 2, 0.0, 0.0) ==
          doctest::Approx(36.0 * d * d * std::exp(30.0 * d)).epsilon(1e-13));
    CHECK(h_delta_p(0.01, 2, 0.0, 0.0) == doctest::Approx(0.004860).epsilon(1e-3));

    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double cur = h_delta_p(i * 1e-3, 2, 8.0, 1.0);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("asymptotic-stability coefficient H(delta)") {
    CHECK(h_delta(0.0, 8.0, 1.0, 128.0) == 0.0);
    CHECK(h_delta(0.5, 0.0, 0.0, 0.0) == 0.0);
    // Independent hand evaluation for the worked-example constants.
    const double d = 1e-3;
    const double expected = (12 * d * d * 8 + 6 * d * d * 128 + 12 * d * 1) *
                            std::exp((12 * d * 8 + 12 * 1) * d);
    CHECK(h_delta(d, 8.0, 1.0, 128.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.01302).epsilon(1e-3));

    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double cur = h_delta(i * 1e-3, 8.0, 1.0, 128.0);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("theta_min") {
    CHECK(theta_min(0.1, 0.5, 0.5, 0.0) == 0.0);
    CHECK(theta_min(1e-3, 0.5, 0.5, 128.0) ==
          doctest::Approx(512.0 / (1.0 - 1.024e-3)).epsilon(1e-14));
    // Diverges as delta approaches the feasibility boundary.
    const double dmax = std::sqrt(1.0 / (8.0 * 128.0));
    CHECK(theta_min(dmax * (1 - 1e-3), 0.5, 0.5, 128.0) >
          100.0 * theta_min(dmax * 0.5, 0.5, 0.5, 128.0));
    CHECK_THROWS_AS(theta_min(dmax, 0.5, 0.5, 128.0), StabilityError);
}

TEST_CASE("lambda4") {
    const auto c = example_constants();
    CHECK(lambda4(0.0, 0.123, c) == 3.5);

    const double d = 1e-3;
    const double theta = theta_min(d, c.lambda1, c.lambda2, c.L3);
    const double expected =
        3.5 - 8 * 8 * theta * d * d - 8 * 128 * theta * d * d - 2 * 1 * theta * d;
    CHECK(lambda4(theta, d, c) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(1.92).epsilon(5e-3));

    const double d2 = 0.02;
    CHECK(lambda4(theta_min(d2, c.lambda1, c.lambda2, c.L3), d2, c) < 0.0);
}

TEST_CASE("K constant") {
    const auto c = example_constants();
    CHECK(k_const(0.0, 1e-3, c) == 0.0);
    CHECK(k_const(100.0, 0.0, c) == 0.0);

    const double d = 1e-3;
    const double theta = theta_min(d, c.lambda1, c.lambda2, c.L3);
    const double h = h_delta(d, c.L1, c.L2, c.L3);
    const double expected = 8 * theta * d * d * 128 * h / (1 - 2 * h) +
                            4 * theta * d * d * 8 + 8 * theta * d * d * 128 +
                            2 * theta * d * 1;
    CHECK(k_const(theta, d, c) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected > 0.0);

    // H(delta) >= 1/2 is an infeasible gap.
    CHECK_THROWS_AS(k_const(1.0, 0.03, c), StabilityError);
}

TEST_CASE("alpha_max") {
    // K = 0: closed form lambda4 / c2.
    auto c = zero_constants();
    c.decay_coeff = 1.0;
    c.c2 = 1.0;
    c.c1 = 1.0;
    const auto a0 = alpha_max(c, 0.1);
    REQUIRE(a0.has_value());
    CHECK(*a0 == doctest::Approx(1.0).epsilon(1e-12));

    // Worked example at delta = 1e-3: certificate exists and brackets the root.
    const auto ce = example_constants();
    const double d = 1e-3;
    const auto a = alpha_max(ce, d);
    REQUIRE(a.has_value());
    CHECK(*a > 0.0);
    const double theta = theta_min(d, ce.lambda1, ce.lambda2, ce.L3);
    const double l4 = lambda4(theta, d, ce);
    const double K = k_const(theta, d, ce);
    auto phi = [&](double alpha) {
        return alpha * K * d * std::exp(alpha * d) + alpha * ce.c2 - l4;
    };
    CHECK(phi(*a) < 0.0);
    CHECK(phi(*a * (1 + 1e-6)) > 0.0);

    // No certificate when lambda4 <= 0.
    CHECK_FALSE(alpha_max(ce, 0.02).has_value());
    CHECK_FALSE(alpha_max(ce, 0.05).has_value());
}

TEST_CASE("max_delta") {
    const auto ce = example_constants();
    const double d_hinf = max_delta(ce, Criterion::hinf);
    CHECK(d_hinf > 1e-3);
    CHECK(d_hinf < 0.02);
    // Boundary residual: lambda4 vanishes at the returned gap.
    const double l4_at =
        lambda4(theta_min(d_hinf, ce.lambda1, ce.lambda2, ce.L3), d_hinf, ce);
    CHECK(std::abs(l4_at) < 1e-9 * ce.decay_coeff);

    const double d_asym = max_delta(ce, Criterion::asymptotic);
    CHECK(std::abs(h_delta(d_asym, ce.L1, ce.L2, ce.L3) - 0.5) < 1e-9);

    const double d_mom = max_delta(ce, Criterion::moment, 2);
    CHECK(std::abs(2.0 * h_delta_p(d_mom, 2, ce.L1, ce.L2) - 0.5) < 1e-9);

    // All-zero Lipschitz constants: criteria hold for every gap.
    const auto cz = zero_constants();
    CHECK(max_delta(cz, Criterion::asymptotic) ==
          std::numeric_limits<double>::infinity());
    CHECK(max_delta(cz, Criterion::hinf) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("tau_rate") {
    CHECK(tau_rate(100, 1, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
    const int n4 = static_cast<int>(std::round(std::exp(2.0)));  // ln N ~ 2
    CHECK(tau_rate(n4, 4, 1.0) ==
          doctest::Approx(std::log(static_cast<double>(n4)) / std::sqrt(n4))
              .epsilon(1e-12));
    CHECK(tau_rate(256, 8, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_THROWS_AS(tau_rate(1, 1, 1.0), StabilityError);
}

TEST_CASE("certify") {
    // All-zero Lipschitz constants: everything feasible, closed forms.
    const auto cz = zero_constants();
    const auto rz = certify(cz, 0.01);
    CHECK(rz.feasible_hinf);
    CHECK(rz.feasible_asymptotic);
    CHECK(rz.feasible_moment);
    CHECK(rz.feasible_exponential);
    REQUIRE(rz.lambda4.has_value());
    CHECK(*rz.lambda4 == 3.5);
    REQUIRE(rz.alpha_max.has_value());
    CHECK(*rz.alpha_max == doctest::Approx(3.5 / 2.0).epsilon(1e-12));

    // Worked example at delta = 1e-3: feasible everywhere.
    const auto ce = example_constants();
    const auto r1 = certify(ce, 1e-3);
    CHECK(r1.feasible_hinf);
    CHECK(r1.feasible_asymptotic);
    CHECK(r1.feasible_moment);
    CHECK(r1.feasible_exponential);

    // delta = 0.05 exceeds sqrt(1/(8*128)) = 0.03125: hinf infeasible,
    // reported as data rather than an error.
    const auto r2 = certify(ce, 0.05);
    CHECK_FALSE(r2.feasible_hinf);
    CHECK_FALSE(r2.theta.has_value());
    CHECK_FALSE(r2.alpha_max.has_value());
    CHECK(r2.delta_max_hinf < 0.03125);

    // Purity: identical inputs give identical reports.
    const auto r3 = certify(ce, 1e-3);
    CHECK(r1.h_delta == r3.h_delta);
    CHECK(*r1.alpha_max == *r3.alpha_max);
}

TEST_CASE("constants validation") {
    auto c = example_constants();
    c.lambda1 = 0.0;
    CHECK_THROWS_AS(c.validate(), StabilityError);
    c = example_constants();
    c.c2 = 0.5;  // below c1
    CHECK_THROWS_AS(c.validate(), StabilityError);
    c = example_constants();
    c.p = 1;
    CHECK_THROWS_AS(c.validate(), StabilityError);
}
