#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mvstab/measure.hpp"
#include "mvstab/model.hpp"

using namespace mvstab;

namespace {

MeasureSummary summary_with_mean(double m) {
    MeasureSummary s = MeasureSummary::delta_zero(1);
    s.mean[0] = m;
    s.raw2 = m * m;
    return s;
}

double eval1(const McKeanVlasovModel::VectorField& fn, double x,
             const MeasureSummary& mu) {
    double out = 0.0;
    const double xin = x;
    fn(std::span<const double>(&xin, 1), mu, std::span<double>(&out, 1));
    return out;
}

}  // namespace

TEST_CASE("linear model evaluation") {
    const auto model = linear_model({2.0, 1.0, 1.0, 8.0, 3.0});
    const auto mu1 = summary_with_mean(1.0);
    CHECK(eval1(model.drift, 1.0, mu1) == 3.0);
    CHECK(eval1(model.control, 1.0, mu1) == -11.0);
    CHECK(eval1(model.diffusion, 2.5, mu1) == 2.5);
    CHECK(eval1(model.drift, 0.0, MeasureSummary::delta_zero(1)) == 0.0);
}

TEST_CASE("zero equilibrium holds for every constructed model") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> dist(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const LinearMeanFieldParams p{dist(gen), dist(gen), dist(gen), dist(gen),
                                      dist(gen)};
        CHECK(has_zero_equilibrium(linear_model(p)));
    }
}

TEST_CASE("lipschitz constants closed form") {
    auto c = linear_lipschitz_constants({2.0, 1.0, 1.0, 8.0, 3.0});
    CHECK(c.L1 == 8.0);
    CHECK(c.L2 == 1.0);
    CHECK(c.L3 == 128.0);

    c = linear_lipschitz_constants({0, 0, 0, 0, 0});
    CHECK(c.L1 == 0.0);
    CHECK(c.L2 == 0.0);
    CHECK(c.L3 == 0.0);

    c = linear_lipschitz_constants({1, 1, 1, 1, 1});
    CHECK(c.L1 == 2.0);
    CHECK(c.L2 == 1.0);
    CHECK(c.L3 == 2.0);
}

TEST_CASE("lipschitz inequalities hold on random quadruples") {
    // Samples (x, y, mu, nu) and checks the three squared-difference bounds
    // with W2 computed exactly from small ensembles.
    std::mt19937_64 gen(404);
    std::normal_distribution<double> dist(0.0, 2.0);
    const LinearMeanFieldParams p{2.0, 1.0, 1.0, 8.0, 3.0};
    const auto model = linear_model(p);
    const auto c = linear_lipschitz_constants(p);

    for (int trial = 0; trial < 10000; ++trial) {
        const double x = dist(gen);
        const double y = dist(gen);
        std::vector<double> mu_s(8), nu_s(8);
        for (double& v : mu_s) v = dist(gen);
        for (double& v : nu_s) v = dist(gen);
        const auto mu = EmpiricalMeasure::from_scalars(mu_s);
        const auto nu = EmpiricalMeasure::from_scalars(nu_s);
        const double w2 = wasserstein2_1d(mu, nu);
        const double rhs_base = (x - y) * (x - y) + w2 * w2;
        const auto smu = summarize(mu);
        const auto snu = summarize(nu);

        const double df = eval1(model.drift, x, smu) - eval1(model.drift, y, snu);
        const double dg =
            eval1(model.diffusion, x, smu) - eval1(model.diffusion, y, snu);
        const double du = eval1(model.control, x, smu) - eval1(model.control, y, snu);
        CHECK(df * df <= c.L1 * rhs_base * (1 + 1e-12) + 1e-12);
        CHECK(dg * dg <= c.L2 * rhs_base * (1 + 1e-12) + 1e-12);
        CHECK(du * du <= c.L3 * rhs_base * (1 + 1e-12) + 1e-12);
    }
}
