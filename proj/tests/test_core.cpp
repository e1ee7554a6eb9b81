#include <doctest.h>

#include <cmath>

#include "aigcfl/core.hpp"

using namespace aigcfl;

TEST_CASE("class distributions validate and normalize access") {
    ClassDistribution d({0.25, 0.75});
    CHECK(d.classes() == 2);
    CHECK(d[0] == doctest::Approx(0.25));
    CHECK(d[1] == doctest::Approx(0.75));

    ClassDistribution u = ClassDistribution::uniform(4);
    CHECK(u.classes() == 4);
    CHECK(u[2] == doctest::Approx(0.25));

    CHECK_THROWS_AS(ClassDistribution({0.5, 0.6}), ConfigError);
    CHECK_THROWS_AS(ClassDistribution({-0.1, 1.1}), ConfigError);
    CHECK_THROWS_AS(ClassDistribution({}), ConfigError);
}

TEST_CASE("distribution distance doubles the one-sided surplus") {
    ClassDistribution a({0.5, 0.5});
    ClassDistribution b({0.25, 0.75});
    CHECK(emd(a, b) == doctest::Approx(0.5));
    CHECK(emd(a, a) == doctest::Approx(0.0));
    CHECK(emd(ClassDistribution({1.0, 0.0}), ClassDistribution({0.0, 1.0})) ==
          doctest::Approx(2.0));
    CHECK_THROWS_AS(emd(a, ClassDistribution({1.0})), ConfigError);
}

TEST_CASE("synthesis plan moves a skewed distribution onto the global one") {
    ClassDistribution client({0.5, 0.5});
    ClassDistribution global({0.25, 0.75});
    SynthesisPlan plan = synthesis_plan(client, global);
    REQUIRE(plan.adjustment.size() == 2);
    CHECK(plan.adjustment[0] == doctest::Approx(-0.25));
    CHECK(plan.adjustment[1] == doctest::Approx(0.25));
    REQUIRE(plan.inject.size() == 1);
    CHECK(plan.inject[0] == 1);
    CHECK(plan.generated_fraction == doctest::Approx(0.25));
}

TEST_CASE("quality model exposes the derived ratios") {
    QualityModel q(3.0, 2.45, 1.05, 0.8);
    CHECK(q.theta() == doctest::Approx(0.2142857142857143).epsilon(1e-12));
    CHECK(q.delta() == doctest::Approx(0.16326530612244897).epsilon(1e-12));

    CHECK_THROWS_AS(QualityModel(0.0, 2.45, 1.05, 0.8), ConfigError);
    CHECK_THROWS_AS(QualityModel(3.0, 0.0, 1.05, 0.8), ConfigError);
    CHECK_THROWS_AS(QualityModel(3.0, 2.45, 0.0, 0.8), ConfigError);
    CHECK_THROWS_AS(QualityModel(3.0, 2.45, 1.05, 0.0), ConfigError);
    // Residual ratio must stay below one: g_diff < 2 g_data.
    CHECK_THROWS_AS(QualityModel(3.0, 1.0, 2.0, 0.8), ConfigError);
}

TEST_CASE("divergence maps quadratically in the distribution distance") {
    CHECK(quality_from_emd(1.8, 2.45) == doctest::Approx(4.41).epsilon(1e-12));
    CHECK(quality_from_emd(0.5, 1.75) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(quality_from_emd(0.0, 2.45) == doctest::Approx(0.0));
}

TEST_CASE("augmentation discounts divergence by the residual ratio") {
    QualityModel mnist(3.0, 2.45, 1.05, 0.8);
    CHECK(aigc_quality(3.0, mnist) == doctest::Approx(0.6428571428571429).epsilon(1e-12));
    QualityModel cifar(2.0, 1.75, 0.54, 0.8);
    CHECK(cifar.theta() == doctest::Approx(0.15428571428571428).epsilon(1e-12));
    CHECK(aigc_quality(2.0, cifar) == doctest::Approx(0.30857142857142855).epsilon(1e-12));
}

TEST_CASE("client attributes derive the synthesis fraction") {
    QualityModel q(3.0, 2.45, 1.05, 0.8);
    ClientAttributes c(100, 1.5, 0.05, q);
    CHECK(c.synthesis_fraction(q) == doctest::Approx(1.5 / (2.0 * 2.45)).epsilon(1e-12));

    // With a label distribution the fraction comes from the synthesis plan
    // against the uniform reference.
    ClassDistribution skew({0.75, 0.25});
    double lam = quality_from_emd(emd(skew, ClassDistribution::uniform(2)), q.g_data());
    ClientAttributes c2(100, lam, 0.05, q, skew);
    CHECK(c2.class_dist().has_value());
    CHECK(c2.synthesis_fraction(q) == doctest::Approx(0.25));
    // Claimed divergence above what the label skew implies is rejected.
    CHECK_THROWS_AS(ClientAttributes(100, lam + 0.1, 0.05, q, skew), ConfigError);

    CHECK_THROWS_AS(ClientAttributes(0, 1.5, 0.05, q), ConfigError);
    CHECK_THROWS_AS(ClientAttributes(100, -0.1, 0.05, q), ConfigError);
    CHECK_THROWS_AS(ClientAttributes(100, 3.5, 0.05, q), ConfigError);
    CHECK_THROWS_AS(ClientAttributes(100, 1.5, -0.05, q), ConfigError);
}

TEST_CASE("learning constants match hand-computed values") {
    LearningParams lp(0.01, 37.36, 5.48, 0.57, 25.0, 5, 1.0);
    auto lc = derive_learning_constants(lp);
    // phi = 1 - 2*mu*eta + 2*mu*rho*eta^2
    CHECK(lc.phi == doctest::Approx(0.93134656).epsilon(1e-12));
    // kappa1 = beta*((eta*rho + 1)^h - 1) / (rho*(1 - phi^h))
    CHECK(lc.kappa1 == doctest::Approx(0.19831646420072205).epsilon(1e-12));
    CHECK(std::pow(lc.phi, 50) == doctest::Approx(0.02854734609329916).epsilon(1e-10));

    double gap = default_theta_gap(lp, 3.0);
    CHECK(gap == doctest::Approx(5.9494939260216615).epsilon(1e-12));
}

TEST_CASE("learning parameters validate their ranges") {
    CHECK_THROWS_AS(LearningParams(0.01, 5.0, 6.0, 0.5, 1.0, 5, 1.0), ConfigError);
    CHECK_THROWS_AS(LearningParams(0.01, 5.0, 1.0, 0.5, 1.0, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(LearningParams(0.01, 5.0, 1.0, 0.5, -1.0, 5, 1.0), ConfigError);
    CHECK_THROWS_AS(LearningParams(0.01, 5.0, 1.0, 0.5, 1.0, 5, 0.0), ConfigError);
    CHECK_NOTHROW(LearningParams(0.01, 5.0, 1.0, 0.5, 0.0, 5, 1.0));

    // A non-contracting step size surfaces when constants are derived.
    LearningParams hot(0.2, 5.0, 1.0, 0.5, 1.0, 5, 1.0);
    CHECK_THROWS_AS(derive_learning_constants(hot), NumericError);
}

TEST_CASE("server parameters validate their ranges") {
    CHECK_NOTHROW(ServerParams(1e5, 1.0, 100.0));
    CHECK(ServerParams(1.0, 1.0, 2.0).epsilon == doctest::Approx(1e-8));
    CHECK_THROWS_AS(ServerParams(0.0, 1.0, 100.0), ConfigError);
    CHECK_THROWS_AS(ServerParams(1e5, -1.0, 100.0), ConfigError);
    // The empty-cohort penalty must dominate every populated cohort weight.
    CHECK_THROWS_AS(ServerParams(1e5, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(ServerParams(1e5, 1.0, 100.0, 0.0), ConfigError);
}
