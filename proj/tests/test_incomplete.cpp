#include <doctest.h>

#include <cmath>
#include <vector>

#include "aigcfl/incomplete.hpp"
#include "aigcfl/rng.hpp"

using namespace aigcfl;

namespace {

const QualityModel kModel(3.0, 2.45, 1.05, 0.8);

AttributeDistribution uniform_dist() {
    return {Density::uniform(0.1), Density::uniform(3.0)};
}

LearningParams image_learning() {
    LearningParams lp(0.01, 37.36, 5.48, 0.57, 25.0, 5, 1.0);
    lp.theta_gap = default_theta_gap(lp, 3.0);
    return lp;
}

std::vector<long long> flat_sizes(int K, long long d) {
    return std::vector<long long>(static_cast<std::size_t>(K), d);
}

}  // namespace

TEST_CASE("attribute distributions must fit the model") {
    CHECK_NOTHROW(check_compatible(uniform_dist(), kModel));
    // Cost support reaching the switch reward breaks the band geometry.
    AttributeDistribution wide{Density::uniform(0.7), Density::uniform(3.0)};
    CHECK_THROWS_AS(check_compatible(wide, kModel), ConfigError);
    AttributeDistribution tall{Density::uniform(0.1), Density::uniform(3.5)};
    CHECK_THROWS_AS(check_compatible(tall, kModel), ConfigError);
}

TEST_CASE("rewards classify into three bands") {
    AttributeDistribution dist = uniform_dist();

    CaseRegion low = classify_case(0.05, dist, kModel);
    CHECK(low.band == Band::Low);
    CHECK(low.s_hi == doctest::Approx(0.05));
    CHECK(low.line_a == doctest::Approx(3.0));
    CHECK(low.line_b == doctest::Approx(60.0));

    CaseRegion mid = classify_case(0.3, dist, kModel);
    CHECK(mid.band == Band::Mid);
    CHECK(mid.s_hi == doctest::Approx(0.1));
    CHECK(mid.line_b == doctest::Approx(10.0));

    // The boundary reward s_max belongs to the middle band.
    CHECK(classify_case(0.1, dist, kModel).band == Band::Mid);

    CaseRegion high = classify_case(0.7, dist, kModel);
    CHECK(high.band == Band::High);
    CHECK(high.line_a == doctest::Approx(3.2822966507177029).epsilon(1e-12));
    CHECK(high.line_b == doctest::Approx(4.6889952153110048).epsilon(1e-12));

    // Rewards beyond the ceiling are clamped to it.
    CaseRegion capped = classify_case(5.0, dist, kModel);
    CHECK(capped.reward == doctest::Approx(0.75064935064935068).epsilon(1e-12));
    CHECK_THROWS_AS(classify_case(0.0, dist, kModel), ConfigError);
}

TEST_CASE("participation probability matches the closed forms") {
    AttributeDistribution dist = uniform_dist();
    // Low band: r / (2 s_max).
    CHECK(participation_probability(classify_case(0.05, dist, kModel), dist) ==
          doctest::Approx(0.25).epsilon(1e-9));
    // Mid band: 1 - s_max / (2 r).
    CHECK(participation_probability(classify_case(0.1, dist, kModel), dist) ==
          doctest::Approx(0.5).epsilon(1e-9));
    CHECK(participation_probability(classify_case(0.3, dist, kModel), dist) ==
          doctest::Approx(1.0 - 0.1 / 0.6).epsilon(1e-9));
    // At the ceiling everyone participates.
    CHECK(participation_probability(classify_case(0.75064935064935068, dist, kModel), dist) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expected divergence honors mode and augmentation") {
    AttributeDistribution dist = uniform_dist();

    CaseRegion low = classify_case(0.05, dist, kModel);
    CHECK(expected_lambda(low, dist, kModel, MeanMode::Unnormalized) ==
          doctest::Approx(0.25).epsilon(1e-9));
    CHECK(expected_lambda(low, dist, kModel, MeanMode::Conditional) ==
          doctest::Approx(1.0).epsilon(1e-9));

    // At the ceiling the whole population joins with augmented data.
    CaseRegion top = classify_case(0.75064935064935068, dist, kModel);
    CHECK(expected_lambda(top, dist, kModel, MeanMode::Unnormalized) ==
          doctest::Approx(0.3214285714285714).epsilon(1e-9));
    CHECK(expected_lambda(top, dist, kModel, MeanMode::Conditional) ==
          doctest::Approx(0.3214285714285714).epsilon(1e-9));
}

TEST_CASE("expected noise weight blends the empty-cohort penalty") {
    ServerParams sp(1.0, 1.0, 100.0);
    CHECK(expected_Z(0.25, flat_sizes(20, 30), sp) ==
          doctest::Approx(0.49969537972845468).epsilon(1e-12));
    // Certain participation drops the penalty entirely.
    CHECK(expected_Z(1.0, flat_sizes(20, 30), sp) ==
          doctest::Approx(std::sqrt(30.0) / 30.0).epsilon(1e-12));
    CHECK_THROWS_AS(expected_Z(1.5, flat_sizes(20, 30), sp), ConfigError);
    CHECK_THROWS_AS(expected_Z(0.5, {}, sp), ConfigError);
    CHECK_THROWS_AS(expected_Z(0.5, {30, 0}, sp), ConfigError);
}

TEST_CASE("sampling oracle is deterministic and thread invariant") {
    AttributeDistribution dist = uniform_dist();
    ServerParams sp(1.0, 1.0, 100.0);
    // Varied datasizes keep the per-trial statistic sensitive to which subset
    // is recruited, so different seeds give different means.
    std::vector<long long> ds;
    for (int k = 0; k < 25; ++k) ds.push_back(15 + 5 * (k % 7));

    MonteCarloStats a = monte_carlo_EQ(0.09, dist, kModel, ds, sp, 2000, 99u, 1);
    MonteCarloStats b = monte_carlo_EQ(0.09, dist, kModel, ds, sp, 2000, 99u, 1);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);

    MonteCarloStats c = monte_carlo_EQ(0.09, dist, kModel, ds, sp, 2000, 99u, 3);
    CHECK(a.mean == c.mean);
    CHECK(a.std_error == c.std_error);

    MonteCarloStats d = monte_carlo_EQ(0.09, dist, kModel, ds, sp, 2000, 100u, 1);
    CHECK(a.mean != d.mean);

    // The estimator lands near the closed form.
    double p = participation_probability(classify_case(0.09, dist, kModel), dist);
    double ez = expected_Z(p, ds, sp);
    CHECK(std::abs(a.mean - ez) <= 4.0 * a.std_error + 0.02);

    CHECK_THROWS_AS(monte_carlo_EQ(0.0, dist, kModel, ds, sp, 100, 1u, 1), ConfigError);
    CHECK_THROWS_AS(monte_carlo_EQ(0.09, dist, kModel, ds, sp, 0, 1u, 1), ConfigError);
    CHECK_THROWS_AS(monte_carlo_EQ(0.09, dist, kModel, {}, sp, 100, 1u, 1), ConfigError);
}

TEST_CASE("expected cost decomposes into its published parts") {
    AttributeDistribution dist = uniform_dist();
    LearningParams lp = image_learning();
    ServerParams sp(8e4, 1.0, 100.0);
    auto ds = flat_sizes(10, 30);
    auto lc = derive_learning_constants(lp);

    ExpectedCost ec = expected_cost(10, 0.3, dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
    CHECK(ec.band == Band::Mid);
    CHECK(ec.total == doctest::Approx(ec.loss_term + ec.payment_term).epsilon(1e-12));

    CaseRegion region = classify_case(0.3, dist, kModel);
    double p = participation_probability(region, dist);
    double e_lam = expected_lambda(region, dist, kModel, MeanMode::Unnormalized);
    double e_z = expected_Z(p, ds, sp);
    CHECK(ec.p == doctest::Approx(p).epsilon(1e-12));
    CHECK(ec.e_lambda == doctest::Approx(e_lam).epsilon(1e-12));
    CHECK(ec.e_z == doctest::Approx(e_z).epsilon(1e-12));
    CHECK(ec.m3 == doctest::Approx(p * 300.0).epsilon(1e-12));

    double decay = std::pow(lc.phi, 50.0);
    double penalty = lc.kappa1 * (lp.psi / std::sqrt(5.0) * e_z + e_lam);
    CHECK(ec.loss_term ==
          doctest::Approx(8e4 * (decay * lp.theta_gap + (1.0 - decay) * penalty)).epsilon(1e-9));
    CHECK(ec.payment_term ==
          doctest::Approx(10.0 * 0.3 * ec.m3 * (1.0 - e_lam / 3.0)).epsilon(1e-12));

    // Conditional mode divides the divergence moment by the participation mass.
    ExpectedCost cond = expected_cost(10, 0.3, dist, kModel, lp, sp, ds, MeanMode::Conditional);
    CHECK(cond.e_lambda == doctest::Approx(e_lam / p).epsilon(1e-12));
    CHECK_THROWS_AS(expected_cost(0, 0.3, dist, kModel, lp, sp, ds, MeanMode::Unnormalized),
                    ConfigError);
}

TEST_CASE("reward optimization beats random probes") {
    AttributeDistribution dist = uniform_dist();
    LearningParams lp = image_learning();
    ServerParams sp(8e4, 1.0, 100.0);
    auto ds = flat_sizes(10, 30);

    RewardChoice best =
        optimize_reward_given_T(5, dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
    CHECK(best.reward > 0.0);
    CHECK(best.reward <= 0.75064935064935068 + 1e-12);

    Rng rng = make_rng(5150u);
    double ceiling = 0.75064935064935068;
    for (int i = 0; i < 60; ++i) {
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double r = ceiling * std::max(u, 1e-6);
        ExpectedCost probe =
            expected_cost(5, r, dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
        CHECK(best.cost.total <= probe.total * (1.0 + 1e-6));
    }
    CHECK_THROWS_AS(
        optimize_reward_given_T(5, dist, kModel, lp, sp, ds, MeanMode::Unnormalized, 1),
        ConfigError);
}

TEST_CASE("round horizon reflects the gap budget") {
    AttributeDistribution dist = uniform_dist();
    LearningParams lp = image_learning();
    ServerParams sp(8e4, 1.0, 100.0);
    auto ds = flat_sizes(10, 30);

    int horizon = t_max(dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
    CHECK(horizon >= 1);
    CHECK(t_max(dist, kModel, lp, sp, ds, MeanMode::Unnormalized, 3) == 3);

    LearningParams tight = lp;
    tight.theta_gap = 1e-6;
    CHECK_THROWS_AS(t_max(dist, kModel, tight, sp, ds, MeanMode::Unnormalized), NumericError);
}

TEST_CASE("expected-cost optimum is consistent across entry points") {
    AttributeDistribution dist = uniform_dist();
    LearningParams lp = image_learning();
    ServerParams sp(8e4, 1.0, 100.0);
    auto ds = flat_sizes(10, 30);

    ExpectedSolution sol =
        best_expected_strategy(dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
    int horizon = t_max(dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
    CHECK(sol.strategy.rounds >= 1);
    CHECK(sol.strategy.rounds <= horizon);

    ExpectedCost replay = expected_cost(sol.strategy.rounds, sol.strategy.reward, dist, kModel,
                                        lp, sp, ds, MeanMode::Unnormalized);
    CHECK(sol.cost.total == doctest::Approx(replay.total).epsilon(1e-12));

    for (int T = 1; T <= horizon; ++T) {
        RewardChoice choice =
            optimize_reward_given_T(T, dist, kModel, lp, sp, ds, MeanMode::Unnormalized);
        CHECK(sol.cost.total <= choice.cost.total * (1.0 + 1e-12));
    }
}
