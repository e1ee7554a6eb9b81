#include <doctest.h>

#include <cmath>
#include <limits>

#include "aigcfl/complete.hpp"

using namespace aigcfl;

namespace {

const QualityModel kModel(3.0, 2.45, 1.05, 0.8);

LearningParams image_learning() {
    LearningParams lp(0.01, 37.36, 5.48, 0.57, 25.0, 5, 1.0);
    lp.theta_gap = default_theta_gap(lp, 3.0);
    return lp;
}

Population three_clients() {
    Population pop;
    pop.emplace_back(100, 1.5, 0.05, kModel);
    pop.emplace_back(200, 2.9, 0.05, kModel);
    pop.emplace_back(50, 0.9, 0.02, kModel);
    return pop;
}

}  // namespace

TEST_CASE("cohorts track the posted reward") {
    Population pop = three_clients();

    Cohort none = cohort_at(pop, kModel, 0.01);
    CHECK(none.empty());
    CHECK(none.size() == 0);

    Cohort mid = cohort_at(pop, kModel, 0.3);
    REQUIRE(mid.local_set.size() == 2);
    CHECK(mid.local_set[0] == 0);
    CHECK(mid.local_set[1] == 2);
    CHECK(mid.aigc_set.empty());

    Cohort all = cohort_at(pop, kModel, 0.7);
    CHECK(all.local_set.empty());
    CHECK(all.aigc_set.size() == 3);
    CHECK(cohort_datasize(pop, all) == 350);
}

TEST_CASE("divergence aggregates match hand-computed values") {
    Population pop = three_clients();
    LearningParams lp = image_learning();
    Cohort mid = cohort_at(pop, kModel, 0.3);

    // (2/3)(psi/sqrt(20) + 1.5) + (1/3)(psi/sqrt(10) + 0.9)
    CHECK(gradient_error(pop, mid, kModel, lp) ==
          doctest::Approx(7.6620113459732977).epsilon(1e-12));
    // psi(sqrt(100) + sqrt(50))/(sqrt(5)*150) + 1.0 + 0.3
    CHECK(loss_bracket(pop, mid, kModel, lp) ==
          doctest::Approx(2.5724022691946598).epsilon(1e-12));

    Cohort none;
    CHECK_THROWS_AS(gradient_error(pop, none, kModel, lp), ConfigError);
    CHECK_THROWS_AS(loss_bracket(pop, none, kModel, lp), ConfigError);
    CHECK_THROWS_AS(m_loss(pop, none, kModel, lp, 10), ConfigError);
}

TEST_CASE("loss proxy contracts toward the quality penalty") {
    Population pop = three_clients();
    LearningParams lp = image_learning();
    Cohort mid = cohort_at(pop, kModel, 0.3);

    CHECK(m_loss(pop, mid, kModel, lp, 10) == doctest::Approx(0.66542856402629469).epsilon(1e-12));
    CHECK(m_loss(pop, mid, kModel, lp, 1) > m_loss(pop, mid, kModel, lp, 30));
    // Asymptote: kappa1 * bracket.
    auto lc = derive_learning_constants(lp);
    double asym = lc.kappa1 * loss_bracket(pop, mid, kModel, lp);
    CHECK(m_loss(pop, mid, kModel, lp, 400) == doctest::Approx(asym).epsilon(1e-9));
    CHECK_THROWS_AS(m_loss(pop, mid, kModel, lp, 0), ConfigError);
}

TEST_CASE("round payment discounts by contributed quality") {
    Population pop = three_clients();
    Cohort mid = cohort_at(pop, kModel, 0.3);
    // 0.3*100*(1 - 0.5) + 0.3*50*(1 - 0.3)
    CHECK(round_payment(pop, mid, kModel, 0.3) == doctest::Approx(25.5).epsilon(1e-12));
    CHECK_THROWS_AS(round_payment(pop, mid, kModel, -0.1), ConfigError);
}

TEST_CASE("server cost combines loss and payments") {
    Population pop = three_clients();
    LearningParams lp = image_learning();
    ServerParams sp(1e4, 2.0, 100.0);
    Cohort mid = cohort_at(pop, kModel, 0.3);

    CostBreakdown cb = server_cost(pop, mid, kModel, lp, sp, 10, 0.3);
    CHECK(cb.total == doctest::Approx(7164.2856402629468).epsilon(1e-12));
    CHECK(cb.total == doctest::Approx(cb.loss_term + cb.payment_term).epsilon(1e-12));
    CHECK(cb.payment_term == doctest::Approx(2.0 * 10 * 25.5).epsilon(1e-12));

    // Empty cohort: contraction toward the omega penalty, nothing paid.
    Cohort none;
    CostBreakdown cb0 = server_cost(pop, none, kModel, lp, sp, 3, 0.01);
    CHECK(cb0.m_loss == doctest::Approx(15.054962186658587).epsilon(1e-12));
    CHECK(cb0.payment_term == 0.0);
}

TEST_CASE("candidate rewards enumerate every threshold once") {
    Population pop = three_clients();
    auto cands = candidate_rewards(pop, kModel);
    REQUIRE(cands.size() == 7);
    for (std::size_t i = 1; i < cands.size(); ++i) CHECK(cands[i] > cands[i - 1]);
    CHECK(cands.front() == doctest::Approx(0.028571428571428571).epsilon(1e-12));
    CHECK(cands.back() == doctest::Approx(1.5).epsilon(1e-12));
    bool has_switch = false;
    for (double r : cands) {
        if (std::abs(r - aigc_switch_reward(kModel)) < 1e-12) has_switch = true;
    }
    CHECK(has_switch);

    // Duplicate thresholds collapse.
    Population twins;
    twins.emplace_back(80, 1.5, 0.05, kModel);
    twins.emplace_back(80, 1.5, 0.05, kModel);
    CHECK(candidate_rewards(twins, kModel).size() == 3);
    CHECK_THROWS_AS(candidate_rewards(Population{}, kModel), ConfigError);
}

TEST_CASE("round count optimization matches an exhaustive scan") {
    Population pop = three_clients();
    LearningParams lp = image_learning();
    ServerParams sp(1e4, 5.0, 100.0);
    Cohort mid = cohort_at(pop, kModel, 0.3);

    int t = optimal_iterations(pop, kModel, lp, sp, 0.3, 500);
    double best = std::numeric_limits<double>::infinity();
    for (int T = 1; T <= 500; ++T) {
        best = std::min(best, server_cost(pop, mid, kModel, lp, sp, T, 0.3).total);
    }
    CHECK(t > 1);
    CHECK(t < 500);
    CHECK(server_cost(pop, mid, kModel, lp, sp, t, 0.3).total ==
          doctest::Approx(best).epsilon(1e-15));

    // Clamping at the round budget.
    CHECK(optimal_iterations(pop, kModel, lp, sp, 0.3, 3) == 3);

    // The gap budget must exceed the asymptotic penalty.
    LearningParams tight = lp;
    tight.theta_gap = 0.1;
    CHECK_THROWS_AS(optimal_iterations(pop, kModel, tight, sp, 0.3, 500), NumericError);
    CHECK_THROWS_AS(optimal_iterations(pop, kModel, lp, sp, 0.01, 500), ConfigError);
}

TEST_CASE("complete-information optimum is the best candidate profile") {
    Population pop = three_clients();
    LearningParams lp = image_learning();
    ServerParams sp(1e4, 2.0, 100.0);

    CompleteSolution sol = best_complete_strategy(pop, kModel, lp, sp);
    double best = std::numeric_limits<double>::infinity();
    for (double r : candidate_rewards(pop, kModel)) {
        Cohort c = cohort_at(pop, kModel, r);
        if (c.empty()) continue;
        int T = optimal_iterations(pop, kModel, lp, sp, r, 10000);
        best = std::min(best, server_cost(pop, c, kModel, lp, sp, T, r).total);
    }
    CHECK(sol.cost.total == doctest::Approx(best).epsilon(1e-15));
    CHECK(sol.strategy.rounds == optimal_iterations(pop, kModel, lp, sp, sol.strategy.reward, 10000));
    CHECK(!sol.cohort.empty());

    // When the loss weight vanishes the server posts the cheapest viable
    // reward for a single round.
    ServerParams pay_only(1e-12, 2.0, 100.0);
    CompleteSolution cheap = best_complete_strategy(pop, kModel, lp, pay_only);
    CHECK(cheap.strategy.rounds == 1);
    CHECK(cheap.strategy.reward == doctest::Approx(0.028571428571428571).epsilon(1e-12));
    CHECK(cheap.cost.total == doctest::Approx(2.0).epsilon(1e-9));
}
