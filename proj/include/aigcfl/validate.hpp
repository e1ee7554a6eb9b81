#pragma once

#include <string>
#include <vector>

namespace aigcfl {

// One release-gate check: a behavior the library must exhibit end to end.
// Tolerances live inside the check implementations and are not configurable.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The augmentation switch reward for the reference model lands in a narrow
// window around its hand-derived value.
CheckResult check_switch_reward_window();

// Closed-form best response agrees with utility-argmax brute force on 10,000
// random (client, model, reward) draws.
CheckResult check_best_response_oracle();

// A fine reward grid never beats the candidate set: the grid minimizer sits
// within one step of a candidate and the solver's cost matches the grid floor.
CheckResult check_reward_candidate_optimality();

// The closed-form round count equals the exhaustive argmin over 1..500.
CheckResult check_iteration_count_optimality();

// The closed-form noise-weight expectation matches its Monte-Carlo estimate
// within sampling error across cohort sizes and reward bands.
CheckResult check_noise_weight_estimator(int threads = 1);

// Participation probability under uniform attributes matches the two
// closed-form band expressions to quadrature accuracy.
CheckResult check_uniform_participation_closed_form();

// Distribution-level planning: the optimal reward lands in its expected window,
// and both the reward and the information gap shrink as the pool grows.
CheckResult check_information_gap_trends();

// The full mechanism never costs more than either restricted benchmark and
// yields the highest welfare on nearly all populations.
CheckResult check_benchmark_dominance(int threads = 1);

// 100 random synthetic federations: the trained loss gap stays below the
// convergence bound at every round.
CheckResult check_convergence_bound_campaign();

// Mean server cost orders falling <= uniform <= rising attribute densities.
CheckResult check_density_shape_ordering(int threads = 1);

// All checks in release order.
std::vector<CheckResult> run_acceptance_checks(int threads = 1);

}  // namespace aigcfl
