#pragma once

#include "aigcfl/client.hpp"
#include "aigcfl/core.hpp"

namespace aigcfl {

// Participation outcome at a posted reward: indices into the population of the
// clients contributing raw local data and of those contributing augmented data.
struct Cohort {
    std::vector<std::size_t> local_set;
    std::vector<std::size_t> aigc_set;

    bool empty() const { return local_set.empty() && aigc_set.empty(); }
    std::size_t size() const { return local_set.size() + aigc_set.size(); }
};

Cohort cohort_at(const Population& pop, const QualityModel& q, double reward);

long long cohort_datasize(const Population& pop, const Cohort& cohort);

// Weighted divergence of the aggregated gradient: datasize-weighted mean of the
// per-client noise level psi/sqrt(B_k) plus residual data divergence, with
// B_k = d_k / h.
double gradient_error(const Population& pop, const Cohort& cohort, const QualityModel& q,
                      const LearningParams& lp);

// Asymptotic term of the loss model below.  Uses the noise weighting
// psi*sqrt(d_k)/(sqrt(h)*d(N)); this is the quantity iteration optimization
// must be consistent with.
double loss_bracket(const Population& pop, const Cohort& cohort, const QualityModel& q,
                    const LearningParams& lp);

// Model loss proxy after T global rounds: contraction of the initial gap plus
// the cohort quality penalty.
double m_loss(const Population& pop, const Cohort& cohort, const QualityModel& q,
              const LearningParams& lp, int T);

// Reward paid out per global round at the posted reward, quality discounted.
double round_payment(const Population& pop, const Cohort& cohort, const QualityModel& q,
                     double reward);

struct CostBreakdown {
    double total = 0.0;
    double loss_term = 0.0;     // gamma1 * m_loss
    double payment_term = 0.0;  // gamma2 * T * round_payment
    double m_loss = 0.0;
    double round_payment = 0.0;
};

// An empty cohort leaves the server with the un-contracted gap plus the omega
// penalty in place of a quality term, and nothing to pay.
CostBreakdown server_cost(const Population& pop, const Cohort& cohort, const QualityModel& q,
                          const LearningParams& lp, const ServerParams& sp, int T,
                          double reward);

// Candidate optimal rewards: every client threshold plus the shared switch
// reward, deduplicated and ascending.  The optimum over all rewards is always
// attained on this set.
std::vector<double> candidate_rewards(const Population& pop, const QualityModel& q);

// Cost-minimizing round count for a fixed reward, from the closed-form
// continuous minimizer rounded to the better neighbor.
int optimal_iterations(const Population& pop, const QualityModel& q, const LearningParams& lp,
                       const ServerParams& sp, double reward, int max_T = 10000);

struct ServerStrategy {
    int rounds = 1;
    double reward = 0.0;
};

struct CompleteSolution {
    ServerStrategy strategy;
    CostBreakdown cost;
    Cohort cohort;
};

// Full-information optimum: scans candidate rewards, pairs each with its best
// round count, returns the cheapest profile.
CompleteSolution best_complete_strategy(const Population& pop, const QualityModel& q,
                                        const LearningParams& lp, const ServerParams& sp,
                                        int max_T = 10000);

}  // namespace aigcfl
