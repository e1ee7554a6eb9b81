#pragma once

#include <vector>

#include "aigcfl/client.hpp"
#include "aigcfl/complete.hpp"
#include "aigcfl/core.hpp"
#include "aigcfl/density.hpp"

namespace aigcfl {

// Attribute distribution of an unseen population: training cost s on
// (0, s_max], divergence lambda on (0, lambda_max].
struct AttributeDistribution {
    Density cost;
    Density quality;
};

// The cost support must end strictly below the switch reward and the quality
// support must fit under the model's divergence cap.
void check_compatible(const AttributeDistribution& dist, const QualityModel& q);

// Reward bands with distinct participation geometry:
//   Low  (r < s_max)               only cheap local-data clients join
//   Mid  (s_max <= r < switch)     every cost level can join with local data
//   High (r >= switch)             participants join with augmented data
enum class Band { Low, Mid, High };

// Participation region in the (s, lambda) plane: lambda <= line_a - line_b*s
// for s in (0, s_hi], intersected with the attribute support.
struct CaseRegion {
    Band band;
    double reward;  // posted reward, clamped to the ceiling
    double s_hi;
    double line_a;
    double line_b;
};

CaseRegion classify_case(double reward, const AttributeDistribution& dist,
                         const QualityModel& q);

// Joint mass, first lambda moment and first cost moment of the region
// {s in (0, s_hi], lambda <= a - b*s} under the attribute distribution.
struct RegionMoments {
    double p = 0.0;
    double lambda_moment = 0.0;
    double cost_moment = 0.0;
};

RegionMoments region_moments(const AttributeDistribution& dist, double a, double b, double s_hi);

double participation_probability(const CaseRegion& region, const AttributeDistribution& dist);

// Convention for the expected divergence of the recruited cohort.
// Unnormalized keeps the raw joint-mass moment; Conditional divides by the
// participation probability.
enum class MeanMode { Unnormalized, Conditional };

// Expected residual divergence entering the loss model; scaled by theta in the
// High band where participants contribute augmented data.
double expected_lambda(const CaseRegion& region, const AttributeDistribution& dist,
                       const QualityModel& q, MeanMode mode);

// Expected value of the aggregation noise weight sum(sqrt(d_k))/d(N), with an
// omega penalty weighted by the probability that nobody participates.
double expected_Z(double p, const std::vector<long long>& datasizes, const ServerParams& sp);

struct MonteCarloStats {
    double mean = 0.0;
    double std_error = 0.0;
};

// Sampling oracle for the noise weight: draws populations, applies the
// closed-form best response, and averages realized weights (omega when nobody
// joins).  Deterministic for a given seed at any thread count.
MonteCarloStats monte_carlo_EQ(double reward, const AttributeDistribution& dist,
                               const QualityModel& q, const std::vector<long long>& datasizes,
                               const ServerParams& sp, int trials, std::uint64_t seed,
                               int threads = 1);

struct ExpectedCost {
    double total = 0.0;
    double loss_term = 0.0;     // gamma1 * expected model loss
    double payment_term = 0.0;  // gamma2 * T * expected round payment
    double reward = 0.0;        // clamped posted reward
    Band band = Band::Low;
    double p = 0.0;
    double e_lambda = 0.0;
    double e_z = 0.0;
    double m3 = 0.0;            // expected recruited datasize
    double utility_rate = 0.0;  // expected client utility per unit datasize per round
};

ExpectedCost expected_cost(int T, double reward, const AttributeDistribution& dist,
                           const QualityModel& q, const LearningParams& lp,
                           const ServerParams& sp, const std::vector<long long>& datasizes,
                           MeanMode mode);

struct RewardChoice {
    double reward = 0.0;
    ExpectedCost cost;
};

// Best reward for a fixed round count: coarse grid per band plus golden-section
// refinement around the banded minima.
RewardChoice optimize_reward_given_T(int T, const AttributeDistribution& dist,
                                     const QualityModel& q, const LearningParams& lp,
                                     const ServerParams& sp,
                                     const std::vector<long long>& datasizes, MeanMode mode,
                                     int grid_points = 200);

// Upper bound on useful round counts: the ceiling of the largest closed-form
// round optimum across rewards where the gap budget exceeds the expected
// asymptotic penalty.  Errors when no reward satisfies that assumption.
int t_max(const AttributeDistribution& dist, const QualityModel& q, const LearningParams& lp,
          const ServerParams& sp, const std::vector<long long>& datasizes, MeanMode mode,
          int max_T = 10000, int grid_points = 200);

struct ExpectedSolution {
    ServerStrategy strategy;
    ExpectedCost cost;
};

// Expected-cost optimum under incomplete information: scans round counts up to
// t_max, optimizing the reward for each.
ExpectedSolution best_expected_strategy(const AttributeDistribution& dist,
                                        const QualityModel& q, const LearningParams& lp,
                                        const ServerParams& sp,
                                        const std::vector<long long>& datasizes, MeanMode mode,
                                        int max_T = 10000, int grid_points = 200);

}  // namespace aigcfl
