#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "aigcfl/core.hpp"

namespace aigcfl {

// One federated client with quadratic loss 0.5*(w - center)' A (w - center).
struct QuadraticClient {
    Eigen::VectorXd center;
    long long datasize = 1;
    double lambda = 0.0;  // measured gradient divergence at the weighted center
};

struct Federation {
    Eigen::MatrixXd curvature;  // shared SPD matrix with spectrum inside [mu, rho]
    std::vector<QuadraticClient> clients;
    Eigen::VectorXd weighted_center;  // datasize-weighted mean of client centers
    double theta_gap0 = 0.0;          // exact loss gap of the zero initial model

    std::vector<double> weights() const;
    double loss_gap(const Eigen::VectorXd& w) const;
    // Datasize-weighted divergence plus aggregation-noise level entering the
    // convergence bound.
    double divergence_term(const LearningParams& lp) const;
};

// Builds a federation whose measured per-client divergences match the targets
// exactly (up to solver tolerance).  Targets of zero are always feasible; a
// single client requires target zero.  Raises ConfigError when the targets
// cannot coexist with a datasize-weighted mean center.
Federation build_federation(int dimension, const std::vector<double>& target_lambdas,
                            const std::vector<long long>& datasizes, const LearningParams& lp,
                            std::uint64_t seed);

struct TracePoint {
    int round = 0;
    double gap = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - gap
};

struct TrainingTrace {
    std::vector<TracePoint> points;  // rounds 0..T
    double theta_gap = 0.0;
    double divergence_term = 0.0;
};

// h local SGD steps per client and round with bounded direction noise of norm
// psi/sqrt(B_k), followed by datasize-weighted aggregation.  The recorded bound
// uses the exactly measured initial gap.
TrainingTrace run_rounds(const Federation& fed, const LearningParams& lp, int T,
                         std::uint64_t seed);

struct BoundCheck {
    bool ok = true;
    double worst_margin = 0.0;
    int worst_round = 0;
};

BoundCheck bound_check(const TrainingTrace& trace, double tol = 1e-9);

}  // namespace aigcfl
