#include "aigcfl/flsim.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aigcfl/rng.hpp"

namespace aigcfl {

std::vector<double> Federation::weights() const {
    double total = 0.0;
    for (const auto& c : clients) total += static_cast<double>(c.datasize);
    std::vector<double> w;
    w.reserve(clients.size());
    for (const auto& c : clients) w.push_back(static_cast<double>(c.datasize) / total);
    return w;
}

double Federation::loss_gap(const Eigen::VectorXd& w) const {
    Eigen::VectorXd e = w - weighted_center;
    return 0.5 * e.dot(curvature * e);
}

double Federation::divergence_term(const LearningParams& lp) const {
    auto nu = weights();
    double acc = 0.0;
    for (std::size_t k = 0; k < clients.size(); ++k) {
        double batch = static_cast<double>(clients[k].datasize) / static_cast<double>(lp.h);
        acc += nu[k] * (lp.psi / std::sqrt(batch) + clients[k].lambda);
    }
    return acc;
}

namespace {

Eigen::VectorXd gaussian_vector(int dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    return v;
}

Eigen::VectorXd random_unit(int dim, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXd v = gaussian_vector(dim, rng);
        double n = v.norm();
        if (n > 1e-12) return v / n;
    }
    throw NumericError("failed to draw a random direction");
}

}  // namespace

Federation build_federation(int dimension, const std::vector<double>& target_lambdas,
                            const std::vector<long long>& datasizes, const LearningParams& lp,
                            std::uint64_t seed) {
    if (dimension < 1) throw ConfigError("dimension must be at least 1");
    if (target_lambdas.empty() || target_lambdas.size() != datasizes.size()) {
        throw ConfigError("target and datasize lists must be non-empty and equal length");
    }
    for (double t : target_lambdas) {
        if (!(t >= 0.0)) throw ConfigError("divergence targets must be non-negative");
    }
    for (long long d : datasizes) {
        if (d < 1) throw ConfigError("datasizes must be positive integers");
    }

    std::size_t K = target_lambdas.size();
    Rng rng = make_rng(seed, 0);

    Federation fed;
    // Random orthogonal basis with eigenvalues spread across [mu, rho].
    Eigen::MatrixXd raw(dimension, dimension);
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < dimension; ++i) {
            for (int j = 0; j < dimension; ++j) raw(i, j) = normal(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd eigs(dimension);
    for (int i = 0; i < dimension; ++i) {
        eigs(i) = dimension == 1
                      ? lp.mu
                      : lp.mu + (lp.rho - lp.mu) * static_cast<double>(i) /
                                    static_cast<double>(dimension - 1);
    }
    fed.curvature = Q * eigs.asDiagonal() * Q.transpose();
    fed.curvature = ((fed.curvature + fed.curvature.transpose()) / 2.0).eval();

    double total_d = 0.0;
    for (long long d : datasizes) total_d += static_cast<double>(d);
    std::vector<double> nu;
    for (long long d : datasizes) nu.push_back(static_cast<double>(d) / total_d);

    double max_target = 0.0;
    for (double t : target_lambdas) max_target = std::max(max_target, t);

    std::vector<Eigen::VectorXd> offsets(K, Eigen::VectorXd::Zero(dimension));
    if (max_target > 0.0) {
        bool converged = false;
        for (int restart = 0; restart < 5 && !converged; ++restart) {
            for (std::size_t k = 0; k < K; ++k) {
                if (target_lambdas[k] == 0.0) {
                    offsets[k].setZero();
                    continue;
                }
                Eigen::VectorXd dir = random_unit(dimension, rng);
                offsets[k] = dir * (target_lambdas[k] / (fed.curvature * dir).norm());
            }
            for (int iter = 0; iter < 2000; ++iter) {
                Eigen::VectorXd mean = Eigen::VectorXd::Zero(dimension);
                for (std::size_t k = 0; k < K; ++k) mean += nu[k] * offsets[k];
                for (std::size_t k = 0; k < K; ++k) offsets[k] -= mean;
                double worst = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    double norm = (fed.curvature * offsets[k]).norm();
                    worst = std::max(worst, std::abs(norm - target_lambdas[k]));
                    if (target_lambdas[k] == 0.0) {
                        offsets[k].setZero();
                    } else if (norm > 1e-14) {
                        offsets[k] *= target_lambdas[k] / norm;
                    } else {
                        offsets[k] = random_unit(dimension, rng) * 1e-6;
                    }
                }
                if (worst <= 1e-11 * std::max(1.0, max_target)) {
                    Eigen::VectorXd m = Eigen::VectorXd::Zero(dimension);
                    for (std::size_t k = 0; k < K; ++k) m += nu[k] * offsets[k];
                    for (std::size_t k = 0; k < K; ++k) offsets[k] -= m;
                    converged = true;
                    break;
                }
            }
        }
        if (!converged) {
            throw ConfigError("infeasible divergence targets: no center layout matches them");
        }
    }

    Eigen::VectorXd base = random_unit(dimension, rng);
    fed.clients.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        fed.clients[k].center = base + offsets[k];
        fed.clients[k].datasize = datasizes[k];
    }
    fed.weighted_center = Eigen::VectorXd::Zero(dimension);
    for (std::size_t k = 0; k < K; ++k) fed.weighted_center += nu[k] * fed.clients[k].center;
    for (std::size_t k = 0; k < K; ++k) {
        fed.clients[k].lambda =
            (fed.curvature * (fed.weighted_center - fed.clients[k].center)).norm();
    }
    fed.theta_gap0 = fed.loss_gap(Eigen::VectorXd::Zero(dimension));
    return fed;
}

TrainingTrace run_rounds(const Federation& fed, const LearningParams& lp, int T,
                         std::uint64_t seed) {
    if (T < 1) throw ConfigError("round count must be at least 1");
    if (fed.clients.empty()) throw ConfigError("federation must have clients");
    auto lc = derive_learning_constants(lp);
    auto nu = fed.weights();
    int dim = static_cast<int>(fed.weighted_center.size());

    TrainingTrace trace;
    trace.theta_gap = fed.theta_gap0;
    trace.divergence_term = fed.divergence_term(lp);

    auto bound_at = [&](int t) {
        double decay = std::pow(lc.phi, static_cast<double>(lp.h) * t);
        return decay * trace.theta_gap + (1.0 - decay) * lc.kappa1 * trace.divergence_term;
    };

    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    trace.points.push_back({0, fed.loss_gap(w), bound_at(0), 0.0});
    trace.points[0].margin = trace.points[0].bound - trace.points[0].gap;

    for (int t = 1; t <= T; ++t) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
        Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
        for (std::size_t k = 0; k < fed.clients.size(); ++k) {
            const auto& client = fed.clients[k];
            double batch = static_cast<double>(client.datasize) / static_cast<double>(lp.h);
            double noise_norm = lp.psi / std::sqrt(batch);
            Eigen::VectorXd x = w;
            for (int step = 0; step < lp.h; ++step) {
                Eigen::VectorXd grad = fed.curvature * (x - client.center);
                if (noise_norm > 0.0) grad += noise_norm * random_unit(dim, rng);
                x -= lp.eta * grad;
            }
            next += nu[k] * x;
        }
        w = next;
        double gap = fed.loss_gap(w);
        if (fed.theta_gap0 > 0.0 && gap > 1e3 * fed.theta_gap0) {
            throw NumericError("training diverged: loss gap exceeded 1000x the initial gap");
        }
        double bound = bound_at(t);
        trace.points.push_back({t, gap, bound, bound - gap});
    }
    return trace;
}

BoundCheck bound_check(const TrainingTrace& trace, double tol) {
    BoundCheck out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& pt : trace.points) {
        if (pt.margin < out.worst_margin) {
            out.worst_margin = pt.margin;
            out.worst_round = pt.round;
        }
    }
    out.ok = out.worst_margin >= -tol;
    return out;
}

}  // namespace aigcfl
