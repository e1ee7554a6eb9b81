#include "aigcfl/core.hpp"

#include <cmath>
#include <string>

namespace aigcfl {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

ClassDistribution::ClassDistribution(std::vector<double> probs) : p_(std::move(probs)) {
    require(!p_.empty(), "class distribution must have at least one class");
    double sum = 0.0;
    for (double v : p_) {
        require(v >= 0.0, "class probabilities must be non-negative");
        sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "class probabilities must sum to 1 (got " +
                                             std::to_string(sum) + ")");
}

ClassDistribution ClassDistribution::uniform(std::size_t classes) {
    require(classes > 0, "class distribution must have at least one class");
    return ClassDistribution(std::vector<double>(classes, 1.0 / static_cast<double>(classes)));
}

double emd(const ClassDistribution& client, const ClassDistribution& global) {
    require(client.classes() == global.classes(),
            "distributions must share the class space");
    double d = 0.0;
    for (std::size_t i = 0; i < client.classes(); ++i) d += std::abs(client[i] - global[i]);
    return d;
}

SynthesisPlan synthesis_plan(const ClassDistribution& client, const ClassDistribution& global) {
    require(client.classes() == global.classes(),
            "distributions must share the class space");
    SynthesisPlan plan;
    plan.adjustment.resize(client.classes());
    for (std::size_t i = 0; i < client.classes(); ++i) {
        plan.adjustment[i] = global[i] - client[i];
        if (plan.adjustment[i] > 0.0) {
            plan.inject.push_back(i);
            plan.generated_fraction += plan.adjustment[i];
        }
    }
    return plan;
}

QualityModel::QualityModel(double lambda_max, double g_data, double g_diff, double s_ai)
    : lambda_max_(lambda_max), g_data_(g_data), g_diff_(g_diff), s_ai_(s_ai) {
    require(lambda_max > 0.0, "lambda_max must be positive");
    require(g_data > 0.0, "g_data must be positive");
    require(g_diff > 0.0, "g_diff must be positive");
    require(s_ai > 0.0, "s_ai must be positive");
    require(g_diff < 2.0 * g_data,
            "g_diff must be below 2*g_data so synthesis strictly improves quality");
}

double quality_from_emd(double emd_value, double g_data) {
    require(emd_value >= 0.0 && emd_value <= 2.0, "distribution distance must lie in [0, 2]");
    require(g_data > 0.0, "g_data must be positive");
    return emd_value * g_data;
}

double aigc_quality(double lambda_k, const QualityModel& q) {
    require(lambda_k >= 0.0, "divergence must be non-negative");
    return q.theta() * lambda_k;
}

ClientAttributes::ClientAttributes(long long datasize, double lambda, double unit_cost,
                                   const QualityModel& q,
                                   std::optional<ClassDistribution> class_dist)
    : datasize_(datasize), lambda_(lambda), unit_cost_(unit_cost),
      class_dist_(std::move(class_dist)) {
    require(datasize >= 1, "datasize must be a positive integer");
    require(lambda > 0.0 && lambda <= q.lambda_max(),
            "client divergence must lie in (0, lambda_max]");
    require(unit_cost > 0.0, "unit training cost must be positive");
    if (class_dist_) {
        double e = emd(*class_dist_, ClassDistribution::uniform(class_dist_->classes()));
        require(lambda <= e * q.g_data() + 1e-9,
                "client divergence exceeds the level implied by its label distribution");
    }
}

double ClientAttributes::synthesis_fraction(const QualityModel& q) const {
    if (class_dist_) {
        return synthesis_plan(*class_dist_, ClassDistribution::uniform(class_dist_->classes()))
            .generated_fraction;
    }
    return lambda_ / (2.0 * q.g_data());
}

LearningParams::LearningParams(double eta_, double rho_, double mu_, double beta_,
                               double psi_, int h_, double theta_gap_)
    : eta(eta_), rho(rho_), mu(mu_), beta(beta_), psi(psi_), h(h_), theta_gap(theta_gap_) {
    require(eta > 0.0, "eta must be positive");
    require(rho > 0.0, "rho must be positive");
    require(mu > 0.0 && mu <= rho, "mu must lie in (0, rho]");
    require(beta > 0.0, "beta must be positive");
    require(psi >= 0.0, "psi must be non-negative");
    require(h >= 1, "h must be a positive integer");
    require(theta_gap > 0.0, "theta_gap must be positive");
}

LearningConstants derive_learning_constants(const LearningParams& lp) {
    if (!(lp.eta < 1.0 / lp.rho)) {
        throw NumericError("learning rate too large: eta must be below 1/rho");
    }
    double phi = 1.0 - 2.0 * lp.mu * lp.eta + 2.0 * lp.mu * lp.rho * lp.eta * lp.eta;
    if (!(phi > 0.0 && phi < 1.0)) {
        throw NumericError("contraction factor out of (0, 1): phi = " + std::to_string(phi));
    }
    double phih = std::pow(phi, lp.h);
    double kappa1 =
        lp.beta * (std::pow(lp.eta * lp.rho + 1.0, lp.h) - 1.0) / (lp.rho * (1.0 - phih));
    return {phi, kappa1};
}

double default_theta_gap(const LearningParams& lp, double lambda_max) {
    return 10.0 * derive_learning_constants(lp).kappa1 * lambda_max;
}

ServerParams::ServerParams(double gamma1_, double gamma2_, double omega_, double epsilon_)
    : gamma1(gamma1_), gamma2(gamma2_), omega(omega_), epsilon(epsilon_) {
    require(gamma1 > 0.0, "gamma1 must be positive");
    require(gamma2 > 0.0, "gamma2 must be positive");
    // sum(sqrt(d)) / sum(d) <= 1 for any population of integer datasizes, so the
    // empty-cohort penalty must exceed 1 to dominate every populated cohort.
    require(omega > 1.0, "omega must exceed 1");
    require(epsilon > 0.0 && epsilon < 1e-2, "epsilon must be a small positive number");
}

}  // namespace aigcfl
