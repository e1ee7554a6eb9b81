#pragma once

#include <optional>
#include <vector>

#include "aigcfl/errors.hpp"

namespace aigcfl {

// Discrete label distribution over a finite class space.
class ClassDistribution {
public:
    explicit ClassDistribution(std::vector<double> probs);

    std::size_t classes() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }

    static ClassDistribution uniform(std::size_t classes);

private:
    std::vector<double> p_;
};

// Total variation style distance between label distributions, in [0, 2].
double emd(const ClassDistribution& client, const ClassDistribution& global);

// Per-class synthetic data plan that moves a client's label distribution onto
// the global one.  generated_fraction is the share of the local datasize that
// has to be synthesized, equal to half the distribution distance.
struct SynthesisPlan {
    std::vector<double> adjustment;       // global minus client, per class
    std::vector<std::size_t> inject;      // classes that receive synthetic samples
    double generated_fraction = 0.0;
};

SynthesisPlan synthesis_plan(const ClassDistribution& client, const ClassDistribution& global);

// Data-quality model: how label skew translates into gradient divergence, how
// far synthesis can repair it, and what synthesis costs.
class QualityModel {
public:
    QualityModel(double lambda_max, double g_data, double g_diff, double s_ai);

    double lambda_max() const { return lambda_max_; }
    double g_data() const { return g_data_; }
    double g_diff() const { return g_diff_; }
    double s_ai() const { return s_ai_; }

    // Residual divergence ratio after synthesis, in (0, 1).
    double theta() const { return g_diff_ / (2.0 * g_data_); }
    // Synthesis cost per unit of divergence.
    double delta() const { return s_ai_ / (2.0 * g_data_); }

private:
    double lambda_max_, g_data_, g_diff_, s_ai_;
};

// Divergence induced by a label distribution at the given distance.
double quality_from_emd(double emd_value, double g_data);

// Divergence left after synthetic augmentation of a client at divergence lambda_k.
double aigc_quality(double lambda_k, const QualityModel& q);

class ClientAttributes {
public:
    ClientAttributes(long long datasize, double lambda, double unit_cost,
                     const QualityModel& q,
                     std::optional<ClassDistribution> class_dist = std::nullopt);

    long long datasize() const { return datasize_; }
    double lambda() const { return lambda_; }
    double unit_cost() const { return unit_cost_; }
    const std::optional<ClassDistribution>& class_dist() const { return class_dist_; }

    // Fraction of the local datasize that synthesis would add.  Derived from the
    // label distribution when present, otherwise from the divergence value.
    double synthesis_fraction(const QualityModel& q) const;

private:
    long long datasize_;
    double lambda_;
    double unit_cost_;
    std::optional<ClassDistribution> class_dist_;
};

using Population = std::vector<ClientAttributes>;

struct LearningParams {
    LearningParams(double eta, double rho, double mu, double beta, double psi,
                   int h, double theta_gap);

    double eta;        // local learning rate
    double rho;        // smoothness constant
    double mu;         // strong convexity constant
    double beta;       // loss Lipschitz constant
    double psi;        // gradient noise scale, >= 0
    int h;             // local steps per global round
    double theta_gap;  // initial optimality gap budget
};

struct LearningConstants {
    double phi;     // per-round contraction factor, in (0, 1)
    double kappa1;  // divergence amplification factor
};

LearningConstants derive_learning_constants(const LearningParams& lp);

// Default gap budget: ten times the asymptotic penalty of a worst-quality cohort,
// which keeps iteration optimization well posed for every reachable cohort.
double default_theta_gap(const LearningParams& lp, double lambda_max);

struct ServerParams {
    ServerParams(double gamma1, double gamma2, double omega, double epsilon = 1e-8);

    double gamma1;   // weight on model loss
    double gamma2;   // weight on total payment
    double omega;    // penalty level for an empty cohort
    double epsilon;  // numerical floor for probability-weighted quantities
};

}  // namespace aigcfl
