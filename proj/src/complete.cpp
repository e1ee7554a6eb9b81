#include "aigcfl/complete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aigcfl {

Cohort cohort_at(const Population& pop, const QualityModel& q, double reward) {
    Cohort c;
    for (std::size_t k = 0; k < pop.size(); ++k) {
        switch (best_response(pop[k], q, reward)) {
            case Strategy::Local:
                c.local_set.push_back(k);
                break;
            case Strategy::Aigc:
                c.aigc_set.push_back(k);
                break;
            case Strategy::OptOut:
                break;
        }
    }
    return c;
}

long long cohort_datasize(const Population& pop, const Cohort& cohort) {
    long long d = 0;
    for (std::size_t k : cohort.local_set) d += pop[k].datasize();
    for (std::size_t k : cohort.aigc_set) d += pop[k].datasize();
    return d;
}

double gradient_error(const Population& pop, const Cohort& cohort, const QualityModel& q,
                      const LearningParams& lp) {
    if (cohort.empty()) throw ConfigError("gradient error undefined for an empty cohort");
    double dn = static_cast<double>(cohort_datasize(pop, cohort));
    double acc = 0.0;
    auto add = [&](std::size_t k, double lam) {
        double d = static_cast<double>(pop[k].datasize());
        double batch = d / static_cast<double>(lp.h);
        acc += (d / dn) * (lp.psi / std::sqrt(batch) + lam);
    };
    for (std::size_t k : cohort.local_set) add(k, pop[k].lambda());
    for (std::size_t k : cohort.aigc_set) add(k, aigc_quality(pop[k].lambda(), q));
    return acc;
}

double loss_bracket(const Population& pop, const Cohort& cohort, const QualityModel& q,
                    const LearningParams& lp) {
    if (cohort.empty()) throw ConfigError("loss bracket undefined for an empty cohort");
    double dn = static_cast<double>(cohort_datasize(pop, cohort));
    double sqrt_h = std::sqrt(static_cast<double>(lp.h));
    double acc = 0.0;
    auto add = [&](std::size_t k, double lam) {
        double d = static_cast<double>(pop[k].datasize());
        acc += lp.psi * std::sqrt(d) / (sqrt_h * dn) + (d / dn) * lam;
    };
    for (std::size_t k : cohort.local_set) add(k, pop[k].lambda());
    for (std::size_t k : cohort.aigc_set) add(k, aigc_quality(pop[k].lambda(), q));
    return acc;
}

namespace {

double decay_after(const LearningParams& lp, int T) {
    if (T < 1) throw ConfigError("round count must be at least 1");
    return std::pow(derive_learning_constants(lp).phi, static_cast<double>(lp.h) * T);
}

}  // namespace

double m_loss(const Population& pop, const Cohort& cohort, const QualityModel& q,
              const LearningParams& lp, int T) {
    auto lc = derive_learning_constants(lp);
    double decay = decay_after(lp, T);
    double bracket = loss_bracket(pop, cohort, q, lp);
    return decay * lp.theta_gap + (1.0 - decay) * lc.kappa1 * bracket;
}

double round_payment(const Population& pop, const Cohort& cohort, const QualityModel& q,
                     double reward) {
    if (!(reward >= 0.0)) throw ConfigError("reward must be non-negative");
    double lam = q.lambda_max();
    double pay = 0.0;
    for (std::size_t k : cohort.local_set) {
        pay += reward * static_cast<double>(pop[k].datasize()) * (1.0 - pop[k].lambda() / lam);
    }
    for (std::size_t k : cohort.aigc_set) {
        pay += reward * static_cast<double>(pop[k].datasize()) *
               (1.0 - aigc_quality(pop[k].lambda(), q) / lam);
    }
    return pay;
}

CostBreakdown server_cost(const Population& pop, const Cohort& cohort, const QualityModel& q,
                          const LearningParams& lp, const ServerParams& sp, int T,
                          double reward) {
    CostBreakdown out;
    if (cohort.empty()) {
        auto lc = derive_learning_constants(lp);
        double decay = decay_after(lp, T);
        out.m_loss = decay * lp.theta_gap + (1.0 - decay) * lc.kappa1 * sp.omega;
        out.round_payment = 0.0;
    } else {
        out.m_loss = m_loss(pop, cohort, q, lp, T);
        out.round_payment = round_payment(pop, cohort, q, reward);
    }
    out.loss_term = sp.gamma1 * out.m_loss;
    out.payment_term = sp.gamma2 * static_cast<double>(T) * out.round_payment;
    out.total = out.loss_term + out.payment_term;
    return out;
}

std::vector<double> candidate_rewards(const Population& pop, const QualityModel& q) {
    if (pop.empty()) throw ConfigError("population must be non-empty");
    std::vector<double> cands;
    cands.reserve(2 * pop.size() + 1);
    for (const auto& c : pop) {
        Indicators z = indicators(c, q);
        if (std::isfinite(z.zeta1)) cands.push_back(z.zeta1);
        cands.push_back(z.zeta2);
    }
    cands.push_back(aigc_switch_reward(q));
    std::sort(cands.begin(), cands.end());
    std::vector<double> out;
    for (double v : cands) {
        if (out.empty() || v - out.back() > 1e-12 * std::max(1.0, std::abs(v))) {
            out.push_back(v);
        }
    }
    return out;
}

int optimal_iterations(const Population& pop, const QualityModel& q, const LearningParams& lp,
                       const ServerParams& sp, double reward, int max_T) {
    if (max_T < 1) throw ConfigError("max_T must be at least 1");
    Cohort cohort = cohort_at(pop, q, reward);
    if (cohort.empty()) throw ConfigError("no client participates at the given reward");
    auto lc = derive_learning_constants(lp);
    double bracket = loss_bracket(pop, cohort, q, lp);
    double slack = lp.theta_gap - lc.kappa1 * bracket;
    if (!(slack > 0.0)) {
        throw NumericError(
            "gap budget too small: theta_gap must exceed the asymptotic quality penalty");
    }
    double pay = round_payment(pop, cohort, q, reward);
    double log_phih = static_cast<double>(lp.h) * std::log(lc.phi);
    double t_cont;
    if (pay <= 0.0) {
        t_cont = static_cast<double>(max_T);
    } else {
        double arg = sp.gamma2 * pay / (sp.gamma1 * (-log_phih) * slack);
        t_cont = std::log(arg) / log_phih;
    }
    t_cont = std::clamp(t_cont, 1.0, static_cast<double>(max_T));
    int lo = std::max(1, static_cast<int>(std::floor(t_cont)));
    int hi = std::min(max_T, static_cast<int>(std::ceil(t_cont)));
    if (lo == hi) return lo;
    double cost_lo = server_cost(pop, cohort, q, lp, sp, lo, reward).total;
    double cost_hi = server_cost(pop, cohort, q, lp, sp, hi, reward).total;
    return cost_lo <= cost_hi ? lo : hi;
}

CompleteSolution best_complete_strategy(const Population& pop, const QualityModel& q,
                                        const LearningParams& lp, const ServerParams& sp,
                                        int max_T) {
    CompleteSolution best;
    best.cost.total = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double r : candidate_rewards(pop, q)) {
        Cohort cohort = cohort_at(pop, q, r);
        if (cohort.empty()) continue;
        int T = optimal_iterations(pop, q, lp, sp, r, max_T);
        CostBreakdown cost = server_cost(pop, cohort, q, lp, sp, T, r);
        if (cost.total < best.cost.total) {
            best = {{T, r}, cost, std::move(cohort)};
            found = true;
        }
    }
    if (!found) throw NumericError("no reward candidate induces a non-empty cohort");
    return best;
}

}  // namespace aigcfl
