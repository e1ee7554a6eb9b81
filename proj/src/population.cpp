#include "aigcfl/population.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "aigcfl/density.hpp"

namespace aigcfl {

std::string to_string(MechanismKind m) {
    switch (m) {
        case MechanismKind::IMFL:
            return "IMFL";
        case MechanismKind::NAIGC:
            return "NAIGC";
        case MechanismKind::NDQ:
            return "NDQ";
    }
    throw ConfigError("unknown mechanism kind");
}

std::string to_string(InfoMode i) {
    return i == InfoMode::Complete ? "complete" : "incomplete";
}

std::string to_string(SweepSpec::Var v) {
    switch (v) {
        case SweepSpec::Var::K:
            return "K";
        case SweepSpec::Var::Gamma:
            return "gamma";
        case SweepSpec::Var::SAi:
            return "s_ai";
    }
    throw ConfigError("unknown sweep variable");
}

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

MechanismKind mechanism_from_string(const std::string& s) {
    std::string t = lower(s);
    if (t == "imfl") return MechanismKind::IMFL;
    if (t == "naigc") return MechanismKind::NAIGC;
    if (t == "ndq") return MechanismKind::NDQ;
    throw ConfigError("unknown mechanism: " + s + " (expected IMFL, NAIGC or NDQ)");
}

InfoMode info_from_string(const std::string& s) {
    std::string t = lower(s);
    if (t == "complete") return InfoMode::Complete;
    if (t == "incomplete") return InfoMode::Incomplete;
    throw ConfigError("unknown information mode: " + s + " (expected complete or incomplete)");
}

SweepSpec::Var sweep_var_from_string(const std::string& s) {
    std::string t = lower(s);
    if (t == "k") return SweepSpec::Var::K;
    if (t == "gamma" || t == "gamma1") return SweepSpec::Var::Gamma;
    if (t == "s_ai" || t == "sai") return SweepSpec::Var::SAi;
    throw ConfigError("unknown sweep variable: " + s + " (expected K, gamma or s_ai)");
}

PopulationSpec::PopulationSpec(int K_, long long datasize_min_, long long datasize_max_,
                               AttributeDistribution dist_)
    : K(K_), datasize_min(datasize_min_), datasize_max(datasize_max_), dist(std::move(dist_)) {
    if (K < 1) throw ConfigError("client count must be at least 1");
    if (datasize_min < 1) throw ConfigError("datasize minimum must be at least 1");
    if (datasize_min > datasize_max) {
        throw ConfigError("datasize range must satisfy min <= max");
    }
}

ScenarioConfig::ScenarioConfig(PopulationSpec population_, QualityModel quality_,
                               LearningParams learning_, ServerParams server_)
    : population(std::move(population_)),
      quality(quality_),
      learning(learning_),
      server(server_) {
    if (!(population.dist.quality.max() <= quality.lambda_max() * (1.0 + 1e-12))) {
        throw ConfigError("divergence support exceeds lambda_max");
    }
}

Population sample_population(const PopulationSpec& spec, const QualityModel& q,
                             std::uint64_t seed) {
    Rng rng = make_rng(seed);
    // Explicit modulo draw instead of uniform_int_distribution: the stream must
    // not depend on the standard library implementation.
    std::uint64_t span =
        static_cast<std::uint64_t>(spec.datasize_max - spec.datasize_min) + 1ULL;
    Population pop;
    pop.reserve(static_cast<std::size_t>(spec.K));
    for (int k = 0; k < spec.K; ++k) {
        long long d = spec.datasize_min + static_cast<long long>(rng() % span);
        double s = spec.dist.cost.sample(rng);
        double lam = spec.dist.quality.sample(rng);
        pop.emplace_back(d, lam, s, q);
    }
    return pop;
}

double social_welfare(double theta_gap, double gamma1, double cost_total,
                      double total_client_utility) {
    return gamma1 * theta_gap - cost_total + total_client_utility;
}

namespace {

// Closed-form continuous round optimum for a fixed asymptotic bracket and
// per-round payment, rounded to the cheaper integer neighbor.
int rounds_for(double bracket, double pay, const LearningParams& lp, const ServerParams& sp,
               int max_T) {
    if (max_T < 1) throw ConfigError("max_T must be at least 1");
    LearningConstants lc = derive_learning_constants(lp);
    double slack = lp.theta_gap - lc.kappa1 * bracket;
    if (!(slack > 0.0)) {
        throw NumericError(
            "gap budget too small: theta_gap must exceed the asymptotic quality penalty");
    }
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
    auto cost_at = [&](int T) {
        double decay = std::exp(log_phih * static_cast<double>(T));
        return sp.gamma1 * (decay * lp.theta_gap + (1.0 - decay) * lc.kappa1 * bracket) +
               sp.gamma2 * static_cast<double>(T) * pay;
    };
    return cost_at(lo) <= cost_at(hi) ? lo : hi;
}

std::vector<double> dedup_sorted(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (double v : vals) {
        if (out.empty() || v - out.back() > 1e-12 * std::max(1.0, std::abs(v))) {
            out.push_back(v);
        }
    }
    return out;
}

// Per-round client utilities at a posted reward under each mechanism's payment
// and behavior rules.
std::vector<double> per_round_utilities(const Population& pop, MechanismKind mech,
                                        const QualityModel& q, double reward) {
    std::vector<double> out;
    out.reserve(pop.size());
    for (const auto& c : pop) {
        double u = 0.0;
        switch (mech) {
            case MechanismKind::IMFL:
                u = utility(c, q, reward, best_response(c, q, reward));
                break;
            case MechanismKind::NAIGC:
                if (indicators(c, q).zeta1 <= reward) u = utility(c, q, reward, Strategy::Local);
                break;
            case MechanismKind::NDQ:
                if (c.unit_cost() <= reward) {
                    u = static_cast<double>(c.datasize()) * (reward - c.unit_cost());
                }
                break;
        }
        out.push_back(u);
    }
    return out;
}

}  // namespace

RunResult solve_complete(const Population& pop, MechanismKind mech, const QualityModel& q,
                         const LearningParams& lp, const ServerParams& sp, int max_T) {
    if (pop.empty()) throw ConfigError("population must be non-empty");
    RunResult out;
    out.mechanism = mech;
    out.info = InfoMode::Complete;
    out.K = static_cast<int>(pop.size());

    int T = 1;
    double r_o = 0.0;
    Cohort cohort;
    CostBreakdown cost;

    if (mech == MechanismKind::IMFL) {
        CompleteSolution sol = best_complete_strategy(pop, q, lp, sp, max_T);
        T = sol.strategy.rounds;
        r_o = sol.strategy.reward;
        cohort = std::move(sol.cohort);
        cost = sol.cost;
    } else {
        bool ndq = mech == MechanismKind::NDQ;
        auto threshold = [&](const ClientAttributes& c) {
            return ndq ? c.unit_cost() : indicators(c, q).zeta1;
        };
        std::vector<double> cands;
        for (const auto& c : pop) {
            double thr = threshold(c);
            if (std::isfinite(thr)) cands.push_back(thr);
        }
        if (cands.empty()) throw NumericError("no reward candidate induces a non-empty cohort");
        cands = dedup_sorted(std::move(cands));

        double best_total = std::numeric_limits<double>::infinity();
        bool found = false;
        for (double r : cands) {
            Cohort c;
            for (std::size_t k = 0; k < pop.size(); ++k) {
                if (threshold(pop[k]) <= r) c.local_set.push_back(k);
            }
            if (c.empty()) continue;
            double bracket = loss_bracket(pop, c, q, lp);
            double pay = ndq ? r * static_cast<double>(cohort_datasize(pop, c))
                             : round_payment(pop, c, q, r);
            int t = rounds_for(bracket, pay, lp, sp, max_T);
            double loss = m_loss(pop, c, q, lp, t);
            double total = sp.gamma1 * loss + sp.gamma2 * static_cast<double>(t) * pay;
            if (total < best_total) {
                best_total = total;
                T = t;
                r_o = r;
                cohort = std::move(c);
                cost.total = total;
                cost.loss_term = sp.gamma1 * loss;
                cost.payment_term = sp.gamma2 * static_cast<double>(t) * pay;
                cost.m_loss = loss;
                cost.round_payment = pay;
                found = true;
            }
        }
        if (!found) throw NumericError("no reward candidate induces a non-empty cohort");
    }

    out.rounds = T;
    out.reward = r_o;
    out.cost_total = cost.total;
    out.m_loss = cost.m_loss;
    out.payment_total = static_cast<double>(T) * cost.round_payment;
    out.n_local = static_cast<double>(cohort.local_set.size());
    out.n_aigc = static_cast<double>(cohort.aigc_set.size());
    out.client_utilities = per_round_utilities(pop, mech, q, r_o);
    double total_u = std::accumulate(out.client_utilities.begin(), out.client_utilities.end(),
                                     0.0) *
                     static_cast<double>(T);
    out.welfare = social_welfare(lp.theta_gap, sp.gamma1, cost.total, total_u);
    return out;
}

namespace {

// Expected-case machinery for the restricted mechanisms.  NAIGC recruits the
// region lambda <= lambda_max * (1 - s / r) with quality-discounted pay; NDQ
// recruits s <= r with flat pay and is blind to lambda.
struct RuleEval {
    double reward = 0.0;
    double p = 0.0;
    double raw = 0.0;       // joint-mass lambda moment of the region
    double e_lambda = 0.0;  // mean-mode applied
    double e_z = 0.0;
    double m3 = 0.0;
    double pay1 = 0.0;
    double utility_rate = 0.0;
};

struct RuleCtx {
    const AttributeDistribution& dist;
    const QualityModel& q;
    const LearningParams& lp;
    const ServerParams& sp;
    const std::vector<long long>& datasizes;
    MeanMode mode;
    bool ndq;

    LearningConstants lc;
    double log_phih = 0.0;
    double sum_d = 0.0;
    double s_max = 0.0;

    struct Interval {
        double lo, hi;
        bool open_lo;
    };
    std::vector<Interval> bands;
    std::unordered_map<std::uint64_t, RuleEval> memo;

    RuleCtx(const AttributeDistribution& dist_, const QualityModel& q_,
            const LearningParams& lp_, const ServerParams& sp_,
            const std::vector<long long>& ds, MeanMode mode_, bool ndq_)
        : dist(dist_), q(q_), lp(lp_), sp(sp_), datasizes(ds), mode(mode_), ndq(ndq_) {
        if (datasizes.empty()) throw ConfigError("population must be non-empty");
        if (!(dist.quality.max() <= q.lambda_max() * (1.0 + 1e-12))) {
            throw ConfigError("divergence support exceeds lambda_max");
        }
        lc = derive_learning_constants(lp);
        log_phih = static_cast<double>(lp.h) * std::log(lc.phi);
        for (long long d : datasizes) sum_d += static_cast<double>(d);
        s_max = dist.cost.max();
        if (ndq) {
            // Beyond s_max participation has saturated and flat pay keeps
            // growing, so the optimum never sits above it.
            bands = {{0.0, s_max, true}};
        } else {
            // Recruitment keeps growing with the reward, so extend the search
            // well past the full mechanism's ceiling.
            double ceil_r = reward_ceiling(s_max, q);
            bands = {{0.0, s_max, true}, {s_max, ceil_r, false}, {ceil_r, 8.0 * ceil_r, false}};
        }
    }

    const RuleEval& eval(double reward) {
        if (!(reward > 0.0)) throw ConfigError("reward must be positive");
        auto key = std::bit_cast<std::uint64_t>(reward);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        RuleEval e;
        e.reward = reward;
        double s_hi = std::min(reward, s_max);
        if (ndq) {
            e.p = dist.cost.cdf(s_hi);
            e.raw = e.p * dist.quality.mean();
            e.utility_rate = reward * e.p - dist.cost.first_moment_below(s_hi);
        } else {
            RegionMoments m =
                region_moments(dist, q.lambda_max(), q.lambda_max() / reward, s_hi);
            e.p = std::clamp(m.p, 0.0, 1.0);
            e.raw = m.lambda_moment;
            e.utility_rate =
                reward * e.p - (reward / q.lambda_max()) * e.raw - m.cost_moment;
        }
        e.e_lambda = mode == MeanMode::Conditional ? (e.p > 0.0 ? e.raw / e.p : 0.0) : e.raw;
        e.e_z = expected_Z(e.p, datasizes, sp);
        e.m3 = e.p * sum_d;
        e.pay1 = ndq ? reward * e.m3
                     : reward * e.m3 * (1.0 - e.e_lambda / q.lambda_max());
        return memo.emplace(key, e).first->second;
    }

    double bracket(const RuleEval& e) const {
        return lp.psi / std::sqrt(static_cast<double>(lp.h)) * e.e_z + e.e_lambda;
    }

    double cost_at(int T, const RuleEval& e) const {
        double decay = std::exp(log_phih * static_cast<double>(T));
        return sp.gamma1 *
                   (decay * lp.theta_gap + (1.0 - decay) * lc.kappa1 * bracket(e)) +
               sp.gamma2 * static_cast<double>(T) * e.pay1;
    }

    double continuous_rounds(const RuleEval& e, int max_T, bool& valid) const {
        double slack = lp.theta_gap - lc.kappa1 * bracket(e);
        if (!(slack > 0.0)) {
            valid = false;
            return 1.0;
        }
        valid = true;
        if (!(e.pay1 > 0.0)) return static_cast<double>(max_T);
        double arg = sp.gamma2 * e.pay1 / (sp.gamma1 * (-log_phih) * slack);
        return std::clamp(std::log(arg) / log_phih, 1.0, static_cast<double>(max_T));
    }
};

int rule_t_max(RuleCtx& ctx, int max_T, int grid_points) {
    double best_t = -std::numeric_limits<double>::infinity();
    bool any_valid = false;
    auto rounds_at = [&](double r) {
        bool valid = false;
        double t = ctx.continuous_rounds(ctx.eval(r), max_T, valid);
        if (valid) any_valid = true;
        return valid ? t : -std::numeric_limits<double>::infinity();
    };
    for (const auto& band : ctx.bands) {
        double span = band.hi - band.lo;
        if (!(span > 0.0)) continue;
        double step = span / static_cast<double>(grid_points);
        double best_r = -1.0, band_best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= grid_points; ++i) {
            double r = band.lo + step * static_cast<double>(i);
            if (i == 0 && band.open_lo) r = band.lo + step * 0.5;
            double t = rounds_at(r);
            if (t > band_best) {
                band_best = t;
                best_r = r;
            }
        }
        if (best_r < 0.0) continue;
        double lo = std::max(band.open_lo ? band.lo + 1e-12 : band.lo, best_r - step);
        double hi = std::min(band.hi, best_r + step);
        double r_star = golden_minimize([&](double r) { return -rounds_at(r); }, lo, hi, 1e-6);
        best_t = std::max({best_t, band_best, rounds_at(r_star)});
    }
    if (!any_valid) {
        throw NumericError(
            "gap budget too small: no reward satisfies theta_gap > expected penalty");
    }
    double capped = std::clamp(best_t, 1.0, static_cast<double>(max_T));
    return static_cast<int>(std::ceil(capped - 1e-12));
}

RunResult solve_rule_incomplete(RuleCtx& ctx, MechanismKind mech, int max_T, int grid_points) {
    if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
    int t_hi = rule_t_max(ctx, max_T, grid_points);

    double best_total = std::numeric_limits<double>::infinity();
    RuleEval best_e;
    int best_T = 1;
    bool found = false;
    for (int T = 1; T <= t_hi; ++T) {
        for (const auto& band : ctx.bands) {
            double span = band.hi - band.lo;
            if (!(span > 0.0)) continue;
            double step = span / static_cast<double>(grid_points);
            double grid_r = 0.0, grid_cost = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= grid_points; ++i) {
                double r = band.lo + step * static_cast<double>(i);
                if (i == 0 && band.open_lo) r = band.lo + step * 0.5;
                double c = ctx.cost_at(T, ctx.eval(r));
                if (c < grid_cost) {
                    grid_cost = c;
                    grid_r = r;
                }
            }
            double lo = std::max(band.open_lo ? band.lo + 1e-12 : band.lo, grid_r - step);
            double hi = std::min(band.hi, grid_r + step);
            double r_star = golden_minimize(
                [&](double r) { return ctx.cost_at(T, ctx.eval(r)); }, lo, hi, 1e-6);
            for (double r : {r_star, grid_r}) {
                const RuleEval& e = ctx.eval(r);
                double c = ctx.cost_at(T, e);
                if (c < best_total) {
                    best_total = c;
                    best_e = e;
                    best_T = T;
                    found = true;
                }
            }
        }
    }
    if (!found) throw NumericError("no reward candidate found");

    RunResult out;
    out.mechanism = mech;
    out.info = InfoMode::Incomplete;
    out.K = static_cast<int>(ctx.datasizes.size());
    out.rounds = best_T;
    out.reward = best_e.reward;
    out.cost_total = best_total;
    double decay = std::exp(ctx.log_phih * static_cast<double>(best_T));
    out.m_loss = decay * ctx.lp.theta_gap +
                 (1.0 - decay) * ctx.lc.kappa1 * ctx.bracket(best_e);
    out.payment_total = static_cast<double>(best_T) * best_e.pay1;
    out.n_local = best_e.p * static_cast<double>(ctx.datasizes.size());
    out.n_aigc = 0.0;
    double total_u = static_cast<double>(best_T) * ctx.sum_d * best_e.utility_rate;
    out.welfare = social_welfare(ctx.lp.theta_gap, ctx.sp.gamma1, best_total, total_u);
    return out;
}

}  // namespace

RunResult solve_incomplete(const std::vector<long long>& datasizes, MechanismKind mech,
                           const AttributeDistribution& dist, const QualityModel& q,
                           const LearningParams& lp, const ServerParams& sp, MeanMode mode,
                           int max_T, int grid_points) {
    if (mech == MechanismKind::IMFL) {
        ExpectedSolution sol =
            best_expected_strategy(dist, q, lp, sp, datasizes, mode, max_T, grid_points);
        RunResult out;
        out.mechanism = mech;
        out.info = InfoMode::Incomplete;
        out.K = static_cast<int>(datasizes.size());
        out.rounds = sol.strategy.rounds;
        out.reward = sol.strategy.reward;
        out.cost_total = sol.cost.total;
        out.m_loss = sol.cost.loss_term / sp.gamma1;
        out.payment_total = sol.cost.payment_term / sp.gamma2;
        double expected_n = sol.cost.p * static_cast<double>(datasizes.size());
        if (sol.cost.band == Band::High) {
            out.n_aigc = expected_n;
        } else {
            out.n_local = expected_n;
        }
        double sum_d = 0.0;
        for (long long d : datasizes) sum_d += static_cast<double>(d);
        double total_u =
            static_cast<double>(out.rounds) * sum_d * sol.cost.utility_rate;
        out.welfare = social_welfare(lp.theta_gap, sp.gamma1, sol.cost.total, total_u);
        return out;
    }
    RuleCtx ctx(dist, q, lp, sp, datasizes, mode, mech == MechanismKind::NDQ);
    return solve_rule_incomplete(ctx, mech, max_T, grid_points);
}

RunResult run_mechanism(const ScenarioConfig& cfg, std::uint64_t seed) {
    Population pop = sample_population(cfg.population, cfg.quality, seed);
    RunResult out;
    if (cfg.info == InfoMode::Complete) {
        out = solve_complete(pop, cfg.mechanism, cfg.quality, cfg.learning, cfg.server,
                             cfg.max_T);
    } else {
        std::vector<long long> ds;
        ds.reserve(pop.size());
        for (const auto& c : pop) ds.push_back(c.datasize());
        out = solve_incomplete(ds, cfg.mechanism, cfg.population.dist, cfg.quality,
                               cfg.learning, cfg.server, cfg.mean_mode, cfg.max_T,
                               cfg.grid_points);
    }
    out.seed = seed;
    return out;
}

namespace {

void copy_knobs(const ScenarioConfig& from, ScenarioConfig& to) {
    to.seeds = from.seeds;
    to.mechanism = from.mechanism;
    to.info = from.info;
    to.mean_mode = from.mean_mode;
    to.max_T = from.max_T;
    to.grid_points = from.grid_points;
    to.trials = from.trials;
    to.threads = from.threads;
}

ScenarioConfig apply_sweep(const ScenarioConfig& base, SweepSpec::Var var, double value) {
    switch (var) {
        case SweepSpec::Var::K: {
            long long k = std::llround(value);
            if (k < 1 || std::abs(value - static_cast<double>(k)) > 1e-9) {
                throw ConfigError("K sweep values must be positive integers");
            }
            ScenarioConfig out(PopulationSpec(static_cast<int>(k), base.population.datasize_min,
                                              base.population.datasize_max,
                                              base.population.dist),
                               base.quality, base.learning, base.server);
            copy_knobs(base, out);
            return out;
        }
        case SweepSpec::Var::Gamma: {
            ServerParams sp(value, base.server.gamma2, base.server.omega,
                            base.server.epsilon);
            ScenarioConfig out(base.population, base.quality, base.learning, sp);
            copy_knobs(base, out);
            return out;
        }
        case SweepSpec::Var::SAi: {
            QualityModel q(base.quality.lambda_max(), base.quality.g_data(),
                           base.quality.g_diff(), value);
            ScenarioConfig out(base.population, q, base.learning, base.server);
            copy_knobs(base, out);
            return out;
        }
    }
    throw ConfigError("unknown sweep variable");
}

std::vector<RunResult> run_jobs(const std::vector<std::function<RunResult()>>& jobs,
                                int threads) {
    std::vector<RunResult> out(jobs.size());
    int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i]();
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                out[i] = jobs[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace

std::vector<RunResult> run_scenario(const ScenarioConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("seed list must be non-empty");
    std::vector<std::function<RunResult()>> jobs;
    if (!cfg.sweep) {
        for (std::uint64_t seed : cfg.seeds) {
            jobs.push_back([&cfg, seed] { return run_mechanism(cfg, seed); });
        }
    } else {
        if (cfg.sweep->values.empty()) throw ConfigError("sweep values must be non-empty");
        for (double value : cfg.sweep->values) {
            ScenarioConfig cell = apply_sweep(cfg, cfg.sweep->var, value);
            std::string tag = to_string(cfg.sweep->var);
            for (std::uint64_t seed : cfg.seeds) {
                jobs.push_back([cell, seed, tag, value] {
                    RunResult r = run_mechanism(cell, seed);
                    r.sweep_var = tag;
                    r.sweep_value = value;
                    return r;
                });
            }
        }
    }
    return run_jobs(jobs, cfg.threads);
}

std::vector<RunResult> run_benchmark(const ScenarioConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("seed list must be non-empty");
    std::vector<std::function<RunResult()>> jobs;
    for (std::uint64_t seed : cfg.seeds) {
        for (MechanismKind mech :
             {MechanismKind::IMFL, MechanismKind::NAIGC, MechanismKind::NDQ}) {
            ScenarioConfig cell = cfg;
            cell.mechanism = mech;
            jobs.push_back([cell, seed] { return run_mechanism(cell, seed); });
        }
    }
    return run_jobs(jobs, cfg.threads);
}

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<RunResult>& rows) {
    bool sweep = std::any_of(rows.begin(), rows.end(),
                             [](const RunResult& r) { return !r.sweep_var.empty(); });
    os << "seed,mechanism,info,K,T_o,r_o,cost_total,m_loss,r_total,n_local,n_aigc,welfare";
    if (sweep) os << ",sweep_var,sweep_value";
    os << "\n";
    for (const auto& r : rows) {
        os << r.seed << ',' << to_string(r.mechanism) << ',' << to_string(r.info) << ','
           << r.K << ',' << r.rounds << ',' << fmt_g(r.reward) << ',' << fmt_g(r.cost_total)
           << ',' << fmt_g(r.m_loss) << ',' << fmt_g(r.payment_total) << ','
           << fmt_g(r.n_local) << ',' << fmt_g(r.n_aigc) << ',' << fmt_g(r.welfare);
        if (sweep) os << ',' << r.sweep_var << ',' << fmt_g(r.sweep_value);
        os << "\n";
    }
}

namespace {

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) {
        sd = 0.0;
        return;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<SummaryCell> summarize(const std::vector<RunResult>& rows) {
    struct Group {
        SummaryCell cell;
        std::vector<double> rounds, reward, cost, loss, payment, welfare;
    };
    std::vector<Group> groups;
    for (const auto& r : rows) {
        std::string mech = to_string(r.mechanism);
        std::string info = to_string(r.info);
        Group* g = nullptr;
        for (auto& cand : groups) {
            if (cand.cell.mechanism == mech && cand.cell.info == info && cand.cell.K == r.K &&
                cand.cell.sweep_var == r.sweep_var && cand.cell.sweep_value == r.sweep_value) {
                g = &cand;
                break;
            }
        }
        if (!g) {
            groups.emplace_back();
            g = &groups.back();
            g->cell.mechanism = mech;
            g->cell.info = info;
            g->cell.K = r.K;
            g->cell.sweep_var = r.sweep_var;
            g->cell.sweep_value = r.sweep_value;
        }
        g->rounds.push_back(static_cast<double>(r.rounds));
        g->reward.push_back(r.reward);
        g->cost.push_back(r.cost_total);
        g->loss.push_back(r.m_loss);
        g->payment.push_back(r.payment_total);
        g->welfare.push_back(r.welfare);
    }
    std::vector<SummaryCell> out;
    out.reserve(groups.size());
    for (auto& g : groups) {
        g.cell.n = static_cast<int>(g.rounds.size());
        mean_sd(g.rounds, g.cell.mean_rounds, g.cell.sd_rounds);
        mean_sd(g.reward, g.cell.mean_reward, g.cell.sd_reward);
        mean_sd(g.cost, g.cell.mean_cost, g.cell.sd_cost);
        mean_sd(g.loss, g.cell.mean_m_loss, g.cell.sd_m_loss);
        mean_sd(g.payment, g.cell.mean_payment, g.cell.sd_payment);
        mean_sd(g.welfare, g.cell.mean_welfare, g.cell.sd_welfare);
        out.push_back(g.cell);
    }
    return out;
}

}  // namespace aigcfl
