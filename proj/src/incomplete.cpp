#include "aigcfl/incomplete.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <unordered_map>

namespace aigcfl {

void check_compatible(const AttributeDistribution& dist, const QualityModel& q) {
    double zeta3 = aigc_switch_reward(q);
    if (!(dist.cost.max() < zeta3)) {
        throw ConfigError("cost support must end below the switch reward " +
                          std::to_string(zeta3));
    }
    if (dist.quality.max() > q.lambda_max() * (1.0 + 1e-12)) {
        throw ConfigError("quality support exceeds lambda_max");
    }
}

CaseRegion classify_case(double reward, const AttributeDistribution& dist,
                         const QualityModel& q) {
    check_compatible(dist, q);
    if (!(reward > 0.0)) throw ConfigError("reward must be positive");
    double s_max = dist.cost.max();
    double lam = q.lambda_max();
    double zeta3 = aigc_switch_reward(q);
    double ceiling = reward_ceiling(s_max, q);
    double r = std::min(reward, ceiling);

    CaseRegion region;
    region.reward = r;
    if (r < s_max) {
        region.band = Band::Low;
        region.s_hi = r;
        region.line_a = lam;
        region.line_b = lam / r;
    } else if (r < zeta3) {
        region.band = Band::Mid;
        region.s_hi = s_max;
        region.line_a = lam;
        region.line_b = lam / r;
    } else {
        region.band = Band::High;
        region.s_hi = s_max;
        double denom = lam * q.delta() + q.theta() * r;
        region.line_a = r * lam / denom;
        region.line_b = lam / denom;
    }
    return region;
}

RegionMoments region_moments(const AttributeDistribution& dist, double a, double b,
                             double s_hi) {
    RegionMoments out;
    if (!(s_hi > 0.0)) return out;
    s_hi = std::min(s_hi, dist.cost.max());
    double qmax = dist.quality.max();

    // Rectangle part: every quality level participates.
    double s_kink = b > 0.0 ? (a - qmax) / b : (a >= qmax ? s_hi : 0.0);
    s_kink = std::clamp(s_kink, 0.0, s_hi);
    out.p = dist.cost.cdf(s_kink);
    out.lambda_moment = out.p * dist.quality.mean();
    out.cost_moment = dist.cost.first_moment_below(s_kink);

    // Curved part: the boundary line cuts through the quality support.
    double s_zero = b > 0.0 ? a / b : std::numeric_limits<double>::infinity();
    double s_end = std::min(s_hi, std::max(s_kink, s_zero));
    if (s_end <= s_kink) return out;

    std::vector<double> cuts = {s_kink, s_end};
    for (double k : dist.cost.knots()) {
        if (k > s_kink && k < s_end) cuts.push_back(k);
    }
    if (b > 0.0) {
        for (double k : dist.quality.knots()) {
            double s = (a - k) / b;
            if (s > s_kink && s < s_end) cuts.push_back(s);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    auto line = [&](double s) { return std::clamp(a - b * s, 0.0, qmax); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        out.p += integrate([&](double s) { return dist.cost.pdf(s) * dist.quality.cdf(line(s)); },
                           lo, hi);
        out.lambda_moment += integrate(
            [&](double s) { return dist.cost.pdf(s) * dist.quality.first_moment_below(line(s)); },
            lo, hi);
        out.cost_moment += integrate(
            [&](double s) { return s * dist.cost.pdf(s) * dist.quality.cdf(line(s)); }, lo, hi);
    }
    return out;
}

double participation_probability(const CaseRegion& region, const AttributeDistribution& dist) {
    return std::clamp(
        region_moments(dist, region.line_a, region.line_b, region.s_hi).p, 0.0, 1.0);
}

double expected_lambda(const CaseRegion& region, const AttributeDistribution& dist,
                       const QualityModel& q, MeanMode mode) {
    RegionMoments m = region_moments(dist, region.line_a, region.line_b, region.s_hi);
    double value = m.lambda_moment;
    if (region.band == Band::High) value *= q.theta();
    if (mode == MeanMode::Conditional) {
        value = m.p > 0.0 ? value / m.p : 0.0;
    }
    return value;
}

double expected_Z(double p, const std::vector<long long>& datasizes, const ServerParams& sp) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probability must lie in [0, 1]");
    if (datasizes.empty()) throw ConfigError("population must be non-empty");
    double sum_d = 0.0, sum_sqrt = 0.0;
    for (long long d : datasizes) {
        if (d < 1) throw ConfigError("datasizes must be positive integers");
        sum_d += static_cast<double>(d);
        sum_sqrt += std::sqrt(static_cast<double>(d));
    }
    return sum_sqrt / sum_d +
           std::pow(1.0 - p, static_cast<double>(datasizes.size())) * sp.omega;
}

MonteCarloStats monte_carlo_EQ(double reward, const AttributeDistribution& dist,
                               const QualityModel& q, const std::vector<long long>& datasizes,
                               const ServerParams& sp, int trials, std::uint64_t seed,
                               int threads) {
    check_compatible(dist, q);
    if (trials < 1) throw ConfigError("trials must be positive");
    if (datasizes.empty()) throw ConfigError("population must be non-empty");
    if (!(reward > 0.0)) throw ConfigError("reward must be positive");

    std::vector<double> draws(static_cast<std::size_t>(trials));
    auto run_range = [&](int lo, int hi) {
        for (int t = lo; t < hi; ++t) {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
            double sum_d = 0.0, sum_sqrt = 0.0;
            for (long long d : datasizes) {
                double s = dist.cost.sample(rng);
                double lam = dist.quality.sample(rng);
                ClientAttributes c(d, lam, s, q);
                if (best_response(c, q, reward) != Strategy::OptOut) {
                    sum_d += static_cast<double>(d);
                    sum_sqrt += std::sqrt(static_cast<double>(d));
                }
            }
            draws[static_cast<std::size_t>(t)] = sum_d > 0.0 ? sum_sqrt / sum_d : sp.omega;
        }
    };

    int n_threads = std::clamp(threads, 1, trials);
    if (n_threads <= 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        int chunk = (trials + n_threads - 1) / n_threads;
        for (int i = 0; i < n_threads; ++i) {
            int lo = i * chunk, hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Sequential reduction keeps the result independent of the thread count.
    double mean = 0.0;
    for (double v : draws) mean += v;
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (double v : draws) ss += (v - mean) * (v - mean);
    double se = trials > 1 ? std::sqrt(ss / (static_cast<double>(trials) - 1.0) /
                                       static_cast<double>(trials))
                           : 0.0;
    return {mean, se};
}

namespace {

struct RegionEval {
    double reward = 0.0;
    Band band = Band::Low;
    double p = 0.0;
    double e_lambda = 0.0;      // mode and theta applied
    double e_z = 0.0;
    double m3 = 0.0;
    double pay1 = 0.0;          // expected round payment at this reward
    double utility_rate = 0.0;  // expected client utility per unit datasize per round
};

struct Ctx {
    const AttributeDistribution& dist;
    const QualityModel& q;
    const LearningParams& lp;
    const ServerParams& sp;
    const std::vector<long long>& datasizes;
    MeanMode mode;

    LearningConstants lc;
    double log_phih;
    double sum_d = 0.0;
    double s_max, zeta3, ceiling;
    std::unordered_map<std::uint64_t, RegionEval> memo;

    Ctx(const AttributeDistribution& dist_, const QualityModel& q_, const LearningParams& lp_,
        const ServerParams& sp_, const std::vector<long long>& ds, MeanMode mode_)
        : dist(dist_), q(q_), lp(lp_), sp(sp_), datasizes(ds), mode(mode_) {
        check_compatible(dist, q);
        if (datasizes.empty()) throw ConfigError("population must be non-empty");
        lc = derive_learning_constants(lp);
        log_phih = static_cast<double>(lp.h) * std::log(lc.phi);
        for (long long d : datasizes) sum_d += static_cast<double>(d);
        s_max = dist.cost.max();
        zeta3 = aigc_switch_reward(q);
        ceiling = reward_ceiling(s_max, q);
    }

    const RegionEval& eval(double reward) {
        CaseRegion region = classify_case(reward, dist, q);
        auto key = std::bit_cast<std::uint64_t>(region.reward);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        RegionMoments m = region_moments(dist, region.line_a, region.line_b, region.s_hi);
        RegionEval e;
        e.reward = region.reward;
        e.band = region.band;
        e.p = std::clamp(m.p, 0.0, 1.0);
        double raw = m.lambda_moment;
        double scaled = region.band == Band::High ? q.theta() * raw : raw;
        e.e_lambda = mode == MeanMode::Conditional ? (e.p > 0.0 ? scaled / e.p : 0.0) : scaled;
        e.e_z = expected_Z(e.p, datasizes, sp);
        e.m3 = e.p * sum_d;
        e.pay1 = e.reward * e.m3 * (1.0 - e.e_lambda / q.lambda_max());
        double lam_coeff = region.band == Band::High
                               ? q.theta() * e.reward / q.lambda_max() + q.delta()
                               : e.reward / q.lambda_max();
        e.utility_rate = e.reward * e.p - lam_coeff * raw - m.cost_moment;
        return memo.emplace(key, e).first->second;
    }

    ExpectedCost assemble(int T, const RegionEval& e) const {
        if (T < 1) throw ConfigError("round count must be at least 1");
        double decay = std::exp(log_phih * static_cast<double>(T));
        ExpectedCost out;
        out.reward = e.reward;
        out.band = e.band;
        out.p = e.p;
        out.e_lambda = e.e_lambda;
        out.e_z = e.e_z;
        out.m3 = e.m3;
        out.utility_rate = e.utility_rate;
        double noise = lc.kappa1 * lp.psi / std::sqrt(static_cast<double>(lp.h)) * e.e_z;
        double quality = lc.kappa1 * e.e_lambda;
        out.loss_term =
            sp.gamma1 * (decay * lp.theta_gap + (1.0 - decay) * (noise + quality));
        out.payment_term = sp.gamma2 * static_cast<double>(T) * e.pay1;
        out.total = out.loss_term + out.payment_term;
        return out;
    }

    // Closed-form continuous round optimum at this reward; the cap stands in for
    // "more rounds always help" regimes.
    double continuous_rounds(const RegionEval& e, int max_T, bool& valid) const {
        double e_gap = lc.kappa1 * (lp.psi / std::sqrt(static_cast<double>(lp.h)) * e.e_z +
                                    e.e_lambda);
        double slack = lp.theta_gap - e_gap;
        if (!(slack > 0.0)) {
            valid = false;
            return 1.0;
        }
        valid = true;
        if (!(e.pay1 > 0.0)) return static_cast<double>(max_T);
        double arg = sp.gamma2 * e.pay1 / (sp.gamma1 * (-log_phih) * slack);
        double t = std::log(arg) / log_phih;
        return std::clamp(t, 1.0, static_cast<double>(max_T));
    }

    struct Interval {
        double lo, hi;
        bool open_lo;
    };

    std::vector<Interval> bands() const {
        return {{0.0, s_max, true}, {s_max, zeta3, false}, {zeta3, ceiling, false}};
    }
};

}  // namespace

ExpectedCost expected_cost(int T, double reward, const AttributeDistribution& dist,
                           const QualityModel& q, const LearningParams& lp,
                           const ServerParams& sp, const std::vector<long long>& datasizes,
                           MeanMode mode) {
    Ctx ctx(dist, q, lp, sp, datasizes, mode);
    return ctx.assemble(T, ctx.eval(reward));
}

namespace {

RewardChoice optimize_reward_in_ctx(Ctx& ctx, int T, int grid_points) {
    if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
    RewardChoice best;
    best.cost.total = std::numeric_limits<double>::infinity();
    for (const auto& band : ctx.bands()) {
        double span = band.hi - band.lo;
        if (!(span > 0.0)) continue;
        double step = span / static_cast<double>(grid_points);
        double best_r = 0.0, best_cost = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= grid_points; ++i) {
            double r = band.lo + step * static_cast<double>(i);
            if (i == 0 && band.open_lo) r = band.lo + step * 0.5;
            double c = ctx.assemble(T, ctx.eval(r)).total;
            if (c < best_cost) {
                best_cost = c;
                best_r = r;
            }
        }
        double lo = std::max(band.open_lo ? band.lo + 1e-12 : band.lo, best_r - step);
        double hi = std::min(band.hi, best_r + step);
        double r_star = golden_minimize(
            [&](double r) { return ctx.assemble(T, ctx.eval(r)).total; }, lo, hi, 1e-6);
        for (double r : {r_star, best_r}) {
            ExpectedCost c = ctx.assemble(T, ctx.eval(r));
            if (c.total < best.cost.total) {
                best.reward = c.reward;
                best.cost = c;
            }
        }
    }
    return best;
}

int t_max_in_ctx(Ctx& ctx, int max_T, int grid_points) {
    double best_t = -std::numeric_limits<double>::infinity();
    bool any_valid = false;
    auto rounds_at = [&](double r) {
        bool valid = false;
        double t = ctx.continuous_rounds(ctx.eval(r), max_T, valid);
        if (valid) any_valid = true;
        return valid ? t : -std::numeric_limits<double>::infinity();
    };
    for (const auto& band : ctx.bands()) {
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
        double r_star =
            golden_minimize([&](double r) { return -rounds_at(r); }, lo, hi, 1e-6);
        best_t = std::max({best_t, band_best, rounds_at(r_star)});
    }
    if (!any_valid) {
        throw NumericError(
            "gap budget too small: no reward satisfies theta_gap > expected penalty");
    }
    double capped = std::clamp(best_t, 1.0, static_cast<double>(max_T));
    return static_cast<int>(std::ceil(capped - 1e-12));
}

}  // namespace

RewardChoice optimize_reward_given_T(int T, const AttributeDistribution& dist,
                                     const QualityModel& q, const LearningParams& lp,
                                     const ServerParams& sp,
                                     const std::vector<long long>& datasizes, MeanMode mode,
                                     int grid_points) {
    Ctx ctx(dist, q, lp, sp, datasizes, mode);
    return optimize_reward_in_ctx(ctx, T, grid_points);
}

int t_max(const AttributeDistribution& dist, const QualityModel& q, const LearningParams& lp,
          const ServerParams& sp, const std::vector<long long>& datasizes, MeanMode mode,
          int max_T, int grid_points) {
    Ctx ctx(dist, q, lp, sp, datasizes, mode);
    return t_max_in_ctx(ctx, max_T, grid_points);
}

ExpectedSolution best_expected_strategy(const AttributeDistribution& dist,
                                        const QualityModel& q, const LearningParams& lp,
                                        const ServerParams& sp,
                                        const std::vector<long long>& datasizes, MeanMode mode,
                                        int max_T, int grid_points) {
    Ctx ctx(dist, q, lp, sp, datasizes, mode);
    int horizon = t_max_in_ctx(ctx, max_T, grid_points);
    ExpectedSolution best;
    best.cost.total = std::numeric_limits<double>::infinity();
    for (int T = 1; T <= horizon; ++T) {
        RewardChoice choice = optimize_reward_in_ctx(ctx, T, grid_points);
        if (choice.cost.total < best.cost.total) {
            best.strategy = {T, choice.reward};
            best.cost = choice.cost;
        }
    }
    return best;
}

}  // namespace aigcfl
