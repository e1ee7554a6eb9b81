#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "aigcfl/client.hpp"
#include "aigcfl/config.hpp"
#include "aigcfl/errors.hpp"
#include "aigcfl/flsim.hpp"
#include "aigcfl/incomplete.hpp"
#include "aigcfl/population.hpp"
#include "aigcfl/rng.hpp"
#include "aigcfl/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Options {
    std::string config;
    std::string out = ".";
    std::string format = "csv";
    std::string mode;
    long long seed = -1;
    int threads = 0;
};

void apply_overrides(aigcfl::ScenarioConfig& cfg, const Options& opt) {
    if (opt.seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(opt.seed)};
    if (opt.threads > 0) cfg.threads = opt.threads;
    if (!opt.mode.empty()) {
        cfg.mean_mode = opt.mode == "conditional" ? aigcfl::MeanMode::Conditional
                                                  : aigcfl::MeanMode::Unnormalized;
    }
}

ordered_json row_to_json(const aigcfl::RunResult& r, bool sweep) {
    ordered_json j;
    j["seed"] = r.seed;
    j["mechanism"] = aigcfl::to_string(r.mechanism);
    j["info"] = aigcfl::to_string(r.info);
    j["K"] = r.K;
    j["T_o"] = r.rounds;
    j["r_o"] = r.reward;
    j["cost_total"] = r.cost_total;
    j["m_loss"] = r.m_loss;
    j["r_total"] = r.payment_total;
    j["n_local"] = r.n_local;
    j["n_aigc"] = r.n_aigc;
    j["welfare"] = r.welfare;
    if (sweep) {
        j["sweep_var"] = r.sweep_var;
        j["sweep_value"] = r.sweep_value;
    }
    return j;
}

ordered_json summary_to_json(const std::vector<aigcfl::SummaryCell>& cells) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : cells) {
        ordered_json j;
        j["mechanism"] = c.mechanism;
        j["info"] = c.info;
        j["K"] = c.K;
        if (!c.sweep_var.empty()) {
            j["sweep_var"] = c.sweep_var;
            j["sweep_value"] = c.sweep_value;
        }
        j["n"] = c.n;
        j["mean_rounds"] = c.mean_rounds;
        j["sd_rounds"] = c.sd_rounds;
        j["mean_reward"] = c.mean_reward;
        j["sd_reward"] = c.sd_reward;
        j["mean_cost"] = c.mean_cost;
        j["sd_cost"] = c.sd_cost;
        j["mean_m_loss"] = c.mean_m_loss;
        j["sd_m_loss"] = c.sd_m_loss;
        j["mean_payment"] = c.mean_payment;
        j["sd_payment"] = c.sd_payment;
        j["mean_welfare"] = c.mean_welfare;
        j["sd_welfare"] = c.sd_welfare;
        arr.push_back(std::move(j));
    }
    return arr;
}

void emit_runs(const Options& opt, const std::vector<aigcfl::RunResult>& rows,
               const std::string& stem) {
    fs::create_directories(opt.out);
    fs::path path = fs::path(opt.out) / (stem + "." + opt.format);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw aigcfl::ConfigError("cannot write output file: " + path.string());
    if (opt.format == "csv") {
        aigcfl::write_csv(os, rows);
    } else {
        bool sweep = false;
        for (const auto& r : rows) sweep = sweep || !r.sweep_var.empty();
        ordered_json doc;
        doc["runs"] = ordered_json::array();
        for (const auto& r : rows) doc["runs"].push_back(row_to_json(r, sweep));
        doc["summary"] = summary_to_json(aigcfl::summarize(rows));
        os << doc.dump(2) << '\n';
    }
    auto cells = aigcfl::summarize(rows);
    for (const auto& c : cells) {
        std::cout << c.mechanism << " " << c.info << " K=" << c.K;
        if (!c.sweep_var.empty()) std::cout << " " << c.sweep_var << "=" << g12(c.sweep_value);
        std::cout << " n=" << c.n << " T=" << g12(c.mean_rounds) << " r=" << g12(c.mean_reward)
                  << " cost=" << g12(c.mean_cost) << " welfare=" << g12(c.mean_welfare) << "\n";
    }
    std::cout << "wrote " << path.string() << "\n";
}

int cmd_scenario(const Options& opt, std::optional<aigcfl::InfoMode> forced_info, bool benchmark,
                 bool need_sweep) {
    aigcfl::LoadedConfig lc = aigcfl::load_scenario(opt.config);
    aigcfl::ScenarioConfig cfg = lc.scenario;
    apply_overrides(cfg, opt);
    if (forced_info) cfg.info = *forced_info;
    if (need_sweep && !cfg.sweep) {
        throw aigcfl::ConfigError("sweep requested but the config has no experiment.sweep block");
    }
    if (!need_sweep && !benchmark) cfg.sweep.reset();
    auto rows = benchmark ? aigcfl::run_benchmark(cfg) : aigcfl::run_scenario(cfg);
    emit_runs(opt, rows, benchmark ? "benchmark" : "runs");
    return kExitOk;
}

int cmd_montecarlo(const Options& opt) {
    aigcfl::LoadedConfig lc = aigcfl::load_scenario(opt.config);
    aigcfl::ScenarioConfig cfg = lc.scenario;
    apply_overrides(cfg, opt);
    const auto& dist = cfg.population.dist;
    double s_max = dist.cost.max();
    double z3 = aigcfl::aigc_switch_reward(cfg.quality);
    double ceiling = aigcfl::reward_ceiling(s_max, cfg.quality);
    const std::vector<double> rewards{0.5 * s_max,        s_max, 0.5 * (s_max + z3), z3,
                                      0.5 * (z3 + ceiling), 0.99 * ceiling};

    fs::create_directories(opt.out);
    fs::path path = fs::path(opt.out) / (std::string("montecarlo.") + opt.format);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw aigcfl::ConfigError("cannot write output file: " + path.string());

    ordered_json jrows = ordered_json::array();
    if (opt.format == "csv") {
        os << "seed,reward,band,p,expected_z,mc_mean,mc_std_error,abs_diff\n";
    }
    for (std::uint64_t seed : cfg.seeds) {
        aigcfl::Population pop = aigcfl::sample_population(cfg.population, cfg.quality, seed);
        std::vector<long long> ds;
        for (const auto& c : pop) ds.push_back(c.datasize());
        for (std::size_t i = 0; i < rewards.size(); ++i) {
            double r = rewards[i];
            auto region = aigcfl::classify_case(r, dist, cfg.quality);
            double p = aigcfl::participation_probability(region, dist);
            double ez = aigcfl::expected_Z(p, ds, cfg.server);
            auto mc = aigcfl::monte_carlo_EQ(r, dist, cfg.quality, ds, cfg.server, cfg.trials,
                                             aigcfl::derive_seed(seed, i), cfg.threads);
            double diff = std::fabs(ez - mc.mean);
            const char* band = region.band == aigcfl::Band::Low    ? "low"
                               : region.band == aigcfl::Band::Mid ? "mid"
                                                                   : "high";
            if (opt.format == "csv") {
                os << seed << "," << g12(r) << "," << band << "," << g12(p) << "," << g12(ez)
                   << "," << g12(mc.mean) << "," << g12(mc.std_error) << "," << g12(diff) << "\n";
            } else {
                ordered_json j;
                j["seed"] = seed;
                j["reward"] = r;
                j["band"] = band;
                j["p"] = p;
                j["expected_z"] = ez;
                j["mc_mean"] = mc.mean;
                j["mc_std_error"] = mc.std_error;
                j["abs_diff"] = diff;
                jrows.push_back(std::move(j));
            }
            std::cout << "seed=" << seed << " r=" << g12(r) << " E(Z)=" << g12(ez)
                      << " mc=" << g12(mc.mean) << " se=" << g12(mc.std_error) << "\n";
        }
    }
    if (opt.format != "csv") os << jrows.dump(2) << '\n';
    std::cout << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_flsim(const Options& opt) {
    aigcfl::LoadedConfig lc = aigcfl::load_scenario(opt.config);
    if (!lc.flsim) {
        throw aigcfl::ConfigError("flsim requested but the config has no experiment.flsim block");
    }
    aigcfl::ScenarioConfig cfg = lc.scenario;
    apply_overrides(cfg, opt);
    const aigcfl::FlsimSpec& spec = *lc.flsim;
    std::uint64_t seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
    aigcfl::Federation fed = aigcfl::build_federation(
        spec.dimension, spec.lambdas, spec.datasizes, cfg.learning, aigcfl::derive_seed(seed, 1));
    aigcfl::TrainingTrace trace =
        aigcfl::run_rounds(fed, cfg.learning, spec.rounds, aigcfl::derive_seed(seed, 2));
    auto bc = aigcfl::bound_check(trace);

    fs::create_directories(opt.out);
    fs::path path = fs::path(opt.out) / (std::string("trace.") + opt.format);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw aigcfl::ConfigError("cannot write output file: " + path.string());
    if (opt.format == "csv") {
        os << "t,gap,bound,margin\n";
        for (const auto& pt : trace.points) {
            os << pt.round << "," << g12(pt.gap) << "," << g12(pt.bound) << "," << g12(pt.margin)
               << "\n";
        }
    } else {
        ordered_json doc;
        doc["theta_gap"] = trace.theta_gap;
        doc["divergence_term"] = trace.divergence_term;
        doc["worst_margin"] = bc.worst_margin;
        doc["points"] = ordered_json::array();
        for (const auto& pt : trace.points) {
            ordered_json j;
            j["t"] = pt.round;
            j["gap"] = pt.gap;
            j["bound"] = pt.bound;
            j["margin"] = pt.margin;
            doc["points"].push_back(std::move(j));
        }
        os << doc.dump(2) << '\n';
    }
    std::cout << "rounds=" << spec.rounds << " gap(T)=" << g12(trace.points.back().gap)
              << " worst_margin=" << g12(bc.worst_margin) << " at t=" << bc.worst_round << "\n";
    std::cout << "wrote " << path.string() << "\n";
    if (!bc.ok) {
        std::cerr << "bound violated: worst margin " << g12(bc.worst_margin) << " at round "
                  << bc.worst_round << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_validate(int threads) {
    auto results = aigcfl::run_acceptance_checks(threads > 0 ? threads : 1);
    int failed = 0;
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    }
    std::cout << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size()
              << " checks passed\n";
    return failed == 0 ? kExitOk : kExitValidation;
}

int dispatch(CLI::App& app, const Options& opt) {
    if (app.got_subcommand("complete")) {
        return cmd_scenario(opt, aigcfl::InfoMode::Complete, false, false);
    }
    if (app.got_subcommand("incomplete")) {
        return cmd_scenario(opt, aigcfl::InfoMode::Incomplete, false, false);
    }
    if (app.got_subcommand("benchmark")) return cmd_scenario(opt, std::nullopt, true, false);
    if (app.got_subcommand("sweep")) return cmd_scenario(opt, std::nullopt, false, true);
    if (app.got_subcommand("montecarlo")) return cmd_montecarlo(opt);
    if (app.got_subcommand("flsim")) return cmd_flsim(opt);
    if (app.got_subcommand("validate")) return cmd_validate(opt.threads);
    throw aigcfl::ConfigError("no subcommand selected");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-quality-aware incentive mechanism toolkit for federated learning"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool with_mode) {
        sub->add_option("--config", opt.config, "JSON scenario config")->required();
        sub->add_option("--out", opt.out, "output directory (default .)");
        sub->add_option("--seed", opt.seed, "override the config's seed list with one seed");
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", opt.threads, "worker threads");
        if (with_mode) {
            sub->add_option("--mode", opt.mode, "cohort divergence averaging convention")
                ->check(CLI::IsMember({"unnormalized", "conditional"}));
        }
    };

    add_common(app.add_subcommand("complete", "full-information optimum per seed"), false);
    add_common(app.add_subcommand("incomplete", "distribution-level optimum per seed"), true);
    add_common(app.add_subcommand("montecarlo", "noise-weight estimator vs sampled populations"),
               false);
    add_common(app.add_subcommand("benchmark", "all three mechanisms on identical populations"),
               true);
    add_common(app.add_subcommand("sweep", "run the config's sweep block"), true);
    add_common(app.add_subcommand("flsim", "synthetic federated training trace and bound check"),
               false);
    auto* val = app.add_subcommand("validate", "run the full release check suite");
    val->add_option("--threads", opt.threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        return dispatch(app, opt);
    } catch (const aigcfl::ConfigError& e) {
        ordered_json err{{"error", {{"kind", "config"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return kExitConfig;
    } catch (const aigcfl::NumericError& e) {
        ordered_json err{{"error", {{"kind", "numeric"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        ordered_json err{{"error", {{"kind", "internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return kExitNumeric;
    }
}
