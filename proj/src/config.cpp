#include "aigcfl/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace aigcfl {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Collector {
    std::vector<std::string> msgs;

    void add(std::string m) { msgs.push_back(std::move(m)); }
    bool ok() const { return msgs.empty(); }

    [[noreturn]] void raise(const std::string& origin) const {
        std::string joined = origin + ": invalid configuration";
        for (const auto& m : msgs) joined += "\n  - " + m;
        throw ConfigError(joined);
    }
};

bool is_meta(const std::string& key) { return !key.empty() && key[0] == '_'; }

void check_known_keys(const json& obj, std::initializer_list<const char*> known,
                      Collector& errs, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (is_meta(key)) continue;
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) errs.add(where + ": unknown key \"" + key + "\"");
    }
}

const json* get_section(const json& root, const char* key, Collector& errs) {
    auto it = root.find(key);
    if (it == root.end()) {
        errs.add(std::string("missing section \"") + key + "\"");
        return nullptr;
    }
    if (!it->is_object()) {
        errs.add(std::string("section \"") + key + "\" must be an object");
        return nullptr;
    }
    return &*it;
}

double get_num(const json& obj, const char* key, Collector& errs, const std::string& where,
               std::optional<double> fallback = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        errs.add(where + "." + key + " is required");
        return kNan;
    }
    if (!it->is_number()) {
        errs.add(where + "." + key + " must be a number");
        return kNan;
    }
    return it->get<double>();
}

long long get_int(const json& obj, const char* key, Collector& errs, const std::string& where,
                  std::optional<long long> fallback = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        errs.add(where + "." + key + " is required");
        return 0;
    }
    if (!it->is_number_integer()) {
        errs.add(where + "." + key + " must be an integer");
        return fallback ? *fallback : 0;
    }
    return it->get<long long>();
}

std::string get_str(const json& obj, const char* key, Collector& errs, const std::string& where,
                    std::optional<std::string> fallback = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        errs.add(where + "." + key + " is required");
        return {};
    }
    if (!it->is_string()) {
        errs.add(where + "." + key + " must be a string");
        return fallback ? *fallback : std::string{};
    }
    return it->get<std::string>();
}

std::optional<Density> parse_density(const json& obj, Collector& errs,
                                     const std::string& where) {
    if (!obj.is_object()) {
        errs.add(where + " must be an object");
        return std::nullopt;
    }
    std::string kind = get_str(obj, "kind", errs, where);
    if (kind.empty()) return std::nullopt;
    try {
        if (kind == "LID" || kind == "rising") {
            check_known_keys(obj, {"kind", "max"}, errs, where);
            return Density::rising(get_num(obj, "max", errs, where));
        }
        if (kind == "UD" || kind == "uniform") {
            check_known_keys(obj, {"kind", "max"}, errs, where);
            return Density::uniform(get_num(obj, "max", errs, where));
        }
        if (kind == "LDD" || kind == "falling") {
            check_known_keys(obj, {"kind", "max"}, errs, where);
            return Density::falling(get_num(obj, "max", errs, where));
        }
        if (kind == "tabulated") {
            check_known_keys(obj, {"kind", "knots", "pdf"}, errs, where);
            auto knots_it = obj.find("knots");
            auto pdf_it = obj.find("pdf");
            if (knots_it == obj.end() || !knots_it->is_array() || pdf_it == obj.end() ||
                !pdf_it->is_array()) {
                errs.add(where + ": tabulated density needs numeric arrays knots and pdf");
                return std::nullopt;
            }
            return Density::tabulated(knots_it->get<std::vector<double>>(),
                                      pdf_it->get<std::vector<double>>());
        }
    } catch (const std::exception& e) {
        errs.add(where + ": " + e.what());
        return std::nullopt;
    }
    errs.add(where + ".kind must be one of LID, UD, LDD, tabulated (got \"" + kind + "\")");
    return std::nullopt;
}

}  // namespace

LoadedConfig parse_scenario(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be a JSON object");

    Collector errs;
    check_known_keys(root, {"population", "quality", "learning", "server", "experiment"},
                     errs, "top level");

    const json* population = get_section(root, "population", errs);
    const json* quality = get_section(root, "quality", errs);
    const json* learning = get_section(root, "learning", errs);
    const json* server = get_section(root, "server", errs);
    const json* experiment = get_section(root, "experiment", errs);

    // Quality model first: lambda_max feeds the default gap budget.
    std::optional<QualityModel> qm;
    if (quality) {
        check_known_keys(*quality, {"lambda_max", "g_data", "g_diff", "s_ai"}, errs,
                         "quality");
        double lam = get_num(*quality, "lambda_max", errs, "quality");
        double gd = get_num(*quality, "g_data", errs, "quality");
        double gf = get_num(*quality, "g_diff", errs, "quality");
        double sa = get_num(*quality, "s_ai", errs, "quality");
        if (std::isfinite(lam) && std::isfinite(gd) && std::isfinite(gf) &&
            std::isfinite(sa)) {
            try {
                qm.emplace(lam, gd, gf, sa);
            } catch (const std::exception& e) {
                errs.add(std::string("quality: ") + e.what());
            }
        }
    }

    std::optional<LearningParams> lp;
    if (learning && qm) {
        check_known_keys(*learning, {"eta", "rho", "mu", "beta", "psi", "h", "theta_gap"},
                         errs, "learning");
        double eta = get_num(*learning, "eta", errs, "learning");
        double rho = get_num(*learning, "rho", errs, "learning");
        double mu = get_num(*learning, "mu", errs, "learning");
        double beta = get_num(*learning, "beta", errs, "learning");
        double psi = get_num(*learning, "psi", errs, "learning");
        long long h = get_int(*learning, "h", errs, "learning");
        double theta_gap = get_num(*learning, "theta_gap", errs, "learning", kNan);
        bool have = std::isfinite(eta) && std::isfinite(rho) && std::isfinite(mu) &&
                    std::isfinite(beta) && std::isfinite(psi);
        if (have) {
            try {
                // Two-stage construction: the default gap budget needs the
                // learning constants, which need a valid parameter set.
                LearningParams probe(eta, rho, mu, beta, psi, static_cast<int>(h), 1.0);
                derive_learning_constants(probe);
                double gap = std::isnan(theta_gap)
                                 ? default_theta_gap(probe, qm->lambda_max())
                                 : theta_gap;
                lp.emplace(eta, rho, mu, beta, psi, static_cast<int>(h), gap);
            } catch (const std::exception& e) {
                errs.add(std::string("learning: ") + e.what());
            }
        }
    }

    std::optional<ServerParams> sp;
    if (server) {
        check_known_keys(*server, {"gamma1", "gamma2", "omega", "epsilon"}, errs, "server");
        double g1 = get_num(*server, "gamma1", errs, "server");
        double g2 = get_num(*server, "gamma2", errs, "server");
        double om = get_num(*server, "omega", errs, "server");
        double eps = get_num(*server, "epsilon", errs, "server", 1e-8);
        if (std::isfinite(g1) && std::isfinite(g2) && std::isfinite(om)) {
            try {
                sp.emplace(g1, g2, om, eps);
            } catch (const std::exception& e) {
                errs.add(std::string("server: ") + e.what());
            }
        }
    }

    std::optional<PopulationSpec> ps;
    if (population && qm) {
        check_known_keys(*population, {"K", "datasize", "cost", "quality"}, errs,
                         "population");
        long long K = get_int(*population, "K", errs, "population");
        long long dmin = 0, dmax = 0;
        auto ds = population->find("datasize");
        if (ds == population->end() || !ds->is_array() || ds->size() != 2 ||
            !(*ds)[0].is_number_integer() || !(*ds)[1].is_number_integer()) {
            errs.add("population.datasize must be an integer array [min, max]");
        } else {
            dmin = (*ds)[0].get<long long>();
            dmax = (*ds)[1].get<long long>();
        }
        std::optional<Density> cost, qual;
        if (auto it = population->find("cost"); it != population->end()) {
            cost = parse_density(*it, errs, "population.cost");
        } else {
            errs.add("population.cost is required");
        }
        if (auto it = population->find("quality"); it != population->end()) {
            qual = parse_density(*it, errs, "population.quality");
        } else {
            errs.add("population.quality is required");
        }
        if (cost && qual && dmin > 0) {
            try {
                ps.emplace(static_cast<int>(K), dmin, dmax,
                           AttributeDistribution{std::move(*cost), std::move(*qual)});
            } catch (const std::exception& e) {
                errs.add(std::string("population: ") + e.what());
            }
        }
    }

    std::vector<std::uint64_t> seeds{1};
    MechanismKind mech = MechanismKind::IMFL;
    InfoMode info = InfoMode::Complete;
    MeanMode mean_mode = MeanMode::Unnormalized;
    long long max_T = 10000, grid_points = 200, trials = 20000, threads = 1;
    std::optional<SweepSpec> sweep;
    std::optional<FlsimSpec> flsim;
    if (experiment) {
        check_known_keys(*experiment,
                         {"seeds", "mechanism", "info", "mean_mode", "max_T", "grid_points",
                          "trials", "threads", "sweep", "flsim"},
                         errs, "experiment");
        if (auto it = experiment->find("seeds"); it != experiment->end()) {
            if (!it->is_array() || it->empty()) {
                errs.add("experiment.seeds must be a non-empty integer array");
            } else {
                seeds.clear();
                for (const auto& v : *it) {
                    if (!v.is_number_integer() || v.get<long long>() < 0) {
                        errs.add("experiment.seeds entries must be non-negative integers");
                        break;
                    }
                    seeds.push_back(v.get<std::uint64_t>());
                }
            }
        }
        try {
            mech = mechanism_from_string(
                get_str(*experiment, "mechanism", errs, "experiment", "IMFL"));
        } catch (const std::exception& e) {
            errs.add(std::string("experiment: ") + e.what());
        }
        try {
            info = info_from_string(
                get_str(*experiment, "info", errs, "experiment", "complete"));
        } catch (const std::exception& e) {
            errs.add(std::string("experiment: ") + e.what());
        }
        std::string mode_tok =
            get_str(*experiment, "mean_mode", errs, "experiment", "unnormalized");
        if (mode_tok == "unnormalized") {
            mean_mode = MeanMode::Unnormalized;
        } else if (mode_tok == "conditional") {
            mean_mode = MeanMode::Conditional;
        } else {
            errs.add("experiment.mean_mode must be unnormalized or conditional (got \"" +
                     mode_tok + "\")");
        }
        max_T = get_int(*experiment, "max_T", errs, "experiment", 10000);
        grid_points = get_int(*experiment, "grid_points", errs, "experiment", 200);
        trials = get_int(*experiment, "trials", errs, "experiment", 20000);
        threads = get_int(*experiment, "threads", errs, "experiment", 1);
        if (max_T < 1) errs.add("experiment.max_T must be at least 1");
        if (grid_points < 2) errs.add("experiment.grid_points must be at least 2");
        if (trials < 1) errs.add("experiment.trials must be at least 1");
        if (threads < 1) errs.add("experiment.threads must be at least 1");

        if (auto it = experiment->find("sweep"); it != experiment->end()) {
            if (!it->is_object()) {
                errs.add("experiment.sweep must be an object");
            } else {
                check_known_keys(*it, {"var", "values"}, errs, "experiment.sweep");
                SweepSpec sw;
                try {
                    sw.var = sweep_var_from_string(
                        get_str(*it, "var", errs, "experiment.sweep"));
                } catch (const std::exception& e) {
                    errs.add(std::string("experiment.sweep: ") + e.what());
                }
                auto values = it->find("values");
                if (values == it->end() || !values->is_array() || values->empty()) {
                    errs.add("experiment.sweep.values must be a non-empty numeric array");
                } else {
                    for (const auto& v : *values) {
                        if (!v.is_number()) {
                            errs.add("experiment.sweep.values entries must be numbers");
                            break;
                        }
                        sw.values.push_back(v.get<double>());
                    }
                }
                if (!sw.values.empty()) sweep = std::move(sw);
            }
        }

        if (auto it = experiment->find("flsim"); it != experiment->end()) {
            if (!it->is_object()) {
                errs.add("experiment.flsim must be an object");
            } else {
                check_known_keys(*it, {"dimension", "lambdas", "datasizes", "rounds"}, errs,
                                 "experiment.flsim");
                FlsimSpec fs;
                fs.dimension =
                    static_cast<int>(get_int(*it, "dimension", errs, "experiment.flsim"));
                fs.rounds =
                    static_cast<int>(get_int(*it, "rounds", errs, "experiment.flsim", 50));
                auto lam = it->find("lambdas");
                auto dsz = it->find("datasizes");
                if (lam == it->end() || !lam->is_array() || dsz == it->end() ||
                    !dsz->is_array() || lam->empty() || lam->size() != dsz->size()) {
                    errs.add(
                        "experiment.flsim needs equal-length non-empty arrays lambdas and "
                        "datasizes");
                } else {
                    for (const auto& v : *lam) fs.lambdas.push_back(v.get<double>());
                    for (const auto& v : *dsz) fs.datasizes.push_back(v.get<long long>());
                }
                if (fs.dimension < 1) errs.add("experiment.flsim.dimension must be at least 1");
                if (fs.rounds < 1) errs.add("experiment.flsim.rounds must be at least 1");
                if (!fs.lambdas.empty()) flsim = std::move(fs);
            }
        }
    }

    if (!errs.ok() || !ps || !qm || !lp || !sp) {
        if (errs.ok()) errs.add("incomplete configuration");
        errs.raise(origin);
    }

    ScenarioConfig scenario = [&] {
        try {
            return ScenarioConfig(std::move(*ps), *qm, *lp, *sp);
        } catch (const std::exception& e) {
            errs.add(e.what());
            errs.raise(origin);
        }
    }();
    scenario.seeds = std::move(seeds);
    scenario.mechanism = mech;
    scenario.info = info;
    scenario.mean_mode = mean_mode;
    scenario.max_T = static_cast<int>(max_T);
    scenario.grid_points = static_cast<int>(grid_points);
    scenario.trials = static_cast<int>(trials);
    scenario.threads = static_cast<int>(threads);
    scenario.sweep = std::move(sweep);

    return LoadedConfig{std::move(scenario), std::move(flsim)};
}

LoadedConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

}  // namespace aigcfl
