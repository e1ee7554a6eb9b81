#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aigcfl/complete.hpp"
#include "aigcfl/incomplete.hpp"

namespace aigcfl {

// IMFL is the full mechanism; NAIGC drops the augmentation option; NDQ pays a
// flat quality-blind rate.
enum class MechanismKind { IMFL, NAIGC, NDQ };

enum class InfoMode { Complete, Incomplete };

std::string to_string(MechanismKind m);
std::string to_string(InfoMode i);
MechanismKind mechanism_from_string(const std::string& s);
InfoMode info_from_string(const std::string& s);

// Shape of the candidate-client pool: how many clients, how large their
// datasets are, and which joint attribute distribution they are drawn from.
struct PopulationSpec {
    PopulationSpec(int K, long long datasize_min, long long datasize_max,
                   AttributeDistribution dist);

    int K;
    long long datasize_min;
    long long datasize_max;
    AttributeDistribution dist;
};

// Sweep over a scenario knob: client count, loss weight gamma1, or the
// synthesis price.
struct SweepSpec {
    enum class Var { K, Gamma, SAi };
    Var var = Var::K;
    std::vector<double> values;
};

std::string to_string(SweepSpec::Var v);
SweepSpec::Var sweep_var_from_string(const std::string& s);

// One experiment: population shape, model constants, search knobs, seeds, and
// the mechanism / information mode to run.
struct ScenarioConfig {
    ScenarioConfig(PopulationSpec population, QualityModel quality, LearningParams learning,
                   ServerParams server);

    PopulationSpec population;
    QualityModel quality;
    LearningParams learning;
    ServerParams server;

    std::vector<std::uint64_t> seeds;
    MechanismKind mechanism = MechanismKind::IMFL;
    InfoMode info = InfoMode::Complete;
    MeanMode mean_mode = MeanMode::Unnormalized;
    int max_T = 10000;
    int grid_points = 200;
    int trials = 20000;  // Monte-Carlo trials for the sampling oracle subcommand
    int threads = 1;
    std::optional<SweepSpec> sweep;
};

// Draws K clients: datasize uniform-integer in range, unit cost and divergence
// by inverse-CDF sampling from the configured densities.  Deterministic in the
// seed and independent of evaluation order.
Population sample_population(const PopulationSpec& spec, const QualityModel& q,
                             std::uint64_t seed);

// Outcome of one mechanism run, flattened for tabulation.  Cohort sizes are
// expected values under incomplete information.
struct RunResult {
    std::uint64_t seed = 0;
    MechanismKind mechanism = MechanismKind::IMFL;
    InfoMode info = InfoMode::Complete;
    int K = 0;
    int rounds = 1;
    double reward = 0.0;
    double cost_total = 0.0;
    double m_loss = 0.0;
    double payment_total = 0.0;
    double n_local = 0.0;
    double n_aigc = 0.0;
    double welfare = 0.0;
    std::vector<double> client_utilities;  // per round, complete information only
    std::string sweep_var;                 // empty outside sweeps
    double sweep_value = 0.0;
};

// Cost reduction against the do-nothing baseline plus the clients' total
// utility across rounds.
double social_welfare(double theta_gap, double gamma1, double cost_total,
                      double total_client_utility);

// Full-information solve of one mechanism on a realized population.  NAIGC
// restricts clients to local data and prices their break-even thresholds; NDQ
// pays a flat undiscounted rate and recruits every client whose unit cost
// clears it.  Model quality is always measured by the true loss model on the
// induced cohort.
RunResult solve_complete(const Population& pop, MechanismKind mech, const QualityModel& q,
                         const LearningParams& lp, const ServerParams& sp, int max_T = 10000);

// Distribution-level solve of one mechanism; the realized datasizes are the
// only population facts the server uses.
RunResult solve_incomplete(const std::vector<long long>& datasizes, MechanismKind mech,
                           const AttributeDistribution& dist, const QualityModel& q,
                           const LearningParams& lp, const ServerParams& sp, MeanMode mode,
                           int max_T = 10000, int grid_points = 200);

// Samples the seed's population and dispatches on the configured information
// mode and mechanism.
RunResult run_mechanism(const ScenarioConfig& cfg, std::uint64_t seed);

// All seeds, and all sweep cells when a sweep is configured.  Cells run in
// parallel when cfg.threads > 1 with identical output.
std::vector<RunResult> run_scenario(const ScenarioConfig& cfg);

// All three mechanisms on identical populations, seed by seed.
std::vector<RunResult> run_benchmark(const ScenarioConfig& cfg);

// Deterministic CSV table of runs.  Sweep columns appear when any row carries a
// sweep tag.
void write_csv(std::ostream& os, const std::vector<RunResult>& rows);

// Per-cell aggregate over seeds; cells keyed by mechanism, info mode, K and
// sweep tag in first-appearance order.
struct SummaryCell {
    std::string mechanism;
    std::string info;
    int K = 0;
    std::string sweep_var;
    double sweep_value = 0.0;
    int n = 0;
    double mean_rounds = 0.0, sd_rounds = 0.0;
    double mean_reward = 0.0, sd_reward = 0.0;
    double mean_cost = 0.0, sd_cost = 0.0;
    double mean_m_loss = 0.0, sd_m_loss = 0.0;
    double mean_payment = 0.0, sd_payment = 0.0;
    double mean_welfare = 0.0, sd_welfare = 0.0;
};

std::vector<SummaryCell> summarize(const std::vector<RunResult>& rows);

}  // namespace aigcfl
