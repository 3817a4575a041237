#ifndef REGCB_EVALUATION_HPP
#define REGCB_EVALUATION_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "regcb/algorithms.hpp"
#include "regcb/environments.hpp"

namespace regcb {

struct RoundLog {
    std::size_t t = 0;
    std::size_t epoch = 0;
    ActionId action = 0;
    double propensity = 1.0;
    double reward = 0.0;
    double width = 0.0;
    std::size_t disagreement_size = 1;
    double regret = 0.0;   ///< best mean reward minus mean reward of the played action
};

struct ValidationPoint {
    std::size_t t = 0;
    double reward = 0.0;
};

struct RunRecord {
    std::vector<RoundLog> rounds;
    std::vector<ValidationPoint> validation;
    std::map<std::string, std::string> meta;

    double cumulative_regret() const;
};

struct ExperimentOptions {
    std::size_t horizon = 0;
    Schedule schedule;
    std::uint64_t algorithm_seed = 0;
    std::uint64_t replicate = 0;
    bool validate = true;
};

/// Validation checkpoints: every ceil(T/15) rounds up to T.
std::vector<std::size_t> validation_rounds(std::size_t horizon);

/// Mean expected reward of the learner's current action rule over the holdout set.
double holdout_reward(const Learner& learner, const std::vector<HoldoutExample>& holdout, std::size_t round);

/// The online loop. Rounds past the environment's supply are dropped with a warning on stderr.
RunRecord run_experiment(Learner& learner, const Environment& env, const ExperimentOptions& options);

// ---------------------------------------------------------------------------------------
// CSV persistence

void write_rounds_csv(const std::filesystem::path& path, const std::vector<RoundLog>& rounds);
void write_validation_csv(const std::filesystem::path& path, const std::vector<ValidationPoint>& points);
void write_meta_json(const std::filesystem::path& path, const std::map<std::string, std::string>& meta);
void write_run(const std::filesystem::path& dir, const RunRecord& record);

std::vector<RoundLog> read_rounds_csv(const std::filesystem::path& path);
std::vector<ValidationPoint> read_validation_csv(const std::filesystem::path& path);
std::map<std::string, std::string> read_meta_json(const std::filesystem::path& path);
RunRecord read_run(const std::filesystem::path& dir);

/// Shortest round-trip text for a double.
std::string format_double(double v);
double parse_double_field(const std::string& s);

// ---------------------------------------------------------------------------------------
// Aggregates

/// Holdout reward of the greedy policy of an oracle fit on full reward vectors of the first
/// `rows` training rounds.
double supervised_skyline(const RegressionOracle& oracle, const Environment& env, std::size_t rows);

enum class GridKind { confidence, epsilon };
GridKind parse_grid_kind(std::string_view name);

/// Eight log-spaced values, largest first: 1e2..1e-8 or 1e-1..1e-8.
std::vector<double> parameter_grid(GridKind kind);

/// (max - v) / (max - min); all zeros when every value is equal.
std::vector<double> normalized_relative_loss(const std::vector<double>& rewards);

struct CdfPoint {
    std::string algorithm;
    double x = 0.0;
    std::size_t count = 0;
};

/// Per algorithm, the number of datasets with loss <= x, at every observed loss and at 0 and 0.99.
std::vector<CdfPoint> loss_cdf(const std::map<std::string, std::vector<double>>& losses);

/// Sliding mean over the trailing `window` values; the first entries average what exists.
std::vector<double> width_series(const std::vector<double>& widths, std::size_t window = 20);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t used = 0;
    std::size_t dropped = 0;   ///< points with nonpositive t or value
};

/// Least squares line through (log t, log value).
SlopeFit slope_fit(const std::vector<double>& t, const std::vector<double>& values);

}  // namespace regcb

#endif  // REGCB_EVALUATION_HPP
