#ifndef REGCB_CONFIG_HPP
#define REGCB_CONFIG_HPP

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "regcb/algorithms.hpp"
#include "regcb/environments.hpp"
#include "regcb/evaluation.hpp"

namespace regcb {

/// Bad or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // learner
    std::string algorithm = "regcb-opt";   ///< regcb-opt, regcb-elim, egreedy, bootstrap, uniform
    double parameter = 1.0;                ///< beta, epsilon or bootstrap beta depending on the algorithm
    std::string radius = "constant";       ///< constant or theory
    std::string radius_units = "raw";      ///< raw (summed objective) or normalized (mean loss)
    double delta = 0.1;
    double class_size = 0.0;               ///< |F| or |G| for the theory radius; finite classes fill it in
    std::string bounds_method = "closed_form";
    double precision = 1e-3;
    std::size_t max_iterations = 200;
    std::size_t warm_start_epochs = 0;
    std::size_t bootstrap_replicates = 10;
    std::string reduction = "importance_weighted";

    // oracle
    std::string oracle = "ridge_product";  ///< ridge_joint, ridge_product, finite
    double lambda_reg = 1.0;

    // environment
    std::string environment = "synthetic_linear";  ///< synthetic_linear, massart_linear, prop1, csv
    std::size_t dim = 5;
    std::size_t num_actions = 4;
    double noise = 0.1;
    double margin = 0.2;                   ///< used by massart_linear
    bool label_dependent = false;
    std::size_t holdout_size = 1000;
    std::size_t num_contexts = 50;
    double epsilon = 0.5;
    std::string dataset;
    std::string label_column = "-1";
    bool header = false;
    double holdout_fraction = 0.2;
    bool noisy_rewards = false;
    bool standardize = false;

    // protocol
    std::string schedule = "practical_sqrt2";
    std::size_t horizon = 1000;
    std::uint64_t seed_dataset = 0;
    std::uint64_t seed_algo = 0;
    std::uint64_t replicate = 0;
    std::string output;

    void validate() const;
};

/// Unknown keys and ill-typed values raise ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string dump_run_config(const RunConfig& cfg);
/// Every field as a string, for run metadata.
std::map<std::string, std::string> config_metadata(const RunConfig& cfg);

/// Seed for per-replicate data randomness (permutation, contexts, noise).
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate);

std::unique_ptr<Environment> make_environment(const RunConfig& cfg);
std::unique_ptr<Learner> make_learner(const RunConfig& cfg, const Environment& env);
std::shared_ptr<const RegressionOracle> make_oracle(const RunConfig& cfg, const Environment& env);
Schedule make_schedule(const RunConfig& cfg);

/// Builds everything from the config, runs it and attaches the full config to the metadata.
RunRecord run_config(const RunConfig& cfg);

GridKind grid_kind_for(const std::string& algorithm);

}  // namespace regcb

#endif  // REGCB_CONFIG_HPP
