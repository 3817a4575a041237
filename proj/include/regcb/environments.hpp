#ifndef REGCB_ENVIRONMENTS_HPP
#define REGCB_ENVIRONMENTS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "regcb/core.hpp"
#include "regcb/oracle.hpp"
#include "regcb/random.hpp"

namespace regcb {

struct RoundData {
    Context context;
    RewardVector realized;
    RewardVector mean;
};

struct HoldoutExample {
    Context context;
    RewardVector mean;
};

/// A reward-generating world. round(t) is a pure function of the environment's seeds and t,
/// so replicates can run in parallel and reruns are exact.
class Environment {
public:
    virtual ~Environment() = default;
    virtual std::string name() const = 0;
    virtual std::size_t num_actions() const = 0;
    /// Length of Context::features.
    virtual std::size_t context_dim() const = 0;
    /// Largest usable horizon.
    virtual std::size_t available_rounds() const = 0;
    /// 1-based round.
    virtual RoundData round(std::size_t t) const = 0;
    virtual const std::vector<HoldoutExample>& holdout() const = 0;
    /// Contexts carry per-action feature rows.
    virtual bool label_dependent() const { return false; }
    /// Row length of the per-action features when label_dependent().
    virtual std::size_t action_feature_dim() const { return 0; }
};

// ---------------------------------------------------------------------------------------
// Supervised data turned into bandit feedback

double multiclass_reward(std::size_t label, ActionId action, std::size_t num_actions);
RewardVector multiclass_reward_vector(std::size_t label, std::size_t num_actions);

/// Reward matrix with ones on the diagonal and Bernoulli(mu(a, a*)) elsewhere.
struct NoisyRewardModel {
    Matrix mean;  ///< mean(a, a*), K x K

    static NoisyRewardModel draw(std::size_t num_actions, std::uint64_t dataset_seed);
    void validate() const;
    RewardVector mean_vector(std::size_t label) const;
};

double noisy_reward(const NoisyRewardModel& model, std::size_t label, ActionId action, Rng& round_stream);

struct SupervisedDataset {
    Matrix features;                 ///< one row per example, after permutation
    std::vector<std::size_t> labels;
    std::size_t num_actions = 0;
    std::size_t train_size = 0;      ///< rows [0, train_size) train, the rest holdout

    std::size_t holdout_size() const { return labels.size() - train_size; }
    Vector row(std::size_t i) const { return features.row(static_cast<Eigen::Index>(i)).transpose(); }
};

struct CsvOptions {
    std::string label_column = "-1";   ///< header name, or integer index (negative counts from the end)
    bool header = false;
    double holdout_fraction = 0.0;
    std::uint64_t permutation_seed = 0;
    bool append_bias = true;
    bool standardize = false;
    std::size_t num_actions = 0;       ///< 0 infers max label + 1
};

/// Parse failures carry the 1-based line number.
class CsvParseError : public std::runtime_error {
public:
    CsvParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

SupervisedDataset load_csv_dataset(const std::string& path, const CsvOptions& options);
SupervisedDataset parse_csv_dataset(std::istream& in, const CsvOptions& options);

class MulticlassEnvironment : public Environment {
public:
    MulticlassEnvironment(std::shared_ptr<const SupervisedDataset> data, std::optional<NoisyRewardModel> noise,
                          std::uint64_t reward_seed, std::string name = "multiclass");

    std::string name() const override { return name_; }
    std::size_t num_actions() const override { return data_->num_actions; }
    std::size_t context_dim() const override { return static_cast<std::size_t>(data_->features.cols()); }
    std::size_t available_rounds() const override { return data_->train_size; }
    RoundData round(std::size_t t) const override;
    const std::vector<HoldoutExample>& holdout() const override { return holdout_; }

private:
    RewardVector mean_for(std::size_t label) const;

    std::shared_ptr<const SupervisedDataset> data_;
    std::optional<NoisyRewardModel> noise_;
    std::uint64_t reward_seed_;
    std::string name_;
    std::vector<HoldoutExample> holdout_;
};

// ---------------------------------------------------------------------------------------
// Bad instance for confidence-based exploration: N contexts, a good action worth 1-eps and
// a bad action worth 0 everywhere, and N spoilers that each flip one context.

struct Prop1Instance {
    std::size_t num_contexts = 1;
    double epsilon = 0.5;

    static constexpr ActionId good_action = 0;
    static constexpr ActionId bad_action = 1;

    void validate() const;
    /// Predictor 0 is the truth; predictor i (1..N) flips context i-1.
    std::shared_ptr<const FiniteClass> make_class() const;
    Context context(std::size_t id) const;
    RewardVector mean() const;
};

class Prop1Environment : public Environment {
public:
    /// Contexts uniform over the N contexts, or the given visit sequence (ids) when set.
    Prop1Environment(Prop1Instance instance, std::uint64_t seed,
                     std::optional<std::vector<std::size_t>> sequence = std::nullopt);

    std::string name() const override { return "prop1"; }
    std::size_t num_actions() const override { return 2; }
    std::size_t context_dim() const override { return instance_.num_contexts; }
    std::size_t available_rounds() const override;
    RoundData round(std::size_t t) const override;
    const std::vector<HoldoutExample>& holdout() const override { return holdout_; }
    const Prop1Instance& instance() const { return instance_; }

private:
    Prop1Instance instance_;
    std::uint64_t seed_;
    std::optional<std::vector<std::size_t>> sequence_;
    std::vector<HoldoutExample> holdout_;
};

// ---------------------------------------------------------------------------------------
// Realizable linear worlds

struct SyntheticLinearOptions {
    std::size_t dim = 5;            ///< context dimension including the constant coordinate
    std::size_t num_actions = 4;
    double noise = 0.1;             ///< rewards get uniform noise on [-noise, noise]
    double margin = 0.0;            ///< > 0 keeps only contexts whose best action wins by this much
    bool label_dependent = false;
    std::size_t holdout_size = 1000;
    std::uint64_t world_seed = 0;   ///< fixes the true weights
    std::uint64_t data_seed = 0;    ///< drives contexts and noise
};

/// E[r(a) | x] = w*' phi(x,a) with contexts x = (1, z), |z| = 1. Product form: w*_a =
/// (1/2, v_a) with |v_a| = 0.4, so every mean lies in [0.1, 0.9] and noise up to 0.1
/// never needs clipping. Label-dependent form: rows phi(x,a) = (1, z_a), one shared w*.
class SyntheticLinearWorld : public Environment {
public:
    explicit SyntheticLinearWorld(SyntheticLinearOptions options);

    std::string name() const override;
    std::size_t num_actions() const override { return options_.num_actions; }
    std::size_t context_dim() const override;
    std::size_t available_rounds() const override { return std::numeric_limits<std::size_t>::max(); }
    RoundData round(std::size_t t) const override;
    const std::vector<HoldoutExample>& holdout() const override { return holdout_; }
    bool label_dependent() const override { return options_.label_dependent; }
    std::size_t action_feature_dim() const override { return options_.label_dependent ? options_.dim : 0; }

    /// K x d; row a is w*_a (product form). Label-dependent form: a single row.
    const Matrix& true_weights() const { return weights_; }
    Vector mean_rewards(const Context& x) const;
    Context sample_context(Rng& rng) const;
    const SyntheticLinearOptions& options() const { return options_; }

private:
    Context draw_raw(Rng& rng) const;

    SyntheticLinearOptions options_;
    Matrix weights_;
    std::vector<HoldoutExample> holdout_;
};

}  // namespace regcb

#endif  // REGCB_ENVIRONMENTS_HPP
