#ifndef REGCB_ALGORITHMS_HPP
#define REGCB_ALGORITHMS_HPP

#include <memory>
#include <string>
#include <vector>

#include "regcb/confidence.hpp"
#include "regcb/core.hpp"
#include "regcb/oracle.hpp"
#include "regcb/random.hpp"

namespace regcb {

struct Decision {
    ActionId action = 0;
    double propensity = 1.0;
    double width = 0.0;             ///< reward width of the chosen action
    std::size_t disagreement = 1;   ///< |A_t|
};

/// Online contextual-bandit learner. act() and action_distribution() are const: holdout
/// evaluation may call them at any time without changing what the learner does next.
class Learner {
public:
    virtual ~Learner() = default;
    virtual std::string name() const = 0;
    virtual std::size_t num_actions() const = 0;
    virtual Vector action_distribution(const Context& x, std::size_t round) const = 0;
    virtual Decision act(const Context& x, std::size_t round, Rng& rng) const = 0;
    virtual void observe(const BanditObservation& obs, std::size_t round) = 0;
    /// Called exactly at each epoch start tau_m, before acting on that round.
    virtual void on_epoch_boundary(std::size_t round) = 0;
};

/// Samples from a distribution over actions with a single uniform draw.
ActionId sample_action(const Vector& distribution, Rng& rng);

/// Lowest-index argmax.
ActionId argmax(const Vector& values);

/// A_t = {a : High(a) >= max_a' Low(a')}.
std::vector<ActionId> disagreement_set(const ConfidenceBounds& bounds);

// ---------------------------------------------------------------------------------------
// Reductions of importance-weighted bandit data to regression examples.

enum class Reduction { unweighted, importance_weighted, importance_weighted_targets };

Reduction parse_reduction(std::string_view name);
std::string_view to_string(Reduction r);

/// (A) one example, weight 1; (B) one example, weight 1/p; (C) K examples, target r/p on
/// the chosen action and 0 on the others, all weight 1.
History reduce_importance_weighted(const BanditObservation& obs, Reduction reduction, std::size_t num_actions);

// ---------------------------------------------------------------------------------------
// Version-space radii

struct RadiusPolicy {
    enum class Kind { constant, theory };

    Kind kind = Kind::constant;
    /// Constant beta. With `raw_units` it is used directly on the summed objective; otherwise
    /// it is in mean-loss units and scaled by tau_m - 1.
    double beta = 1.0;
    bool raw_units = true;
    /// Theory schedule: beta_m = (M - m + 1) C / (tau_m - 1).
    double confidence_constant = 0.0;
    std::size_t total_epochs = 1;

    static RadiusPolicy constant(double beta, bool raw_units);
    static RadiusPolicy theory(double confidence_constant, std::size_t total_epochs);

    /// Radius in normalized units; unbounded in epoch 1.
    Radius normalized(std::size_t epoch, std::size_t epoch_start) const;
    /// Radius on the summed objective handed to the bound computations.
    Radius summed(std::size_t epoch, std::size_t epoch_start) const;
};

// ---------------------------------------------------------------------------------------
// Regression models that accumulate examples and freeze a version space per epoch.

class ConfidenceModel {
public:
    virtual ~ConfidenceModel() = default;
    virtual std::size_t num_actions() const = 0;
    virtual void add(const WeightedRegressionExample& example) = 0;
    virtual std::unique_ptr<const VersionSpace> freeze(const Radius& summed_radius) const = 0;
};

std::unique_ptr<ConfidenceModel> make_joint_ridge_model(FeatureMap joint_map, std::size_t num_actions,
                                                        double lambda, RidgeBoundsOptions options = {});
std::unique_ptr<ConfidenceModel> make_product_ridge_model(FeatureMap per_action_map, std::size_t num_actions,
                                                          double lambda, RidgeBoundsOptions options = {});
std::unique_ptr<ConfidenceModel> make_finite_model(std::shared_ptr<const FiniteClass> cls);
std::unique_ptr<ConfidenceModel> make_finite_product_model(std::shared_ptr<const FiniteProductClass> cls);

// ---------------------------------------------------------------------------------------

/// Shared machinery of the two confidence-based learners: unweighted on-policy examples,
/// version space frozen at each epoch start.
class RegCBBase : public Learner {
public:
    RegCBBase(std::unique_ptr<ConfidenceModel> model, Schedule schedule, RadiusPolicy radius);

    std::size_t num_actions() const override { return model_->num_actions(); }
    void observe(const BanditObservation& obs, std::size_t round) override;
    void on_epoch_boundary(std::size_t round) override;

    ConfidenceBounds bounds(const Context& x) const;
    const VersionSpace& version_space() const;
    std::size_t current_epoch() const { return epoch_; }
    const Radius& current_radius() const { return radius_summed_; }
    const Schedule& schedule() const { return schedule_; }

private:
    std::unique_ptr<ConfidenceModel> model_;
    Schedule schedule_;
    RadiusPolicy radius_policy_;
    std::unique_ptr<const VersionSpace> space_;
    std::size_t epoch_ = 0;
    Radius radius_summed_ = Radius::unbounded();
};

/// Uniform over the disagreement set.
class RegCBElimination : public RegCBBase {
public:
    using RegCBBase::RegCBBase;
    std::string name() const override { return "regcb-elim"; }
    Vector action_distribution(const Context& x, std::size_t round) const override;
    Decision act(const Context& x, std::size_t round, Rng& rng) const override;
};

/// Largest upper bound after `warm_start_epochs` epochs of uniform play.
class RegCBOptimistic : public RegCBBase {
public:
    RegCBOptimistic(std::unique_ptr<ConfidenceModel> model, Schedule schedule, RadiusPolicy radius,
                    std::size_t warm_start_epochs = 0);
    std::string name() const override { return "regcb-opt"; }
    Vector action_distribution(const Context& x, std::size_t round) const override;
    Decision act(const Context& x, std::size_t round, Rng& rng) const override;
    bool in_warm_start(std::size_t round) const;

private:
    std::size_t warm_start_epochs_;
};

// ---------------------------------------------------------------------------------------
// Baselines

class UniformLearner : public Learner {
public:
    explicit UniformLearner(std::size_t num_actions) : num_actions_(num_actions) {}
    std::string name() const override { return "uniform"; }
    std::size_t num_actions() const override { return num_actions_; }
    Vector action_distribution(const Context& x, std::size_t round) const override;
    Decision act(const Context& x, std::size_t round, Rng& rng) const override;
    void observe(const BanditObservation&, std::size_t) override {}
    void on_epoch_boundary(std::size_t) override {}

private:
    std::size_t num_actions_;
};

/// Explores uniformly with probability max(1/sqrt(t), epsilon), otherwise plays the greedy
/// action of the predictor refit at the last epoch start.
class EpsilonGreedy : public Learner {
public:
    EpsilonGreedy(std::shared_ptr<const RegressionOracle> oracle, std::size_t num_actions, double epsilon,
                  Reduction reduction = Reduction::importance_weighted);
    std::string name() const override { return "egreedy"; }
    std::size_t num_actions() const override { return num_actions_; }
    Vector action_distribution(const Context& x, std::size_t round) const override;
    Decision act(const Context& x, std::size_t round, Rng& rng) const override;
    void observe(const BanditObservation& obs, std::size_t round) override;
    void on_epoch_boundary(std::size_t round) override;

    double exploration_probability(std::size_t round) const;
    ActionId greedy_action(const Context& x) const;

private:
    std::shared_ptr<const RegressionOracle> oracle_;
    std::size_t num_actions_;
    double epsilon_;
    Reduction reduction_;
    History history_;
    PredictorPtr greedy_;
};

/// N predictors, the first fit on the history itself and the rest on bootstrap resamples;
/// plays argmax mean(a) + sqrt(beta var(a)).
class BootstrapLearner : public Learner {
public:
    BootstrapLearner(std::shared_ptr<const RegressionOracle> oracle, std::size_t num_actions, std::size_t replicates,
                     double beta, std::uint64_t seed);
    std::string name() const override { return "bootstrap"; }
    std::size_t num_actions() const override { return num_actions_; }
    Vector action_distribution(const Context& x, std::size_t round) const override;
    Decision act(const Context& x, std::size_t round, Rng& rng) const override;
    void observe(const BanditObservation& obs, std::size_t round) override;
    void on_epoch_boundary(std::size_t round) override;

    /// Per-action mean and population variance of the replicate predictions.
    std::pair<Vector, Vector> ensemble_moments(const Context& x) const;
    ConfidenceBounds bounds(const Context& x) const;
    const std::vector<PredictorPtr>& replicates() const { return replicates_; }
    std::size_t refits() const { return refits_; }

private:
    ActionId choose(const Context& x) const;

    std::shared_ptr<const RegressionOracle> oracle_;
    std::size_t num_actions_;
    std::size_t num_replicates_;
    double beta_;
    Rng resample_rng_;
    History history_;
    std::vector<PredictorPtr> replicates_;
    std::size_t refits_ = 0;
};

}  // namespace regcb

#endif  // REGCB_ALGORITHMS_HPP
