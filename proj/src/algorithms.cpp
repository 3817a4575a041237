#include "regcb/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace regcb {

ActionId sample_action(const Vector& distribution, Rng& rng)
{
    const double u = uniform01(rng);
    double cumulative = 0.0;
    Eigen::Index last_positive = 0;
    for (Eigen::Index a = 0; a < distribution.size(); ++a) {
        if (distribution[a] <= 0.0) continue;
        last_positive = a;
        cumulative += distribution[a];
        if (u < cumulative) return static_cast<ActionId>(a);
    }
    return static_cast<ActionId>(last_positive);
}

ActionId argmax(const Vector& values)
{
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < values.size(); ++a) {
        if (values[a] > values[best]) best = a;
    }
    return static_cast<ActionId>(best);
}

std::vector<ActionId> disagreement_set(const ConfidenceBounds& bounds)
{
    double best_low = -std::numeric_limits<double>::infinity();
    for (const auto& b : bounds) best_low = std::max(best_low, b.low);
    std::vector<ActionId> set;
    for (ActionId a = 0; a < bounds.size(); ++a) {
        if (bounds[a].high >= best_low) set.push_back(a);
    }
    return set;
}

Reduction parse_reduction(std::string_view name)
{
    if (name == "A" || name == "unweighted") return Reduction::unweighted;
    if (name == "B" || name == "importance_weighted") return Reduction::importance_weighted;
    if (name == "C" || name == "importance_weighted_targets") return Reduction::importance_weighted_targets;
    throw std::invalid_argument("unknown reduction '" + std::string(name) +
                                "' (unweighted, importance_weighted, importance_weighted_targets or A, B, C)");
}

std::string_view to_string(Reduction r)
{
    switch (r) {
    case Reduction::unweighted: return "A";
    case Reduction::importance_weighted: return "B";
    case Reduction::importance_weighted_targets: return "C";
    }
    return "?";
}

History reduce_importance_weighted(const BanditObservation& obs, Reduction reduction, std::size_t num_actions)
{
    if (!(obs.propensity > 0.0)) throw std::invalid_argument("propensity must be positive");
    if (obs.action >= num_actions) throw std::out_of_range("action out of range");
    switch (reduction) {
    case Reduction::unweighted:
        return {{1.0, obs.context, obs.action, obs.reward}};
    case Reduction::importance_weighted:
        return {{1.0 / obs.propensity, obs.context, obs.action, obs.reward}};
    case Reduction::importance_weighted_targets: {
        History out;
        out.reserve(num_actions);
        for (ActionId a = 0; a < num_actions; ++a) {
            out.push_back({1.0, obs.context, a, a == obs.action ? obs.reward / obs.propensity : 0.0});
        }
        return out;
    }
    }
    return {};
}

// ---------------------------------------------------------------------------------------

RadiusPolicy RadiusPolicy::constant(double beta, bool raw_units)
{
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    RadiusPolicy p;
    p.kind = Kind::constant;
    p.beta = beta;
    p.raw_units = raw_units;
    return p;
}

RadiusPolicy RadiusPolicy::theory(double confidence_constant, std::size_t total_epochs)
{
    if (!(confidence_constant >= 0.0)) throw std::invalid_argument("confidence constant must be >= 0");
    RadiusPolicy p;
    p.kind = Kind::theory;
    p.confidence_constant = confidence_constant;
    p.total_epochs = total_epochs;
    return p;
}

Radius RadiusPolicy::normalized(std::size_t epoch, std::size_t epoch_start) const
{
    if (epoch <= 1) return Radius::unbounded();
    if (kind == Kind::theory) return beta_schedule(total_epochs, epoch, confidence_constant, epoch_start);
    if (raw_units) return Radius::bounded(beta / static_cast<double>(epoch_start - 1));
    return Radius::bounded(beta);
}

Radius RadiusPolicy::summed(std::size_t epoch, std::size_t epoch_start) const
{
    if (kind == Kind::constant && raw_units) {
        return epoch <= 1 ? Radius::unbounded() : Radius::bounded(beta);
    }
    return unnormalized_radius(normalized(epoch, epoch_start), epoch_start);
}

// ---------------------------------------------------------------------------------------

namespace {

class JointRidgeModel : public ConfidenceModel {
public:
    JointRidgeModel(FeatureMap map, std::size_t num_actions, double lambda, RidgeBoundsOptions options)
        : map_(std::move(map)), num_actions_(num_actions),
          state_(static_cast<Eigen::Index>(map_.dimension()), lambda), options_(options)
    {}
    std::size_t num_actions() const override { return num_actions_; }
    void add(const WeightedRegressionExample& ex) override
    {
        state_.add(map_(ex.context, ex.action), ex.weight, ex.target);
    }
    std::unique_ptr<const VersionSpace> freeze(const Radius& radius) const override
    {
        return std::make_unique<RidgeVersionSpace>(map_, num_actions_, RidgeSolutiond(state_), radius, options_);
    }

private:
    FeatureMap map_;
    std::size_t num_actions_;
    RidgeStated state_;
    RidgeBoundsOptions options_;
};

class ProductRidgeModel : public ConfidenceModel {
public:
    ProductRidgeModel(FeatureMap map, std::size_t num_actions, double lambda, RidgeBoundsOptions options)
        : map_(std::move(map)),
          states_(num_actions, RidgeStated(static_cast<Eigen::Index>(map_.dimension()), lambda)),
          options_(options)
    {}
    std::size_t num_actions() const override { return states_.size(); }
    void add(const WeightedRegressionExample& ex) override
    {
        states_.at(ex.action).add(map_(ex.context, ex.action), ex.weight, ex.target);
    }
    std::unique_ptr<const VersionSpace> freeze(const Radius& radius) const override
    {
        std::vector<RidgeSolutiond> solutions;
        solutions.reserve(states_.size());
        for (const auto& s : states_) solutions.emplace_back(s);
        return std::make_unique<RidgeVersionSpace>(map_, std::move(solutions), radius, options_);
    }

private:
    FeatureMap map_;
    std::vector<RidgeStated> states_;
    RidgeBoundsOptions options_;
};

class FiniteModel : public ConfidenceModel {
public:
    explicit FiniteModel(std::shared_ptr<const FiniteClass> cls) : class_(std::move(cls)) {}
    std::size_t num_actions() const override { return class_->num_actions(); }
    void add(const WeightedRegressionExample& ex) override { history_.push_back(ex); }
    std::unique_ptr<const VersionSpace> freeze(const Radius& radius) const override
    {
        return std::make_unique<FiniteVersionSpace>(class_, history_, radius);
    }

private:
    std::shared_ptr<const FiniteClass> class_;
    History history_;
};

class FiniteProductModel : public ConfidenceModel {
public:
    explicit FiniteProductModel(std::shared_ptr<const FiniteProductClass> cls) : class_(std::move(cls)) {}
    std::size_t num_actions() const override { return class_->num_actions(); }
    void add(const WeightedRegressionExample& ex) override { history_.push_back(ex); }
    std::unique_ptr<const VersionSpace> freeze(const Radius& radius) const override
    {
        return std::make_unique<FiniteProductVersionSpace>(class_, history_, radius);
    }

private:
    std::shared_ptr<const FiniteProductClass> class_;
    History history_;
};

}  // namespace

std::unique_ptr<ConfidenceModel> make_joint_ridge_model(FeatureMap joint_map, std::size_t num_actions, double lambda,
                                                        RidgeBoundsOptions options)
{
    return std::make_unique<JointRidgeModel>(std::move(joint_map), num_actions, lambda, options);
}

std::unique_ptr<ConfidenceModel> make_product_ridge_model(FeatureMap per_action_map, std::size_t num_actions,
                                                          double lambda, RidgeBoundsOptions options)
{
    return std::make_unique<ProductRidgeModel>(std::move(per_action_map), num_actions, lambda, options);
}

std::unique_ptr<ConfidenceModel> make_finite_model(std::shared_ptr<const FiniteClass> cls)
{
    return std::make_unique<FiniteModel>(std::move(cls));
}

std::unique_ptr<ConfidenceModel> make_finite_product_model(std::shared_ptr<const FiniteProductClass> cls)
{
    return std::make_unique<FiniteProductModel>(std::move(cls));
}

// ---------------------------------------------------------------------------------------

RegCBBase::RegCBBase(std::unique_ptr<ConfidenceModel> model, Schedule schedule, RadiusPolicy radius)
    : model_(std::move(model)), schedule_(std::move(schedule)), radius_policy_(radius)
{
    if (!model_) throw std::invalid_argument("RegCB needs a model");
    space_ = model_->freeze(Radius::unbounded());
}

void RegCBBase::observe(const BanditObservation& obs, std::size_t)
{
    for (const auto& ex : reduce_importance_weighted(obs, Reduction::unweighted, num_actions())) {
        model_->add(ex);
    }
}

void RegCBBase::on_epoch_boundary(std::size_t round)
{
    epoch_ = schedule_.epoch_of(round);
    radius_summed_ = radius_policy_.summed(epoch_, round);
    space_ = model_->freeze(radius_summed_);
}

ConfidenceBounds RegCBBase::bounds(const Context& x) const
{
    return space_->bounds(x);
}

const VersionSpace& RegCBBase::version_space() const
{
    return *space_;
}

namespace {
Vector uniform_over(const std::vector<ActionId>& set, std::size_t num_actions)
{
    Vector p = Vector::Zero(static_cast<Eigen::Index>(num_actions));
    for (const auto a : set) p[static_cast<Eigen::Index>(a)] = 1.0 / static_cast<double>(set.size());
    return p;
}
}  // namespace

Vector RegCBElimination::action_distribution(const Context& x, std::size_t) const
{
    return uniform_over(disagreement_set(bounds(x)), num_actions());
}

Decision RegCBElimination::act(const Context& x, std::size_t, Rng& rng) const
{
    const ConfidenceBounds b = bounds(x);
    const auto set = disagreement_set(b);
    const ActionId a = set[uniform_index(rng, set.size())];
    return {a, 1.0 / static_cast<double>(set.size()), b[a].width(), set.size()};
}

RegCBOptimistic::RegCBOptimistic(std::unique_ptr<ConfidenceModel> model, Schedule schedule, RadiusPolicy radius,
                                 std::size_t warm_start_epochs)
    : RegCBBase(std::move(model), std::move(schedule), radius), warm_start_epochs_(warm_start_epochs)
{}

bool RegCBOptimistic::in_warm_start(std::size_t round) const
{
    if (warm_start_epochs_ <= 1) return false;
    if (warm_start_epochs_ > schedule().num_epochs()) return true;
    return round < schedule().start_of(warm_start_epochs_);
}

namespace {
Vector highs(const ConfidenceBounds& b)
{
    Vector h(static_cast<Eigen::Index>(b.size()));
    for (std::size_t a = 0; a < b.size(); ++a) h[static_cast<Eigen::Index>(a)] = b[a].high;
    return h;
}
}  // namespace

Vector RegCBOptimistic::action_distribution(const Context& x, std::size_t round) const
{
    const auto k = static_cast<Eigen::Index>(num_actions());
    if (in_warm_start(round)) return Vector::Constant(k, 1.0 / static_cast<double>(k));
    Vector p = Vector::Zero(k);
    p[static_cast<Eigen::Index>(argmax(highs(bounds(x))))] = 1.0;
    return p;
}

Decision RegCBOptimistic::act(const Context& x, std::size_t round, Rng& rng) const
{
    const ConfidenceBounds b = bounds(x);
    const std::size_t set_size = disagreement_set(b).size();
    if (in_warm_start(round)) {
        const ActionId a = uniform_index(rng, num_actions());
        return {a, 1.0 / static_cast<double>(num_actions()), b[a].width(), set_size};
    }
    const ActionId a = argmax(highs(b));
    return {a, 1.0, b[a].width(), set_size};
}

// ---------------------------------------------------------------------------------------

Vector UniformLearner::action_distribution(const Context&, std::size_t) const
{
    return Vector::Constant(static_cast<Eigen::Index>(num_actions_), 1.0 / static_cast<double>(num_actions_));
}

Decision UniformLearner::act(const Context& x, std::size_t round, Rng& rng) const
{
    const ActionId a = sample_action(action_distribution(x, round), rng);
    return {a, 1.0 / static_cast<double>(num_actions_), 0.0, num_actions_};
}

EpsilonGreedy::EpsilonGreedy(std::shared_ptr<const RegressionOracle> oracle, std::size_t num_actions, double epsilon,
                             Reduction reduction)
    : oracle_(std::move(oracle)), num_actions_(num_actions), epsilon_(epsilon), reduction_(reduction)
{
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0,1]");
    greedy_ = oracle_->fit(history_);
}

double EpsilonGreedy::exploration_probability(std::size_t round) const
{
    const double t = static_cast<double>(std::max<std::size_t>(round, 1));
    return std::min(1.0, std::max(1.0 / std::sqrt(t), epsilon_));
}

ActionId EpsilonGreedy::greedy_action(const Context& x) const
{
    Vector scores(static_cast<Eigen::Index>(num_actions_));
    for (ActionId a = 0; a < num_actions_; ++a) scores[static_cast<Eigen::Index>(a)] = greedy_->predict(x, a);
    return argmax(scores);
}

Vector EpsilonGreedy::action_distribution(const Context& x, std::size_t round) const
{
    const double p = exploration_probability(round);
    Vector dist = Vector::Constant(static_cast<Eigen::Index>(num_actions_), p / static_cast<double>(num_actions_));
    dist[static_cast<Eigen::Index>(greedy_action(x))] += 1.0 - p;
    return dist;
}

Decision EpsilonGreedy::act(const Context& x, std::size_t round, Rng& rng) const
{
    const Vector dist = action_distribution(x, round);
    const ActionId a = sample_action(dist, rng);
    const auto support = static_cast<std::size_t>((dist.array() > 0.0).count());
    return {a, dist[static_cast<Eigen::Index>(a)], 0.0, support};
}

void EpsilonGreedy::observe(const BanditObservation& obs, std::size_t)
{
    for (auto& ex : reduce_importance_weighted(obs, reduction_, num_actions_)) history_.push_back(std::move(ex));
}

void EpsilonGreedy::on_epoch_boundary(std::size_t)
{
    greedy_ = oracle_->fit(history_);
}

BootstrapLearner::BootstrapLearner(std::shared_ptr<const RegressionOracle> oracle, std::size_t num_actions,
                                   std::size_t replicates, double beta, std::uint64_t seed)
    : oracle_(std::move(oracle)), num_actions_(num_actions), num_replicates_(replicates), beta_(beta),
      resample_rng_(make_rng(seed, Stream::bootstrap))
{
    if (replicates < 1) throw std::invalid_argument("bootstrap needs at least one replicate");
    if (!(beta >= 0.0)) throw std::invalid_argument("bootstrap beta must be >= 0");
    replicates_.assign(num_replicates_, oracle_->fit(history_));
}

void BootstrapLearner::observe(const BanditObservation& obs, std::size_t)
{
    for (auto& ex : reduce_importance_weighted(obs, Reduction::unweighted, num_actions_)) {
        history_.push_back(std::move(ex));
    }
}

void BootstrapLearner::on_epoch_boundary(std::size_t)
{
    replicates_.clear();
    // the first member sees the data as is, so a single replicate is the greedy fit
    replicates_.push_back(oracle_->fit(history_));
    ++refits_;
    History sample(history_.size());
    for (std::size_t i = 1; i < num_replicates_; ++i) {
        for (auto& ex : sample) ex = history_[uniform_index(resample_rng_, history_.size())];
        replicates_.push_back(oracle_->fit(sample));
        ++refits_;
    }
}

std::pair<Vector, Vector> BootstrapLearner::ensemble_moments(const Context& x) const
{
    const auto k = static_cast<Eigen::Index>(num_actions_);
    Matrix preds(static_cast<Eigen::Index>(replicates_.size()), k);
    for (std::size_t i = 0; i < replicates_.size(); ++i) {
        for (ActionId a = 0; a < num_actions_; ++a) {
            preds(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = replicates_[i]->predict(x, a);
        }
    }
    const Vector mean = preds.colwise().mean().transpose();
    const Vector var = (preds.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
    return {mean, var};
}

ConfidenceBounds BootstrapLearner::bounds(const Context& x) const
{
    const auto [mean, var] = ensemble_moments(x);
    ConfidenceBounds out(num_actions_);
    for (ActionId a = 0; a < num_actions_; ++a) {
        const auto i = static_cast<Eigen::Index>(a);
        const double half = std::sqrt(beta_ * var[i]);
        out[a] = {mean[i] + half, mean[i] - half};
    }
    return out;
}

ActionId BootstrapLearner::choose(const Context& x) const
{
    const auto [mean, var] = ensemble_moments(x);
    const Vector score = mean.array() + (beta_ * var.array()).sqrt();
    return argmax(score);
}

Vector BootstrapLearner::action_distribution(const Context& x, std::size_t) const
{
    Vector p = Vector::Zero(static_cast<Eigen::Index>(num_actions_));
    p[static_cast<Eigen::Index>(choose(x))] = 1.0;
    return p;
}

Decision BootstrapLearner::act(const Context& x, std::size_t, Rng&) const
{
    const ConfidenceBounds b = bounds(x);
    const ActionId a = choose(x);
    return {a, 1.0, b[a].width(), disagreement_set(b).size()};
}

}  // namespace regcb
