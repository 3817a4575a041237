#include "regcb/confidence.hpp"

#include <algorithm>
#include <limits>

namespace regcb {

ProbeFit<double> RefitProbeOracle::solve(double w, double target) const
{
    const PredictorPtr f = oracle_fit_augmented(oracle_, history_, x_, a_, w, target);
    return {f->predict(x_, a_), objective(*f, history_)};
}

BinSearchResult bin_search(BoundType type, const ProbeOracle& oracle, const BinSearchConfig& config)
{
    if (!oracle.convex()) {
        throw ContractViolation("bin_search needs a convex class; use exact_bounds_finite for enumerated classes");
    }
    const double beta = config.radius;
    const double alpha = config.precision;
    if (!(beta > 0.0) || !(alpha > 0.0)) {
        throw std::invalid_argument("bin_search: radius and precision must be positive");
    }
    const bool high = type == BoundType::high;
    const double target = high ? 2.0 : -1.0;
    auto clip = [high](double z) { return high ? std::min(z, 1.0) : std::max(z, 0.0); };

    BinSearchResult result;
    double w_low = 0.0;
    double w_high = beta / alpha;

    const ProbeFit<double> f_low = oracle.solve(w_low, target);
    const ProbeFit<double> f_high = oracle.solve(w_high, target);
    result.oracle_calls = 2;
    double z_low = f_low.prediction;
    double z_high = f_high.prediction;
    const double risk_min = f_low.objective;
    result.unconstrained = z_low;

    const bool past_cap = high ? z_low >= 1.0 : z_low <= 0.0;
    if (past_cap) {
        result.value = high ? 1.0 : 0.0;
        result.early_return = true;
        return result;
    }
    if (f_low.objective == f_high.objective) {
        // A minimizer already sits on the synthetic target. When the probe does not move at
        // all, no other prediction is reachable and the plain minimizer is the bound.
        result.value = z_high == z_low ? clip(z_low) : (high ? 1.0 : 0.0);
        result.early_return = true;
        return result;
    }

    const double gap = std::abs(target - z_low);
    const double delta = alpha * beta / (gap * gap * gap);
    while (std::abs(z_high - z_low) > alpha && std::abs(w_high - w_low) > delta) {
        if (result.iterations >= config.max_iterations) {
            throw std::runtime_error("bin_search exceeded its iteration guard");
        }
        ++result.iterations;
        const double w = 0.5 * (w_high + w_low);
        const ProbeFit<double> f = oracle.solve(w, target);
        ++result.oracle_calls;
        if (f.objective >= risk_min + beta) {
            w_high = w;
            z_high = f.prediction;
        } else {
            w_low = w;
            z_low = f.prediction;
        }
    }
    result.value = clip(z_high);
    return result;
}

BinSearchResult bin_search(BoundType type, const Context& x, ActionId a, const History& history,
                           const BinSearchConfig& config, const RegressionOracle& oracle)
{
    const RefitProbeOracle probe(oracle, history, x, a);
    return bin_search(type, probe, config);
}

std::size_t bin_search_iteration_budget(BoundType type, double unconstrained, double precision)
{
    const double gap = type == BoundType::high ? 2.0 - unconstrained : 1.0 + unconstrained;
    const double ratio = gap * gap * gap / (precision * precision);
    if (ratio <= 1.0) return 0;
    return static_cast<std::size_t>(std::ceil(std::log2(ratio)));
}

std::vector<std::size_t> finite_version_space(const Vector& risks, const Radius& radius)
{
    std::vector<std::size_t> members;
    if (risks.size() == 0) return members;
    if (radius.is_unbounded()) {
        members.resize(static_cast<std::size_t>(risks.size()));
        for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
        return members;
    }
    const double best = risks.minCoeff();
    // absorbs rounding in sums of squares that are equal in exact arithmetic
    const double slack = 1e-12 * std::max(1.0, std::abs(best));
    for (Eigen::Index i = 0; i < risks.size(); ++i) {
        if (risks[i] - best <= radius.value() + slack) members.push_back(static_cast<std::size_t>(i));
    }
    return members;
}

ConfidenceBounds exact_bounds_finite(const Context& x, const History& history, const Radius& radius,
                                     const FiniteClass& cls)
{
    const auto members = finite_version_space(cls.risks(history), radius);
    ConfidenceBounds out(cls.num_actions());
    for (ActionId a = 0; a < cls.num_actions(); ++a) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const auto i : members) {
            const double v = cls.value(i, x, a);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        out[a] = {hi, lo};
    }
    return out;
}

ConfidenceBounds exact_bounds_finite_product(const Context& x, const History& history, const Radius& radius,
                                             const FiniteProductClass& cls)
{
    ConfidenceBounds out(cls.num_actions());
    for (ActionId a = 0; a < cls.num_actions(); ++a) {
        const auto members = finite_version_space(cls.risks(a, history), radius);
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const auto g : members) {
            const double v = cls.value(a, g, x);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        out[a] = {hi, lo};
    }
    return out;
}

ActionBounds clamp_unit(ActionBounds b)
{
    return {std::clamp(b.high, 0.0, 1.0), std::clamp(b.low, 0.0, 1.0)};
}

// ---------------------------------------------------------------------------------------

RidgeVersionSpace::RidgeVersionSpace(FeatureMap joint_map, std::size_t num_actions, RidgeSolutiond solution,
                                     Radius radius, RidgeBoundsOptions options)
    : map_(std::move(joint_map)), num_actions_(num_actions), product_(false), radius_(radius), options_(options)
{
    if (map_.mode() == FeatureMap::Mode::per_action) {
        throw std::invalid_argument("joint version space needs a joint feature map");
    }
    solutions_.push_back(std::move(solution));
}

RidgeVersionSpace::RidgeVersionSpace(FeatureMap per_action_map, std::vector<RidgeSolutiond> solutions,
                                     Radius radius, RidgeBoundsOptions options)
    : map_(std::move(per_action_map)), num_actions_(solutions.size()), solutions_(std::move(solutions)),
      product_(true), radius_(radius), options_(options)
{
    if (map_.mode() != FeatureMap::Mode::per_action) {
        throw std::invalid_argument("product version space needs a per-action feature map");
    }
    if (solutions_.empty()) throw std::invalid_argument("product version space needs K >= 1");
}

const RidgeSolutiond& RidgeVersionSpace::solution(ActionId a) const
{
    return product_ ? solutions_.at(a) : solutions_.front();
}

ActionBounds RidgeVersionSpace::raw_bounds(const Context& x, ActionId a) const
{
    if (radius_.is_unbounded()) {
        return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    const RidgeSolutiond& sol = solution(a);
    const Vector phi = map_(x, a);
    const double c = radius_.value();
    if (options_.method == BoundsMethod::closed_form || c == 0.0) {
        if (c == 0.0) {
            const double z = sol.predict(phi);
            return {z, z};
        }
        return closed_form_ridge_bounds(phi, sol, c);
    }
    const RidgeProbeOracle probe(sol, phi);
    const BinSearchConfig cfg{c, options_.precision, options_.max_iterations};
    return {bin_search(BoundType::high, probe, cfg).value, bin_search(BoundType::low, probe, cfg).value};
}

ConfidenceBounds RidgeVersionSpace::bounds(const Context& x) const
{
    ConfidenceBounds out(num_actions_);
    for (ActionId a = 0; a < num_actions_; ++a) out[a] = clamp_unit(raw_bounds(x, a));
    return out;
}

Vector RidgeVersionSpace::center(const Context& x) const
{
    Vector z(static_cast<Eigen::Index>(num_actions_));
    for (ActionId a = 0; a < num_actions_; ++a) {
        z[static_cast<Eigen::Index>(a)] = solution(a).predict(map_(x, a));
    }
    return z;
}

FiniteVersionSpace::FiniteVersionSpace(std::shared_ptr<const FiniteClass> cls, const History& history, Radius radius)
    : class_(std::move(cls))
{
    const Vector risks = class_->risks(history);
    members_ = finite_version_space(risks, radius);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < risks.size(); ++i) {
        if (risks[i] < risks[best]) best = i;
    }
    minimizer_ = static_cast<std::size_t>(best);
}

ConfidenceBounds FiniteVersionSpace::bounds(const Context& x) const
{
    ConfidenceBounds out(class_->num_actions());
    for (ActionId a = 0; a < out.size(); ++a) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const auto i : members_) {
            const double v = class_->value(i, x, a);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        out[a] = {hi, lo};
    }
    return out;
}

Vector FiniteVersionSpace::center(const Context& x) const
{
    Vector z(static_cast<Eigen::Index>(class_->num_actions()));
    for (ActionId a = 0; a < class_->num_actions(); ++a) {
        z[static_cast<Eigen::Index>(a)] = class_->value(minimizer_, x, a);
    }
    return z;
}

FiniteProductVersionSpace::FiniteProductVersionSpace(std::shared_ptr<const FiniteProductClass> cls,
                                                     const History& history, Radius radius)
    : class_(std::move(cls))
{
    for (ActionId a = 0; a < class_->num_actions(); ++a) {
        const Vector risks = class_->risks(a, history);
        members_.push_back(finite_version_space(risks, radius));
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < risks.size(); ++i) {
            if (risks[i] < risks[best]) best = i;
        }
        minimizers_.push_back(static_cast<std::size_t>(best));
    }
}

ConfidenceBounds FiniteProductVersionSpace::bounds(const Context& x) const
{
    ConfidenceBounds out(class_->num_actions());
    for (ActionId a = 0; a < out.size(); ++a) {
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const auto g : members_[a]) {
            const double v = class_->value(a, g, x);
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        out[a] = {hi, lo};
    }
    return out;
}

Vector FiniteProductVersionSpace::center(const Context& x) const
{
    Vector z(static_cast<Eigen::Index>(class_->num_actions()));
    for (ActionId a = 0; a < class_->num_actions(); ++a) {
        z[static_cast<Eigen::Index>(a)] = class_->value(a, minimizers_[a], x);
    }
    return z;
}

}  // namespace regcb
