#ifndef REGCB_CONFIDENCE_HPP
#define REGCB_CONFIDENCE_HPP

#include <cmath>
#include <memory>
#include <vector>

#include "regcb/core.hpp"
#include "regcb/oracle.hpp"
#include "regcb/ridge.hpp"

namespace regcb {

template <typename Scalar>
struct Interval {
    Scalar high;
    Scalar low;
    Scalar width() const { return high - low; }
};

using ActionBounds = Interval<double>;
/// One (high, low) pair per action at a fixed context.
using ConfidenceBounds = std::vector<ActionBounds>;

enum class BoundType { high, low };

struct BinSearchConfig {
    double radius = 1.0;     ///< beta on the summed objective
    double precision = 1e-3; ///< alpha
    std::size_t max_iterations = 200;
};

struct BinSearchResult {
    double value = 0.0;
    std::size_t oracle_calls = 0;
    std::size_t iterations = 0;
    double unconstrained = 0.0;  ///< z0, the prediction of the plain minimizer
    bool early_return = false;
};

/// Regression oracle bound to one probe (x, a) and one base history. solve(w, r) returns
/// the minimizer of R(f) + (w/2)(f(x,a) - r)^2 as (f(x,a), R(f)).
class ProbeOracle {
public:
    virtual ~ProbeOracle() = default;
    virtual bool convex() const = 0;
    virtual ProbeFit<double> solve(double w, double target) const = 0;
};

/// Ridge fast path: rank-one updates of frozen sufficient statistics.
class RidgeProbeOracle : public ProbeOracle {
public:
    RidgeProbeOracle(const RidgeSolutiond& solution, Vector phi) : solution_(solution), phi_(std::move(phi)) {}
    bool convex() const override { return true; }
    ProbeFit<double> solve(double w, double target) const override { return solution_.probe(phi_, w, target); }

private:
    const RidgeSolutiond& solution_;
    Vector phi_;
};

/// Generic path: each call refits the oracle from scratch on the augmented history.
class RefitProbeOracle : public ProbeOracle {
public:
    RefitProbeOracle(const RegressionOracle& oracle, const History& history, Context x, ActionId a)
        : oracle_(oracle), history_(history), x_(std::move(x)), a_(a)
    {}
    bool convex() const override { return oracle_.convex(); }
    ProbeFit<double> solve(double w, double target) const override;

private:
    const RegressionOracle& oracle_;
    const History& history_;
    Context x_;
    ActionId a_;
};

/// Upper or lower reward bound over {f : R(f) <= min R + beta} by binary search on the
/// weight of one synthetic example (target 2 for High, -1 for Low). Unbounded-class
/// variant: High is capped at 1 and Low floored at 0, with the early exits for a minimizer
/// already past the cap. Throws ContractViolation for non-convex classes.
BinSearchResult bin_search(BoundType type, const ProbeOracle& oracle, const BinSearchConfig& config);

BinSearchResult bin_search(BoundType type, const Context& x, ActionId a, const History& history,
                           const BinSearchConfig& config, const RegressionOracle& oracle);

/// Loop iterations the search may use: ceil(log2((2 - z0)^3 / alpha^2)) for High and
/// ceil(log2((1 + z0)^3 / alpha^2)) for Low.
std::size_t bin_search_iteration_budget(BoundType type, double unconstrained, double precision);

/// w' phi +- sqrt(c phi' A^{-1} phi). Throws InvalidState for a singular system.
template <typename Scalar, typename Derived>
Interval<Scalar> closed_form_ridge_bounds(const Eigen::MatrixBase<Derived>& phi, const RidgeSolution<Scalar>& solution,
                                          Scalar radius)
{
    if (!(radius >= Scalar(0))) throw std::invalid_argument("radius must be >= 0");
    const Scalar mid = solution.predict(phi);
    const Scalar half = std::sqrt(radius * solution.inverse_quadratic(phi));
    return {mid + half, mid - half};
}

/// Indices of predictors whose summed risk is within `radius` of the minimum.
std::vector<std::size_t> finite_version_space(const Vector& risks, const Radius& radius);

/// Exact max/min of f(x,a) over the finite version space; `radius` is on the summed risk.
ConfidenceBounds exact_bounds_finite(const Context& x, const History& history, const Radius& radius,
                                     const FiniteClass& cls);

ConfidenceBounds exact_bounds_finite_product(const Context& x, const History& history, const Radius& radius,
                                             const FiniteProductClass& cls);

ActionBounds clamp_unit(ActionBounds b);

// ---------------------------------------------------------------------------------------
// Version spaces frozen for one epoch.

class VersionSpace {
public:
    virtual ~VersionSpace() = default;
    virtual std::size_t num_actions() const = 0;
    virtual ConfidenceBounds bounds(const Context& x) const = 0;
    /// Predictions of the empirical risk minimizer.
    virtual Vector center(const Context& x) const = 0;
};

inline ConfidenceBounds bounds_for_epoch(const Context& x, const VersionSpace& space)
{
    return space.bounds(x);
}

enum class BoundsMethod { closed_form, bin_search };

struct RidgeBoundsOptions {
    BoundsMethod method = BoundsMethod::closed_form;
    double precision = 1e-3;
    std::size_t max_iterations = 200;
};

/// Ridge version space, either one joint solution or one solution per action (product
/// class). Bounds are clamped to [0,1].
class RidgeVersionSpace : public VersionSpace {
public:
    RidgeVersionSpace(FeatureMap joint_map, std::size_t num_actions, RidgeSolutiond solution, Radius radius,
                      RidgeBoundsOptions options = {});
    RidgeVersionSpace(FeatureMap per_action_map, std::vector<RidgeSolutiond> solutions, Radius radius,
                      RidgeBoundsOptions options = {});

    std::size_t num_actions() const override { return num_actions_; }
    ConfidenceBounds bounds(const Context& x) const override;
    Vector center(const Context& x) const override;

    /// Unclamped closed-form or binary-search bounds for one action.
    ActionBounds raw_bounds(const Context& x, ActionId a) const;
    const RidgeSolutiond& solution(ActionId a) const;
    const Radius& radius() const { return radius_; }

private:
    FeatureMap map_;
    std::size_t num_actions_;
    std::vector<RidgeSolutiond> solutions_;
    bool product_;
    Radius radius_;
    RidgeBoundsOptions options_;
};

class FiniteVersionSpace : public VersionSpace {
public:
    FiniteVersionSpace(std::shared_ptr<const FiniteClass> cls, const History& history, Radius radius);

    std::size_t num_actions() const override { return class_->num_actions(); }
    ConfidenceBounds bounds(const Context& x) const override;
    Vector center(const Context& x) const override;
    const std::vector<std::size_t>& members() const { return members_; }

private:
    std::shared_ptr<const FiniteClass> class_;
    std::vector<std::size_t> members_;
    std::size_t minimizer_;
};

class FiniteProductVersionSpace : public VersionSpace {
public:
    FiniteProductVersionSpace(std::shared_ptr<const FiniteProductClass> cls, const History& history, Radius radius);

    std::size_t num_actions() const override { return class_->num_actions(); }
    ConfidenceBounds bounds(const Context& x) const override;
    Vector center(const Context& x) const override;
    const std::vector<std::size_t>& members(ActionId a) const { return members_.at(a); }

private:
    std::shared_ptr<const FiniteProductClass> class_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::size_t> minimizers_;
};

}  // namespace regcb

#endif  // REGCB_CONFIDENCE_HPP
