#ifndef REGCB_ORACLE_HPP
#define REGCB_ORACLE_HPP

#include <memory>
#include <string>
#include <vector>

#include "regcb/core.hpp"
#include "regcb/feature_map.hpp"
#include "regcb/ridge.hpp"

namespace regcb {

class Predictor {
public:
    virtual ~Predictor() = default;
    virtual double predict(const Context& x, ActionId a) const = 0;
    /// Regularizer value carried by the class's objective (0 for unregularized classes).
    virtual double penalty() const { return 0.0; }
};

using PredictorPtr = std::shared_ptr<const Predictor>;

/// argmin_f sum_i w_i (f(x_i, a_i) - y_i)^2 over a fixed class.
class RegressionOracle {
public:
    virtual ~RegressionOracle() = default;
    virtual PredictorPtr fit(const History& history) const = 0;
    /// Convex and closed under pointwise convergence; the binary search relies on it.
    virtual bool convex() const = 0;
    virtual std::string name() const = 0;
};

PredictorPtr oracle_fit(const RegressionOracle& oracle, const History& history);

/// Fit on `history` plus the probe (x, a) with target `target`, weighted so the objective
/// is R(f) + (w/2)(f(x,a) - target)^2.
PredictorPtr oracle_fit_augmented(const RegressionOracle& oracle, const History& history, const Context& x,
                                  ActionId a, double w, double target);

/// sum_i w_i (f(x_i,a_i) - y_i)^2, without the class's regularizer.
double residual_risk(const Predictor& f, const History& history);
/// residual_risk / (tau_m - 1).
double normalized_risk(const Predictor& f, const History& history, std::size_t epoch_start);
/// residual_risk + penalty: the quantity the oracle minimizes and radii are measured on.
double objective(const Predictor& f, const History& history);

// ---------------------------------------------------------------------------------------
// Linear / ridge

class LinearPredictor : public Predictor {
public:
    LinearPredictor(FeatureMap map, Vector weights, double lambda)
        : map_(std::move(map)), weights_(std::move(weights)), lambda_(lambda)
    {}

    double predict(const Context& x, ActionId a) const override { return weights_.dot(map_(x, a)); }
    double penalty() const override { return lambda_ * weights_.squaredNorm(); }

    const Vector& weights() const { return weights_; }
    const FeatureMap& feature_map() const { return map_; }

private:
    FeatureMap map_;
    Vector weights_;
    double lambda_;
};

/// Joint ridge class f(x,a) = w' phi(x,a).
class RidgeOracle : public RegressionOracle {
public:
    RidgeOracle(FeatureMap map, double lambda = 1.0);

    PredictorPtr fit(const History& history) const override;
    bool convex() const override { return true; }
    std::string name() const override { return "ridge_joint"; }

    RidgeStated statistics(const History& history) const;
    const FeatureMap& feature_map() const { return map_; }
    double lambda() const { return lambda_; }

private:
    FeatureMap map_;
    double lambda_;
};

/// K independent linear predictors, f(x,a) = g_a(x).
class ProductPredictor : public Predictor {
public:
    explicit ProductPredictor(std::vector<LinearPredictor> per_action) : per_action_(std::move(per_action)) {}

    double predict(const Context& x, ActionId a) const override { return per_action_.at(a).predict(x, a); }
    double penalty() const override;
    const LinearPredictor& component(ActionId a) const { return per_action_.at(a); }

private:
    std::vector<LinearPredictor> per_action_;
};

/// Product ridge class: each action's predictor is fit only on examples for that action.
class ProductRidgeOracle : public RegressionOracle {
public:
    ProductRidgeOracle(FeatureMap per_action_map, std::size_t num_actions, double lambda = 1.0);

    PredictorPtr fit(const History& history) const override;
    bool convex() const override { return true; }
    std::string name() const override { return "ridge_product"; }

    std::vector<RidgeStated> statistics(const History& history) const;
    const FeatureMap& feature_map() const { return map_; }
    std::size_t num_actions() const { return num_actions_; }
    double lambda() const { return lambda_; }

private:
    FeatureMap map_;
    std::size_t num_actions_;
    double lambda_;
};

// ---------------------------------------------------------------------------------------
// Enumerated classes. Contexts are looked up by Context::id.

/// Explicit table of predictors; table i is (num contexts x K).
class FiniteClass {
public:
    explicit FiniteClass(std::vector<Matrix> tables);

    std::size_t size() const { return tables_.size(); }
    std::size_t num_contexts() const { return static_cast<std::size_t>(tables_.front().rows()); }
    std::size_t num_actions() const { return static_cast<std::size_t>(tables_.front().cols()); }
    double value(std::size_t predictor, const Context& x, ActionId a) const;
    const Matrix& table(std::size_t predictor) const { return tables_.at(predictor); }

    /// Weighted squared error of every predictor on `history`.
    Vector risks(const History& history) const;

private:
    std::vector<Matrix> tables_;
};

class FinitePredictor : public Predictor {
public:
    FinitePredictor(std::shared_ptr<const FiniteClass> cls, std::size_t index)
        : class_(std::move(cls)), index_(index)
    {}
    double predict(const Context& x, ActionId a) const override { return class_->value(index_, x, a); }
    std::size_t index() const { return index_; }

private:
    std::shared_ptr<const FiniteClass> class_;
    std::size_t index_;
};

/// Exhaustive argmin; ties go to the lowest predictor index.
class FiniteClassOracle : public RegressionOracle {
public:
    explicit FiniteClassOracle(std::shared_ptr<const FiniteClass> cls);

    PredictorPtr fit(const History& history) const override;
    bool convex() const override { return false; }
    std::string name() const override { return "finite"; }
    const FiniteClass& finite_class() const { return *class_; }
    std::shared_ptr<const FiniteClass> shared_class() const { return class_; }

private:
    std::shared_ptr<const FiniteClass> class_;
};

/// Finite product class G^A: base predictors per action, each a vector over context ids.
class FiniteProductClass {
public:
    explicit FiniteProductClass(std::vector<std::vector<Vector>> base);

    std::size_t num_actions() const { return base_.size(); }
    std::size_t size(ActionId a) const { return base_.at(a).size(); }
    double value(ActionId a, std::size_t g, const Context& x) const;
    /// Squared error of each base predictor of action a on the examples of action a.
    Vector risks(ActionId a, const History& history) const;

private:
    std::vector<std::vector<Vector>> base_;
};

std::size_t context_id(const Context& x);

}  // namespace regcb

#endif  // REGCB_ORACLE_HPP
