#include "regcb/oracle.hpp"

namespace regcb {

PredictorPtr oracle_fit(const RegressionOracle& oracle, const History& history)
{
    return oracle.fit(history);
}

PredictorPtr oracle_fit_augmented(const RegressionOracle& oracle, const History& history, const Context& x,
                                  ActionId a, double w, double target)
{
    if (!(w >= 0.0)) throw std::invalid_argument("augmentation weight must be >= 0");
    History augmented = history;
    augmented.push_back({w / 2.0, x, a, target});
    return oracle.fit(augmented);
}

double residual_risk(const Predictor& f, const History& history)
{
    double total = 0.0;
    for (const auto& ex : history) {
        const double e = f.predict(ex.context, ex.action) - ex.target;
        total += ex.weight * e * e;
    }
    return total;
}

double normalized_risk(const Predictor& f, const History& history, std::size_t epoch_start)
{
    if (epoch_start < 2) throw std::invalid_argument("normalized risk needs tau_m >= 2");
    return residual_risk(f, history) / static_cast<double>(epoch_start - 1);
}

double objective(const Predictor& f, const History& history)
{
    return residual_risk(f, history) + f.penalty();
}

// ---------------------------------------------------------------------------------------

RidgeOracle::RidgeOracle(FeatureMap map, double lambda) : map_(std::move(map)), lambda_(lambda)
{
    if (map_.mode() == FeatureMap::Mode::per_action) {
        throw std::invalid_argument("joint ridge oracle needs a joint feature map");
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("ridge lambda must be >= 0");
}

RidgeStated RidgeOracle::statistics(const History& history) const
{
    RidgeStated state(static_cast<Eigen::Index>(map_.dimension()), lambda_);
    for (const auto& ex : history) {
        state.add(map_(ex.context, ex.action), ex.weight, ex.target);
    }
    return state;
}

PredictorPtr RidgeOracle::fit(const History& history) const
{
    RidgeSolutiond solution(statistics(history));
    return std::make_shared<LinearPredictor>(map_, solution.weights(), lambda_);
}

double ProductPredictor::penalty() const
{
    double total = 0.0;
    for (const auto& p : per_action_) total += p.penalty();
    return total;
}

ProductRidgeOracle::ProductRidgeOracle(FeatureMap per_action_map, std::size_t num_actions, double lambda)
    : map_(std::move(per_action_map)), num_actions_(num_actions), lambda_(lambda)
{
    if (map_.mode() != FeatureMap::Mode::per_action) {
        throw std::invalid_argument("product ridge oracle needs a per-action feature map");
    }
    if (num_actions == 0) throw std::invalid_argument("product ridge oracle needs K >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("ridge lambda must be >= 0");
}

std::vector<RidgeStated> ProductRidgeOracle::statistics(const History& history) const
{
    std::vector<RidgeStated> states(num_actions_, RidgeStated(static_cast<Eigen::Index>(map_.dimension()), lambda_));
    for (const auto& ex : history) {
        states.at(ex.action).add(map_(ex.context, ex.action), ex.weight, ex.target);
    }
    return states;
}

PredictorPtr ProductRidgeOracle::fit(const History& history) const
{
    std::vector<LinearPredictor> parts;
    parts.reserve(num_actions_);
    for (auto& state : statistics(history)) {
        RidgeSolutiond solution(std::move(state));
        parts.emplace_back(map_, solution.weights(), lambda_);
    }
    return std::make_shared<ProductPredictor>(std::move(parts));
}

// ---------------------------------------------------------------------------------------

std::size_t context_id(const Context& x)
{
    if (!x.id) throw std::invalid_argument("finite classes need contexts with an id");
    return *x.id;
}

FiniteClass::FiniteClass(std::vector<Matrix> tables) : tables_(std::move(tables))
{
    if (tables_.empty()) throw InvalidState("finite class is empty");
    for (const auto& t : tables_) {
        if (t.rows() != tables_.front().rows() || t.cols() != tables_.front().cols()) {
            throw std::invalid_argument("finite class tables must share a shape");
        }
        if (!t.allFinite()) throw std::invalid_argument("finite class predictions must be finite");
    }
}

double FiniteClass::value(std::size_t predictor, const Context& x, ActionId a) const
{
    const auto& t = tables_.at(predictor);
    const auto row = static_cast<Eigen::Index>(context_id(x));
    const auto col = static_cast<Eigen::Index>(a);
    if (row >= t.rows() || col >= t.cols()) throw std::out_of_range("context or action out of range");
    return t(row, col);
}

Vector FiniteClass::risks(const History& history) const
{
    Vector r = Vector::Zero(static_cast<Eigen::Index>(size()));
    for (const auto& ex : history) {
        for (std::size_t i = 0; i < size(); ++i) {
            const double e = value(i, ex.context, ex.action) - ex.target;
            r[static_cast<Eigen::Index>(i)] += ex.weight * e * e;
        }
    }
    return r;
}

FiniteClassOracle::FiniteClassOracle(std::shared_ptr<const FiniteClass> cls) : class_(std::move(cls))
{
    if (!class_ || class_->size() == 0) throw InvalidState("finite class is empty");
}

PredictorPtr FiniteClassOracle::fit(const History& history) const
{
    const Vector r = class_->risks(history);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < r.size(); ++i) {
        if (r[i] < r[best]) best = i;
    }
    return std::make_shared<FinitePredictor>(class_, static_cast<std::size_t>(best));
}

FiniteProductClass::FiniteProductClass(std::vector<std::vector<Vector>> base) : base_(std::move(base))
{
    if (base_.empty()) throw InvalidState("finite product class has no actions");
    for (const auto& g : base_) {
        if (g.empty()) throw InvalidState("finite product class has an empty base class");
    }
}

double FiniteProductClass::value(ActionId a, std::size_t g, const Context& x) const
{
    const auto& v = base_.at(a).at(g);
    const auto id = static_cast<Eigen::Index>(context_id(x));
    if (id >= v.size()) throw std::out_of_range("context id out of range");
    return v[id];
}

Vector FiniteProductClass::risks(ActionId a, const History& history) const
{
    Vector r = Vector::Zero(static_cast<Eigen::Index>(size(a)));
    for (const auto& ex : history) {
        if (ex.action != a) continue;
        for (std::size_t g = 0; g < size(a); ++g) {
            const double e = value(a, g, ex.context) - ex.target;
            r[static_cast<Eigen::Index>(g)] += ex.weight * e * e;
        }
    }
    return r;
}

}  // namespace regcb
