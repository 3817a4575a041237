#include <doctest.h>

#include "regcb/feature_map.hpp"
#include "regcb/oracle.hpp"
#include "regcb/ridge.hpp"
#include "support.hpp"

using namespace regcb;
using namespace regcb::testing;

namespace {

FeatureMap scalar_map()
{
    return FeatureMap::joint_rows(1, 1, false);
}

Context scalar(double v)
{
    Matrix rows(1, 1);
    rows(0, 0) = v;
    return Context{Vector::Constant(1, v), rows, std::nullopt};
}

History to_history(const DenseProblem& p)
{
    History h;
    for (Eigen::Index i = 0; i < p.phi.rows(); ++i) {
        Matrix rows = p.phi.row(i);
        h.push_back({p.weights[i], Context{p.phi.row(i).transpose(), rows, std::nullopt}, 0, p.targets[i]});
    }
    return h;
}

}  // namespace

TEST_CASE("feature maps")
{
    const Context x = plain_context((Vector(2) << 3.0, 4.0).finished());
    const FeatureMap blocked = FeatureMap::joint_blocked(2, 3, true);
    CHECK(blocked.dimension() == 9);
    const Vector phi = blocked(x, 1);
    CHECK(phi == (Vector(9) << 0, 0, 0, 3, 4, 1, 0, 0, 0).finished());

    const FeatureMap per = FeatureMap::per_action(2, false);
    CHECK(per.dimension() == 2);
    CHECK(per(x, 2) == x.features);

    Context rows = x;
    rows.action_features = (Matrix(2, 2) << 1, 2, 5, 6).finished();
    const FeatureMap joint = FeatureMap::joint_rows(2, 2, false);
    CHECK(joint(rows, 1) == (Vector(2) << 5, 6).finished());
    CHECK_THROWS_AS(joint(x, 0), std::invalid_argument);
    CHECK_THROWS_AS(blocked(plain_context(Vector::Ones(3)), 0), std::invalid_argument);
}

TEST_CASE("ridge fit on a single example")
{
    const RidgeOracle oracle(scalar_map(), 1.0);
    const History h{{1.0, scalar(1.0), 0, 1.0}};
    const PredictorPtr f = oracle_fit(oracle, h);
    CHECK(f->predict(scalar(1.0), 0) == doctest::Approx(0.5));
}

TEST_CASE("ridge fit with no data predicts zero")
{
    const RidgeOracle oracle(FeatureMap::joint_blocked(3, 2, true), 1.0);
    const PredictorPtr f = oracle_fit(oracle, {});
    Rng rng(3);
    for (int i = 0; i < 10; ++i) CHECK(f->predict(plain_context(gaussian_vector(rng, 3)), i % 2) == 0.0);
}

TEST_CASE("weight 2 equals a duplicated example")
{
    Rng rng(11);
    const RidgeOracle oracle(FeatureMap::joint_blocked(3, 2, true), 0.5);
    for (int rep = 0; rep < 20; ++rep) {
        History base;
        for (int i = 0; i < 6; ++i) {
            base.push_back({uniform(rng, 0.2, 2.0), plain_context(gaussian_vector(rng, 3)), uniform_index(rng, 2),
                            uniform01(rng)});
        }
        History doubled = base;
        History duplicated = base;
        const WeightedRegressionExample extra{1.0, plain_context(gaussian_vector(rng, 3)), 1, uniform01(rng)};
        WeightedRegressionExample heavy = extra;
        heavy.weight = 2.0;
        doubled.push_back(heavy);
        duplicated.push_back(extra);
        duplicated.push_back(extra);
        const auto f = oracle_fit(oracle, doubled);
        const auto g = oracle_fit(oracle, duplicated);
        const Context probe = plain_context(gaussian_vector(rng, 3));
        for (ActionId a = 0; a < 2; ++a) CHECK(f->predict(probe, a) == doctest::Approx(g->predict(probe, a)));
    }
}

TEST_CASE("augmented fit halves the probe weight")
{
    const RidgeOracle unregularized(scalar_map(), 0.0);
    const History h{{1.0, scalar(1.0), 0, 0.0}};
    const auto f = oracle_fit_augmented(unregularized, h, scalar(1.0), 0, 2.0, 2.0);
    CHECK(f->predict(scalar(1.0), 0) == doctest::Approx(1.0));

    const RidgeOracle ridge(scalar_map(), 1.0);
    const auto plain = oracle_fit(ridge, h);
    const auto zero = oracle_fit_augmented(ridge, h, scalar(1.0), 0, 0.0, 2.0);
    CHECK(zero->predict(scalar(2.0), 0) == doctest::Approx(plain->predict(scalar(2.0), 0)));

    const auto huge = oracle_fit_augmented(ridge, h, scalar(1.0), 0, 1e12, 2.0);
    CHECK(huge->predict(scalar(1.0), 0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(oracle_fit_augmented(ridge, h, scalar(1.0), 0, -1.0, 2.0), std::invalid_argument);
}

TEST_CASE("residual risk")
{
    const History h{{1.0, scalar(1.0), 0, 0.0}};
    const LinearPredictor f(scalar_map(), Vector::Constant(1, 0.5), 0.0);
    CHECK(residual_risk(f, h) == doctest::Approx(0.25));
    const LinearPredictor exact(scalar_map(), Vector::Zero(1), 0.0);
    CHECK(residual_risk(exact, h) == 0.0);
    const LinearPredictor one(scalar_map(), Vector::Constant(1, 1.0), 0.0);
    CHECK(normalized_risk(one, h, 5) == doctest::Approx(0.25));
    CHECK_THROWS_AS(normalized_risk(one, h, 1), std::invalid_argument);
}

TEST_CASE("ridge oracle matches dense normal equations")
{
    Rng rng(2024);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 10));
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 200));
        const DenseProblem p = random_problem(rng, n, d, uniform(rng, 0.1, 2.0));
        const RidgeOracle oracle(FeatureMap::joint_rows(static_cast<std::size_t>(d), 1, false), p.lambda);
        const auto f = std::dynamic_pointer_cast<const LinearPredictor>(oracle_fit(oracle, to_history(p)));
        REQUIRE(f);
        const Vector ref = dense_ridge(p);
        CHECK((f->weights() - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
        CHECK(objective(*f, to_history(p)) == doctest::Approx(dense_objective(p, ref)).epsilon(1e-9));
    }
}

TEST_CASE("ridge fit beats random weight vectors")
{
    Rng rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        const DenseProblem p = random_problem(rng, 40, 4, 1.0);
        const History h = to_history(p);
        const RidgeOracle oracle(FeatureMap::joint_rows(4, 1, false), 1.0);
        const double best = objective(*oracle_fit(oracle, h), h);
        for (int i = 0; i < 100; ++i) {
            const LinearPredictor other(FeatureMap::joint_rows(4, 1, false), gaussian_vector(rng, 4), 1.0);
            CHECK(best <= objective(other, h) + 1e-12);
        }
    }
}

TEST_CASE("incremental statistics agree with a refit")
{
    Rng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 10));
        const auto n = static_cast<Eigen::Index>(1 + uniform_index(rng, 200));
        const DenseProblem p = random_problem(rng, n, d, 1.0);
        RidgeStated state(d, 1.0);
        for (Eigen::Index i = 0; i < n; ++i) state.add(p.phi.row(i).transpose(), p.weights[i], p.targets[i]);
        const RidgeSolutiond sol(state);
        const Vector ref = dense_ridge(p);
        CHECK((sol.weights() - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
        CHECK(sol.objective_min() == doctest::Approx(dense_objective(p, ref)).epsilon(1e-9));
    }
}

TEST_CASE("singular ridge system falls back to the minimum-norm solution")
{
    RidgeStated state(2, 0.0);
    state.add((Vector(2) << 1.0, 1.0).finished(), 1.0, 2.0);
    const RidgeSolutiond sol(state);
    CHECK_FALSE(sol.positive_definite());
    CHECK(sol.weights()[0] == doctest::Approx(1.0));
    CHECK(sol.weights()[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(sol.inverse_quadratic(Vector::Ones(2)), InvalidState);
    CHECK_THROWS_AS(state.add(Vector::Ones(2), -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("Sherman-Morrison probe agrees with re-solving")
{
    Rng rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 8));
        DenseProblem p = random_problem(rng, 30, d, 1.0);
        RidgeStated state(d, 1.0);
        for (Eigen::Index i = 0; i < p.phi.rows(); ++i) state.add(p.phi.row(i).transpose(), p.weights[i], p.targets[i]);
        const RidgeSolutiond sol(state);
        const Vector phi = gaussian_vector(rng, d);
        const double w = std::pow(10.0, uniform(rng, -3, 4));
        const double target = uniform01(rng) < 0.5 ? 2.0 : -1.0;
        const ProbeFit<double> fast = sol.probe(phi, w, target);

        DenseProblem q = p;
        q.phi.conservativeResize(p.phi.rows() + 1, d);
        q.phi.row(p.phi.rows()) = phi.transpose();
        q.weights.conservativeResize(p.weights.size() + 1);
        q.weights[p.weights.size()] = w / 2.0;
        q.targets.conservativeResize(p.targets.size() + 1);
        q.targets[p.targets.size()] = target;
        const Vector theta = dense_ridge(q);
        CHECK(fast.prediction == doctest::Approx(phi.dot(theta)).epsilon(1e-8));
        CHECK(fast.objective == doctest::Approx(dense_objective(p, theta)).epsilon(1e-8));
    }
}

TEST_CASE("product ridge fits each action on its own rounds")
{
    Rng rng(8);
    const ProductRidgeOracle oracle(FeatureMap::per_action(2, true), 3, 1.0);
    History h;
    for (int i = 0; i < 60; ++i) {
        h.push_back({1.0, plain_context(gaussian_vector(rng, 2)), uniform_index(rng, 3), uniform01(rng)});
    }
    const auto f = oracle_fit(oracle, h);
    for (ActionId a = 0; a < 3; ++a) {
        History own;
        for (const auto& ex : h) {
            if (ex.action == a) own.push_back({ex.weight, ex.context, 0, ex.target});
        }
        const RidgeOracle single(FeatureMap::joint_rows(2, 1, true), 1.0);
        History rows;
        for (auto ex : own) {
            ex.context.action_features = Matrix(ex.context.features.transpose());
            rows.push_back(ex);
        }
        const auto g = oracle_fit(single, rows);
        Context probe = plain_context(gaussian_vector(rng, 2));
        Context probe_rows = probe;
        probe_rows.action_features = Matrix(probe.features.transpose());
        CHECK(f->predict(probe, a) == doctest::Approx(g->predict(probe_rows, 0)));
    }
}

TEST_CASE("finite class oracle returns the lowest-index minimizer")
{
    // three contexts, two actions
    std::vector<Matrix> tables;
    tables.push_back((Matrix(3, 2) << 0.5, 0, 0.5, 0, 0.5, 0).finished());
    tables.push_back((Matrix(3, 2) << 0.5, 0, 0.5, 0, 0.5, 0).finished());
    tables.push_back((Matrix(3, 2) << 0, 1, 0.5, 0, 0.5, 0).finished());
    auto cls = std::make_shared<const FiniteClass>(tables);
    const FiniteClassOracle oracle(cls);
    CHECK_FALSE(oracle.convex());

    History h{{1.0, id_context(0, 3), 0, 0.5}};
    auto f = std::dynamic_pointer_cast<const FinitePredictor>(oracle_fit(oracle, h));
    CHECK(f->index() == 0);

    h = {{1.0, id_context(0, 3), 1, 1.0}};
    f = std::dynamic_pointer_cast<const FinitePredictor>(oracle_fit(oracle, h));
    CHECK(f->index() == 2);
    CHECK(cls->risks(h)[0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(FiniteClass({}), InvalidState);
    CHECK_THROWS(cls->value(0, plain_context(Vector::Ones(3)), 0));
}

TEST_CASE("finite class oracle agrees with an exhaustive scan")
{
    Rng rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + uniform_index(rng, 5);
        const std::size_t k = 1 + uniform_index(rng, 3);
        std::vector<Matrix> tables;
        for (std::size_t i = 0; i < 1 + uniform_index(rng, 10); ++i) {
            Matrix t(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
            for (Eigen::Index r = 0; r < t.rows(); ++r)
                for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = std::round(uniform01(rng) * 4) / 4;
            tables.push_back(t);
        }
        auto cls = std::make_shared<const FiniteClass>(tables);
        History h;
        for (int i = 0; i < 8; ++i) {
            h.push_back({1.0, id_context(uniform_index(rng, n), n), uniform_index(rng, k), std::round(uniform01(rng) * 4) / 4});
        }
        std::size_t best = 0;
        double best_risk = 1e300;
        for (std::size_t i = 0; i < tables.size(); ++i) {
            double r = 0;
            for (const auto& ex : h) {
                const double e = tables[i](static_cast<Eigen::Index>(*ex.context.id), static_cast<Eigen::Index>(ex.action)) - ex.target;
                r += ex.weight * e * e;
            }
            if (r < best_risk) {
                best_risk = r;
                best = i;
            }
        }
        const FiniteClassOracle oracle(cls);
        CHECK(std::dynamic_pointer_cast<const FinitePredictor>(oracle_fit(oracle, h))->index() == best);
    }
}
