#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "regcb/environments.hpp"
#include "support.hpp"

using namespace regcb;
using namespace regcb::testing;

namespace {

SupervisedDataset parse(const std::string& text, CsvOptions opts)
{
    std::istringstream in(text);
    return parse_csv_dataset(in, opts);
}

std::size_t error_line(const std::string& text, CsvOptions opts)
{
    try {
        parse(text, opts);
    } catch (const CsvParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("multiclass rewards")
{
    CHECK(multiclass_reward(2, 2, 3) == 1.0);
    CHECK(multiclass_reward(2, 0, 3) == 0.0);
    CHECK_THROWS_AS(multiclass_reward(3, 0, 3), std::invalid_argument);
    CHECK(multiclass_reward_vector(1, 3) == Vector::Unit(3, 1));
}

TEST_CASE("csv parsing: label column by index, name and default")
{
    const std::string body = "1.5,2,0\n3,4,1\n5,6,2\n7,8,1\n";
    CsvOptions opts;
    opts.append_bias = false;
    const auto last = parse(body, opts);
    CHECK(last.num_actions == 3);
    CHECK(last.features.cols() == 2);
    CHECK(last.train_size == 4);
    std::multiset<std::size_t> labels(last.labels.begin(), last.labels.end());
    CHECK(labels == std::multiset<std::size_t>{0, 1, 1, 2});

    opts.label_column = "0";
    opts.num_actions = 10;
    const auto first = parse("1,0.5,0.5\n", opts);
    CHECK(first.labels[0] == 1);
    CHECK(first.num_actions == 10);

    CsvOptions named;
    named.header = true;
    named.label_column = "y";
    named.append_bias = true;
    const auto h = parse("a,y,b\n0.1,1,0.2\n0.3,0,0.4\n", named);
    REQUIRE(h.features.cols() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(h.features(static_cast<Eigen::Index>(i), 2) == 1.0);
        const double a = h.features(static_cast<Eigen::Index>(i), 0);
        CHECK((h.labels[i] == 1 ? a == 0.1 : a == 0.3));
    }
    named.label_column = "z";
    CHECK_THROWS_AS(parse("a,y\n1,0\n", named), std::invalid_argument);
}

TEST_CASE("csv parsing reports the offending line")
{
    CsvOptions opts;
    CHECK(error_line("1,2,0\n3,4,1\n5,1\n", opts) == 3);
    CHECK(error_line("1,2,0\n\n3,x,1\n", opts) == 3);
    CHECK(error_line("1,2,0\n3,4,-1\n", opts) == 2);
    CHECK(error_line("1,2,0\n3,4,0.5\n", opts) == 2);
    opts.header = true;
    CHECK(error_line("a,b,c\n1,2,0\n1,2,3,4\n", opts) == 3);
    opts.num_actions = 2;
    CHECK(error_line("a,b,c\n1,2,5\n", opts) == 2);
    CHECK_THROWS_AS(parse("", CsvOptions{}), std::invalid_argument);
}

TEST_CASE("csv holdout split and permutation")
{
    CsvOptions opts;
    opts.holdout_fraction = 0.25;
    opts.permutation_seed = 9;
    const std::string body = "0,0\n1,1\n2,0\n3,1\n";
    const auto data = parse(body, opts);
    CHECK(data.train_size == 3);
    CHECK(data.holdout_size() == 1);

    // same seed, same order; the rows are a permutation of the input
    const auto again = parse(body, opts);
    CHECK(again.features == data.features);
    std::vector<double> first_col;
    for (Eigen::Index i = 0; i < 4; ++i) first_col.push_back(data.features(i, 0));
    std::sort(first_col.begin(), first_col.end());
    CHECK(first_col == std::vector<double>{0, 1, 2, 3});
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK(data.labels[static_cast<std::size_t>(i)] == static_cast<std::size_t>(data.features(i, 0)) % 2);
    }

    // many seeds reach more than one order
    std::set<std::vector<std::size_t>> orders;
    for (std::uint64_t s = 0; s < 20; ++s) {
        opts.permutation_seed = s;
        const auto d = parse(body, opts);
        std::vector<std::size_t> o;
        for (Eigen::Index i = 0; i < 4; ++i) o.push_back(static_cast<std::size_t>(d.features(i, 0)));
        orders.insert(o);
    }
    CHECK(orders.size() > 5);
}

TEST_CASE("standardization uses training rows only")
{
    CsvOptions opts;
    opts.standardize = true;
    opts.holdout_fraction = 0.2;
    std::ostringstream body;
    for (int i = 0; i < 10; ++i) body << i * 2.0 << "," << 7.0 << "," << (i % 3) << "\n";
    const auto data = parse(body.str(), opts);
    const auto train = static_cast<Eigen::Index>(data.train_size);
    REQUIRE(train == 8);
    const Vector col = data.features.col(0).head(train);
    CHECK(col.mean() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::sqrt((col.array() - col.mean()).square().mean()) == doctest::Approx(1.0));
    // a constant column stays finite
    CHECK(data.features.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(data.features.col(2).isApprox(Vector::Ones(10)));
}

TEST_CASE("noisy reward model")
{
    const auto m = NoisyRewardModel::draw(4, 3);
    m.validate();
    for (Eigen::Index a = 0; a < 4; ++a) CHECK(m.mean(a, a) == 1.0);
    CHECK(NoisyRewardModel::draw(4, 3).mean == m.mean);
    CHECK(NoisyRewardModel::draw(4, 4).mean != m.mean);

    NoisyRewardModel fixed{Matrix::Ones(2, 2)};
    fixed.mean(0, 1) = 0.0;
    fixed.mean(1, 0) = 0.3;
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) CHECK(noisy_reward(fixed, 1, 0, rng) == 0.0);
    for (int i = 0; i < 100; ++i) CHECK(noisy_reward(fixed, 1, 1, rng) == 1.0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += noisy_reward(fixed, 0, 1, rng);
    CHECK(std::abs(sum / n - 0.3) <= 0.01);

    NoisyRewardModel bad{Matrix::Ones(2, 2)};
    bad.mean(0, 0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("multiclass environment rounds and holdout")
{
    CsvOptions opts;
    opts.holdout_fraction = 0.5;
    opts.permutation_seed = 1;
    std::ostringstream body;
    for (int i = 0; i < 20; ++i) body << i << "," << (i % 3) << "\n";
    auto data = std::make_shared<const SupervisedDataset>(parse(body.str(), opts));

    const MulticlassEnvironment clean(data, std::nullopt, 0);
    CHECK(clean.available_rounds() == 10);
    CHECK(clean.holdout().size() == 10);
    const auto r = clean.round(1);
    CHECK(r.realized == r.mean);
    CHECK(r.mean == multiclass_reward_vector(data->labels[0], 3));
    CHECK_THROWS_AS(clean.round(11), std::out_of_range);

    const auto model = NoisyRewardModel::draw(3, 2);
    const MulticlassEnvironment noisy(data, model, 42);
    const MulticlassEnvironment same(data, model, 42);
    const MulticlassEnvironment other(data, model, 43);
    bool differs = false;
    for (std::size_t t = 1; t <= 10; ++t) {
        const auto a = noisy.round(t);
        CHECK(a.realized == same.round(t).realized);
        CHECK(a.realized[static_cast<Eigen::Index>(data->labels[t - 1])] == 1.0);
        CHECK(a.mean == model.mean_vector(data->labels[t - 1]));
        differs = differs || a.realized != other.round(t).realized;
    }
    CHECK(differs);
}

TEST_CASE("reward noise does not depend on the permutation seed")
{
    // one label everywhere, so the noise draws are comparable across orders
    std::ostringstream body;
    for (int i = 0; i < 30; ++i) body << i << ",0\n";
    NoisyRewardModel model{Matrix::Ones(2, 2)};
    model.mean(1, 0) = 0.5;
    CsvOptions a, b;
    a.num_actions = b.num_actions = 2;
    a.permutation_seed = 1;
    b.permutation_seed = 2;
    const MulticlassEnvironment ea(std::make_shared<const SupervisedDataset>(parse(body.str(), a)), model, 7);
    const MulticlassEnvironment eb(std::make_shared<const SupervisedDataset>(parse(body.str(), b)), model, 7);
    for (std::size_t t = 1; t <= 30; ++t) CHECK(ea.round(t).realized == eb.round(t).realized);
}

TEST_CASE("hard instance class reproduces the reward means")
{
    Prop1Instance inst{6, 0.3};
    const auto cls = inst.make_class();
    REQUIRE(cls->size() == 7);
    for (std::size_t id = 0; id < 6; ++id) {
        const Context x = inst.context(id);
        CHECK(cls->value(0, x, 0) == doctest::Approx(0.7));
        CHECK(cls->value(0, x, 1) == 0.0);
        for (std::size_t i = 1; i <= 6; ++i) {
            const bool flipped = i - 1 == id;
            CHECK(cls->value(i, x, 0) == (flipped ? 0.0 : cls->value(0, x, 0)));
            CHECK(cls->value(i, x, 1) == (flipped ? 1.0 : 0.0));
        }
    }
    const Prop1Environment env(inst, 3);
    std::set<std::size_t> ids;
    for (std::size_t t = 1; t <= 200; ++t) {
        const auto r = env.round(t);
        CHECK(r.mean == inst.mean());
        CHECK(r.context.id.has_value());
        ids.insert(*r.context.id);
        CHECK(env.round(t).context.id == r.context.id);
    }
    CHECK(ids.size() == 6);
    CHECK_THROWS_AS((Prop1Instance{0, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS(Prop1Environment(inst, 0, std::vector<std::size_t>{6}), std::invalid_argument);
}

TEST_CASE("synthetic linear world keeps means and rewards in range")
{
    SyntheticLinearOptions opts;
    opts.dim = 5;
    opts.num_actions = 4;
    opts.noise = 0.1;
    opts.holdout_size = 50;
    opts.world_seed = 3;
    opts.data_seed = 4;
    const SyntheticLinearWorld world(opts);
    CHECK(world.name() == "synthetic_linear");
    CHECK(world.true_weights().rows() == 4);
    for (Eigen::Index a = 0; a < 4; ++a) {
        CHECK(world.true_weights()(a, 0) == 0.5);
        CHECK(world.true_weights().row(a).tail(4).norm() == doctest::Approx(0.4));
    }
    for (std::size_t t = 1; t <= 2000; ++t) {
        const auto r = world.round(t);
        CHECK(r.context.features[0] == 1.0);
        CHECK(r.context.features.tail(4).norm() == doctest::Approx(1.0));
        CHECK(r.mean.minCoeff() >= 0.1 - 1e-12);
        CHECK(r.mean.maxCoeff() <= 0.9 + 1e-12);
        CHECK(r.realized.minCoeff() >= 0.0);
        CHECK(r.realized.maxCoeff() <= 1.0);
        CHECK((r.realized - r.mean).cwiseAbs().maxCoeff() <= 0.1 + 1e-12);
    }
    const SyntheticLinearWorld again(opts);
    CHECK(again.round(17).realized == world.round(17).realized);
    CHECK(again.holdout().size() == 50);
}

TEST_CASE("margin world rejects contexts without a clear winner")
{
    SyntheticLinearOptions opts;
    opts.margin = 0.2;
    opts.holdout_size = 10;
    opts.world_seed = 5;
    opts.data_seed = 6;
    const SyntheticLinearWorld world(opts);
    CHECK(world.name() == "massart_linear");
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const Context x = world.sample_context(rng);
        Vector m = world.mean_rewards(x);
        std::sort(m.data(), m.data() + m.size(), std::greater<>());
        CHECK(m[0] - m[1] >= 0.2);
    }
    opts.num_actions = 1;
    CHECK_THROWS_AS(SyntheticLinearWorld{opts}, std::invalid_argument);
}

TEST_CASE("label-dependent world exposes per-action rows")
{
    SyntheticLinearOptions opts;
    opts.label_dependent = true;
    opts.dim = 3;
    opts.num_actions = 4;
    opts.holdout_size = 5;
    const SyntheticLinearWorld world(opts);
    CHECK(world.label_dependent());
    CHECK(world.action_feature_dim() == 3);
    CHECK(world.context_dim() == 12);
    CHECK(world.true_weights().rows() == 1);
    const auto r = world.round(1);
    REQUIRE(r.context.action_features.has_value());
    const Matrix& rows = *r.context.action_features;
    for (Eigen::Index a = 0; a < 4; ++a) {
        CHECK(r.context.features.segment(a * 3, 3) == rows.row(a).transpose());
        CHECK(r.mean[a] == doctest::Approx(rows.row(a).dot(world.true_weights().row(0))));
    }
    CHECK_THROWS_AS(world.mean_rewards(plain_context(Vector::Ones(12))), std::invalid_argument);
}
