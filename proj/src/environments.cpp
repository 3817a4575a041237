#include "regcb/environments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace regcb {

double multiclass_reward(std::size_t label, ActionId action, std::size_t num_actions)
{
    if (label >= num_actions || action >= num_actions) {
        throw std::invalid_argument("label and action must lie in [0,K)");
    }
    return label == action ? 1.0 : 0.0;
}

RewardVector multiclass_reward_vector(std::size_t label, std::size_t num_actions)
{
    RewardVector r(static_cast<Eigen::Index>(num_actions));
    for (ActionId a = 0; a < num_actions; ++a) r[static_cast<Eigen::Index>(a)] = multiclass_reward(label, a, num_actions);
    return r;
}

NoisyRewardModel NoisyRewardModel::draw(std::size_t num_actions, std::uint64_t dataset_seed)
{
    Rng rng = make_rng(dataset_seed, Stream::world);
    const auto k = static_cast<Eigen::Index>(num_actions);
    NoisyRewardModel m{Matrix::Ones(k, k)};
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
            if (a != b) m.mean(a, b) = uniform01(rng);
        }
    }
    return m;
}

void NoisyRewardModel::validate() const
{
    if (mean.rows() != mean.cols()) throw std::invalid_argument("reward mean matrix must be square");
    for (Eigen::Index a = 0; a < mean.rows(); ++a) {
        for (Eigen::Index b = 0; b < mean.cols(); ++b) {
            const double v = mean(a, b);
            if (a == b ? v != 1.0 : !(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("reward mean matrix needs a unit diagonal and entries in [0,1]");
            }
        }
    }
}

RewardVector NoisyRewardModel::mean_vector(std::size_t label) const
{
    return mean.col(static_cast<Eigen::Index>(label));
}

double noisy_reward(const NoisyRewardModel& model, std::size_t label, ActionId action, Rng& round_stream)
{
    if (action == label) return 1.0;
    const double mu = model.mean(static_cast<Eigen::Index>(action), static_cast<Eigen::Index>(label));
    return bernoulli(round_stream, mu) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t begin = 0;
    while (true) {
        const auto comma = line.find(',', begin);
        cells.push_back(trim(std::string_view(line).substr(begin, comma - begin)));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return cells;
}

bool parse_double(const std::string& cell, double& out)
{
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& cell, long long& out)
{
    if (cell.empty()) return false;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

SupervisedDataset parse_csv_dataset(std::istream& in, const CsvOptions& options)
{
    if (!(options.holdout_fraction >= 0.0 && options.holdout_fraction <= 1.0)) {
        throw std::invalid_argument("holdout fraction must lie in [0,1]");
    }
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> columns;
    std::optional<std::size_t> label_index;
    std::vector<std::string> header_cells;

    auto resolve_label = [&](std::size_t width) {
        long long idx = 0;
        if (parse_int(options.label_column, idx)) {
            if (idx < 0) idx += static_cast<long long>(width);
            if (idx < 0 || idx >= static_cast<long long>(width)) {
                throw std::invalid_argument("label column index out of range");
            }
            return static_cast<std::size_t>(idx);
        }
        const auto it = std::find(header_cells.begin(), header_cells.end(), options.label_column);
        if (it == header_cells.end()) {
            throw std::invalid_argument("label column '" + options.label_column + "' not found in header");
        }
        return static_cast<std::size_t>(it - header_cells.begin());
    };

    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (options.header && header_cells.empty() && !columns) {
            header_cells = std::move(cells);
            columns = header_cells.size();
            label_index = resolve_label(*columns);
            continue;
        }
        if (!columns) {
            columns = cells.size();
        }
        if (!label_index) label_index = resolve_label(*columns);
        if (cells.size() != *columns) {
            throw CsvParseError(line_no, "expected " + std::to_string(*columns) + " fields, found " +
                                             std::to_string(cells.size()));
        }
        std::vector<double> features;
        features.reserve(cells.size() - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == *label_index) {
                long long label = 0;
                if (!parse_int(cells[c], label) || label < 0) {
                    throw CsvParseError(line_no, "label '" + cells[c] + "' is not a nonnegative integer");
                }
                if (options.num_actions > 0 && static_cast<std::size_t>(label) >= options.num_actions) {
                    throw CsvParseError(line_no, "label " + cells[c] + " outside [0," +
                                                     std::to_string(options.num_actions) + ")");
                }
                labels.push_back(static_cast<std::size_t>(label));
                continue;
            }
            double v = 0.0;
            if (!parse_double(cells[c], v)) {
                throw CsvParseError(line_no, "feature '" + cells[c] + "' is not numeric");
            }
            features.push_back(v);
        }
        rows.push_back(std::move(features));
    }
    if (rows.empty()) throw std::invalid_argument("dataset has no rows");

    SupervisedDataset data;
    data.num_actions = options.num_actions > 0 ? options.num_actions
                                               : *std::max_element(labels.begin(), labels.end()) + 1;
    const std::size_t n = rows.size();
    const std::size_t raw_dim = rows.front().size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(options.permutation_seed, Stream::permutation);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }

    const auto holdout = static_cast<std::size_t>(std::ceil(options.holdout_fraction * static_cast<double>(n) - 1e-12));
    data.train_size = n - holdout;

    const std::size_t dim = raw_dim + (options.append_bias ? 1 : 0);
    data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    data.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& src = rows[order[i]];
        for (std::size_t c = 0; c < raw_dim; ++c) {
            data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = src[c];
        }
        if (options.append_bias) data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(raw_dim)) = 1.0;
        data.labels[i] = labels[order[i]];
    }

    if (options.standardize && data.train_size > 0) {
        const auto raw = static_cast<Eigen::Index>(raw_dim);
        const auto train = static_cast<Eigen::Index>(data.train_size);
        const Eigen::RowVectorXd mean = data.features.topLeftCorner(train, raw).colwise().mean();
        Eigen::RowVectorXd sd =
            ((data.features.topLeftCorner(train, raw).rowwise() - mean).array().square().colwise().mean()).sqrt();
        sd = sd.unaryExpr([](double s) { return s > 0.0 ? s : 1.0; });
        data.features.leftCols(raw) =
            ((data.features.leftCols(raw).rowwise() - mean).array().rowwise() / sd.array()).matrix();
    }
    return data;
}

SupervisedDataset load_csv_dataset(const std::string& path, const CsvOptions& options)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
    return parse_csv_dataset(in, options);
}

MulticlassEnvironment::MulticlassEnvironment(std::shared_ptr<const SupervisedDataset> data,
                                             std::optional<NoisyRewardModel> noise, std::uint64_t reward_seed,
                                             std::string name)
    : data_(std::move(data)), noise_(std::move(noise)), reward_seed_(reward_seed), name_(std::move(name))
{
    if (noise_) {
        noise_->validate();
        if (static_cast<std::size_t>(noise_->mean.rows()) != data_->num_actions) {
            throw std::invalid_argument("noise model size does not match the number of actions");
        }
    }
    for (std::size_t i = data_->train_size; i < data_->labels.size(); ++i) {
        holdout_.push_back({Context{data_->row(i), std::nullopt, std::nullopt}, mean_for(data_->labels[i])});
    }
}

RewardVector MulticlassEnvironment::mean_for(std::size_t label) const
{
    return noise_ ? noise_->mean_vector(label) : multiclass_reward_vector(label, data_->num_actions);
}

RoundData MulticlassEnvironment::round(std::size_t t) const
{
    if (t < 1 || t > data_->train_size) throw std::out_of_range("round beyond the training set");
    const std::size_t i = t - 1;
    const std::size_t label = data_->labels[i];
    RoundData out{Context{data_->row(i), std::nullopt, std::nullopt}, {}, mean_for(label)};
    if (!noise_) {
        out.realized = out.mean;
        return out;
    }
    Rng rng = make_rng(reward_seed_, Stream::reward_noise, t);
    out.realized.resize(static_cast<Eigen::Index>(data_->num_actions));
    for (ActionId a = 0; a < data_->num_actions; ++a) {
        out.realized[static_cast<Eigen::Index>(a)] = noisy_reward(*noise_, label, a, rng);
    }
    return out;
}

// ---------------------------------------------------------------------------------------

void Prop1Instance::validate() const
{
    if (num_contexts < 1) throw std::invalid_argument("prop1 needs N >= 1");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("prop1 needs eps in (0,1]");
}

std::shared_ptr<const FiniteClass> Prop1Instance::make_class() const
{
    validate();
    const auto n = static_cast<Eigen::Index>(num_contexts);
    Matrix truth(n, 2);
    truth.col(good_action).setConstant(1.0 - epsilon);
    truth.col(bad_action).setZero();
    std::vector<Matrix> tables{truth};
    for (Eigen::Index i = 0; i < n; ++i) {
        Matrix spoiler = truth;
        spoiler(i, good_action) = 0.0;
        spoiler(i, bad_action) = 1.0;
        tables.push_back(std::move(spoiler));
    }
    return std::make_shared<FiniteClass>(std::move(tables));
}

Context Prop1Instance::context(std::size_t id) const
{
    Vector e = Vector::Zero(static_cast<Eigen::Index>(num_contexts));
    e[static_cast<Eigen::Index>(id)] = 1.0;
    return Context{std::move(e), std::nullopt, id};
}

RewardVector Prop1Instance::mean() const
{
    RewardVector r(2);
    r[good_action] = 1.0 - epsilon;
    r[bad_action] = 0.0;
    return r;
}

Prop1Environment::Prop1Environment(Prop1Instance instance, std::uint64_t seed,
                                   std::optional<std::vector<std::size_t>> sequence)
    : instance_(instance), seed_(seed), sequence_(std::move(sequence))
{
    instance_.validate();
    if (sequence_) {
        for (const auto id : *sequence_) {
            if (id >= instance_.num_contexts) throw std::invalid_argument("context id out of range");
        }
    }
    for (std::size_t i = 0; i < instance_.num_contexts; ++i) {
        holdout_.push_back({instance_.context(i), instance_.mean()});
    }
}

std::size_t Prop1Environment::available_rounds() const
{
    return sequence_ ? sequence_->size() : std::numeric_limits<std::size_t>::max();
}

RoundData Prop1Environment::round(std::size_t t) const
{
    if (t < 1 || t > available_rounds()) throw std::out_of_range("round out of range");
    std::size_t id = 0;
    if (sequence_) {
        id = (*sequence_)[t - 1];
    } else {
        Rng rng = make_rng(seed_, Stream::contexts, t);
        id = uniform_index(rng, instance_.num_contexts);
    }
    return {instance_.context(id), instance_.mean(), instance_.mean()};
}

// ---------------------------------------------------------------------------------------

namespace {
Vector random_direction(Rng& rng, Eigen::Index dim)
{
    Vector v(dim);
    do {
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = standard_normal(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

constexpr double kBias = 0.5;
constexpr double kSlope = 0.4;
}  // namespace

SyntheticLinearWorld::SyntheticLinearWorld(SyntheticLinearOptions options) : options_(options)
{
    if (options_.dim < 2) throw std::invalid_argument("synthetic world needs dim >= 2");
    if (options_.num_actions < 1) throw std::invalid_argument("synthetic world needs K >= 1");
    if (!(options_.noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
    if (!(options_.margin >= 0.0 && options_.margin < 1.0)) throw std::invalid_argument("margin must lie in [0,1)");
    if (options_.margin > 0.0 && options_.num_actions < 2) throw std::invalid_argument("margin needs K >= 2");

    Rng rng = make_rng(options_.world_seed, Stream::world);
    const auto d = static_cast<Eigen::Index>(options_.dim);
    const Eigen::Index rows = options_.label_dependent ? 1 : static_cast<Eigen::Index>(options_.num_actions);
    weights_.resize(rows, d);
    for (Eigen::Index a = 0; a < rows; ++a) {
        weights_(a, 0) = kBias;
        weights_.row(a).tail(d - 1) = kSlope * random_direction(rng, d - 1).transpose();
    }

    Rng holdout_rng = make_rng(options_.data_seed, Stream::holdout);
    for (std::size_t i = 0; i < options_.holdout_size; ++i) {
        Context x = sample_context(holdout_rng);
        Vector mean = mean_rewards(x);
        holdout_.push_back({std::move(x), std::move(mean)});
    }
}

std::string SyntheticLinearWorld::name() const
{
    return options_.margin > 0.0 ? "massart_linear" : "synthetic_linear";
}

std::size_t SyntheticLinearWorld::context_dim() const
{
    return options_.label_dependent ? options_.dim * options_.num_actions : options_.dim;
}

Context SyntheticLinearWorld::draw_raw(Rng& rng) const
{
    const auto d = static_cast<Eigen::Index>(options_.dim);
    const auto k = static_cast<Eigen::Index>(options_.num_actions);
    if (!options_.label_dependent) {
        Vector x(d);
        x[0] = 1.0;
        x.tail(d - 1) = random_direction(rng, d - 1);
        return Context{std::move(x), std::nullopt, std::nullopt};
    }
    Matrix rows(k, d);
    for (Eigen::Index a = 0; a < k; ++a) {
        rows(a, 0) = 1.0;
        rows.row(a).tail(d - 1) = random_direction(rng, d - 1).transpose();
    }
    Vector flat(k * d);
    for (Eigen::Index a = 0; a < k; ++a) flat.segment(a * d, d) = rows.row(a).transpose();
    return Context{std::move(flat), std::move(rows), std::nullopt};
}

Context SyntheticLinearWorld::sample_context(Rng& rng) const
{
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        Context x = draw_raw(rng);
        if (options_.margin <= 0.0) return x;
        Vector m = mean_rewards(x);
        std::sort(m.data(), m.data() + m.size(), std::greater<>());
        if (m[0] - m[1] >= options_.margin) return x;
    }
    throw std::runtime_error("could not sample a context with the requested margin");
}

Vector SyntheticLinearWorld::mean_rewards(const Context& x) const
{
    if (options_.label_dependent) {
        if (!x.action_features) throw std::invalid_argument("label-dependent world needs per-action features");
        return *x.action_features * weights_.row(0).transpose();
    }
    return weights_ * x.features;
}

RoundData SyntheticLinearWorld::round(std::size_t t) const
{
    if (t < 1) throw std::out_of_range("rounds are 1-based");
    Rng ctx_rng = make_rng(options_.data_seed, Stream::contexts, t);
    Context x = sample_context(ctx_rng);
    Vector mean = mean_rewards(x);
    Rng noise_rng = make_rng(options_.data_seed, Stream::reward_noise, t);
    Vector realized(mean.size());
    for (Eigen::Index a = 0; a < mean.size(); ++a) {
        const double e = options_.noise * (2.0 * uniform01(noise_rng) - 1.0);
        realized[a] = std::clamp(mean[a] + e, 0.0, 1.0);
    }
    return {std::move(x), std::move(realized), std::move(mean)};
}

}  // namespace regcb
