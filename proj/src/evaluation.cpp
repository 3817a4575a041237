#include "regcb/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace regcb {

double RunRecord::cumulative_regret() const
{
    double total = 0.0;
    for (const auto& r : rounds) total += r.regret;
    return total;
}

std::vector<std::size_t> validation_rounds(std::size_t horizon)
{
    std::vector<std::size_t> out;
    if (horizon == 0) return out;
    const std::size_t every = (horizon + 14) / 15;
    for (std::size_t t = every; t <= horizon; t += every) out.push_back(t);
    return out;
}

double holdout_reward(const Learner& learner, const std::vector<HoldoutExample>& holdout, std::size_t round)
{
    if (holdout.empty()) throw std::invalid_argument("holdout set is empty");
    double total = 0.0;
    for (const auto& ex : holdout) {
        total += learner.action_distribution(ex.context, round).dot(ex.mean);
    }
    return total / static_cast<double>(holdout.size());
}

RunRecord run_experiment(Learner& learner, const Environment& env, const ExperimentOptions& options)
{
    if (learner.num_actions() != env.num_actions()) {
        throw std::invalid_argument("learner and environment disagree on the number of actions");
    }
    std::size_t horizon = options.horizon;
    if (horizon > env.available_rounds()) {
        std::cerr << "warning: environment '" << env.name() << "' supplies " << env.available_rounds()
                  << " rounds; truncating from " << horizon << "\n";
        horizon = env.available_rounds();
    }
    const bool validate = options.validate && !env.holdout().empty();
    const auto checkpoints = validate ? validation_rounds(horizon) : std::vector<std::size_t>{};
    auto next_checkpoint = checkpoints.begin();

    Rng rng = make_rng(options.algorithm_seed, Stream::algorithm, options.replicate);
    RunRecord record;
    record.rounds.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
        if (options.schedule.is_epoch_start(t)) learner.on_epoch_boundary(t);
        RoundData data = env.round(t);
        const Decision d = learner.act(data.context, t, rng);
        const auto a = static_cast<Eigen::Index>(d.action);
        const double reward = data.realized[a];
        record.rounds.push_back({t, options.schedule.epoch_of(t), d.action, d.propensity, reward, d.width,
                                 d.disagreement, data.mean.maxCoeff() - data.mean[a]});
        learner.observe({std::move(data.context), d.action, reward, d.propensity}, t);
        if (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
            record.validation.push_back({t, holdout_reward(learner, env.holdout(), t)});
            ++next_checkpoint;
        }
    }
    record.meta["algorithm"] = learner.name();
    record.meta["environment"] = env.name();
    record.meta["horizon"] = std::to_string(horizon);
    record.meta["schedule"] = std::string(to_string(options.schedule.mode));
    record.meta["seed_algo"] = std::to_string(options.algorithm_seed);
    record.meta["replicate"] = std::to_string(options.replicate);
    return record;
}

// ---------------------------------------------------------------------------------------

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("cannot format double");
    return std::string(buf, ptr);
}

double parse_double_field(const std::string& s)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error("bad numeric field '" + s + "'");
    }
    return v;
}

namespace {

std::size_t parse_size(const std::string& s)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("bad integer field '" + s + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path, const std::string& header)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw std::runtime_error(path.string() + ": expected header '" + header + "'");
    }
    const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != columns) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        rows.push_back(std::move(cells));
    }
    return rows;
}

const std::string kRoundsHeader = "t,epoch,action,propensity,reward,width,disagreement_size,regret";
const std::string kValidationHeader = "t,reward";

}  // namespace

void write_rounds_csv(const std::filesystem::path& path, const std::vector<RoundLog>& rounds)
{
    auto out = open_out(path);
    out << kRoundsHeader << '\n';
    for (const auto& r : rounds) {
        out << r.t << ',' << r.epoch << ',' << r.action << ',' << format_double(r.propensity) << ','
            << format_double(r.reward) << ',' << format_double(r.width) << ',' << r.disagreement_size << ','
            << format_double(r.regret) << '\n';
    }
}

void write_validation_csv(const std::filesystem::path& path, const std::vector<ValidationPoint>& points)
{
    auto out = open_out(path);
    out << kValidationHeader << '\n';
    for (const auto& p : points) out << p.t << ',' << format_double(p.reward) << '\n';
}

void write_meta_json(const std::filesystem::path& path, const std::map<std::string, std::string>& meta)
{
    auto out = open_out(path);
    out << nlohmann::json(meta).dump(2) << '\n';
}

void write_run(const std::filesystem::path& dir, const RunRecord& record)
{
    std::filesystem::create_directories(dir);
    write_rounds_csv(dir / "rounds.csv", record.rounds);
    write_validation_csv(dir / "validation.csv", record.validation);
    write_meta_json(dir / "meta.json", record.meta);
}

std::vector<RoundLog> read_rounds_csv(const std::filesystem::path& path)
{
    std::vector<RoundLog> out;
    for (const auto& c : read_table(path, kRoundsHeader)) {
        out.push_back({parse_size(c[0]), parse_size(c[1]), parse_size(c[2]), parse_double_field(c[3]),
                       parse_double_field(c[4]), parse_double_field(c[5]), parse_size(c[6]),
                       parse_double_field(c[7])});
    }
    return out;
}

std::vector<ValidationPoint> read_validation_csv(const std::filesystem::path& path)
{
    std::vector<ValidationPoint> out;
    for (const auto& c : read_table(path, kValidationHeader)) {
        out.push_back({parse_size(c[0]), parse_double_field(c[1])});
    }
    return out;
}

std::map<std::string, std::string> read_meta_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return nlohmann::json::parse(in).get<std::map<std::string, std::string>>();
}

RunRecord read_run(const std::filesystem::path& dir)
{
    return {read_rounds_csv(dir / "rounds.csv"), read_validation_csv(dir / "validation.csv"),
            read_meta_json(dir / "meta.json")};
}

// ---------------------------------------------------------------------------------------

double supervised_skyline(const RegressionOracle& oracle, const Environment& env, std::size_t rows)
{
    if (env.holdout().empty()) throw std::invalid_argument("skyline needs a holdout set");
    rows = std::min(rows, env.available_rounds());
    const std::size_t k = env.num_actions();
    History history;
    history.reserve(rows * k);
    for (std::size_t t = 1; t <= rows; ++t) {
        const RoundData data = env.round(t);
        for (ActionId a = 0; a < k; ++a) {
            history.push_back({1.0, data.context, a, data.realized[static_cast<Eigen::Index>(a)]});
        }
    }
    const PredictorPtr f = oracle_fit(oracle, history);
    double total = 0.0;
    for (const auto& ex : env.holdout()) {
        Vector pred(static_cast<Eigen::Index>(k));
        for (ActionId a = 0; a < k; ++a) pred[static_cast<Eigen::Index>(a)] = f->predict(ex.context, a);
        total += ex.mean[static_cast<Eigen::Index>(argmax(pred))];
    }
    return total / static_cast<double>(env.holdout().size());
}

GridKind parse_grid_kind(std::string_view name)
{
    if (name == "confidence") return GridKind::confidence;
    if (name == "epsilon") return GridKind::epsilon;
    throw std::invalid_argument("unknown grid kind '" + std::string(name) + "' (confidence, epsilon)");
}

std::vector<double> parameter_grid(GridKind kind)
{
    const double hi = kind == GridKind::confidence ? 2.0 : -1.0;
    const double lo = -8.0;
    std::vector<double> grid(8);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = std::pow(10.0, hi + (lo - hi) * static_cast<double>(i) / 7.0);
    }
    grid.front() = std::pow(10.0, hi);
    grid.back() = 1e-8;
    return grid;
}

std::vector<double> normalized_relative_loss(const std::vector<double>& rewards)
{
    if (rewards.size() < 2) throw std::invalid_argument("relative loss needs at least two algorithms");
    const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
    const double range = *hi - *lo;
    std::vector<double> out(rewards.size(), 0.0);
    if (range <= 0.0) return out;
    for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (*hi - rewards[i]) / range;
    return out;
}

std::vector<CdfPoint> loss_cdf(const std::map<std::string, std::vector<double>>& losses)
{
    std::set<double> xs{0.0, 0.99};
    for (const auto& [name, values] : losses) xs.insert(values.begin(), values.end());
    std::vector<CdfPoint> out;
    for (const auto& [name, values] : losses) {
        for (const double x : xs) {
            const auto count = static_cast<std::size_t>(
                std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; }));
            out.push_back({name, x, count});
        }
    }
    return out;
}

std::vector<double> width_series(const std::vector<double>& widths, std::size_t window)
{
    if (window == 0) throw std::invalid_argument("window must be >= 1");
    std::vector<double> out(widths.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        sum += widths[i];
        if (i >= window) sum -= widths[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

SlopeFit slope_fit(const std::vector<double>& t, const std::vector<double>& values)
{
    if (t.size() != values.size()) throw std::invalid_argument("slope fit needs matching series");
    SlopeFit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(values[i] > 0.0)) {
            ++fit.dropped;
            continue;
        }
        xs.push_back(std::log(t[i]));
        ys.push_back(std::log(values[i]));
    }
    fit.used = xs.size();
    if (fit.used < 2) throw std::invalid_argument("slope fit needs two positive points");
    const Eigen::Map<const Vector> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::Map<const Vector> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const Vector xc = x.array() - x.mean();
    const double var = xc.squaredNorm();
    if (!(var > 0.0)) throw std::invalid_argument("slope fit needs distinct t values");
    fit.slope = xc.dot(y) / var;
    fit.intercept = y.mean() - fit.slope * x.mean();
    return fit;
}

}  // namespace regcb
