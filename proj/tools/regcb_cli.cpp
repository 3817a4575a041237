// regcb command-line front end: run, sweep, lowerbound, diag, aggregate.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "regcb/config.hpp"
#include "regcb/moments.hpp"

namespace fs = std::filesystem;
using namespace regcb;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct SeedOverrides {
    std::optional<std::uint64_t> seed_dataset;
    std::optional<std::uint64_t> seed_algo;
    std::optional<std::uint64_t> replicate;

    void apply(RunConfig& cfg) const
    {
        if (seed_dataset) cfg.seed_dataset = *seed_dataset;
        if (seed_algo) cfg.seed_algo = *seed_algo;
        if (replicate) cfg.replicate = *replicate;
    }
};

fs::path output_root(const std::string& flag, const RunConfig* cfg, const std::string& fallback)
{
    if (!flag.empty()) return flag;
    if (cfg != nullptr && !cfg->output.empty()) return cfg->output;
    if (const char* env = std::getenv("REGCB_OUT_DIR"); env != nullptr && *env != '\0') return fs::path(env) / fallback;
    return fs::path("regcb_out") / fallback;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

// meta.json is written last, so its presence marks a finished run
void save_run(const fs::path& dir, const RunConfig& cfg, const RunRecord& record)
{
    fs::create_directories(dir);
    write_text(dir / "config.json", dump_run_config(cfg) + "\n");
    write_rounds_csv(dir / "rounds.csv", record.rounds);
    write_validation_csv(dir / "validation.csv", record.validation);
    write_meta_json(dir / "meta.json", record.meta);
}

// ---------------------------------------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& out_flag, const SeedOverrides& seeds)
{
    RunConfig cfg = load_run_config(config_path);
    seeds.apply(cfg);
    const fs::path dir = output_root(out_flag, &cfg, cfg.algorithm);
    const RunRecord record = run_config(cfg);
    save_run(dir, cfg, record);
    std::cout << "wrote " << record.rounds.size() << " rounds to " << dir.string() << "\n";
    if (!record.validation.empty()) {
        std::cout << "final validation reward " << format_double(record.validation.back().reward) << "\n";
    }
    return 0;
}

struct SweepJob {
    std::size_t parameter_index;
    std::size_t replicate;
    RunConfig cfg;
    fs::path dir;
};

int cmd_sweep(const std::string& config_path, const std::string& out_flag, const SeedOverrides& seeds,
              std::size_t jobs, bool resume, const std::string& grid_name, std::size_t replicates)
{
    RunConfig base = load_run_config(config_path);
    seeds.apply(base);
    const GridKind kind = grid_name.empty() ? grid_kind_for(base.algorithm) : parse_grid_kind(grid_name);
    const auto grid = parameter_grid(kind);
    const fs::path root = output_root(out_flag, &base, base.algorithm);
    fs::create_directories(root);

    std::vector<SweepJob> work;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        for (std::size_t r = 0; r < replicates; ++r) {
            RunConfig cfg = base;
            cfg.parameter = grid[p];
            cfg.replicate = base.replicate + r;
            const fs::path dir = root / ("p" + std::to_string(p) + "_r" + std::to_string(r));
            if (resume && fs::exists(dir / "meta.json")) continue;
            work.push_back({p, r, cfg, dir});
        }
    }

    std::atomic<std::size_t> next{0};
    std::mutex failures_mutex;
    std::vector<std::string> failures;
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            const auto& job = work[i];
            try {
                save_run(job.dir, job.cfg, run_config(job.cfg));
            } catch (const std::exception& e) {
                std::lock_guard lock(failures_mutex);
                failures.push_back(job.dir.filename().string() + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::max<std::size_t>(1, jobs); ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // summary: mean final validation reward per parameter over the completed replicates
    std::vector<double> final_reward(grid.size(), 0.0);
    std::vector<std::size_t> completed(grid.size(), 0);
    std::vector<std::map<std::size_t, std::pair<double, std::size_t>>> series(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        for (std::size_t r = 0; r < replicates; ++r) {
            const fs::path dir = root / ("p" + std::to_string(p) + "_r" + std::to_string(r));
            if (!fs::exists(dir / "meta.json")) continue;
            const auto points = read_validation_csv(dir / "validation.csv");
            if (points.empty()) continue;
            ++completed[p];
            final_reward[p] += points.back().reward;
            for (const auto& pt : points) {
                auto& acc = series[p][pt.t];
                acc.first += pt.reward;
                ++acc.second;
            }
        }
        if (completed[p] > 0) final_reward[p] /= static_cast<double>(completed[p]);
    }
    std::optional<std::size_t> best;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (completed[p] > 0 && (!best || final_reward[p] > final_reward[*best])) best = p;
    }

    std::ofstream summary(root / "summary.csv", std::ios::binary);
    summary << "parameter_index,parameter,replicates,final_validation,best,horizon\n";
    for (std::size_t p = 0; p < grid.size(); ++p) {
        summary << p << ',' << format_double(grid[p]) << ',' << completed[p] << ','
                << (completed[p] > 0 ? format_double(final_reward[p]) : std::string("nan")) << ','
                << (best && *best == p ? 1 : 0) << ',' << base.horizon << '\n';
    }
    std::ofstream best_series(root / "best_series.csv", std::ios::binary);
    best_series << "t,reward\n";
    if (best) {
        for (const auto& [t, acc] : series[*best]) {
            best_series << t << ',' << format_double(acc.first / static_cast<double>(acc.second)) << '\n';
        }
    }
    if (!failures.empty()) {
        std::ofstream f(root / "failures.txt", std::ios::binary);
        for (const auto& line : failures) f << line << '\n';
        std::cerr << failures.size() << " run(s) failed; see " << (root / "failures.txt").string() << "\n";
    }
    std::cout << "sweep: " << work.size() << " run(s) executed, " << grid.size() * replicates << " in grid";
    if (best) std::cout << ", best parameter " << format_double(grid[*best]);
    std::cout << "\n";
    return failures.empty() ? 0 : kRuntimeError;
}

// ---------------------------------------------------------------------------------------

struct LowerBoundResult {
    double regret = 0.0;
    double distinct = 0.0;
    double mistakes = 0.0;
    double repeat_mistakes = 0.0;
};

int cmd_lowerbound(std::size_t n, double eps, std::size_t horizon, const std::string& algorithm, std::size_t seeds,
                   std::uint64_t seed_dataset, std::uint64_t seed_algo, const std::string& out_flag)
{
    if (n < 1) throw ConfigError("N must be >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0,1]");
    std::vector<std::string> algorithms;
    if (algorithm == "both") {
        algorithms = {"regcb-elim", "regcb-opt"};
    } else if (algorithm == "elim" || algorithm == "regcb-elim") {
        algorithms = {"regcb-elim"};
    } else if (algorithm == "opt" || algorithm == "regcb-opt") {
        algorithms = {"regcb-opt"};
    } else {
        throw ConfigError("invalid algorithm '" + algorithm + "'; valid: elim, opt, both");
    }

    std::ostringstream csv;
    csv << "algorithm,seeds,horizon,regret,distinct_contexts,mistakes,repeat_mistakes,regret_per_distinct\n";
    std::cout << "N=" << n << " eps=" << format_double(eps) << " T=" << horizon << " seeds=" << seeds << "\n";
    for (const auto& name : algorithms) {
        LowerBoundResult mean;
        for (std::size_t s = 0; s < seeds; ++s) {
            RunConfig cfg;
            cfg.algorithm = name;
            cfg.oracle = "finite";
            cfg.environment = "prop1";
            cfg.num_contexts = n;
            cfg.epsilon = eps;
            cfg.parameter = 0.0;
            cfg.schedule = "per_round";
            cfg.horizon = horizon;
            cfg.seed_dataset = seed_dataset;
            cfg.seed_algo = seed_algo;
            cfg.replicate = s;
            const auto env = make_environment(cfg);
            const RunRecord rec = run_config(cfg);
            std::set<std::size_t> seen;
            for (const auto& r : rec.rounds) {
                const std::size_t id = *env->round(r.t).context.id;
                const bool first = seen.insert(id).second;
                if (r.action != Prop1Instance::good_action) (first ? mean.mistakes : mean.repeat_mistakes) += 1.0;
            }
            mean.regret += rec.cumulative_regret();
            mean.distinct += static_cast<double>(seen.size());
        }
        const double k = static_cast<double>(std::max<std::size_t>(seeds, 1));
        mean.regret /= k;
        mean.distinct /= k;
        mean.mistakes /= k;
        mean.repeat_mistakes /= k;
        std::cout << name << ": regret " << format_double(mean.regret) << ", distinct contexts "
                  << format_double(mean.distinct) << ", first-visit mistakes " << format_double(mean.mistakes)
                  << ", repeat mistakes " << format_double(mean.repeat_mistakes) << ", (1-eps)*distinct "
                  << format_double((1.0 - eps) * mean.distinct) << "\n";
        csv << name << ',' << seeds << ',' << horizon << ',' << format_double(mean.regret) << ','
            << format_double(mean.distinct) << ',' << format_double(mean.mistakes) << ','
            << format_double(mean.repeat_mistakes) << ','
            << format_double(mean.distinct > 0 ? mean.regret / mean.distinct : 0.0) << '\n';
    }
    if (!out_flag.empty()) {
        fs::create_directories(out_flag);
        write_text(fs::path(out_flag) / "lowerbound.csv", csv.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------------------

void diag_run(const fs::path& run_dir, const fs::path& out, std::size_t window)
{
    if (!fs::exists(run_dir / "rounds.csv")) throw ConfigError("no rounds.csv in " + run_dir.string());
    const auto rounds = read_rounds_csv(run_dir / "rounds.csv");
    if (rounds.empty()) throw ConfigError("rounds.csv is empty");
    std::vector<double> t, w, a;
    for (const auto& r : rounds) {
        t.push_back(static_cast<double>(r.t));
        w.push_back(r.width);
        a.push_back(static_cast<double>(r.disagreement_size));
    }
    const auto ws = width_series(w, window);
    const auto as = width_series(a, window);
    fs::create_directories(out);
    std::ofstream series(out / "width_series.csv", std::ios::binary);
    series << "t,width,width_smoothed,disagreement_size,disagreement_smoothed\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        series << rounds[i].t << ',' << format_double(w[i]) << ',' << format_double(ws[i]) << ','
               << rounds[i].disagreement_size << ',' << format_double(as[i]) << '\n';
    }
    std::ofstream slope(out / "slope.csv", std::ios::binary);
    slope << "series,slope,intercept,used,dropped\n";
    try {
        const SlopeFit fit = slope_fit(t, ws);
        slope << "width," << format_double(fit.slope) << ',' << format_double(fit.intercept) << ',' << fit.used
              << ',' << fit.dropped << '\n';
        std::cout << "width slope " << format_double(fit.slope) << " (" << fit.dropped << " point(s) dropped)\n";
    } catch (const std::invalid_argument& e) {
        slope << "width,nan,nan,0," << t.size() << '\n';
        std::cout << "width slope unavailable: " << e.what() << "\n";
    }
}

void diag_environment(const RunConfig& cfg, const fs::path& out, std::size_t sparsity, std::size_t samples)
{
    const auto env = make_environment(cfg);
    const std::size_t k = env->num_actions();
    FeatureMap map = env->label_dependent() ? FeatureMap::joint_rows(env->action_feature_dim(), k, false)
                                            : FeatureMap::joint_blocked(env->context_dim(), k, false);
    if (cfg.oracle == "ridge_product") map = FeatureMap::per_action(env->context_dim(), false);

    std::vector<MomentSample<double>> data;
    const std::size_t n = std::min(samples, env->available_rounds());
    for (std::size_t t = 1; t <= n; ++t) {
        const RoundData rd = env->round(t);
        Matrix phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(map.dimension()));
        for (ActionId a = 0; a < k; ++a) phi.row(static_cast<Eigen::Index>(a)) = map(rd.context, a).transpose();
        data.push_back({std::move(phi), rd.mean});
    }
    fs::create_directories(out);
    std::ofstream csv(out / "moments.csv", std::ios::binary);
    csv << "lambda,sparsity,l1_bound,l2_bound,l1_sparse_bound,l2_sparse_bound,l1_infinite,l2_infinite,margin\n";
    for (const double lambda : {0.0, 0.05, 0.1, 0.2, 0.3, 0.5}) {
        const auto d = moment_bounds(data, lambda, sparsity);
        csv << format_double(lambda) << ',' << sparsity << ',' << format_double(d.l1_bound) << ','
            << format_double(d.l2_bound) << ',' << format_double(d.l1_sparse_bound) << ','
            << format_double(d.l2_sparse_bound) << ',' << d.l1_infinite << ',' << d.l2_infinite << ','
            << format_double(d.margin) << '\n';
        if (lambda == 0.0) {
            std::cout << "L1 " << format_double(d.l1_bound) << ", L2 at lambda=0 " << format_double(d.l2_bound)
                      << ", margin " << format_double(d.margin) << "\n";
        }
    }
}

// ---------------------------------------------------------------------------------------

int cmd_aggregate(const std::string& in_dir, const std::string& out_flag, std::size_t min_examples)
{
    if (!fs::is_directory(in_dir)) throw ConfigError("no such directory " + in_dir);
    // layout: <in>/<dataset>/<algorithm>/best_series.csv + summary.csv
    std::map<std::string, std::vector<double>> losses;
    std::ostringstream table;
    table << "dataset,algorithm,reward,loss\n";
    std::size_t datasets = 0;
    std::set<fs::path> dataset_dirs;
    for (const auto& e : fs::directory_iterator(in_dir)) {
        if (e.is_directory()) dataset_dirs.insert(e.path());
    }
    for (const auto& dataset : dataset_dirs) {
        std::vector<std::string> names;
        std::vector<double> rewards;
        std::set<fs::path> algo_dirs;
        for (const auto& e : fs::directory_iterator(dataset)) {
            if (e.is_directory() && fs::exists(e.path() / "best_series.csv")) algo_dirs.insert(e.path());
        }
        bool too_small = false;
        for (const auto& algo : algo_dirs) {
            const auto series = read_validation_csv(algo / "best_series.csv");
            if (series.empty()) continue;
            if (series.back().t < min_examples) too_small = true;
            names.push_back(algo.filename().string());
            rewards.push_back(series.back().reward);
        }
        if (too_small || names.size() < 2) continue;
        ++datasets;
        const auto loss = normalized_relative_loss(rewards);
        for (std::size_t i = 0; i < names.size(); ++i) {
            losses[names[i]].push_back(loss[i]);
            table << dataset.filename().string() << ',' << names[i] << ',' << format_double(rewards[i]) << ','
                  << format_double(loss[i]) << '\n';
        }
    }
    const fs::path out = out_flag.empty() ? fs::path(in_dir) : fs::path(out_flag);
    fs::create_directories(out);
    write_text(out / "losses.csv", table.str());
    std::ofstream cdf(out / "cdf.csv", std::ios::binary);
    cdf << "algorithm,x,count\n";
    for (const auto& p : loss_cdf(losses)) {
        cdf << p.algorithm << ',' << format_double(p.x) << ',' << p.count << '\n';
    }
    std::cout << "aggregated " << datasets << " dataset(s)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regression-oracle contextual bandits"};
    app.require_subcommand(1);

    std::string config_path, out_dir, grid_name, algorithm = "both", run_dir, in_dir;
    SeedOverrides seeds;
    std::size_t jobs = 1, replicates = 5, n = 50, horizon = 2000, lb_seeds = 20, window = 20, sparsity = 1,
                samples = 2000, min_examples = 1000;
    double eps = 0.5;
    bool resume = false;

    auto add_seed_flags = [&](CLI::App* cmd) {
        cmd->add_option("--seed-dataset", seeds.seed_dataset, "dataset randomness seed");
        cmd->add_option("--seed-algo", seeds.seed_algo, "algorithm randomness seed");
        cmd->add_option("--replicate", seeds.replicate, "replicate index");
    };

    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--config", config_path, "JSON run config")->required();
    run->add_option("--out", out_dir, "output directory");
    add_seed_flags(run);

    auto* sweep = app.add_subcommand("sweep", "8 parameters x replicates");
    sweep->add_option("--config", config_path, "JSON run config")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "parallel runs");
    sweep->add_flag("--resume", resume, "skip finished runs");
    sweep->add_option("--grid", grid_name, "confidence or epsilon (default by algorithm)");
    sweep->add_option("--replicates", replicates, "replicates per parameter");
    add_seed_flags(sweep);

    auto* lower = app.add_subcommand("lowerbound", "finite-class instance where confidence bounds over-explore");
    lower->add_option("--N", n, "number of contexts");
    lower->add_option("--epsilon", eps, "reward gap parameter");
    lower->add_option("--T", horizon, "rounds");
    lower->add_option("--algorithm", algorithm, "elim, opt or both");
    lower->add_option("--seeds", lb_seeds, "number of seeds");
    lower->add_option("--out", out_dir, "directory for lowerbound.csv");
    add_seed_flags(lower);

    auto* diag = app.add_subcommand("diag", "width, disagreement and moment diagnostics");
    diag->add_option("--run", run_dir, "run directory with rounds.csv");
    diag->add_option("--config", config_path, "environment config for moment diagnostics");
    diag->add_option("--out", out_dir, "output directory");
    diag->add_option("--window", window, "smoothing window");
    diag->add_option("--sparsity", sparsity, "sparsity s for restricted eigenvalues");
    diag->add_option("--samples", samples, "contexts sampled for moments");
    add_seed_flags(diag);

    auto* aggregate = app.add_subcommand("aggregate", "normalized losses and loss CDF across datasets");
    aggregate->add_option("--in", in_dir, "root with <dataset>/<algorithm>/ sweep outputs")->required();
    aggregate->add_option("--out", out_dir, "output directory");
    aggregate->add_option("--min-examples", min_examples, "drop datasets with fewer rounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seeds);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seeds, jobs, resume, grid_name, replicates);
        if (lower->parsed()) {
            return cmd_lowerbound(n, eps, horizon, algorithm, lb_seeds, seeds.seed_dataset.value_or(0),
                                  seeds.seed_algo.value_or(0), out_dir);
        }
        if (diag->parsed()) {
            if (run_dir.empty() && config_path.empty()) throw ConfigError("diag needs --run or --config");
            const fs::path out = out_dir.empty() ? (run_dir.empty() ? fs::path("diag") : fs::path(run_dir) / "diag")
                                                 : fs::path(out_dir);
            if (!run_dir.empty()) diag_run(run_dir, out, window);
            if (!config_path.empty()) {
                RunConfig cfg = load_run_config(config_path);
                seeds.apply(cfg);
                diag_environment(cfg, out, sparsity, samples);
            }
            return 0;
        }
        if (aggregate->parsed()) return cmd_aggregate(in_dir, out_dir, min_examples);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
