#include "regcb/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace regcb {

namespace {

using nlohmann::json;

// One entry per field: how to read it from JSON and how to write it back.
struct Field {
    std::function<void(RunConfig&, const json&)> read;
    std::function<json(const RunConfig&)> write;
};

template <typename T>
Field field(T RunConfig::*member)
{
    return {[member](RunConfig& c, const json& v) { c.*member = v.get<T>(); },
            [member](const RunConfig& c) { return json(c.*member); }};
}

const std::map<std::string, Field>& fields()
{
    static const std::map<std::string, Field> table = {
        {"algorithm", field(&RunConfig::algorithm)},
        {"parameter", field(&RunConfig::parameter)},
        {"radius", field(&RunConfig::radius)},
        {"radius_units", field(&RunConfig::radius_units)},
        {"delta", field(&RunConfig::delta)},
        {"class_size", field(&RunConfig::class_size)},
        {"bounds_method", field(&RunConfig::bounds_method)},
        {"precision", field(&RunConfig::precision)},
        {"max_iterations", field(&RunConfig::max_iterations)},
        {"warm_start_epochs", field(&RunConfig::warm_start_epochs)},
        {"bootstrap_replicates", field(&RunConfig::bootstrap_replicates)},
        {"reduction", field(&RunConfig::reduction)},
        {"oracle", field(&RunConfig::oracle)},
        {"lambda_reg", field(&RunConfig::lambda_reg)},
        {"environment", field(&RunConfig::environment)},
        {"dim", field(&RunConfig::dim)},
        {"num_actions", field(&RunConfig::num_actions)},
        {"noise", field(&RunConfig::noise)},
        {"margin", field(&RunConfig::margin)},
        {"label_dependent", field(&RunConfig::label_dependent)},
        {"holdout_size", field(&RunConfig::holdout_size)},
        {"num_contexts", field(&RunConfig::num_contexts)},
        {"epsilon", field(&RunConfig::epsilon)},
        {"dataset", field(&RunConfig::dataset)},
        {"label_column", field(&RunConfig::label_column)},
        {"header", field(&RunConfig::header)},
        {"holdout_fraction", field(&RunConfig::holdout_fraction)},
        {"noisy_rewards", field(&RunConfig::noisy_rewards)},
        {"standardize", field(&RunConfig::standardize)},
        {"schedule", field(&RunConfig::schedule)},
        {"horizon", field(&RunConfig::horizon)},
        {"seed_dataset", field(&RunConfig::seed_dataset)},
        {"seed_algo", field(&RunConfig::seed_algo)},
        {"replicate", field(&RunConfig::replicate)},
        {"output", field(&RunConfig::output)},
    };
    return table;
}

const char* const kAlgorithms = "regcb-opt, regcb-elim, egreedy, bootstrap, uniform";

template <typename... Names>
void require_one_of(const std::string& key, const std::string& value, Names... names)
{
    if (((value == names) || ...)) return;
    std::string list;
    ((list += (list.empty() ? "" : ", ") + std::string(names)), ...);
    throw ConfigError("invalid " + key + " '" + value + "'; valid: " + list);
}

json to_json_object(const RunConfig& cfg)
{
    json out = json::object();
    for (const auto& [key, f] : fields()) out[key] = f.write(cfg);
    return out;
}

}  // namespace

void RunConfig::validate() const
{
    if (algorithm != "regcb-opt" && algorithm != "regcb-elim" && algorithm != "egreedy" && algorithm != "bootstrap" &&
        algorithm != "uniform") {
        throw ConfigError("invalid algorithm '" + algorithm + "'; valid: " + kAlgorithms);
    }
    require_one_of("radius", radius, "constant", "theory");
    require_one_of("radius_units", radius_units, "raw", "normalized");
    require_one_of("bounds_method", bounds_method, "closed_form", "bin_search");
    require_one_of("reduction", reduction, "unweighted", "importance_weighted", "importance_weighted_targets");
    require_one_of("oracle", oracle, "ridge_joint", "ridge_product", "finite");
    require_one_of("environment", environment, "synthetic_linear", "massart_linear", "prop1", "csv");
    require_one_of("schedule", schedule, "theory_doubling", "practical_sqrt2", "per_round");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(parameter >= 0.0)) throw ConfigError("parameter must be >= 0");
    if (algorithm == "egreedy" && parameter > 1.0) throw ConfigError("egreedy parameter must lie in [0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (!(precision > 0.0)) throw ConfigError("precision must be > 0");
    if (!(lambda_reg > 0.0)) throw ConfigError("lambda_reg must be > 0");
    if (algorithm == "bootstrap" && bootstrap_replicates < 1) throw ConfigError("bootstrap_replicates must be >= 1");
    if (oracle == "finite" && environment != "prop1") {
        throw ConfigError("the finite oracle is only available on the prop1 environment");
    }
    if (environment == "prop1" && oracle != "finite") {
        throw ConfigError("the prop1 environment needs the finite oracle");
    }
    if (oracle == "finite" && (algorithm == "egreedy" || algorithm == "bootstrap")) {
        throw ConfigError(algorithm + " needs a ridge oracle");
    }
    if (environment == "csv" && dataset.empty()) throw ConfigError("csv environment needs 'dataset'");
    if (label_dependent && oracle != "ridge_joint") {
        throw ConfigError("label-dependent features need the ridge_joint oracle");
    }
}

RunConfig parse_run_config(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        const auto it = fields().find(key);
        if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
        try {
            it->second.read(cfg, value);
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& cfg)
{
    return to_json_object(cfg).dump(2);
}

std::map<std::string, std::string> config_metadata(const RunConfig& cfg)
{
    std::map<std::string, std::string> out;
    const json doc = to_json_object(cfg);
    for (const auto& [key, value] : doc.items()) {
        out[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    return out;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate)
{
    return derive_seed(seed, Stream::permutation, replicate + 1);
}

std::unique_ptr<Environment> make_environment(const RunConfig& cfg)
{
    const std::uint64_t data_seed = replicate_seed(cfg.seed_dataset, cfg.replicate);
    try {
        if (cfg.environment == "synthetic_linear" || cfg.environment == "massart_linear") {
            SyntheticLinearOptions o;
            o.dim = cfg.dim;
            o.num_actions = cfg.num_actions;
            o.noise = cfg.noise;
            o.margin = cfg.environment == "massart_linear" ? cfg.margin : 0.0;
            o.label_dependent = cfg.label_dependent;
            o.holdout_size = cfg.holdout_size;
            o.world_seed = cfg.seed_dataset;
            o.data_seed = data_seed;
            return std::make_unique<SyntheticLinearWorld>(o);
        }
        if (cfg.environment == "prop1") {
            return std::make_unique<Prop1Environment>(Prop1Instance{cfg.num_contexts, cfg.epsilon}, data_seed);
        }
        CsvOptions o;
        o.label_column = cfg.label_column;
        o.header = cfg.header;
        o.holdout_fraction = cfg.holdout_fraction;
        o.permutation_seed = data_seed;
        o.standardize = cfg.standardize;
        auto data = std::make_shared<const SupervisedDataset>(load_csv_dataset(cfg.dataset, o));
        std::optional<NoisyRewardModel> noise;
        if (cfg.noisy_rewards) noise = NoisyRewardModel::draw(data->num_actions, cfg.seed_dataset);
        return std::make_unique<MulticlassEnvironment>(std::move(data), std::move(noise), data_seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

Schedule make_schedule(const RunConfig& cfg)
{
    return Schedule::make(parse_schedule_mode(cfg.schedule), cfg.horizon);
}

namespace {

FeatureMap joint_map(const Environment& env)
{
    if (env.label_dependent()) return FeatureMap::joint_rows(env.action_feature_dim(), env.num_actions(), false);
    return FeatureMap::joint_blocked(env.context_dim(), env.num_actions(), false);
}

}  // namespace

std::shared_ptr<const RegressionOracle> make_oracle(const RunConfig& cfg, const Environment& env)
{
    if (cfg.oracle == "ridge_joint") return std::make_shared<RidgeOracle>(joint_map(env), cfg.lambda_reg);
    if (cfg.oracle == "ridge_product") {
        return std::make_shared<ProductRidgeOracle>(FeatureMap::per_action(env.context_dim(), false),
                                                    env.num_actions(), cfg.lambda_reg);
    }
    const auto* prop1 = dynamic_cast<const Prop1Environment*>(&env);
    if (prop1 == nullptr) throw ConfigError("the finite oracle is only available on the prop1 environment");
    return std::make_shared<FiniteClassOracle>(prop1->instance().make_class());
}

std::unique_ptr<Learner> make_learner(const RunConfig& cfg, const Environment& env)
{
    cfg.validate();
    const std::size_t k = env.num_actions();
    if (cfg.algorithm == "uniform") return std::make_unique<UniformLearner>(k);
    if (cfg.algorithm == "egreedy") {
        return std::make_unique<EpsilonGreedy>(make_oracle(cfg, env), k, cfg.parameter,
                                               parse_reduction(cfg.reduction));
    }
    if (cfg.algorithm == "bootstrap") {
        return std::make_unique<BootstrapLearner>(make_oracle(cfg, env), k, cfg.bootstrap_replicates, cfg.parameter,
                                                  derive_seed(cfg.seed_algo, Stream::bootstrap, cfg.replicate));
    }

    const Schedule schedule = make_schedule(cfg);
    RidgeBoundsOptions bounds;
    bounds.method = cfg.bounds_method == "bin_search" ? BoundsMethod::bin_search : BoundsMethod::closed_form;
    bounds.precision = cfg.precision;
    bounds.max_iterations = cfg.max_iterations;

    std::unique_ptr<ConfidenceModel> model;
    double class_size = cfg.class_size;
    if (cfg.oracle == "ridge_joint") {
        model = make_joint_ridge_model(joint_map(env), k, cfg.lambda_reg, bounds);
    } else if (cfg.oracle == "ridge_product") {
        model = make_product_ridge_model(FeatureMap::per_action(env.context_dim(), false), k, cfg.lambda_reg, bounds);
    } else {
        const auto& prop1 = dynamic_cast<const Prop1Environment&>(env);
        auto cls = prop1.instance().make_class();
        if (class_size <= 0.0) class_size = static_cast<double>(cls->size());
        model = make_finite_model(std::move(cls));
    }

    RadiusPolicy radius;
    if (cfg.radius == "constant") {
        radius = RadiusPolicy::constant(cfg.parameter, cfg.radius_units == "raw");
    } else {
        if (!(class_size >= 1.0)) throw ConfigError("theory radius needs class_size >= 1");
        const double c = cfg.oracle == "ridge_product" ? c_delta(class_size, k, cfg.horizon, cfg.delta)
                                                       : c_delta_joint(class_size, cfg.horizon, cfg.delta);
        radius = RadiusPolicy::theory(c, schedule.num_epochs());
    }

    if (cfg.algorithm == "regcb-elim") return std::make_unique<RegCBElimination>(std::move(model), schedule, radius);
    return std::make_unique<RegCBOptimistic>(std::move(model), schedule, radius, cfg.warm_start_epochs);
}

RunRecord run_config(const RunConfig& cfg)
{
    auto env = make_environment(cfg);
    auto learner = make_learner(cfg, *env);
    ExperimentOptions opts;
    opts.horizon = cfg.horizon;
    opts.schedule = make_schedule(cfg);
    opts.algorithm_seed = cfg.seed_algo;
    opts.replicate = cfg.replicate;
    RunRecord record = run_experiment(*learner, *env, opts);
    for (auto& [key, value] : config_metadata(cfg)) record.meta.emplace("config." + key, value);
    return record;
}

GridKind grid_kind_for(const std::string& algorithm)
{
    return algorithm == "egreedy" ? GridKind::epsilon : GridKind::confidence;
}

}  // namespace regcb
