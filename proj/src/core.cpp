#include "regcb/core.hpp"

#include <algorithm>
#include <cmath>

namespace regcb {

void validate(const Context& x)
{
    if (!x.features.allFinite()) {
        throw std::invalid_argument("context features must be finite");
    }
    if (x.action_features && !x.action_features->allFinite()) {
        throw std::invalid_argument("per-action context features must be finite");
    }
}

void validate_rewards(const RewardVector& r)
{
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!(r[i] >= 0.0 && r[i] <= 1.0)) {
            throw std::invalid_argument("reward entries must lie in [0,1]");
        }
    }
}

ScheduleMode parse_schedule_mode(std::string_view name)
{
    if (name == "theory_doubling") return ScheduleMode::theory_doubling;
    if (name == "practical_sqrt2") return ScheduleMode::practical_sqrt2;
    if (name == "per_round") return ScheduleMode::per_round;
    throw std::invalid_argument("unknown schedule mode '" + std::string(name) +
                                "' (expected theory_doubling, practical_sqrt2 or per_round)");
}

std::string_view to_string(ScheduleMode mode)
{
    switch (mode) {
    case ScheduleMode::theory_doubling: return "theory_doubling";
    case ScheduleMode::practical_sqrt2: return "practical_sqrt2";
    case ScheduleMode::per_round: return "per_round";
    }
    return "unknown";
}

std::vector<std::size_t> epoch_starts(ScheduleMode mode, std::size_t horizon)
{
    if (horizon < 1) {
        throw std::invalid_argument("epoch_starts: horizon must be >= 1");
    }
    std::vector<std::size_t> starts;
    switch (mode) {
    case ScheduleMode::theory_doubling:
        for (std::size_t tau = 1; tau <= horizon; tau *= 2) {
            starts.push_back(tau);
        }
        break;
    case ScheduleMode::practical_sqrt2: {
        std::size_t tau = 1;
        for (int i = 0; tau <= horizon; ++i) {
            starts.push_back(tau);
            // round half up, minimum length 1
            const double len = std::floor(std::pow(2.0, 0.5 * i) + 0.5);
            tau += std::max<std::size_t>(1, static_cast<std::size_t>(len));
        }
        break;
    }
    case ScheduleMode::per_round:
        starts.resize(horizon);
        for (std::size_t t = 0; t < horizon; ++t) starts[t] = t + 1;
        break;
    }
    return starts;
}

Radius Radius::bounded(double value)
{
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("radius must be finite and nonnegative");
    }
    Radius r;
    r.value_ = value;
    return r;
}

double Radius::value() const
{
    if (!value_) {
        throw InvalidState("radius is unbounded");
    }
    return *value_;
}

Radius beta_schedule(std::size_t total_epochs, std::size_t epoch, double confidence_constant,
                     std::size_t epoch_start)
{
    if (epoch == 1) {
        return Radius::unbounded();
    }
    if (epoch < 1 || epoch > total_epochs) {
        throw std::invalid_argument("beta_schedule: epoch out of range");
    }
    if (epoch_start < 2) {
        throw std::invalid_argument("beta_schedule: epoch start must exceed 1 after the first epoch");
    }
    const double remaining = static_cast<double>(total_epochs - epoch + 1);
    return Radius::bounded(remaining * confidence_constant / static_cast<double>(epoch_start - 1));
}

namespace {
void check_delta(double delta)
{
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0,1)");
    }
}
}  // namespace

double c_delta(double base_class_size, std::size_t num_actions, std::size_t horizon, double delta)
{
    check_delta(delta);
    if (base_class_size < 1.0 || num_actions < 1 || horizon < 1) {
        throw std::invalid_argument("c_delta: class size, K and T must be >= 1");
    }
    const double t = static_cast<double>(horizon);
    return 16.0 * std::log(2.0 * base_class_size * static_cast<double>(num_actions) * t * t / delta);
}

double c_delta_joint(double class_size, std::size_t horizon, double delta)
{
    check_delta(delta);
    if (class_size < 1.0 || horizon < 1) {
        throw std::invalid_argument("c_delta_joint: class size and T must be >= 1");
    }
    const double t = static_cast<double>(horizon);
    return 16.0 * std::log(2.0 * class_size * t * t / delta);
}

std::size_t warm_start_epochs(std::size_t total_epochs, double surprise_bound, double confidence_constant,
                              double margin)
{
    if (!(margin > 0.0 && margin < 1.0)) {
        throw std::invalid_argument("warm_start_epochs: margin must lie in (0,1)");
    }
    if (!(surprise_bound > 0.0) || !(confidence_constant > 0.0)) {
        throw std::invalid_argument("warm_start_epochs: L1 and C' must be positive");
    }
    const double m = static_cast<double>(total_epochs);
    const double inner = 1.0 + (2.0 * m + 3.0) * surprise_bound * confidence_constant / (margin * margin);
    return 2 + static_cast<std::size_t>(std::floor(std::log2(inner)));
}

Radius unnormalized_radius(const Radius& normalized, std::size_t epoch_start)
{
    if (normalized.is_unbounded()) {
        return normalized;
    }
    const double rounds = epoch_start > 1 ? static_cast<double>(epoch_start - 1) : 0.0;
    return Radius::bounded(normalized.value() * rounds);
}

Schedule Schedule::make(ScheduleMode mode, std::size_t horizon)
{
    Schedule s;
    s.mode = mode;
    s.horizon = horizon;
    s.starts = epoch_starts(mode, horizon);
    return s;
}

std::size_t Schedule::epoch_of(std::size_t round) const
{
    if (round < 1) {
        throw std::invalid_argument("rounds are 1-based");
    }
    const auto it = std::upper_bound(starts.begin(), starts.end(), round);
    return static_cast<std::size_t>(it - starts.begin());
}

bool Schedule::is_epoch_start(std::size_t round) const
{
    return std::binary_search(starts.begin(), starts.end(), round);
}

}  // namespace regcb
