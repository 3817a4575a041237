#ifndef REGCB_CORE_HPP
#define REGCB_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace regcb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when an object is asked to do something its current state cannot support
/// (singular normal equations on the closed-form path, an empty finite class, ...).
class InvalidState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when a caller breaks a documented precondition that cannot be checked by type,
/// e.g. handing a non-convex class to the binary search.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

using ActionId = std::size_t;

/// A context as seen by a learner. `action_features`, when present, holds one row per
/// action (label-dependent features). `id` is the index of the context in an enumerated
/// context space; only finite classes look at it.
struct Context {
    Vector features;
    std::optional<Matrix> action_features;
    std::optional<std::size_t> id;
};

void validate(const Context& x);

struct BanditObservation {
    Context context;
    ActionId action = 0;
    double reward = 0.0;
    double propensity = 1.0;
};

struct WeightedRegressionExample {
    double weight = 1.0;
    Context context;
    ActionId action = 0;
    double target = 0.0;
};

/// Append-only list of oracle inputs.
using History = std::vector<WeightedRegressionExample>;

/// Expected-vs-realized reward helpers live in environments; this is the raw vector type.
using RewardVector = Vector;

void validate_rewards(const RewardVector& r);

// ---------------------------------------------------------------------------------------
// Epoch schedule

enum class ScheduleMode {
    theory_doubling,  ///< tau_m = 2^(m-1)
    practical_sqrt2,  ///< epoch lengths round(2^(i/2))
    per_round         ///< every round starts an epoch
};

ScheduleMode parse_schedule_mode(std::string_view name);
std::string_view to_string(ScheduleMode mode);

/// Epoch start rounds (1-based) for a horizon T. The first entry is always 1.
std::vector<std::size_t> epoch_starts(ScheduleMode mode, std::size_t horizon);

/// A version-space radius. Epoch 1 uses the whole class, which is represented by an
/// explicit unbounded value rather than by a large float.
class Radius {
public:
    static Radius unbounded() { return Radius{}; }
    static Radius bounded(double value);

    bool is_unbounded() const { return !value_.has_value(); }
    /// Throws InvalidState when unbounded.
    double value() const;

private:
    Radius() = default;
    std::optional<double> value_;
};

/// beta_m = (M - m + 1) C / (tau_m - 1) for 2 <= m <= M; unbounded for m = 1.
Radius beta_schedule(std::size_t total_epochs, std::size_t epoch, double confidence_constant,
                     std::size_t epoch_start);

/// C_delta = 16 ln(2 |G| K T^2 / delta), natural log.
double c_delta(double base_class_size, std::size_t num_actions, std::size_t horizon, double delta);

/// C'_delta = 16 ln(2 |F| T^2 / delta) for a joint class.
double c_delta_joint(double class_size, std::size_t horizon, double delta);

/// M0 = 2 + floor(log2(1 + (2M + 3) L1 C' / lambda^2)).
std::size_t warm_start_epochs(std::size_t total_epochs, double surprise_bound, double confidence_constant,
                              double margin);

/// Converts a radius in normalized units (excess of the mean loss over tau_m - 1 rounds)
/// into a radius on the summed objective the oracle minimizes.
Radius unnormalized_radius(const Radius& normalized, std::size_t epoch_start);

struct Schedule {
    ScheduleMode mode = ScheduleMode::practical_sqrt2;
    std::size_t horizon = 1;
    std::vector<std::size_t> starts;

    static Schedule make(ScheduleMode mode, std::size_t horizon);

    std::size_t num_epochs() const { return starts.size(); }
    /// 1-based epoch index containing round t.
    std::size_t epoch_of(std::size_t round) const;
    bool is_epoch_start(std::size_t round) const;
    /// tau_m for 1-based m.
    std::size_t start_of(std::size_t epoch) const { return starts.at(epoch - 1); }
};

}  // namespace regcb

#endif  // REGCB_CORE_HPP
