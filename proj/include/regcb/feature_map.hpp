#ifndef REGCB_FEATURE_MAP_HPP
#define REGCB_FEATURE_MAP_HPP

#include "regcb/core.hpp"

namespace regcb {

/// Deterministic map from (context, action) to a fixed-length real vector.
///
/// * `joint_blocked`: phi(x,a) places x (plus optional bias) in the a-th of K blocks.
/// * `joint_rows`: phi(x,a) is the a-th row of the context's label-dependent features.
/// * `per_action`: phi(x) = x (plus optional bias); used by product classes, one
///   predictor per action, so the action is ignored.
class FeatureMap {
public:
    enum class Mode { joint_blocked, joint_rows, per_action };

    static FeatureMap joint_blocked(std::size_t context_dim, std::size_t num_actions, bool include_bias);
    static FeatureMap joint_rows(std::size_t row_dim, std::size_t num_actions, bool include_bias);
    static FeatureMap per_action(std::size_t context_dim, bool include_bias);

    Mode mode() const { return mode_; }
    bool include_bias() const { return include_bias_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t dimension() const;

    Vector operator()(const Context& x, ActionId a) const;

private:
    FeatureMap(Mode mode, std::size_t input_dim, std::size_t num_actions, bool include_bias)
        : mode_(mode), input_dim_(input_dim), num_actions_(num_actions), include_bias_(include_bias)
    {}

    Mode mode_;
    std::size_t input_dim_;
    std::size_t num_actions_;
    bool include_bias_;
};

}  // namespace regcb

#endif  // REGCB_FEATURE_MAP_HPP
