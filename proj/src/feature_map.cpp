#include "regcb/feature_map.hpp"

namespace regcb {

FeatureMap FeatureMap::joint_blocked(std::size_t context_dim, std::size_t num_actions, bool include_bias)
{
    if (num_actions == 0) throw std::invalid_argument("feature map needs at least one action");
    return FeatureMap(Mode::joint_blocked, context_dim, num_actions, include_bias);
}

FeatureMap FeatureMap::joint_rows(std::size_t row_dim, std::size_t num_actions, bool include_bias)
{
    if (num_actions == 0) throw std::invalid_argument("feature map needs at least one action");
    return FeatureMap(Mode::joint_rows, row_dim, num_actions, include_bias);
}

FeatureMap FeatureMap::per_action(std::size_t context_dim, bool include_bias)
{
    return FeatureMap(Mode::per_action, context_dim, 1, include_bias);
}

std::size_t FeatureMap::dimension() const
{
    const std::size_t block = input_dim_ + (include_bias_ ? 1 : 0);
    return mode_ == Mode::joint_blocked ? block * num_actions_ : block;
}

Vector FeatureMap::operator()(const Context& x, ActionId a) const
{
    const auto d = static_cast<Eigen::Index>(input_dim_);
    const Eigen::Index block = d + (include_bias_ ? 1 : 0);

    auto fill = [&](auto&& out, const auto& source) {
        if (source.size() != d) {
            throw std::invalid_argument("context dimension " + std::to_string(source.size()) +
                                        " does not match feature map dimension " + std::to_string(d));
        }
        out.head(d) = source;
        if (include_bias_) out[d] = 1.0;
    };

    switch (mode_) {
    case Mode::per_action: {
        Vector phi(block);
        fill(phi, x.features);
        return phi;
    }
    case Mode::joint_rows: {
        if (!x.action_features) {
            throw std::invalid_argument("joint_rows feature map needs label-dependent context features");
        }
        if (a >= num_actions_ || static_cast<Eigen::Index>(a) >= x.action_features->rows()) {
            throw std::out_of_range("action out of range");
        }
        Vector phi(block);
        fill(phi, x.action_features->row(static_cast<Eigen::Index>(a)).transpose());
        return phi;
    }
    case Mode::joint_blocked: {
        if (a >= num_actions_) throw std::out_of_range("action out of range");
        Vector phi = Vector::Zero(block * static_cast<Eigen::Index>(num_actions_));
        fill(phi.segment(static_cast<Eigen::Index>(a) * block, block), x.features);
        return phi;
    }
    }
    return {};
}

}  // namespace regcb
