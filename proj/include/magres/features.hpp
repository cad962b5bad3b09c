#pragma once

#include <Eigen/Core>

#include "magres/errors.hpp"

namespace magres {

/// Readout feature convention shared by training and free-running execution.
/// state_only:       features = x
/// bias_input_state: features = [1; u; x]
enum class FeatureMode { state_only, bias_input_state };

inline Eigen::Index feature_dim(Eigen::Index n_nodes, Eigen::Index n_inputs, FeatureMode mode) {
    return mode == FeatureMode::state_only ? n_nodes : 1 + n_inputs + n_nodes;
}

inline Eigen::VectorXd feature_vector(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                      FeatureMode mode) {
    if (mode == FeatureMode::state_only) return x;
    Eigen::VectorXd f(1 + u.size() + x.size());
    f(0) = 1.0;
    f.segment(1, u.size()) = u;
    f.tail(x.size()) = x;
    return f;
}

}  // namespace magres
