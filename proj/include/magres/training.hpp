#pragma once

#include <Eigen/Core>
#include <vector>

#include "magres/features.hpp"
#include "magres/reservoir.hpp"

namespace magres::training {

struct RidgeConfig {
    double lambda = 1e-6;  // ridge regularizer, >= 0
    FeatureMode feature_mode = FeatureMode::bias_input_state;

    void validate() const;
};

/// Feature matrix of a trace (features x time), washout rows excluded.
Eigen::MatrixXd feature_matrix(const reservoir::StateTrace& trace, FeatureMode mode);

/// Regularized least-squares readout: W = Y F^T (F F^T + lambda I)^-1 with
/// F the post-washout feature matrix and Y the matching targets
/// (outputs x time), solved by an LDLT factorization of the normal matrix.
/// With lambda = 0 on full-rank features this is the Wiener-Hopf solution;
/// a singular normal matrix at lambda = 0 raises an error advising
/// lambda > 0. `targets` has one row per trace step (T x L).
Eigen::MatrixXd train_readout(const reservoir::StateTrace& trace, const Eigen::MatrixXd& targets,
                              const RidgeConfig& cfg);

/// Root-mean-square error normalized by target standard deviation,
/// averaged over output channels. Columns are channels.
double nrmse(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target);

enum class SrrNorm { l2, l1 };

/// Symbol recovery rate 1 - |y - d| / |u - d| over an evaluation window.
/// The norm is l2 by default; l1 is kept for sensitivity checks.
double srr(const std::vector<double>& y, const std::vector<double>& d,
           const std::vector<double>& u, SrrNorm norm = SrrNorm::l2);

/// Sign-threshold bit error rate of y against antipodal symbols d.
double bit_error_rate(const std::vector<double>& y, const std::vector<double>& d);

}  // namespace magres::training
