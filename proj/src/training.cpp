#include "magres/training.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "magres/errors.hpp"

namespace magres::training {

void RidgeConfig::validate() const {
    if (!(lambda >= 0.0)) throw config_error("RidgeConfig: lambda must be >= 0");
}

Eigen::MatrixXd feature_matrix(const reservoir::StateTrace& trace, FeatureMode mode) {
    const Eigen::Index t_total = trace.states.rows();
    const Eigen::Index wash = trace.washout;
    if (t_total <= wash) throw config_error("feature_matrix: no rows left after washout");
    const Eigen::Index t_eff = t_total - wash;
    const Eigen::Index n = trace.states.cols();
    const Eigen::Index k = trace.inputs.cols();

    Eigen::MatrixXd f(feature_dim(n, k, mode), t_eff);
    if (mode == FeatureMode::state_only) {
        f = trace.states.bottomRows(t_eff).transpose();
    } else {
        f.row(0).setOnes();
        f.middleRows(1, k) = trace.inputs.bottomRows(t_eff).transpose();
        f.bottomRows(n) = trace.states.bottomRows(t_eff).transpose();
    }
    return f;
}

Eigen::MatrixXd train_readout(const reservoir::StateTrace& trace, const Eigen::MatrixXd& targets,
                              const RidgeConfig& cfg) {
    cfg.validate();
    if (targets.rows() != trace.states.rows()) {
        throw config_error("train_readout: targets must have one row per trace step");
    }

    const Eigen::MatrixXd f = feature_matrix(trace, cfg.feature_mode);
    const Eigen::Index t_eff = f.cols();
    const Eigen::MatrixXd y = targets.bottomRows(t_eff).transpose();  // L x T

    Eigen::MatrixXd gram = f * f.transpose();
    gram.diagonal().array() += cfg.lambda;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double d_max = d.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(d_max > 0.0) ||
        d.cwiseAbs().minCoeff() <= 1e-13 * d_max) {
        if (cfg.lambda == 0.0) {
            throw task_error("train_readout: singular normal matrix; set lambda > 0");
        }
        throw task_error("train_readout: normal matrix factorization failed");
    }
    return ldlt.solve(f * y.transpose()).transpose();
}

double nrmse(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target) {
    if (y.rows() != target.rows() || y.cols() != target.cols()) {
        throw config_error("nrmse: shape mismatch");
    }
    const Eigen::Index t_len = y.rows();
    if (t_len < 1) throw config_error("nrmse: empty input");

    double acc = 0.0;
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const double mean = target.col(c).mean();
        const double var = (target.col(c).array() - mean).square().mean();
        if (!(var > 0.0)) throw task_error("nrmse: zero-variance target channel");
        const double mse = (y.col(c) - target.col(c)).squaredNorm() / static_cast<double>(t_len);
        acc += std::sqrt(mse / var);
    }
    return acc / static_cast<double>(y.cols());
}

namespace {

double seq_norm(const std::vector<double>& a, const std::vector<double>& b, SrrNorm norm) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += norm == SrrNorm::l2 ? diff * diff : std::abs(diff);
    }
    return norm == SrrNorm::l2 ? std::sqrt(acc) : acc;
}

}  // namespace

double srr(const std::vector<double>& y, const std::vector<double>& d,
           const std::vector<double>& u, SrrNorm norm) {
    if (y.size() != d.size() || u.size() != d.size()) throw config_error("srr: length mismatch");
    if (y.empty()) throw config_error("srr: empty window");
    const double den = seq_norm(u, d, norm);
    if (!(den > 0.0)) {
        throw task_error("srr: channel output identical to clean symbols, SRR undefined");
    }
    return 1.0 - seq_norm(y, d, norm) / den;
}

double bit_error_rate(const std::vector<double>& y, const std::vector<double>& d) {
    if (y.size() != d.size()) throw config_error("bit_error_rate: length mismatch");
    if (y.empty()) throw config_error("bit_error_rate: empty window");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if ((y[i] >= 0.0) != (d[i] >= 0.0)) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(y.size());
}

}  // namespace magres::training
