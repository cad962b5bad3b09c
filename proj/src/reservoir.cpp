#include "magres/reservoir.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "magres/errors.hpp"
#include "magres/io.hpp"

namespace magres::reservoir {

void ReservoirConfig::validate() const {
    if (n_nodes < 1) throw config_error("ReservoirConfig: n_nodes must be >= 1");
    if (n_inputs < 0) throw config_error("ReservoirConfig: n_inputs must be >= 0");
    if (n_outputs < 0) throw config_error("ReservoirConfig: n_outputs must be >= 0");
    if (!(leak > 0.0 && leak <= 1.0)) throw config_error("ReservoirConfig: leak must be in (0, 1]");
    if (!(gain > 0.0)) throw config_error("ReservoirConfig: gain must be > 0");
    if (!(spectral_radius > 0.0)) throw config_error("ReservoirConfig: spectral_radius must be > 0");
    if (!(connectivity > 0.0 && connectivity <= 1.0)) {
        throw config_error("ReservoirConfig: connectivity must be in (0, 1]");
    }
    if (!(noise_amp >= 0.0)) throw config_error("ReservoirConfig: noise_amp must be >= 0");
    if (washout < 0) throw config_error("ReservoirConfig: washout must be >= 0");
}

SpectralEstimate estimate_spectral_radius(const Eigen::MatrixXd& w, double tol, int max_iter) {
    if (w.rows() != w.cols()) throw config_error("spectral_radius: matrix must be square");
    if (!w.allFinite()) throw config_error("spectral_radius: non-finite entries");
    const Eigen::Index n = w.rows();
    if (n == 0) return {0.0, true, 0};

    // Restarted Arnoldi iteration. A plain power step stalls on clustered or
    // complex-pair dominant moduli; projecting onto a Krylov basis and taking
    // the largest Ritz value converges on those too. The iteration budget
    // counts matrix-vector products. Two safeguards beyond the usual Ritz
    // residual: the restart vector keeps the whole near-top cluster (a
    // single-vector restart can purge the true dominant direction and then
    // certify the runner-up), and acceptance waits until the certified value
    // has been stable for two consecutive cycles.
    const Eigen::Index m = std::min<Eigen::Index>(n, 24);

    // Deterministic pseudo-random start avoids accidental orthogonality to
    // the dominant eigenvector of structured matrices.
    RngState rng(0x5EEDBEEF12345678ull);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
    v.normalize();

    const double scale = w.cwiseAbs().maxCoeff();
    if (scale == 0.0) return {0.0, true, 0};

    double best = 0.0;
    double certified = -1.0;
    int certified_streak = 0;
    int matvecs = 0;
    while (matvecs < max_iter) {
        Eigen::MatrixXd basis(n, m + 1);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
        basis.col(0) = v;
        Eigen::Index k = 0;
        bool invariant = false;
        for (; k < m && matvecs < max_iter; ++k) {
            Eigen::VectorXd cand = w * basis.col(k);
            ++matvecs;
            for (Eigen::Index j = 0; j <= k; ++j) {  // modified Gram-Schmidt, one re-pass
                hess(j, k) = basis.col(j).dot(cand);
                cand -= hess(j, k) * basis.col(j);
            }
            for (Eigen::Index j = 0; j <= k; ++j) {
                const double corr = basis.col(j).dot(cand);
                hess(j, k) += corr;
                cand -= corr * basis.col(j);
            }
            hess(k + 1, k) = cand.norm();
            if (hess(k + 1, k) <= 1e-14 * scale) {
                invariant = true;  // invariant subspace reached: Ritz values are exact
                ++k;
                break;
            }
            basis.col(k + 1) = cand / hess(k + 1, k);
        }
        if (k == 0) break;

        const Eigen::MatrixXd h_small = hess.topLeftCorner(k, k);
        const Eigen::EigenSolver<Eigen::MatrixXd> es(h_small, /*computeEigenvectors=*/true);
        Eigen::Index top = 0;
        es.eigenvalues().cwiseAbs().maxCoeff(&top);
        const double candidate = std::abs(es.eigenvalues()(top));
        best = std::max(best, candidate);

        if (invariant) return {candidate, true, matvecs};

        const double residual = hess(k, k - 1) * std::abs(es.eigenvectors()(k - 1, top));
        if (residual <= tol * std::max(candidate, tol * scale)) {
            if (candidate <= certified * (1.0 + tol) && ++certified_streak >= 2) {
                return {std::max(candidate, certified), true, matvecs};
            }
            certified = std::max(certified, candidate);
        } else {
            certified_streak = 0;
        }

        // Restart from the real span of every Ritz direction whose modulus
        // is within 2% of the top, so a clustered dominant pair survives.
        Eigen::VectorXd restart = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < k; ++i) {
            if (std::abs(es.eigenvalues()(i)) >= 0.98 * candidate) {
                const Eigen::VectorXcd dir = es.eigenvectors().col(i);
                restart += basis.leftCols(k) * (dir.real() + dir.imag());
            }
        }
        double rnorm = restart.norm();
        if (rnorm <= 1e-12) {  // cancellation: fall back to the top direction
            const Eigen::VectorXcd dir = es.eigenvectors().col(top);
            restart = basis.leftCols(k) * (dir.real() + dir.imag());
            rnorm = restart.norm();
            if (rnorm <= 1e-300) break;
        }
        v = restart / rnorm;
    }
    // budget exhausted before the certified value stabilized
    return {best, false, matvecs};
}

double spectral_radius(const Eigen::MatrixXd& w) {
    return estimate_spectral_radius(w).value;
}

void scale_to_spectral_radius(Eigen::MatrixXd& w, double target) {
    if (!(target > 0.0)) throw config_error("scale_to_spectral_radius: target must be > 0");
    const SpectralEstimate est = estimate_spectral_radius(w);
    if (!(est.value > 1e-12)) {
        throw task_error("scale_to_spectral_radius: matrix has numerically zero spectral radius");
    }
    w *= target / est.value;
}

namespace {

Eigen::MatrixXd draw_uniform(Eigen::Index rows, Eigen::Index cols, RngState& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
    }
    return m;
}

}  // namespace

ReservoirTopology init_topology(const ReservoirConfig& cfg) {
    cfg.validate();
    RngState root(cfg.seed);
    const int n = cfg.n_nodes;

    ReservoirTopology topo;
    RngState rng_in = root.substream(1);
    topo.w_in = draw_uniform(n, cfg.n_inputs, rng_in) * cfg.input_scale;
    RngState rng_fb = root.substream(3);
    topo.w_fb = draw_uniform(n, cfg.n_outputs, rng_fb) * cfg.feedback_scale;

    for (int attempt = 0; attempt < 8; ++attempt) {
        RngState rng_self = root.substream(2 + 16 * static_cast<std::uint64_t>(attempt));
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                if (rng_self.uniform01() < cfg.connectivity) w(r, c) = rng_self.uniform(-1.0, 1.0);
            }
        }
        // generous budget: the achieved radius must track the target to 1e-6
        const SpectralEstimate est = estimate_spectral_radius(w, 1e-10, 100000);
        if (est.value > 1e-12) {
            w *= cfg.spectral_radius / est.value;
            topo.w_self = std::move(w);
            topo.achieved_radius = estimate_spectral_radius(topo.w_self, 1e-10, 100000).value;
            return topo;
        }
    }
    throw config_error("init_topology: sparse draw collapsed to zero spectral radius 8 times");
}

Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& y_prev, const ReservoirTopology& topo,
                     const ReservoirConfig& cfg, RngState& rng) {
    if (x.size() != topo.w_self.rows()) throw config_error("step: state dimension mismatch");
    if (u.size() != topo.w_in.cols()) throw config_error("step: input dimension mismatch");
    if (y_prev.size() != topo.w_fb.cols()) throw config_error("step: feedback dimension mismatch");

    Eigen::VectorXd z = topo.w_self * x + topo.w_in * u + topo.w_fb * y_prev;
    Eigen::VectorXd xn = cfg.gain * z.array().tanh().matrix() + (1.0 - cfg.leak) * x;
    if (cfg.noise_amp > 0.0) {
        for (Eigen::Index i = 0; i < xn.size(); ++i) xn(i) -= cfg.noise_amp * rng.gaussian();
    }
    return xn.cwiseMax(-1.0).cwiseMin(1.0);
}

StateTrace run_teacher_forced(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                              const ReservoirTopology& topo, const ReservoirConfig& cfg,
                              RngState& rng) {
    cfg.validate();
    const Eigen::Index t_total = targets.rows();
    if (inputs.rows() != t_total) {
        throw config_error("run_teacher_forced: inputs/targets row mismatch");
    }
    if (t_total <= cfg.washout) {
        throw config_error("run_teacher_forced: sequence must be longer than washout");
    }
    if (inputs.cols() != topo.w_in.cols()) {
        throw config_error("run_teacher_forced: input width does not match topology");
    }
    if (targets.cols() != topo.w_fb.cols()) {
        throw config_error("run_teacher_forced: target width does not match topology");
    }

    const Eigen::Index n = topo.w_self.rows();
    StateTrace trace;
    trace.states.resize(t_total, n);
    trace.inputs = inputs;
    trace.outputs = targets;
    trace.washout = cfg.washout;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y_prev = Eigen::VectorXd::Zero(targets.cols());
    for (Eigen::Index t = 0; t < t_total; ++t) {
        x = step(x, inputs.row(t).transpose(), y_prev, topo, cfg, rng);
        trace.states.row(t) = x.transpose();
        y_prev = targets.row(t).transpose();
    }
    return trace;
}

StateTrace run_free(const Eigen::VectorXd& x0, const Eigen::MatrixXd& w_out, FeatureMode mode,
                    int steps, const ReservoirTopology& topo, const ReservoirConfig& cfg,
                    RngState& rng, const std::optional<Eigen::MatrixXd>& external_inputs) {
    cfg.validate();
    if (steps < 1) throw config_error("run_free: steps must be >= 1");
    const Eigen::Index n = topo.w_self.rows();
    const Eigen::Index k = topo.w_in.cols();
    if (x0.size() != n) throw config_error("run_free: x0 dimension mismatch");
    if (external_inputs) {
        if (external_inputs->rows() < steps) throw config_error("run_free: external input too short");
        if (external_inputs->cols() != k) throw config_error("run_free: external input width mismatch");
    }
    if (w_out.cols() != feature_dim(n, k, mode)) {
        throw config_error("run_free: w_out does not match the feature convention");
    }
    const Eigen::Index n_out = w_out.rows();
    if (topo.w_fb.cols() != n_out) throw config_error("run_free: readout/feedback width mismatch");

    StateTrace trace;
    trace.states.resize(steps, n);
    trace.inputs.resize(steps, k);
    trace.outputs.resize(steps, n_out);
    trace.washout = 0;

    Eigen::VectorXd x = x0;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd y_prev = w_out * feature_vector(x, u, mode);
    for (int t = 0; t < steps; ++t) {
        if (external_inputs) u = external_inputs->row(t).transpose();
        x = step(x, u, y_prev, topo, cfg, rng);
        const Eigen::VectorXd y = w_out * feature_vector(x, u, mode);
        trace.states.row(t) = x.transpose();
        trace.inputs.row(t) = u.transpose();
        trace.outputs.row(t) = y.transpose();
        y_prev = y;
    }
    return trace;
}

void write_trace_csv(const StateTrace& trace, std::ostream& os) {
    os << 't';
    for (Eigen::Index i = 0; i < trace.states.cols(); ++i) os << ",x_" << i;
    for (Eigen::Index i = 0; i < trace.inputs.cols(); ++i) os << ",u_" << i;
    for (Eigen::Index i = 0; i < trace.outputs.cols(); ++i) os << ",y_" << i;
    os << '\n';
    for (Eigen::Index t = 0; t < trace.states.rows(); ++t) {
        os << t;
        for (Eigen::Index i = 0; i < trace.states.cols(); ++i)
            os << ',' << io::fmt_g9(trace.states(t, i));
        for (Eigen::Index i = 0; i < trace.inputs.cols(); ++i)
            os << ',' << io::fmt_g9(trace.inputs(t, i));
        for (Eigen::Index i = 0; i < trace.outputs.cols(); ++i)
            os << ',' << io::fmt_g9(trace.outputs(t, i));
        os << '\n';
    }
}

void write_topology_text(const ReservoirTopology& topo, std::ostream& os) {
    os << "w_in\n";
    io::write_matrix_text(topo.w_in, os);
    os << "w_self\n";
    io::write_matrix_text(topo.w_self, os);
    os << "w_fb\n";
    io::write_matrix_text(topo.w_fb, os);
    os << "achieved_radius " << io::fmt_exact(topo.achieved_radius) << '\n';
}

ReservoirTopology read_topology_text(std::istream& is) {
    auto expect = [&is](const char* tag) {
        std::string word;
        if (!(is >> word) || word != tag) throw io_error(std::string("topology text: expected ") + tag);
    };
    ReservoirTopology topo;
    expect("w_in");
    topo.w_in = io::read_matrix_text(is);
    expect("w_self");
    topo.w_self = io::read_matrix_text(is);
    expect("w_fb");
    topo.w_fb = io::read_matrix_text(is);
    expect("achieved_radius");
    std::string value;
    if (!(is >> value)) throw io_error("topology text: missing achieved_radius");
    topo.achieved_radius = io::parse_double(value);
    return topo;
}

}  // namespace magres::reservoir
