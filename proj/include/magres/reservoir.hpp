#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "magres/features.hpp"
#include "magres/rng.hpp"

namespace magres::reservoir {

/// Fully seedable description of one reservoir instance.
struct ReservoirConfig {
    int n_nodes = 100;   // N
    int n_inputs = 0;    // K
    int n_outputs = 1;   // L
    double spectral_radius = 0.9;  // target for w_self
    double input_scale = 1.0;
    double feedback_scale = 1.0;
    double connectivity = 0.1;  // fraction of nonzeros in w_self
    double leak = 0.3;          // eta'
    double gain = 1.0;          // kappa'
    double noise_amp = 1e-4;    // per-node state noise amplitude
    int washout = 100;          // leading steps excluded from training
    std::uint64_t seed = 1;

    void validate() const;
};

struct ReservoirTopology {
    Eigen::MatrixXd w_in;    // N x K, scaled by input_scale
    Eigen::MatrixXd w_self;  // N x N, scaled to the target spectral radius
    Eigen::MatrixXd w_fb;    // N x L, scaled by feedback_scale
    double achieved_radius = 0.0;
};

/// Time-indexed record of a run. The first `washout` rows are flagged for
/// exclusion from readout training. Post-update states always lie in [-1, 1].
/// Rows are spaced by one normalized time unit (the magnet time-scale).
struct StateTrace {
    Eigen::MatrixXd states;   // T x N
    Eigen::MatrixXd inputs;   // T x K
    Eigen::MatrixXd outputs;  // T x L (teacher signal or generated outputs)
    int washout = 0;
    double time_step = 1.0;
};

struct SpectralEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Largest eigenvalue modulus by power iteration with a two-term Krylov fit,
/// which also resolves complex-conjugate dominant pairs. Deterministic.
SpectralEstimate estimate_spectral_radius(const Eigen::MatrixXd& w, double tol = 1e-8,
                                          int max_iter = 1000);

/// Convenience wrapper returning the estimate value.
double spectral_radius(const Eigen::MatrixXd& w);

/// Rescale a square matrix so its spectral radius equals `target`.
/// Throws task_error when the matrix radius is numerically zero.
void scale_to_spectral_radius(Eigen::MatrixXd& w, double target);

/// Draw w_in/w_self/w_fb from uniform(-1,1), sparsify w_self to the
/// configured connectivity and rescale it to the target spectral radius.
/// Deterministic given cfg.seed; a pathological all-zero sparse draw is
/// retried on the next substream, up to 8 attempts.
ReservoirTopology init_topology(const ReservoirConfig& cfg);

/// One discrete-time update:
///   z  = w_in*u + w_fb*y_prev + w_self*x
///   x' = gain * tanh(z) + (1 - leak) * x - noise_amp * g,   g ~ N(0, I)
/// clamped elementwise to [-1, 1].
Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& y_prev, const ReservoirTopology& topo,
                     const ReservoirConfig& cfg, RngState& rng);

/// Drive the reservoir with the teacher signal on the feedback path:
/// y_prev at step t is targets row t-1 (zeros at t = 0). Returns the full
/// trace with outputs = targets and washout copied from cfg.
StateTrace run_teacher_forced(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                              const ReservoirTopology& topo, const ReservoirConfig& cfg,
                              RngState& rng);

/// Closed-loop generation: each step feeds y = w_out * features(x, u) into
/// the feedback path of the next step. The initial y_prev is the readout
/// applied to x0 with a zero input vector. When external_inputs is absent
/// the input vector is zero-dimensional.
StateTrace run_free(const Eigen::VectorXd& x0, const Eigen::MatrixXd& w_out, FeatureMode mode,
                    int steps, const ReservoirTopology& topo, const ReservoirConfig& cfg,
                    RngState& rng,
                    const std::optional<Eigen::MatrixXd>& external_inputs = std::nullopt);

/// CSV serialization of a trace: header t,x_0..x_{N-1},u_0..,y_0.. .
void write_trace_csv(const StateTrace& trace, std::ostream& os);

/// Text serialization of a topology (matrix text blocks prefixed by name).
void write_topology_text(const ReservoirTopology& topo, std::ostream& os);
ReservoirTopology read_topology_text(std::istream& is);

}  // namespace magres::reservoir
