#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "magres/reservoir.hpp"
#include "magres/rng.hpp"
#include "magres/training.hpp"

namespace magres::tasks {

/// Mackey-Glass generator constants. The delayed value is retrieved by
/// linear interpolation, so tau need not be a multiple of dt (tau >= dt
/// is required so the delayed argument never runs ahead of the solution).
struct MGParams {
    double beta = 0.2;
    double gamma = 0.1;
    double exponent = 10.0;  // n
    double tau = 17.0;       // delay, time units
    double dt = 0.1;         // integration step
    double x0 = 1.2;         // constant initial history

    void validate() const;
};

/// Integrate dx/dt = beta*x(t-tau)/(1 + x(t-tau)^n) - gamma*x with
/// fourth-order Runge-Kutta. Returns `steps` samples x(0), x(dt), ...,
/// starting from the constant history x0.
std::vector<double> mackey_glass(const MGParams& p, int steps);

/// Nonlinear distortion channel: s(t) = sum_k B_k d(t-k) (zero-padded),
/// u(t) = sum_n A_n s(t)^n + C * rnd(-1, 1).
struct ChannelParams {
    std::vector<double> fir_taps = {1.0, 0.25, -0.1};        // B_k
    std::vector<double> poly_coeffs = {0.0, 1.0, 0.2, -0.1}; // A_n, index = power
    double noise_amp = 0.1;                                  // C
    std::uint64_t seed = 0;  // 0 = derive from the experiment seed

    void validate() const;
};

/// i.i.d. symbols from the zero-mean PAM alphabet scaled to [-1, 1];
/// levels = 2 gives antipodal +-1.
std::vector<double> gen_symbols(int n, int levels, RngState& rng);

std::vector<double> channel_apply(const std::vector<double>& d, const ChannelParams& p,
                                  RngState& rng);

enum class TaskKind { mackey_glass, equalization };

/// Full, seedable description of one experiment. All randomness flows from
/// `seed`, expanded into fixed per-component substreams.
struct ExperimentSpec {
    TaskKind task = TaskKind::equalization;
    reservoir::ReservoirConfig reservoir;
    training::RidgeConfig ridge;
    MGParams mg;
    ChannelParams channel;
    int equalizer_delay = 2;  // readout target is d(t - delay)
    int symbol_levels = 2;
    int train_len = 3000;
    int test_len = 1000;
    std::uint64_t seed = 1;
    std::string out_dir;

    void validate() const;
};

/// Baseline experiment for a task: reservoir operating point and target
/// delay tuned per task by the shipped calibration sweeps. Equalization
/// wants fast state turnover (leak 1) and a sharp input drive; the
/// generative task wants a slow convex blend with a radius slightly
/// above one.
ExperimentSpec default_spec(TaskKind task);

struct MgReport {
    std::uint64_t seed = 0;
    int n_nodes = 0;
    std::map<int, double> nrmse_by_horizon;
    std::vector<double> truth;      // test window, generator units
    std::vector<double> generated;  // free-run output, generator units
    Eigen::MatrixXd w_out;          // trained readout
};

/// Teacher-forced training on the Mackey-Glass series followed by a
/// closed-loop free run of test_len steps; NRMSE reported per horizon.
MgReport run_mg_experiment(const ExperimentSpec& spec);

struct EqReport {
    std::uint64_t seed = 0;
    int n_nodes = 0;
    double srr = 0.0;
    double ber = 0.0;
    std::vector<double> d;  // clean symbols, test window
    std::vector<double> u;  // channel output aligned to d
    std::vector<double> y;  // equalizer output aligned to d
    Eigen::MatrixXd w_out;  // trained readout
};

/// Drive the reservoir with the distorted stream, train the readout
/// against the delay-shifted clean symbols, evaluate SRR and bit error
/// rate on the held-out window.
EqReport run_equalization_experiment(const ExperimentSpec& spec);

/// Substream ids used to expand an experiment seed. Fixed contract so that
/// one integer reproduces an entire experiment.
namespace streams {
inline constexpr std::uint64_t topology = 1;
inline constexpr std::uint64_t teacher_noise = 2;
inline constexpr std::uint64_t free_noise = 3;
inline constexpr std::uint64_t symbols = 4;
inline constexpr std::uint64_t channel = 5;
inline constexpr std::uint64_t characterize = 6;
}  // namespace streams

}  // namespace magres::tasks
