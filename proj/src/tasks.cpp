#include "magres/tasks.hpp"

#include <algorithm>
#include <cmath>

#include "magres/errors.hpp"

namespace magres::tasks {

void MGParams::validate() const {
    if (!(tau > 0.0)) throw config_error("MGParams: tau must be > 0");
    if (!(dt > 0.0)) throw config_error("MGParams: dt must be > 0");
    if (tau < dt) throw config_error("MGParams: tau must be >= dt");
    if (!std::isfinite(x0)) throw config_error("MGParams: x0 must be finite");
    if (!(exponent >= 0.0)) throw config_error("MGParams: exponent must be >= 0");
}

namespace {

double mg_rhs(double x, double x_delayed, const MGParams& p) {
    return p.beta * x_delayed / (1.0 + std::pow(x_delayed, p.exponent)) - p.gamma * x;
}

}  // namespace

std::vector<double> mackey_glass(const MGParams& p, int steps) {
    p.validate();
    if (steps < 1) throw config_error("mackey_glass: steps must be >= 1");

    std::vector<double> xs(static_cast<std::size_t>(steps));
    xs[0] = p.x0;
    const double delay_steps = p.tau / p.dt;

    // x at fractional grid position s; s <= 0 is the constant pre-history.
    auto delayed = [&xs, &p](double s) {
        if (s <= 0.0) return p.x0;
        const double fi = std::floor(s);
        const auto i = static_cast<std::size_t>(fi);
        const double frac = s - fi;
        if (frac == 0.0) return xs[i];
        return (1.0 - frac) * xs[i] + frac * xs[i + 1];
    };

    for (int k = 0; k + 1 < steps; ++k) {
        const double x = xs[static_cast<std::size_t>(k)];
        const double d0 = delayed(k - delay_steps);
        const double dh = delayed(k + 0.5 - delay_steps);
        const double d1 = delayed(k + 1.0 - delay_steps);
        const double k1 = mg_rhs(x, d0, p);
        const double k2 = mg_rhs(x + 0.5 * p.dt * k1, dh, p);
        const double k3 = mg_rhs(x + 0.5 * p.dt * k2, dh, p);
        const double k4 = mg_rhs(x + p.dt * k3, d1, p);
        const double x_next = x + p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x_next)) throw task_error("mackey_glass: trajectory blew up");
        xs[static_cast<std::size_t>(k) + 1] = x_next;
    }
    return xs;
}

void ChannelParams::validate() const {
    const auto nonzero = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
    };
    if (fir_taps.empty() || !nonzero(fir_taps)) {
        throw config_error("ChannelParams: at least one nonzero FIR tap required");
    }
    if (poly_coeffs.empty() || !nonzero(poly_coeffs)) {
        throw config_error("ChannelParams: at least one nonzero polynomial coefficient required");
    }
    if (!(noise_amp >= 0.0)) throw config_error("ChannelParams: noise_amp must be >= 0");
}

std::vector<double> gen_symbols(int n, int levels, RngState& rng) {
    if (n < 0) throw config_error("gen_symbols: n must be >= 0");
    if (levels < 2) throw config_error("gen_symbols: levels must be >= 2");
    std::vector<double> d(static_cast<std::size_t>(n));
    for (auto& v : d) {
        const auto idx = rng.below(static_cast<std::uint64_t>(levels));
        v = -1.0 + 2.0 * static_cast<double>(idx) / (levels - 1);
    }
    return d;
}

std::vector<double> channel_apply(const std::vector<double>& d, const ChannelParams& p,
                                  RngState& rng) {
    p.validate();
    if (d.size() < p.fir_taps.size()) {
        throw config_error("channel_apply: input shorter than the FIR tap count");
    }
    std::vector<double> u(d.size());
    for (std::size_t t = 0; t < d.size(); ++t) {
        double s = 0.0;
        for (std::size_t k = 0; k < p.fir_taps.size(); ++k) {
            if (t >= k) s += p.fir_taps[k] * d[t - k];  // zero-padded warm-up
        }
        double acc = 0.0;
        double s_pow = 1.0;
        for (const double a : p.poly_coeffs) {
            acc += a * s_pow;
            s_pow *= s;
        }
        if (p.noise_amp > 0.0) acc += p.noise_amp * rng.uniform(-1.0, 1.0);
        u[t] = acc;
    }
    return u;
}

ExperimentSpec default_spec(TaskKind task) {
    ExperimentSpec spec;
    spec.task = task;
    if (task == TaskKind::equalization) {
        spec.reservoir.leak = 1.0;
        spec.reservoir.gain = 1.0;
        spec.reservoir.spectral_radius = 0.3;
        spec.reservoir.connectivity = 0.5;
        spec.reservoir.input_scale = 2.0;
        spec.equalizer_delay = 0;
    } else {
        spec.reservoir.leak = 0.3;
        spec.reservoir.gain = 0.3;
        spec.reservoir.spectral_radius = 1.1;
        spec.reservoir.feedback_scale = 0.5;
    }
    return spec;
}

void ExperimentSpec::validate() const {
    reservoir.validate();
    ridge.validate();
    if (train_len <= reservoir.washout) {
        throw config_error("ExperimentSpec: train_len must exceed the washout");
    }
    if (test_len < 1) throw config_error("ExperimentSpec: test_len must be >= 1");
    if (task == TaskKind::mackey_glass) {
        mg.validate();
    } else {
        channel.validate();
        if (equalizer_delay < 0) throw config_error("ExperimentSpec: equalizer delay must be >= 0");
        if (symbol_levels < 2) throw config_error("ExperimentSpec: symbol_levels must be >= 2");
    }
}

namespace {

// Initial Mackey-Glass transient discarded before any sample is used.
constexpr int kMgDiscardSamples = 500;

struct AffineScale {
    double scale = 1.0;
    double offset = 0.0;
    double apply(double x) const { return scale * x + offset; }
    double invert(double y) const { return (y - offset) / scale; }
};

// Map [lo, hi] onto [-0.9, 0.9] so the series sits inside the tanh range.
AffineScale fit_scale(const std::vector<double>& xs, std::size_t count) {
    double lo = xs[0];
    double hi = xs[0];
    for (std::size_t i = 0; i < count; ++i) {
        lo = std::min(lo, xs[i]);
        hi = std::max(hi, xs[i]);
    }
    if (!(hi > lo)) throw task_error("mackey-glass series is constant; nothing to learn");
    AffineScale s;
    s.scale = 1.8 / (hi - lo);
    s.offset = -0.9 - s.scale * lo;
    return s;
}

}  // namespace

MgReport run_mg_experiment(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.task != TaskKind::mackey_glass) {
        throw config_error("run_mg_experiment: spec does not describe a mackey_glass task");
    }

    // Generate at integration resolution, then sample at 1.0 time units.
    const int stride = std::max(1, static_cast<int>(std::lround(1.0 / spec.mg.dt)));
    const int n_samples = kMgDiscardSamples + spec.train_len + spec.test_len;
    const std::vector<double> dense = mackey_glass(spec.mg, n_samples * stride + 1);
    std::vector<double> series(static_cast<std::size_t>(spec.train_len + spec.test_len));
    for (std::size_t i = 0; i < series.size(); ++i) {
        series[i] = dense[(kMgDiscardSamples + i) * static_cast<std::size_t>(stride)];
    }

    const AffineScale scale = fit_scale(series, static_cast<std::size_t>(spec.train_len));

    reservoir::ReservoirConfig cfg = spec.reservoir;
    cfg.n_inputs = 0;
    cfg.n_outputs = 1;
    cfg.seed = RngState(spec.seed).substream(streams::topology).seed();
    const reservoir::ReservoirTopology topo = reservoir::init_topology(cfg);

    Eigen::MatrixXd targets(spec.train_len, 1);
    for (int t = 0; t < spec.train_len; ++t) targets(t, 0) = scale.apply(series[t]);
    const Eigen::MatrixXd inputs(spec.train_len, 0);

    RngState teacher_rng = RngState(spec.seed).substream(streams::teacher_noise);
    const reservoir::StateTrace trace =
        reservoir::run_teacher_forced(inputs, targets, topo, cfg, teacher_rng);
    const Eigen::MatrixXd w_out = training::train_readout(trace, targets, spec.ridge);

    const Eigen::VectorXd x_last = trace.states.row(spec.train_len - 1).transpose();
    RngState free_rng = RngState(spec.seed).substream(streams::free_noise);
    const reservoir::StateTrace free = reservoir::run_free(
        x_last, w_out, spec.ridge.feature_mode, spec.test_len, topo, cfg, free_rng);

    MgReport report;
    report.seed = spec.seed;
    report.n_nodes = cfg.n_nodes;
    report.w_out = w_out;
    report.truth.resize(static_cast<std::size_t>(spec.test_len));
    report.generated.resize(static_cast<std::size_t>(spec.test_len));
    for (int t = 0; t < spec.test_len; ++t) {
        report.truth[t] = series[static_cast<std::size_t>(spec.train_len + t)];
        report.generated[t] = scale.invert(free.outputs(t, 0));
    }

    for (const int horizon : {50, 84, 100, 200}) {
        if (horizon > spec.test_len) continue;
        Eigen::MatrixXd yh(horizon, 1);
        Eigen::MatrixXd dh(horizon, 1);
        for (int t = 0; t < horizon; ++t) {
            yh(t, 0) = report.generated[t];
            dh(t, 0) = report.truth[t];
        }
        report.nrmse_by_horizon[horizon] = training::nrmse(yh, dh);
    }
    return report;
}

EqReport run_equalization_experiment(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.task != TaskKind::equalization) {
        throw config_error("run_equalization_experiment: spec does not describe an equalization task");
    }
    const int total = spec.train_len + spec.test_len;
    const int delay = spec.equalizer_delay;
    if (spec.train_len <= spec.reservoir.washout + delay) {
        throw config_error("run_equalization_experiment: train_len too short for washout plus delay");
    }

    RngState sym_rng = RngState(spec.seed).substream(streams::symbols);
    const std::vector<double> d = gen_symbols(total, spec.symbol_levels, sym_rng);
    RngState chan_rng(spec.channel.seed != 0
                          ? spec.channel.seed
                          : RngState(spec.seed).substream(streams::channel).seed());
    const std::vector<double> u = channel_apply(d, spec.channel, chan_rng);

    reservoir::ReservoirConfig cfg = spec.reservoir;
    cfg.n_inputs = 1;
    cfg.n_outputs = 1;
    cfg.feedback_scale = 0.0;  // input-driven filtering, no feedback path
    cfg.seed = RngState(spec.seed).substream(streams::topology).seed();
    const reservoir::ReservoirTopology topo = reservoir::init_topology(cfg);

    Eigen::MatrixXd inputs(total, 1);
    Eigen::MatrixXd targets(total, 1);
    for (int t = 0; t < total; ++t) {
        inputs(t, 0) = u[static_cast<std::size_t>(t)];
        targets(t, 0) = t >= delay ? d[static_cast<std::size_t>(t - delay)] : 0.0;
    }

    RngState run_rng = RngState(spec.seed).substream(streams::teacher_noise);
    const reservoir::StateTrace trace =
        reservoir::run_teacher_forced(inputs, targets, topo, cfg, run_rng);

    reservoir::StateTrace train_slice;
    train_slice.states = trace.states.topRows(spec.train_len);
    train_slice.inputs = trace.inputs.topRows(spec.train_len);
    train_slice.outputs = trace.outputs.topRows(spec.train_len);
    train_slice.washout = cfg.washout;
    const Eigen::MatrixXd w_out =
        training::train_readout(train_slice, targets.topRows(spec.train_len), spec.ridge);

    EqReport report;
    report.seed = spec.seed;
    report.n_nodes = cfg.n_nodes;
    report.w_out = w_out;
    report.d.reserve(static_cast<std::size_t>(spec.test_len));
    report.u.reserve(static_cast<std::size_t>(spec.test_len));
    report.y.reserve(static_cast<std::size_t>(spec.test_len));
    for (int t = spec.train_len; t < total; ++t) {
        const Eigen::VectorXd feats = feature_vector(trace.states.row(t).transpose(),
                                                     trace.inputs.row(t).transpose(),
                                                     spec.ridge.feature_mode);
        const int s = t - delay;  // symbol index this step estimates
        report.y.push_back((w_out * feats)(0));
        report.d.push_back(d[static_cast<std::size_t>(s)]);
        report.u.push_back(u[static_cast<std::size_t>(s)]);
    }
    report.srr = training::srr(report.y, report.d, report.u);
    report.ber = training::bit_error_rate(report.y, report.d);
    return report;
}

}  // namespace magres::tasks
