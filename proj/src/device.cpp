#include "magres/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "magres/errors.hpp"

namespace magres::device {

void MagnetParams::validate() const {
    if (!(energy_barrier >= 0.0)) throw config_error("MagnetParams: energy_barrier must be >= 0");
    if (!(attempt_time > 0.0)) throw config_error("MagnetParams: attempt_time must be > 0");
    if (!(temperature > 0.0)) throw config_error("MagnetParams: temperature must be > 0");
    if (saturation_magnetization && anisotropy_field && volume) {
        const double derived = energy_barrier_from_material(*saturation_magnetization,
                                                            *anisotropy_field, *volume, temperature);
        const double scale = std::max(std::abs(derived), std::abs(energy_barrier));
        if (scale > 0.0 && std::abs(derived - energy_barrier) > 1e-9 * scale) {
            throw config_error("MagnetParams: energy_barrier inconsistent with material constants");
        }
    }
}

void NeuronParams::validate() const {
    if (!(v_dd > 0.0)) throw config_error("NeuronParams: v_dd must be > 0");
    if (!(beta > 0.0)) throw config_error("NeuronParams: beta must be > 0");
    if (!(alpha0 >= 0.0)) throw config_error("NeuronParams: alpha0 must be >= 0");
    if (noise_process == NoiseProcess::correlated && !(correlation_time > 0.0)) {
        throw config_error("NeuronParams: correlation_time must be > 0 in correlated mode");
    }
}

double retention_time(const MagnetParams& m) {
    m.validate();
    return m.attempt_time * std::exp(m.energy_barrier);
}

double energy_barrier_from_material(double m_s, double h_k, double volume, double temperature) {
    if (!(m_s > 0.0) || !(h_k > 0.0) || !(temperature > 0.0) || volume < 0.0) {
        throw config_error("energy_barrier_from_material: inputs must be positive (volume >= 0)");
    }
    return 0.5 * mu_zero * m_s * h_k * volume / (k_boltzmann * temperature);
}

double noise_envelope_at(double v_in, const NeuronParams& p) {
    if (p.noise_envelope == NoiseEnvelope::constant) return p.alpha0;
    const double t = std::tanh(p.beta * v_in);
    return p.alpha0 * (1.0 - t * t);
}

namespace {

double clamp_to_rails(double v, double v_dd) {
    return std::clamp(v, -0.5 * v_dd, 0.5 * v_dd);
}

}  // namespace

double asn_output(double v_in, const NeuronParams& p, RngState& rng) {
    const double mean = 0.5 * p.v_dd * std::tanh(p.beta * v_in);
    const double alpha = noise_envelope_at(v_in, p);
    const double out = alpha > 0.0 ? mean + alpha * rng.gaussian() : mean;
    return clamp_to_rails(out, p.v_dd);
}

double bsn_output(double v_in, const NeuronParams& p, RngState& rng) {
    const double p_plus = 0.5 * (1.0 + std::tanh(p.beta * v_in));
    return rng.uniform01() < p_plus ? 0.5 * p.v_dd : -0.5 * p.v_dd;
}

AsnUnit::AsnUnit(NeuronParams p) : params_(p) {
    params_.validate();
}

double AsnUnit::sample(double v_in, RngState& rng) {
    const double alpha = noise_envelope_at(v_in, params_);
    double r = 0.0;
    if (alpha > 0.0) {
        r = rng.gaussian();
        if (params_.noise_process == NoiseProcess::correlated) {
            const double rho = std::exp(-1.0 / params_.correlation_time);
            if (primed_) r = rho * carry_ + std::sqrt(1.0 - rho * rho) * r;
            carry_ = r;
            primed_ = true;
        }
    }
    const double mean = 0.5 * params_.v_dd * std::tanh(params_.beta * v_in);
    return clamp_to_rails(mean + alpha * r, params_.v_dd);
}

std::vector<TransferPoint> characterize_transfer(const NeuronParams& p, double v_min, double v_max,
                                                 int n_points, int samples_per_point,
                                                 RngState& rng) {
    p.validate();
    if (!(v_min < v_max)) throw config_error("characterize_transfer: v_min must be < v_max");
    if (n_points < 2) throw config_error("characterize_transfer: n_points must be >= 2");
    if (samples_per_point < 1) throw config_error("characterize_transfer: samples_per_point must be >= 1");

    AsnUnit unit(p);
    std::vector<TransferPoint> table;
    table.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double v = v_min + (v_max - v_min) * static_cast<double>(i) / (n_points - 1);
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples_per_point; ++s) {
            const double out = unit.sample(v, rng);
            sum += out;
            lo = std::min(lo, out);
            hi = std::max(hi, out);
        }
        table.push_back({v, sum / samples_per_point, lo, hi});
    }
    return table;
}

}  // namespace magres::device
