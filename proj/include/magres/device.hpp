#pragma once

#include <optional>
#include <vector>

#include "magres/rng.hpp"

namespace magres::device {

inline constexpr double k_boltzmann = 1.380649e-23;            // J/K
inline constexpr double mu_zero = 4.0e-7 * 3.14159265358979323846;  // T*m/A
inline constexpr double default_temperature = 300.0;           // K

enum class NoiseEnvelope { constant, saturating };
enum class NoiseProcess { white, correlated };

/// Free-layer magnet constants. The barrier is stored in kT units. The
/// material fields are optional; when all three are present they must be
/// consistent with the stored barrier at the stored temperature.
struct MagnetParams {
    double energy_barrier = 40.0;  // kT units
    double attempt_time = 1e-9;    // s
    std::optional<double> saturation_magnetization;  // A/m
    std::optional<double> anisotropy_field;          // A/m
    std::optional<double> volume;                    // m^3
    double temperature = default_temperature;        // K

    void validate() const;
};

/// Behavioral constants of one stochastic neuron (ASN or BSN).
struct NeuronParams {
    double v_dd = 0.8;     // V, supply span V+ - V-
    double beta = 20.0;    // 1/V, transfer gain
    double alpha0 = 0.05;  // V, peak noise amplitude
    NoiseEnvelope noise_envelope = NoiseEnvelope::saturating;
    NoiseProcess noise_process = NoiseProcess::white;
    double correlation_time = 1.0;  // normalized time units, correlated mode only

    void validate() const;
};

/// Arrhenius state retention time tau0 * exp(U), U in kT units.
double retention_time(const MagnetParams& m);

/// Barrier in kT units from material constants: mu0*Ms*Hk*volume / (2*kB*T).
double energy_barrier_from_material(double m_s, double h_k, double volume,
                                    double temperature = default_temperature);

/// Noise amplitude at a given input under the configured envelope.
double noise_envelope_at(double v_in, const NeuronParams& p);

/// One analog stochastic neuron sample: clamp of the noisy tanh response.
/// A correlated noise process observed at a single instant has the same
/// stationary unit-variance marginal as white noise, so an isolated call
/// draws one gaussian in either mode; use AsnUnit for sequential sampling.
double asn_output(double v_in, const NeuronParams& p, RngState& rng);

/// One binary stochastic neuron sample: +v_dd/2 with probability
/// (1 + tanh(beta*v_in))/2, else -v_dd/2.
double bsn_output(double v_in, const NeuronParams& p, RngState& rng);

/// ASN with sequential noise state. In correlated mode successive samples
/// follow a unit-variance AR(1) process with the configured correlation
/// time; in white mode this matches asn_output draw for draw.
class AsnUnit {
public:
    explicit AsnUnit(NeuronParams p);

    double sample(double v_in, RngState& rng);
    const NeuronParams& params() const { return params_; }

private:
    NeuronParams params_;
    double carry_ = 0.0;
    bool primed_ = false;
};

struct TransferPoint {
    double v_in;
    double mean;
    double min;
    double max;
};

/// Monte-Carlo sweep of the ASN transfer: per-point mean and envelope over
/// samples_per_point draws at n_points inputs spaced evenly on [v_min, v_max].
std::vector<TransferPoint> characterize_transfer(const NeuronParams& p, double v_min, double v_max,
                                                 int n_points, int samples_per_point,
                                                 RngState& rng);

}  // namespace magres::device
