#include <doctest.h>

#include <cmath>
#include <vector>

#include "magres/device.hpp"
#include "magres/errors.hpp"

using namespace magres;
using namespace magres::device;

TEST_CASE("retention time follows the Arrhenius law") {
    MagnetParams m;
    m.energy_barrier = 0.0;
    m.attempt_time = 1e-9;
    CHECK(retention_time(m) == doctest::Approx(1e-9).epsilon(1e-12));

    // U = 40 kT, tau0 = 1 ns: the >= 40 kT memory regime, years of retention
    m.energy_barrier = 40.0;
    CHECK(retention_time(m) == doctest::Approx(235385266.83702).epsilon(1e-12));

    m.energy_barrier = 1.0;
    m.attempt_time = 0.1e-9;
    CHECK(retention_time(m) == doctest::Approx(2.718281828459045e-10).epsilon(1e-12));
}

TEST_CASE("retention time is increasing in the barrier, linear in attempt time") {
    MagnetParams m;
    double prev = 0.0;
    for (int i = 0; i < 60; ++i) {
        m.energy_barrier = 0.7 * i;
        m.attempt_time = 1e-9;
        const double tau = retention_time(m);
        CHECK(tau > prev);
        prev = tau;

        m.attempt_time = 3.5e-9;
        CHECK(retention_time(m) == doctest::Approx(3.5 * tau).epsilon(1e-12));
    }
}

TEST_CASE("energy barrier from material constants") {
    CHECK(energy_barrier_from_material(8e5, 8e4, 0.0) == 0.0);

    // hand computation: mu0*Ms*Hk*Omega/(2 kB T), disc of radius 50 nm, 2 nm thick
    const double vol = 1.5707963267948964e-23;
    CHECK(energy_barrier_from_material(8e5, 8e4, vol, 300.0) ==
          doctest::Approx(152.50187452174518).epsilon(1e-12));

    // linear in volume
    const double u1 = energy_barrier_from_material(6e5, 5e4, 1e-24);
    const double u2 = energy_barrier_from_material(6e5, 5e4, 2e-24);
    CHECK(u2 == doctest::Approx(2.0 * u1).epsilon(1e-12));

    CHECK_THROWS_AS(energy_barrier_from_material(-1.0, 8e4, 1e-24), config_error);
    CHECK_THROWS_AS(energy_barrier_from_material(8e5, 8e4, -1e-24), config_error);
}

TEST_CASE("magnet params validate material consistency") {
    MagnetParams m;
    m.saturation_magnetization = 8e5;
    m.anisotropy_field = 8e4;
    m.volume = 1.5707963267948964e-23;
    m.energy_barrier = 152.50187452174518;
    CHECK_NOTHROW(m.validate());

    m.energy_barrier = 150.0;  // off by ~2%
    CHECK_THROWS_AS(m.validate(), config_error);

    m.volume.reset();  // partial material data is not checked
    CHECK_NOTHROW(m.validate());

    MagnetParams bad;
    bad.attempt_time = 0.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("noiseless ASN reproduces the tanh transfer exactly") {
    NeuronParams p;
    p.alpha0 = 0.0;
    RngState rng(1);
    CHECK(asn_output(0.0, p, rng) == 0.0);
    for (double v = -0.2; v <= 0.2; v += 0.013) {
        CHECK(asn_output(v, p, rng) == 0.5 * p.v_dd * std::tanh(p.beta * v));
    }
    // deep saturation pins at the +0.4 V rail for V_DD = 0.8 V
    CHECK(asn_output(100.0 / p.beta, p, rng) == doctest::Approx(0.4).epsilon(1e-12));
    p.alpha0 = 0.05;
    p.noise_envelope = NoiseEnvelope::saturating;
    CHECK(asn_output(100.0 / p.beta, p, rng) == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("ASN sample mean matches the Monte-Carlo expectation at zero input") {
    NeuronParams p;
    p.alpha0 = 0.05;
    RngState rng(7);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += asn_output(0.0, p, rng);
    // 3 sigma of the sample mean: 3 * alpha0 / sqrt(n)
    CHECK(std::abs(sum / n) < 3.0 * 0.05 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("every ASN and BSN sample stays inside the rails") {
    NeuronParams p;
    p.alpha0 = 0.3;  // large noise to provoke clamping
    p.noise_envelope = NoiseEnvelope::constant;
    RngState rng(2);
    for (int i = 0; i < 20000; ++i) {
        const double v = rng.uniform(-0.5, 0.5);
        const double a = asn_output(v, p, rng);
        CHECK(a >= -0.4);
        CHECK(a <= 0.4);
        const double b = bsn_output(v, p, rng);
        CHECK((b == 0.4 || b == -0.4));
    }
}

TEST_CASE("BSN obeys the tanh probability law") {
    NeuronParams p;
    RngState rng(11);
    const int n = 100000;

    // beta*v grid -2..2, 99% binomial interval around (1+tanh)/2
    for (const double bv : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double prob = 0.5 * (1.0 + std::tanh(bv));
        int plus = 0;
        for (int i = 0; i < n; ++i) {
            if (bsn_output(bv / p.beta, p, rng) > 0.0) ++plus;
        }
        const double freq = static_cast<double>(plus) / n;
        const double half_width = 2.5758293035489004 * std::sqrt(prob * (1.0 - prob) / n);
        CHECK(std::abs(freq - prob) < half_width);
    }

    // closed-form check point: beta*v = 1
    CHECK(0.5 * (1.0 + std::tanh(1.0)) == doctest::Approx(0.8807970779778824).epsilon(1e-15));

    // tanh saturation: no positive rail in 1e5 draws at beta*v = -50
    int plus = 0;
    for (int i = 0; i < n; ++i) {
        if (bsn_output(-50.0 / p.beta, p, rng) > 0.0) ++plus;
    }
    CHECK(plus == 0);
}

TEST_CASE("device sampling is deterministic per seed") {
    NeuronParams p;
    RngState a(9);
    RngState b(9);
    for (int i = 0; i < 200; ++i) {
        const double v = 0.01 * (i - 100);
        CHECK(asn_output(v, p, a) == asn_output(v, p, b));
        CHECK(bsn_output(v, p, a) == bsn_output(v, p, b));
    }
}

TEST_CASE("correlated noise has the configured lag-1 autocorrelation") {
    NeuronParams p;
    p.alpha0 = 0.05;
    p.noise_envelope = NoiseEnvelope::constant;
    p.noise_process = NoiseProcess::correlated;
    p.correlation_time = 5.0;
    AsnUnit unit(p);
    RngState rng(13);

    const int n = 200000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = unit.sample(0.0, rng);
    double c0 = 0.0;
    double c1 = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        c0 += xs[i] * xs[i];
        c1 += xs[i] * xs[i + 1];
    }
    const double rho = std::exp(-1.0 / p.correlation_time);
    CHECK(std::abs(c1 / c0 - rho) < 0.02);
    // stationary variance alpha0^2
    CHECK(c0 / (n - 1) == doctest::Approx(p.alpha0 * p.alpha0).epsilon(0.05));
}

TEST_CASE("characterize_transfer sweeps the curve") {
    NeuronParams p;
    p.alpha0 = 0.0;
    RngState rng(1);

    SUBCASE("noiseless mean equals the closed form and is odd-symmetric") {
        const auto table = characterize_transfer(p, -0.15, 0.15, 31, 3, rng);
        REQUIRE(table.size() == 31);
        for (const auto& row : table) {
            const double expected = 0.5 * p.v_dd * std::tanh(p.beta * row.v_in);
            CHECK(row.min == expected);  // each noiseless sample is exact
            CHECK(row.max == expected);
            CHECK(row.mean == doctest::Approx(expected).epsilon(1e-14));
        }
        for (std::size_t i = 0; i < table.size(); ++i) {
            CHECK(table[i].mean == doctest::Approx(-table[table.size() - 1 - i].mean).epsilon(1e-12));
        }
        // monotone non-decreasing mean
        for (std::size_t i = 0; i + 1 < table.size(); ++i) CHECK(table[i].mean <= table[i + 1].mean);
    }

    SUBCASE("noisy mean stays within Monte-Carlo tolerance") {
        p.alpha0 = 0.05;
        const int samples = 10000;
        const auto table = characterize_transfer(p, -0.15, 0.15, 21, samples, rng);
        for (const auto& row : table) {
            const double expected = 0.5 * p.v_dd * std::tanh(p.beta * row.v_in);
            const double alpha = noise_envelope_at(row.v_in, p);
            CHECK(std::abs(row.mean - expected) <= 4.0 * alpha / std::sqrt(samples) + 1e-12);
            CHECK(row.min >= -0.4);
            CHECK(row.max <= 0.4);
        }
    }

    SUBCASE("invalid sweeps are rejected") {
        CHECK_THROWS_AS(characterize_transfer(p, 0.2, -0.2, 11, 10, rng), config_error);
        CHECK_THROWS_AS(characterize_transfer(p, -0.2, 0.2, 1, 10, rng), config_error);
        CHECK_THROWS_AS(characterize_transfer(p, -0.2, 0.2, 11, 0, rng), config_error);
    }
}

TEST_CASE("neuron params are validated") {
    NeuronParams p;
    p.v_dd = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p = NeuronParams{};
    p.beta = -1.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p = NeuronParams{};
    p.alpha0 = -0.1;
    CHECK_THROWS_AS(p.validate(), config_error);
    p = NeuronParams{};
    p.noise_process = NoiseProcess::correlated;
    p.correlation_time = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
}
