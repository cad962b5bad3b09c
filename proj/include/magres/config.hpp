#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "magres/device.hpp"
#include "magres/tasks.hpp"

namespace magres::config {

/// One parsed config value: number, quoted string, boolean or numeric array.
struct Value {
    enum class Kind { number, string, boolean, array };
    Kind kind = Kind::number;
    double num = 0.0;
    std::string str;
    bool flag = false;
    std::vector<double> arr;
};

using Section = std::vector<std::pair<std::string, Value>>;

/// Raw section/key/value view of a config file, order-preserving.
struct ParsedConfig {
    std::vector<std::pair<std::string, Section>> sections;

    const Value* find(const std::string& section, const std::string& key) const;
};

ParsedConfig parse_string(const std::string& text);
ParsedConfig parse_file(const std::string& path);

/// Typed experiment description assembled from a config file. n_ladder holds
/// one n_nodes entry per requested network size (usually a single value).
struct RunConfig {
    tasks::ExperimentSpec spec;
    std::vector<int> n_ladder = {100};
    bool has_experiment = false;
    bool has_seed = false;

    device::NeuronParams neuron;
    bool has_device = false;
    double sweep_v_min = -0.15;
    double sweep_v_max = 0.15;
    int sweep_points = 41;
    int sweep_samples = 10000;
};

/// Validate sections/keys and build the typed config; unknown keys are
/// rejected. Throws config_error.
RunConfig to_run_config(const ParsedConfig& parsed);

/// Canonical text form: fixed section and key order, every effective field
/// explicit, exact round-trip number formatting. parse -> canonical is
/// idempotent: canonical(parse(canonical(parse(t)))) == canonical(parse(t)).
std::string canonical_text(const RunConfig& cfg);

/// FNV-1a hash of the canonical text; changes iff an effective field changes.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace magres::config
