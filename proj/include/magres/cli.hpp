#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace magres::cli {

/// Exit code contract shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitTask = 4;

struct Options {
    std::optional<std::uint64_t> seed;  // --seed, overrides config; MAGRES_SEED is the fallback
    std::string out_dir = ".";
    int jobs = 1;
    std::string format = "json";  // json | csv metrics emission
    int sweep_seeds = 10;         // seeds per sweep point, seed_i = base + i
};

/// Run the ASN transfer sweep from a [device]/[characterize] config and
/// write transfer.csv plus a manifest.
int cmd_characterize(const std::string& config_path, const Options& opt);

/// Run the configured experiment (one result block per n_nodes ladder
/// entry); writes the metrics report, trace CSVs and a manifest.
int cmd_run(const std::string& config_path, const Options& opt);

/// Run one experiment per (value, seed) pair for a numeric parameter and
/// write the aggregate CSV (value, metric, median, IQR).
int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const Options& opt);

/// Full argv entry point used by the magres binary.
int dispatch(int argc, const char* const* argv);

}  // namespace magres::cli
