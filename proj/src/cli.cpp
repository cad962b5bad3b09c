#include "magres/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "magres/config.hpp"
#include "magres/device.hpp"
#include "magres/errors.hpp"
#include "magres/io.hpp"
#include "magres/tasks.hpp"
#include "magres/version.hpp"

namespace magres::cli {

namespace {

using nlohmann::ordered_json;

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const task_error& e) {
        std::cerr << "task error: " << e.what() << '\n';
        return kExitTask;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTask;
    }
}

std::uint64_t resolve_seed(const config::RunConfig& cfg, const Options& opt) {
    if (opt.seed) return *opt.seed;
    if (cfg.has_seed) return cfg.spec.seed;
    if (const char* env = std::getenv("MAGRES_SEED")) {
        double parsed = -1.0;
        try {
            parsed = io::parse_double(env);
        } catch (const config_error&) {
        }
        if (parsed < 0.0 || parsed != std::floor(parsed)) {
            throw config_error(std::string("MAGRES_SEED is not a valid seed: '") + env + "'");
        }
        return static_cast<std::uint64_t>(parsed);
    }
    return 1;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

void write_manifest(const std::string& dir, std::uint64_t spec_hash, std::uint64_t seed,
                    double wall_s, const std::vector<std::string>& outputs) {
    ordered_json j;
    j["spec_hash"] = hex16(spec_hash);
    j["toolkit_version"] = kVersion;
    j["seed"] = seed;
    j["wall_time_s"] = wall_s;
    j["outputs"] = outputs;
    io::write_file(dir + "/manifest.json", j.dump(2) + "\n");
}

class WallTimer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double quantile(std::vector<double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - std::floor(pos);
    return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

int mg_report_horizon(const tasks::MgReport& report) {
    int horizon = 0;
    for (const auto& [h, v] : report.nrmse_by_horizon) {
        (void)v;
        horizon = std::max(horizon, h);
    }
    return horizon;
}

}  // namespace

int cmd_characterize(const std::string& config_path, const Options& opt) {
    return guarded([&] {
        const WallTimer timer;
        config::RunConfig cfg = config::to_run_config(config::parse_file(config_path));
        if (!cfg.has_device) {
            throw config_error("characterize needs [device] (and optionally [characterize]) sections");
        }
        const std::uint64_t seed = resolve_seed(cfg, opt);
        cfg.spec.seed = seed;

        RngState rng = RngState(seed).substream(tasks::streams::characterize);
        const auto table = device::characterize_transfer(cfg.neuron, cfg.sweep_v_min, cfg.sweep_v_max,
                                                         cfg.sweep_points, cfg.sweep_samples, rng);

        std::ostringstream csv;
        csv << "v_in,mean,min,max\n";
        for (const auto& row : table) {
            csv << io::fmt_g9(row.v_in) << ',' << io::fmt_g9(row.mean) << ',' << io::fmt_g9(row.min)
                << ',' << io::fmt_g9(row.max) << '\n';
        }
        io::write_file(opt.out_dir + "/transfer.csv", csv.str());
        write_manifest(opt.out_dir, config::config_hash(cfg), seed, timer.seconds(),
                       {"transfer.csv"});
        return kExitOk;
    });
}

namespace {

ordered_json run_one_block(const tasks::ExperimentSpec& spec, std::string* trace_csv,
                           std::string* readout_text) {
    ordered_json block;
    block["n_nodes"] = spec.reservoir.n_nodes;
    block["seed"] = spec.seed;
    Eigen::MatrixXd w_out;
    if (spec.task == tasks::TaskKind::mackey_glass) {
        const tasks::MgReport report = tasks::run_mg_experiment(spec);
        ordered_json nrmse;
        for (const auto& [h, v] : report.nrmse_by_horizon) nrmse[std::to_string(h)] = v;
        block["nrmse"] = nrmse;
        w_out = report.w_out;
        if (trace_csv != nullptr) {
            std::ostringstream os;
            os << "t,true,generated\n";
            for (std::size_t t = 0; t < report.truth.size(); ++t) {
                os << t << ',' << io::fmt_g9(report.truth[t]) << ','
                   << io::fmt_g9(report.generated[t]) << '\n';
            }
            *trace_csv = os.str();
        }
    } else {
        const tasks::EqReport report = tasks::run_equalization_experiment(spec);
        block["srr"] = report.srr;
        block["ber"] = report.ber;
        w_out = report.w_out;
        if (trace_csv != nullptr) {
            std::ostringstream os;
            os << "t,d,u,y\n";
            for (std::size_t t = 0; t < report.d.size(); ++t) {
                os << t << ',' << io::fmt_g9(report.d[t]) << ',' << io::fmt_g9(report.u[t]) << ','
                   << io::fmt_g9(report.y[t]) << '\n';
            }
            *trace_csv = os.str();
        }
    }
    if (readout_text != nullptr) {
        std::ostringstream os;
        io::write_matrix_text(w_out, os);
        *readout_text = os.str();
    }
    return block;
}

}  // namespace

int cmd_run(const std::string& config_path, const Options& opt) {
    return guarded([&] {
        const WallTimer timer;
        config::RunConfig cfg = config::to_run_config(config::parse_file(config_path));
        if (!cfg.has_experiment) throw config_error("run needs an [experiment] section");
        const std::uint64_t seed = resolve_seed(cfg, opt);
        cfg.spec.seed = seed;
        cfg.spec.out_dir = opt.out_dir;

        std::vector<std::string> outputs;
        ordered_json report;
        report["task"] =
            cfg.spec.task == tasks::TaskKind::mackey_glass ? "mackey_glass" : "equalization";
        report["toolkit_version"] = kVersion;
        report["seed"] = seed;
        report["results"] = ordered_json::array();

        for (const int n : cfg.n_ladder) {
            tasks::ExperimentSpec spec = cfg.spec;
            spec.reservoir.n_nodes = n;
            std::string trace_csv;
            std::string readout_text;
            report["results"].push_back(run_one_block(spec, &trace_csv, &readout_text));

            const std::string prefix =
                spec.task == tasks::TaskKind::mackey_glass ? "mg_trace_n" : "eq_trace_n";
            const std::string trace_name = prefix + std::to_string(n) + ".csv";
            io::write_file(opt.out_dir + "/" + trace_name, trace_csv);
            outputs.push_back(trace_name);

            const std::string readout_name = "readout_n" + std::to_string(n) + ".txt";
            io::write_file(opt.out_dir + "/" + readout_name, readout_text);
            outputs.push_back(readout_name);
        }

        if (opt.format == "json") {
            io::write_file(opt.out_dir + "/report.json", report.dump(2) + "\n");
            outputs.insert(outputs.begin(), "report.json");
        } else {
            std::ostringstream os;
            os << "n_nodes,seed,metric,value\n";
            for (const auto& block : report["results"]) {
                const auto n = block["n_nodes"].get<int>();
                if (block.contains("nrmse")) {
                    for (const auto& [h, v] : block["nrmse"].items()) {
                        os << n << ',' << seed << ",nrmse_h" << h << ','
                           << io::fmt_g9(v.get<double>()) << '\n';
                    }
                } else {
                    os << n << ',' << seed << ",srr," << io::fmt_g9(block["srr"].get<double>())
                       << '\n';
                    os << n << ',' << seed << ",ber," << io::fmt_g9(block["ber"].get<double>())
                       << '\n';
                }
            }
            io::write_file(opt.out_dir + "/metrics.csv", os.str());
            outputs.insert(outputs.begin(), "metrics.csv");
        }

        write_manifest(opt.out_dir, config::config_hash(cfg), seed, timer.seconds(), outputs);
        return kExitOk;
    });
}

namespace {

void apply_sweep_param(config::RunConfig& cfg, const std::string& name, double v) {
    auto as_positive_int = [&](const char* what) {
        if (v < 1 || v != std::floor(v)) {
            throw config_error(std::string("sweep: ") + what + " needs a positive integer value");
        }
        return static_cast<int>(v);
    };
    auto& r = cfg.spec.reservoir;
    if (name == "n_nodes") {
        r.n_nodes = as_positive_int("n_nodes");
        cfg.n_ladder = {r.n_nodes};
    } else if (name == "spectral_radius") r.spectral_radius = v;
    else if (name == "connectivity") r.connectivity = v;
    else if (name == "input_scale") r.input_scale = v;
    else if (name == "feedback_scale") r.feedback_scale = v;
    else if (name == "leak") r.leak = v;
    else if (name == "gain") r.gain = v;
    else if (name == "noise_amp") r.noise_amp = v;
    else if (name == "washout") r.washout = as_positive_int("washout");
    else if (name == "lambda") cfg.spec.ridge.lambda = v;
    else if (name == "train_len") cfg.spec.train_len = as_positive_int("train_len");
    else if (name == "test_len") cfg.spec.test_len = as_positive_int("test_len");
    else if (name == "delay") {
        if (v < 0 || v != std::floor(v)) {
            throw config_error("sweep: delay needs a non-negative integer value");
        }
        cfg.spec.equalizer_delay = static_cast<int>(v);
    } else if (name == "channel.noise_amp") cfg.spec.channel.noise_amp = v;
    else throw config_error("sweep: unknown parameter '" + name + "'");
}

struct SweepJob {
    double value = 0.0;
    std::uint64_t seed = 0;
};

}  // namespace

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<double>& values, const Options& opt) {
    return guarded([&] {
        const WallTimer timer;
        const config::RunConfig base = config::to_run_config(config::parse_file(config_path));
        if (!base.has_experiment) throw config_error("sweep needs an [experiment] section");
        if (values.empty()) throw config_error("sweep: no values given");
        if (opt.sweep_seeds < 1) throw config_error("sweep: --seeds must be >= 1");
        const std::uint64_t base_seed = resolve_seed(base, opt);

        {
            // reject unknown parameters before spawning any work
            config::RunConfig probe = base;
            apply_sweep_param(probe, param, values.front());
        }

        std::vector<SweepJob> jobs;
        for (const double v : values) {
            for (int s = 0; s < opt.sweep_seeds; ++s) {
                jobs.push_back({v, base_seed + static_cast<std::uint64_t>(s)});
            }
        }

        const std::string metric_name =
            base.spec.task == tasks::TaskKind::mackey_glass ? "nrmse" : "srr";
        std::vector<double> metric(jobs.size(), 0.0);
        std::vector<int> horizon(jobs.size(), 0);
        std::vector<std::exception_ptr> errors(jobs.size());
        std::atomic<std::size_t> next{0};

        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                try {
                    config::RunConfig cfg = base;
                    apply_sweep_param(cfg, param, jobs[i].value);
                    tasks::ExperimentSpec spec = cfg.spec;
                    spec.seed = jobs[i].seed;
                    spec.reservoir.n_nodes = cfg.n_ladder.front();
                    if (spec.task == tasks::TaskKind::mackey_glass) {
                        const tasks::MgReport report = tasks::run_mg_experiment(spec);
                        horizon[i] = mg_report_horizon(report);
                        metric[i] = report.nrmse_by_horizon.at(horizon[i]);
                    } else {
                        metric[i] = tasks::run_equalization_experiment(spec).srr;
                    }
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };

        const int n_threads =
            std::max(1, std::min<int>(opt.jobs, static_cast<int>(jobs.size())));
        std::vector<std::thread> pool;
        for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }

        std::string full_metric_name = metric_name;
        if (base.spec.task == tasks::TaskKind::mackey_glass) {
            full_metric_name += "_h" + std::to_string(horizon.front());
        }

        std::ostringstream os;
        os << "value,metric,median,iqr\n";
        for (std::size_t vi = 0; vi < values.size(); ++vi) {
            std::vector<double> group;
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                if (jobs[i].value == values[vi]) group.push_back(metric[i]);
            }
            std::sort(group.begin(), group.end());
            os << io::fmt_g9(values[vi]) << ',' << full_metric_name << ','
               << io::fmt_g9(quantile(group, 0.5)) << ','
               << io::fmt_g9(quantile(group, 0.75) - quantile(group, 0.25)) << '\n';
        }
        io::write_file(opt.out_dir + "/sweep.csv", os.str());

        config::RunConfig manifest_cfg = base;
        manifest_cfg.spec.seed = base_seed;
        write_manifest(opt.out_dir, config::config_hash(manifest_cfg), base_seed, timer.seconds(),
                       {"sweep.csv"});
        return kExitOk;
    });
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"stochastic-magnet reservoir computing toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string param;
    std::vector<double> values;
    std::uint64_t seed_value = 0;
    Options opt;

    auto* run = app.add_subcommand("run", "run the configured experiment");
    auto* chz = app.add_subcommand("characterize", "sweep the ASN transfer curve");
    auto* swp = app.add_subcommand("sweep", "sweep a numeric parameter over seeds");
    for (CLI::App* sub : {run, chz, swp}) {
        sub->add_option("--config", config_path, "config file path")->required();
        sub->add_option("--seed", seed_value, "seed override (env MAGRES_SEED is the fallback)");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--jobs", opt.jobs, "max parallel jobs")->check(CLI::PositiveNumber);
        sub->add_option("--format", opt.format, "metrics format")
            ->check(CLI::IsMember({"json", "csv"}));
    }
    swp->add_option("--param", param, "parameter name to sweep")->required();
    swp->add_option("--values", values, "comma-separated numeric values")
        ->required()
        ->delimiter(',');
    swp->add_option("--seeds", opt.sweep_seeds, "seeds per sweep point")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    for (CLI::App* sub : {run, chz, swp}) {
        if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed_value;
    }
    if (run->parsed()) return cmd_run(config_path, opt);
    if (chz->parsed()) return cmd_characterize(config_path, opt);
    return cmd_sweep(config_path, param, values, opt);
}

}  // namespace magres::cli
