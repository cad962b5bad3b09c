#include "magres/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "magres/errors.hpp"
#include "magres/io.hpp"

namespace magres::config {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

// Strip a trailing comment, honoring quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_quotes = !in_quotes;
        if (line[i] == '#' && !in_quotes) return line.substr(0, i);
    }
    return line;
}

Value parse_value(const std::string& raw, int line_no) {
    Value v;
    if (raw.empty()) throw config_error("config line " + std::to_string(line_no) + ": empty value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') {
            throw config_error("config line " + std::to_string(line_no) + ": unterminated string");
        }
        v.kind = Value::Kind::string;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = Value::Kind::boolean;
        v.flag = raw == "true";
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') {
            throw config_error("config line " + std::to_string(line_no) + ": unterminated array");
        }
        v.kind = Value::Kind::array;
        const std::string body = trim(raw.substr(1, raw.size() - 2));
        if (!body.empty()) {
            std::size_t pos = 0;
            while (pos <= body.size()) {
                const std::size_t comma = body.find(',', pos);
                const std::string item =
                    trim(body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
                if (item.empty()) {
                    throw config_error("config line " + std::to_string(line_no) + ": empty array item");
                }
                v.arr.push_back(io::parse_double(item));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        return v;
    }
    v.kind = Value::Kind::number;
    v.num = io::parse_double(raw);
    return v;
}

}  // namespace

const Value* ParsedConfig::find(const std::string& section, const std::string& key) const {
    for (const auto& [name, entries] : sections) {
        if (name != section) continue;
        for (const auto& [k, v] : entries) {
            if (k == key) return &v;
        }
    }
    return nullptr;
}

ParsedConfig parse_string(const std::string& text) {
    ParsedConfig cfg;
    Section* current = nullptr;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw config_error("config line " + std::to_string(line_no) + ": bad section header");
            }
            const std::string name = trim(body.substr(1, body.size() - 2));
            if (name.empty()) {
                throw config_error("config line " + std::to_string(line_no) + ": empty section name");
            }
            cfg.sections.emplace_back(name, Section{});
            current = &cfg.sections.back().second;
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        if (current == nullptr) {
            throw config_error("config line " + std::to_string(line_no) + ": key outside any section");
        }
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw config_error("config line " + std::to_string(line_no) + ": empty key");
        current->emplace_back(key, parse_value(trim(body.substr(eq + 1)), line_no));
    }
    return cfg;
}

ParsedConfig parse_file(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const io_error& e) {
        // unreadable config is a config error for exit-code purposes
        throw config_error(e.what());
    }
    return parse_string(text);
}

namespace {

double get_num(const Value& v, const std::string& where) {
    if (v.kind != Value::Kind::number) throw config_error(where + ": expected a number");
    return v.num;
}

int get_int(const Value& v, const std::string& where) {
    const double d = get_num(v, where);
    if (d != std::floor(d)) throw config_error(where + ": expected an integer");
    return static_cast<int>(d);
}

std::uint64_t get_u64(const Value& v, const std::string& where) {
    const double d = get_num(v, where);
    if (d < 0 || d != std::floor(d)) throw config_error(where + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(d);
}

std::string get_str(const Value& v, const std::string& where) {
    if (v.kind != Value::Kind::string) throw config_error(where + ": expected a quoted string");
    return v.str;
}

std::vector<double> get_arr(const Value& v, const std::string& where) {
    if (v.kind == Value::Kind::array) return v.arr;
    if (v.kind == Value::Kind::number) return {v.num};
    throw config_error(where + ": expected an array");
}

void check_keys(const std::string& section, const Section& entries,
                const std::set<std::string>& known) {
    std::set<std::string> seen;
    for (const auto& [key, value] : entries) {
        (void)value;
        if (!known.contains(key)) {
            throw config_error("config: unknown key '" + key + "' in section [" + section + "]");
        }
        if (!seen.insert(key).second) {
            throw config_error("config: duplicate key '" + key + "' in section [" + section + "]");
        }
    }
}

}  // namespace

RunConfig to_run_config(const ParsedConfig& parsed) {
    RunConfig out;

    // Start from the per-task baseline so configs only state what differs.
    if (const Value* task = parsed.find("experiment", "task")) {
        if (task->kind == Value::Kind::string) {
            if (task->str == "mackey_glass") {
                out.spec = tasks::default_spec(tasks::TaskKind::mackey_glass);
            } else if (task->str == "equalization") {
                out.spec = tasks::default_spec(tasks::TaskKind::equalization);
            }
        }
        out.n_ladder = {out.spec.reservoir.n_nodes};
    }

    static const std::set<std::string> known_sections = {
        "experiment", "reservoir", "ridge",         "mackey_glass",
        "channel",    "equalization", "device",     "characterize"};
    for (const auto& [name, entries] : parsed.sections) {
        (void)entries;
        if (!known_sections.contains(name)) {
            throw config_error("config: unknown section [" + name + "]");
        }
    }

    bool saw_task = false;
    for (const auto& [name, entries] : parsed.sections) {
        if (name == "experiment") {
            out.has_experiment = true;
            check_keys(name, entries, {"task", "train_len", "test_len", "seed"});
            for (const auto& [key, v] : entries) {
                if (key == "task") {
                    saw_task = true;
                    const std::string task = get_str(v, "experiment.task");
                    if (task == "mackey_glass") out.spec.task = tasks::TaskKind::mackey_glass;
                    else if (task == "equalization") out.spec.task = tasks::TaskKind::equalization;
                    else throw config_error("experiment.task must be mackey_glass or equalization");
                } else if (key == "train_len") {
                    out.spec.train_len = get_int(v, "experiment.train_len");
                } else if (key == "test_len") {
                    out.spec.test_len = get_int(v, "experiment.test_len");
                } else if (key == "seed") {
                    out.spec.seed = get_u64(v, "experiment.seed");
                    out.has_seed = true;
                }
            }
        } else if (name == "reservoir") {
            check_keys(name, entries,
                       {"n_nodes", "spectral_radius", "connectivity", "input_scale",
                        "feedback_scale", "leak", "gain", "noise_amp", "washout"});
            auto& r = out.spec.reservoir;
            for (const auto& [key, v] : entries) {
                if (key == "n_nodes") {
                    out.n_ladder.clear();
                    for (const double n : get_arr(v, "reservoir.n_nodes")) {
                        if (n < 1 || n != std::floor(n)) {
                            throw config_error("reservoir.n_nodes entries must be positive integers");
                        }
                        out.n_ladder.push_back(static_cast<int>(n));
                    }
                    if (out.n_ladder.empty()) throw config_error("reservoir.n_nodes is empty");
                    r.n_nodes = out.n_ladder.front();
                } else if (key == "spectral_radius") r.spectral_radius = get_num(v, key);
                else if (key == "connectivity") r.connectivity = get_num(v, key);
                else if (key == "input_scale") r.input_scale = get_num(v, key);
                else if (key == "feedback_scale") r.feedback_scale = get_num(v, key);
                else if (key == "leak") r.leak = get_num(v, key);
                else if (key == "gain") r.gain = get_num(v, key);
                else if (key == "noise_amp") r.noise_amp = get_num(v, key);
                else if (key == "washout") r.washout = get_int(v, key);
            }
        } else if (name == "ridge") {
            check_keys(name, entries, {"lambda", "feature_mode"});
            for (const auto& [key, v] : entries) {
                if (key == "lambda") out.spec.ridge.lambda = get_num(v, "ridge.lambda");
                else {
                    const std::string mode = get_str(v, "ridge.feature_mode");
                    if (mode == "state_only") out.spec.ridge.feature_mode = FeatureMode::state_only;
                    else if (mode == "bias_input_state")
                        out.spec.ridge.feature_mode = FeatureMode::bias_input_state;
                    else throw config_error("ridge.feature_mode must be state_only or bias_input_state");
                }
            }
        } else if (name == "mackey_glass") {
            check_keys(name, entries, {"beta", "gamma", "n", "tau", "dt", "x0"});
            auto& mg = out.spec.mg;
            for (const auto& [key, v] : entries) {
                if (key == "beta") mg.beta = get_num(v, key);
                else if (key == "gamma") mg.gamma = get_num(v, key);
                else if (key == "n") mg.exponent = get_num(v, key);
                else if (key == "tau") mg.tau = get_num(v, key);
                else if (key == "dt") mg.dt = get_num(v, key);
                else if (key == "x0") mg.x0 = get_num(v, key);
            }
        } else if (name == "channel") {
            check_keys(name, entries, {"fir_taps", "poly_coeffs", "noise_amp", "seed"});
            auto& ch = out.spec.channel;
            for (const auto& [key, v] : entries) {
                if (key == "fir_taps") ch.fir_taps = get_arr(v, "channel.fir_taps");
                else if (key == "poly_coeffs") ch.poly_coeffs = get_arr(v, "channel.poly_coeffs");
                else if (key == "noise_amp") ch.noise_amp = get_num(v, "channel.noise_amp");
                else if (key == "seed") ch.seed = get_u64(v, "channel.seed");
            }
        } else if (name == "equalization") {
            check_keys(name, entries, {"delay", "symbol_levels"});
            for (const auto& [key, v] : entries) {
                if (key == "delay") out.spec.equalizer_delay = get_int(v, "equalization.delay");
                else out.spec.symbol_levels = get_int(v, "equalization.symbol_levels");
            }
        } else if (name == "device") {
            out.has_device = true;
            check_keys(name, entries,
                       {"v_dd", "beta", "alpha0", "noise_envelope", "noise_process",
                        "correlation_time"});
            auto& d = out.neuron;
            for (const auto& [key, v] : entries) {
                if (key == "v_dd") d.v_dd = get_num(v, key);
                else if (key == "beta") d.beta = get_num(v, key);
                else if (key == "alpha0") d.alpha0 = get_num(v, key);
                else if (key == "correlation_time") d.correlation_time = get_num(v, key);
                else if (key == "noise_envelope") {
                    const std::string env = get_str(v, "device.noise_envelope");
                    if (env == "constant") d.noise_envelope = device::NoiseEnvelope::constant;
                    else if (env == "saturating") d.noise_envelope = device::NoiseEnvelope::saturating;
                    else throw config_error("device.noise_envelope must be constant or saturating");
                } else {
                    const std::string proc = get_str(v, "device.noise_process");
                    if (proc == "white") d.noise_process = device::NoiseProcess::white;
                    else if (proc == "correlated") d.noise_process = device::NoiseProcess::correlated;
                    else throw config_error("device.noise_process must be white or correlated");
                }
            }
        } else if (name == "characterize") {
            check_keys(name, entries, {"v_min", "v_max", "n_points", "samples_per_point"});
            for (const auto& [key, v] : entries) {
                if (key == "v_min") out.sweep_v_min = get_num(v, key);
                else if (key == "v_max") out.sweep_v_max = get_num(v, key);
                else if (key == "n_points") out.sweep_points = get_int(v, key);
                else out.sweep_samples = get_int(v, key);
            }
        }
    }
    if (out.has_experiment && !saw_task) {
        throw config_error("config: [experiment] requires a task key");
    }
    return out;
}

namespace {

std::string fmt_arr(const std::vector<double>& arr) {
    std::string s = "[";
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i > 0) s += ", ";
        s += io::fmt_exact(arr[i]);
    }
    return s + "]";
}

}  // namespace

std::string canonical_text(const RunConfig& cfg) {
    std::ostringstream os;
    if (cfg.has_experiment) {
        const auto& s = cfg.spec;
        os << "[experiment]\n";
        os << "task = \"" << (s.task == tasks::TaskKind::mackey_glass ? "mackey_glass" : "equalization")
           << "\"\n";
        os << "train_len = " << s.train_len << '\n';
        os << "test_len = " << s.test_len << '\n';
        os << "seed = " << s.seed << '\n';

        const auto& r = s.reservoir;
        os << "\n[reservoir]\n";
        if (cfg.n_ladder.size() == 1) {
            os << "n_nodes = " << cfg.n_ladder.front() << '\n';
        } else {
            os << "n_nodes = [";
            for (std::size_t i = 0; i < cfg.n_ladder.size(); ++i) {
                if (i > 0) os << ", ";
                os << cfg.n_ladder[i];
            }
            os << "]\n";
        }
        os << "spectral_radius = " << io::fmt_exact(r.spectral_radius) << '\n';
        os << "connectivity = " << io::fmt_exact(r.connectivity) << '\n';
        os << "input_scale = " << io::fmt_exact(r.input_scale) << '\n';
        os << "feedback_scale = " << io::fmt_exact(r.feedback_scale) << '\n';
        os << "leak = " << io::fmt_exact(r.leak) << '\n';
        os << "gain = " << io::fmt_exact(r.gain) << '\n';
        os << "noise_amp = " << io::fmt_exact(r.noise_amp) << '\n';
        os << "washout = " << r.washout << '\n';

        os << "\n[ridge]\n";
        os << "lambda = " << io::fmt_exact(s.ridge.lambda) << '\n';
        os << "feature_mode = \""
           << (s.ridge.feature_mode == FeatureMode::state_only ? "state_only" : "bias_input_state")
           << "\"\n";

        if (s.task == tasks::TaskKind::mackey_glass) {
            os << "\n[mackey_glass]\n";
            os << "beta = " << io::fmt_exact(s.mg.beta) << '\n';
            os << "gamma = " << io::fmt_exact(s.mg.gamma) << '\n';
            os << "n = " << io::fmt_exact(s.mg.exponent) << '\n';
            os << "tau = " << io::fmt_exact(s.mg.tau) << '\n';
            os << "dt = " << io::fmt_exact(s.mg.dt) << '\n';
            os << "x0 = " << io::fmt_exact(s.mg.x0) << '\n';
        } else {
            os << "\n[channel]\n";
            os << "fir_taps = " << fmt_arr(s.channel.fir_taps) << '\n';
            os << "poly_coeffs = " << fmt_arr(s.channel.poly_coeffs) << '\n';
            os << "noise_amp = " << io::fmt_exact(s.channel.noise_amp) << '\n';
            os << "seed = " << s.channel.seed << '\n';
            os << "\n[equalization]\n";
            os << "delay = " << s.equalizer_delay << '\n';
            os << "symbol_levels = " << s.symbol_levels << '\n';
        }
    }
    if (cfg.has_device) {
        const auto& d = cfg.neuron;
        os << (cfg.has_experiment ? "\n" : "") << "[device]\n";
        os << "v_dd = " << io::fmt_exact(d.v_dd) << '\n';
        os << "beta = " << io::fmt_exact(d.beta) << '\n';
        os << "alpha0 = " << io::fmt_exact(d.alpha0) << '\n';
        os << "noise_envelope = \""
           << (d.noise_envelope == device::NoiseEnvelope::constant ? "constant" : "saturating")
           << "\"\n";
        os << "noise_process = \""
           << (d.noise_process == device::NoiseProcess::white ? "white" : "correlated") << "\"\n";
        os << "correlation_time = " << io::fmt_exact(d.correlation_time) << '\n';
        os << "\n[characterize]\n";
        os << "v_min = " << io::fmt_exact(cfg.sweep_v_min) << '\n';
        os << "v_max = " << io::fmt_exact(cfg.sweep_v_max) << '\n';
        os << "n_points = " << cfg.sweep_points << '\n';
        os << "samples_per_point = " << cfg.sweep_samples << '\n';
    }
    return os.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    return io::fnv1a64(canonical_text(cfg));
}

}  // namespace magres::config
