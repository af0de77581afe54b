// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_EXPERIMENTS_HPP
#define MATOPT_EXPERIMENTS_HPP

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "matopt/multi_user.hpp"
#include "matopt/single_user.hpp"

namespace matopt {

// Monte-Carlo sweep: for each (scheme, swept value, trial) run one
// optimization on a seeded random instance and record a CSV row.
// Trials are paired: trial t draws the same channel seed at every
// swept value and for every scheme.

struct SweepSpec {
    std::string mode = "single";      // single | multi
    std::string param;                // config key to sweep
    std::vector<double> values;
    int trials = 1;
    std::vector<std::string> schemes; // per-mode scheme names
    bool x0_center = true;            // keep x0 = A/2 while sweeping
    std::vector<std::string> asserts; // optional trend assertions

    void validate() const {
        if (param.empty()) throw std::invalid_argument("sweep: param missing");
        if (values.empty()) throw std::invalid_argument("sweep: values missing");
        if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
        if (schemes.empty()) throw std::invalid_argument("sweep: schemes missing");
        if (mode != "single" && mode != "multi")
            throw std::invalid_argument("sweep: mode must be single or multi");
    }
};

inline SweepSpec sweep_from_kv(const std::map<std::string, std::string>& kv) {
    SweepSpec s;
    auto split_list = [](const std::string& v) {
        std::vector<std::string> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
        }
        return out;
    };
    for (const auto& [key, val] : kv) {
        if (key == "mode") s.mode = val;
        else if (key == "param") s.param = val;
        else if (key == "values") {
            for (const auto& v : split_list(val)) s.values.push_back(std::stod(v));
        } else if (key == "trials") s.trials = std::stoi(val);
        else if (key == "schemes") s.schemes = split_list(val);
        else if (key == "x0") s.x0_center = val == "center";
        else if (key == "assert") s.asserts = split_list(val);
        else throw std::invalid_argument("sweep: unknown key " + key);
    }
    s.validate();
    return s;
}

inline SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open sweep spec: " + path);
    return sweep_from_kv(parse_kv(f));
}

struct ResultRow {
    std::string scheme;
    double value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double throughput = 0.0;
    int iterations = 0;
    double wall_s = 0.0;
    double rank_ratio = 1.0; // min over users; 1 for single-user schemes
    double t1 = 0.0;
    std::string status = "ok";
};

inline ScenarioConfig apply_sweep_value(ScenarioConfig cfg, const SweepSpec& spec, double v) {
    const std::string& p = spec.param;
    if (p == "l_paths") cfg.l_paths = static_cast<int>(v);
    else if (p == "k_users") cfg.k_users = static_cast<int>(v);
    else if (p == "n_tx") cfg.n_tx = static_cast<int>(v);
    else if (p == "region_len_A") cfg.region_len_A = v;
    else if (p == "A_over_lambda") cfg.region_len_A = v * cfg.wavelength;
    else if (p == "block_T") cfg.block_T = v;
    else if (p == "move_speed_v") cfg.move_speed_v = v;
    else if (p == "p_max") cfg.p_max = v;
    else if (p == "p_max_dbm") cfg.p_max = ScenarioConfig::dbm_to_watts(v);
    else if (p == "quant_res_kappa0") cfg.quant_res_kappa0 = static_cast<int>(v);
    else throw std::invalid_argument("sweep: unsupported param " + p);
    if (spec.x0_center) cfg.init_pos_x0 = cfg.region_len_A / 2.0;
    else cfg.init_pos_x0 = std::min(cfg.init_pos_x0, cfg.region_len_A);
    cfg.validate();
    return cfg;
}

// scheme name -> "quantized" with the resolution split off, if present
inline std::pair<std::string, int> parse_scheme(const std::string& s, int default_kappa0) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) return {s, default_kappa0};
    return {s.substr(0, colon), std::stoi(s.substr(colon + 1))};
}

inline ResultRow run_single_trial(const std::string& scheme, const ScenarioConfig& cfg) {
    ResultRow row;
    row.scheme = scheme;
    row.seed = cfg.rng_seed;
    const auto [name, kappa0] = parse_scheme(scheme, cfg.quant_res_kappa0);
    const UserChannel ch = sample_scenario(cfg).front();
    if (name == "sca") {
        const SuResult r = optimize_position(ch, cfg, cfg.init_pos_x0);
        row.throughput = r.throughput;
        row.iterations = r.iterations;
        row.t1 = std::abs(r.x - cfg.init_pos_x0) / cfg.move_speed_v;
    } else if (name == "fpa") {
        row.throughput = throughput_su(ch, cfg, cfg.init_pos_x0);
    } else if (name == "max-snr") {
        const SuResult r = max_snr_position(ch, cfg, cfg.init_pos_x0);
        row.throughput = throughput_su(ch, cfg, r.x);
        row.iterations = r.iterations;
        row.t1 = std::abs(r.x - cfg.init_pos_x0) / cfg.move_speed_v;
    } else if (name == "quantized") {
        if (kappa0 < 1) throw std::invalid_argument("quantized scheme needs kappa0");
        const UserChannel qch = quantized_channel(ch, kappa0);
        const SuResult r = optimize_position(qch, cfg, cfg.init_pos_x0);
        row.throughput = throughput_su(ch, cfg, r.x); // true channel at chosen x
        row.iterations = r.iterations;
        row.t1 = std::abs(r.x - cfg.init_pos_x0) / cfg.move_speed_v;
    } else {
        throw std::invalid_argument("unknown single-user scheme: " + scheme);
    }
    return row;
}

inline ResultRow run_multi_trial(const std::string& scheme, const ScenarioConfig& cfg) {
    ResultRow row;
    row.scheme = scheme;
    row.seed = cfg.rng_seed;
    const auto [name, kappa0] = parse_scheme(scheme, cfg.quant_res_kappa0);
    const std::vector<UserChannel> channels = sample_scenario(cfg);
    auto finish = [&](const MuResult& r, const std::vector<UserChannel>& eval_channels) {
        row.iterations = r.iterations;
        row.t1 = r.t1;
        if (!r.eig_ratio.empty())
            row.rank_ratio = *std::min_element(r.eig_ratio.begin(), r.eig_ratio.end());
        if (!r.ok) {
            row.status = "subproblem-failed";
            return;
        }
        row.throughput = &eval_channels == &channels
                             ? r.min_throughput
                             : sinr_and_throughput(channels, r.x, r.w, cfg).min_throughput;
    };
    if (name == "ao") {
        finish(alternating_optimize(channels, cfg, MuScheme::Ao), channels);
    } else if (name == "max-min-sinr") {
        finish(alternating_optimize(channels, cfg, MuScheme::MaxMinSinr), channels);
    } else if (name == "fpa") {
        finish(alternating_optimize(channels, cfg, MuScheme::Fpa), channels);
    } else if (name == "quantized") {
        if (kappa0 < 1) throw std::invalid_argument("quantized scheme needs kappa0");
        std::vector<UserChannel> qch;
        for (const auto& ch : channels) qch.push_back(quantized_channel(ch, kappa0));
        finish(alternating_optimize(qch, cfg, MuScheme::Ao), qch);
    } else {
        throw std::invalid_argument("unknown multi-user scheme: " + scheme);
    }
    return row;
}

inline int worker_count() {
    if (const char* env = std::getenv("MATOPT_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct SweepResult {
    std::vector<ResultRow> rows; // canonical (scheme, value, trial) order
};

inline SweepResult run_sweep(const SweepSpec& spec, const ScenarioConfig& base_cfg) {
    spec.validate();
    struct Task {
        std::string scheme;
        double value;
        int trial;
    };
    std::vector<Task> tasks;
    for (const auto& scheme : spec.schemes)
        for (double v : spec.values)
            for (int t = 0; t < spec.trials; ++t) tasks.push_back({scheme, v, t});

    SweepResult out;
    out.rows.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& tk = tasks[i];
            ResultRow row;
            const auto t_start = std::chrono::steady_clock::now();
            try {
                ScenarioConfig cfg = apply_sweep_value(base_cfg, spec, tk.value);
                // paired trials: the channel seed depends only on the trial index
                cfg.rng_seed = Rng::split(base_cfg.rng_seed, kStreamTrial,
                                          static_cast<std::uint64_t>(tk.trial))
                                   .next_u64();
                row = spec.mode == "single" ? run_single_trial(tk.scheme, cfg)
                                            : run_multi_trial(tk.scheme, cfg);
            } catch (const std::exception& e) {
                row.scheme = tk.scheme;
                row.status = std::string("error: ") + e.what();
            }
            row.value = tk.value;
            row.trial = tk.trial;
            row.wall_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                    .count();
            out.rows[i] = std::move(row);
        }
    };
    const int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline const char* kCsvHeader =
    "scheme,value,trial,seed,throughput,iterations,wall_s,rank_ratio,t1,status";

inline std::string csv_row(const ResultRow& r, bool with_timing = true) {
    std::ostringstream os;
    os.precision(12);
    os << r.scheme << ',' << r.value << ',' << r.trial << ',' << r.seed << ','
       << r.throughput << ',' << r.iterations << ',';
    if (with_timing) os << r.wall_s;
    os << ',' << r.rank_ratio << ',' << r.t1 << ',' << r.status;
    return os.str();
}

struct SummaryRow {
    std::string scheme;
    double value = 0.0;
    int n = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::pair<std::string, double>, std::vector<double>> groups;
    for (const auto& r : rows)
        if (r.status == "ok") groups[{r.scheme, r.value}].push_back(r.throughput);
    std::vector<SummaryRow> out;
    for (const auto& [key, vals] : groups) {
        SummaryRow s;
        s.scheme = key.first;
        s.value = key.second;
        s.n = static_cast<int>(vals.size());
        for (double v : vals) s.mean += v;
        s.mean /= s.n;
        for (double v : vals) s.stddev += (v - s.mean) * (v - s.mean);
        s.stddev = s.n > 1 ? std::sqrt(s.stddev / (s.n - 1)) : 0.0;
        out.push_back(s);
    }
    return out;
}

struct SchemeComparison {
    double value = 0.0;
    std::string scheme;
    double mean = 0.0;
    double gain_vs_fpa = 0.0; // relative mean gain
    double win_rate_vs_fpa = 0.0;
};

// per-(value, scheme) relative gain and paired win rate against fpa
inline std::vector<SchemeComparison> compare_schemes(const std::vector<ResultRow>& rows) {
    std::map<std::pair<double, int>, double> fpa; // (value, trial) -> throughput
    for (const auto& r : rows)
        if (r.status == "ok" && r.scheme.rfind("fpa", 0) == 0) fpa[{r.value, r.trial}] = r.throughput;
    std::map<std::pair<double, std::string>, std::pair<int, int>> wins; // (won, total)
    std::map<std::pair<double, std::string>, std::pair<double, double>> means; // (sum, fpa sum)
    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        const auto it = fpa.find({r.value, r.trial});
        if (it == fpa.end()) continue;
        auto& w = wins[{r.value, r.scheme}];
        w.second += 1;
        if (r.throughput >= it->second) w.first += 1;
        auto& m = means[{r.value, r.scheme}];
        m.first += r.throughput;
        m.second += it->second;
    }
    std::vector<SchemeComparison> out;
    for (const auto& [key, w] : wins) {
        SchemeComparison c;
        c.value = key.first;
        c.scheme = key.second;
        const auto& m = means[key];
        c.mean = m.first / w.second;
        c.gain_vs_fpa = m.second > 0.0 ? (m.first - m.second) / m.second : 0.0;
        c.win_rate_vs_fpa = static_cast<double>(w.first) / w.second;
        out.push_back(c);
    }
    return out;
}

// Writes results.csv, summary.csv, and a gnuplot-friendly results.dat
// (one block per scheme: value, mean, stddev).
inline void write_sweep_outputs(const SweepResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "results.csv");
        f << kCsvHeader << '\n';
        for (const auto& r : res.rows) f << csv_row(r) << '\n';
    }
    const auto sum = summarize(res.rows);
    {
        std::ofstream f(fs::path(out_dir) / "summary.csv");
        f << "scheme,value,n,mean,stddev\n";
        f.precision(12);
        for (const auto& s : sum)
            f << s.scheme << ',' << s.value << ',' << s.n << ',' << s.mean << ','
              << s.stddev << '\n';
    }
    {
        std::ofstream f(fs::path(out_dir) / "results.dat");
        f << "# gnuplot data: one block per scheme; columns: value mean stddev\n";
        f.precision(12);
        std::string current;
        for (const auto& s : sum) {
            if (s.scheme != current) {
                if (!current.empty()) f << "\n\n";
                f << "# scheme: " << s.scheme << '\n';
                current = s.scheme;
            }
            f << s.value << ' ' << s.mean << ' ' << s.stddev << '\n';
        }
    }
}

// Minimal trend assertions usable from sweep specs; the detailed
// acceptance checks live in the test suite.
inline bool check_assertion(const std::string& name, const std::vector<ResultRow>& rows,
                            std::string& detail) {
    const auto sum = summarize(rows);
    auto mean_of = [&](const std::string& scheme, double value) {
        for (const auto& s : sum)
            if (s.scheme == scheme && s.value == value) return s.mean;
        return -1.0;
    };
    std::vector<double> values;
    for (const auto& s : sum)
        if (std::find(values.begin(), values.end(), s.value) == values.end())
            values.push_back(s.value);
    std::sort(values.begin(), values.end());

    if (name == "means_nondecreasing") {
        std::map<std::string, bool> seen;
        for (const auto& s : sum) seen[s.scheme] = true;
        for (const auto& [scheme, _] : seen) {
            double prev = -std::numeric_limits<double>::infinity();
            for (double v : values) {
                const double m = mean_of(scheme, v);
                if (m < prev) {
                    detail = scheme + " mean decreases at value " + std::to_string(v);
                    return false;
                }
                prev = m;
            }
        }
        return true;
    }
    if (name.rfind("fpa_match_at_min:", 0) == 0) {
        const double tol = std::stod(name.substr(name.find(':') + 1));
        const double a = mean_of("sca", values.front());
        const double b = mean_of("fpa", values.front());
        if (a < 0.0 || b < 0.0) {
            detail = "fpa_match_at_min needs sca and fpa schemes";
            return false;
        }
        if (std::abs(a - b) > tol * std::max(b, 1e-12)) {
            detail = "sca and fpa means differ beyond tolerance at the smallest value";
            return false;
        }
        return true;
    }
    detail = "unknown assertion: " + name;
    return false;
}

} // namespace matopt

#endif
