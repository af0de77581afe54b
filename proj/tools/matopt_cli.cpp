// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems
//
// CLI front end: instance analysis, one-shot single/multi-user runs,
// and Monte-Carlo sweeps.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "matopt/experiments.hpp"
#include "matopt/movement.hpp"
#include "matopt/multi_user.hpp"
#include "matopt/single_user.hpp"

namespace {

matopt::ScenarioConfig load_or_default(const std::string& path) {
    if (path.empty()) return {};
    return matopt::load_config(path);
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

int cmd_analyze(const std::string& config, std::uint64_t seed, bool have_seed) {
    matopt::ScenarioConfig cfg = load_or_default(config);
    if (have_seed) cfg.rng_seed = seed;
    const auto users = matopt::sample_scenario(cfg);
    std::cout.precision(12);
    std::cout << "k_users=" << users.size() << "\n";
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& ch = users[k];
        const std::string pre = "user" + std::to_string(k) + ".";
        std::cout << pre << "l_paths=" << ch.n_paths() << "\n";
        for (int l = 0; l < ch.n_paths(); ++l)
            std::cout << pre << "virtual_aoa" << l << "=" << ch.virtual_aoas[l] << "\n";
        if (ch.n_paths() == 1) {
            const auto v = matopt::one_path_verdict(ch, cfg.init_pos_x0);
            std::cout << pre << "verdict=must_stay\n";
            std::cout << pre << "candidate_lo=" << v.candidate.lo << "\n";
            std::cout << pre << "candidate_hi=" << v.candidate.hi << "\n";
        } else if (ch.n_paths() == 2) {
            const auto v = matopt::two_path_verdict(ch, cfg);
            const char* kind =
                v.kind == matopt::MovementVerdict::Kind::MustStay ? "must_stay"
                : v.kind == matopt::MovementVerdict::Kind::MovementConsidered
                    ? "movement_considered"
                    : "inconclusive";
            std::cout << pre << "verdict=" << kind << "\n";
            if (v.has_witness)
                std::cout << pre << "d1=" << v.d1 << "\n" << pre << "d2=" << v.d2 << "\n";
            std::cout << pre << "region_exceeds_period=" << v.region_exceeds_period << "\n";
            std::cout << pre << "candidate_lo=" << v.candidate.lo << "\n";
            std::cout << pre << "candidate_hi=" << v.candidate.hi << "\n";
        }
        if (cfg.quant_res_kappa0 >= 1 && ch.n_paths() >= 2) {
            std::vector<double> vals(ch.virtual_aoas.data(),
                                     ch.virtual_aoas.data() + ch.n_paths());
            const auto q = matopt::quantize(vals, cfg.quant_res_kappa0);
            std::cout << pre << "mu_star=" << q.mu_star << "\n";
            std::cout << pre << "period=" << matopt::gain_period(q, cfg.wavelength) << "\n";
            const auto iv = matopt::candidate_interval(q, cfg.init_pos_x0, cfg.region_len_A,
                                                       cfg.wavelength);
            std::cout << pre << "quant_candidate_lo=" << iv.lo << "\n";
            std::cout << pre << "quant_candidate_hi=" << iv.hi << "\n";
            const auto dr = matopt::design_rules(q, cfg.region_len_A, cfg.wavelength);
            std::cout << pre << "x0_design_lo=" << dr.x0_interval.lo << "\n";
            std::cout << pre << "x0_design_hi=" << dr.x0_interval.hi << "\n";
            std::cout << pre << "resolution_ok=" << dr.resolution_ok << "\n";
        }
    }
    return 0;
}

int cmd_single(const std::string& config, std::uint64_t seed, bool have_seed, int starts,
               double oracle_step, const std::string& scheme, const std::string& out_path) {
    matopt::ScenarioConfig cfg = load_or_default(config);
    if (have_seed) cfg.rng_seed = seed;
    if (starts >= 1) cfg.multi_starts = starts;
    cfg.k_users = 1;
    matopt::ResultRow row = matopt::run_single_trial(scheme, cfg);
    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    os << matopt::kCsvHeader;
    if (oracle_step > 0.0) os << ",oracle_x,oracle_value";
    os << "\n" << matopt::csv_row(row);
    if (oracle_step > 0.0) {
        const auto ch = matopt::sample_scenario(cfg).front();
        const auto [ox, ov] = matopt::grid_oracle(ch, cfg, oracle_step);
        os.precision(12);
        os << ',' << ox << ',' << ov;
    }
    os << "\n";
    return 0;
}

int cmd_multi(const std::string& config, std::uint64_t seed, bool have_seed,
              const std::string& scheme, int n_rand, const std::string& out_path) {
    matopt::ScenarioConfig cfg = load_or_default(config);
    if (have_seed) cfg.rng_seed = seed;
    if (n_rand >= 1) cfg.n_rand = n_rand;
    matopt::ResultRow row = matopt::run_multi_trial(scheme, cfg);
    std::ofstream file;
    std::ostream& os = open_out(file, out_path);
    os << matopt::kCsvHeader << "\n" << matopt::csv_row(row) << "\n";
    return row.status == "ok" ? 0 : 1;
}

int cmd_sweep(const std::string& spec_path, const std::string& config,
              const std::string& out_dir) {
    const matopt::SweepSpec spec = matopt::load_sweep_spec(spec_path);
    const matopt::ScenarioConfig cfg = load_or_default(config);
    const matopt::SweepResult res = matopt::run_sweep(spec, cfg);
    matopt::write_sweep_outputs(res, out_dir);
    int failures = 0;
    for (const auto& a : spec.asserts) {
        std::string detail;
        if (!matopt::check_assertion(a, res.rows, detail)) {
            std::cerr << "assertion failed: " << a << " (" << detail << ")\n";
            ++failures;
        } else {
            std::cout << "assertion passed: " << a << "\n";
        }
    }
    std::cout << "wrote " << res.rows.size() << " rows to " << out_dir << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"movable-antenna throughput optimization"};
    app.require_subcommand(1);

    std::string config, out_path, spec_path, out_dir;
    std::string su_scheme = "sca", mu_scheme = "ao";
    std::uint64_t seed = 0;
    int starts = 0, n_rand = 0;
    double oracle_step = 0.0;

    auto* analyze = app.add_subcommand("analyze", "movement analysis of a random instance");
    analyze->add_option("--config", config, "key=value config file");
    auto* an_seed = analyze->add_option("--seed", seed, "RNG seed override");

    auto* su = app.add_subcommand("single-user", "single-user position optimization");
    su->add_option("--config", config);
    auto* su_seed = su->add_option("--seed", seed);
    su->add_option("--starts", starts, "multi-start count");
    su->add_option("--oracle-step", oracle_step, "append a grid-oracle column");
    su->add_option("--scheme", su_scheme, "sca|quantized|max-snr|fpa");
    su->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* mu = app.add_subcommand("multi-user", "joint position and beamforming design");
    mu->add_option("--config", config);
    auto* mu_seed = mu->add_option("--seed", seed);
    mu->add_option("--scheme", mu_scheme, "ao|quantized:<kappa0>|max-min-sinr|fpa");
    mu->add_option("--n-rand", n_rand, "randomization candidates");
    mu->add_option("--out", out_path, "CSV output path (default stdout)");

    auto* sw = app.add_subcommand("sweep", "Monte-Carlo parameter sweep");
    sw->add_option("--spec", spec_path, "sweep spec file")->required();
    sw->add_option("--config", config, "base config file");
    sw->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (app.got_subcommand(analyze))
            return cmd_analyze(config, seed, an_seed->count() > 0);
        if (app.got_subcommand(su))
            return cmd_single(config, seed, su_seed->count() > 0, starts, oracle_step,
                              su_scheme, out_path);
        if (app.got_subcommand(mu))
            return cmd_multi(config, seed, mu_seed->count() > 0, mu_scheme, n_rand, out_path);
        if (app.got_subcommand(sw)) return cmd_sweep(spec_path, config, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
