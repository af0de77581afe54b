// SPDX-License-Identifier: Apache-2.0
//
// matopt - throughput optimization for movable-antenna downlink systems

#ifndef MATOPT_CONFIG_HPP
#define MATOPT_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace matopt {

// All physical and algorithmic parameters of a problem instance.
// Every quantity is stored in linear SI units; dB-valued inputs are
// converted once at parse time.
struct ScenarioConfig {
    int n_tx = 4;                  // BS antennas (UPA rows x cols)
    int k_users = 1;
    int l_paths = 4;               // channel paths per user
    double region_len_A = 0.2;     // meters, moving region [0, A]
    double move_speed_v = 0.1;     // meters/second
    double block_T = 1.5;          // seconds
    double p_max = 0.01;           // watts (10 dBm)
    double noise_power = 1e-11;    // watts (-80 dBm)
    double wavelength = 0.1;       // meters
    int quant_res_kappa0 = 0;      // 0 = unquantized virtual AoAs
    double init_pos_x0 = 0.1;      // meters
    double pathloss_rho0 = 6.309573444801933e-5; // linear gain at 1 m (-42 dB)
    double pathloss_exp_xi0 = 2.8;
    double user_radius_r = 100.0;  // meters
    double sca_eps = 1e-4;         // relative convergence threshold
    std::uint64_t rng_seed = 1;

    // algorithmic knobs (defaults per the optimizer contracts)
    int multi_starts = 1;
    int n_rand = 1000;             // Gaussian-randomization candidates

    void validate() const {
        auto req = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(std::string("ScenarioConfig: ") + what);
        };
        req(n_tx >= 1, "n_tx must be positive");
        req(k_users >= 1, "k_users must be positive");
        req(l_paths >= 1, "l_paths must be positive");
        req(region_len_A > 0, "region_len_A must be positive");
        req(move_speed_v > 0, "move_speed_v must be positive");
        req(block_T > 0, "block_T must be positive");
        req(p_max > 0, "p_max must be positive");
        req(noise_power > 0, "noise_power must be positive");
        req(wavelength > 0, "wavelength must be positive");
        req(quant_res_kappa0 >= 0, "quant_res_kappa0 must be >= 0");
        req(init_pos_x0 >= 0 && init_pos_x0 <= region_len_A,
            "init_pos_x0 must lie in [0, region_len_A]");
        req(pathloss_rho0 > 0, "pathloss_rho0 must be positive");
        req(user_radius_r > 0, "user_radius_r must be positive");
        req(sca_eps > 0, "sca_eps must be positive");
        req(multi_starts >= 1, "multi_starts must be >= 1");
        req(n_rand >= 1, "n_rand must be >= 1");
        // UPA factorization: largest divisor <= sqrt(n_tx) must give a grid
        req(upa_rows(n_tx) * (n_tx / upa_rows(n_tx)) == n_tx, "n_tx must form a grid");
    }

    // rows of the UPA grid: largest divisor of n not exceeding sqrt(n)
    static int upa_rows(int n) {
        int r = 1;
        for (int d = 1; d * d <= n; ++d)
            if (n % d == 0) r = d;
        return r;
    }

    static double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    static double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
};

// Flat key=value dialect shared by config and sweep-spec files.
// '#' starts a comment; blank lines are ignored.
inline std::map<std::string, std::string> parse_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

inline ScenarioConfig config_from_kv(const std::map<std::string, std::string>& kv) {
    ScenarioConfig cfg;
    bool have_x0 = false;
    for (const auto& [key, val] : kv) {
        std::istringstream ss(val);
        auto num = [&]() {
            double d;
            if (!(std::istringstream(val) >> d))
                throw std::invalid_argument("config: bad numeric value for " + key);
            return d;
        };
        if (key == "n_tx") cfg.n_tx = static_cast<int>(num());
        else if (key == "k_users") cfg.k_users = static_cast<int>(num());
        else if (key == "l_paths") cfg.l_paths = static_cast<int>(num());
        else if (key == "region_len_A") cfg.region_len_A = num();
        else if (key == "move_speed_v") cfg.move_speed_v = num();
        else if (key == "block_T") cfg.block_T = num();
        else if (key == "p_max") cfg.p_max = num();
        else if (key == "p_max_dbm") cfg.p_max = ScenarioConfig::dbm_to_watts(num());
        else if (key == "noise_power") cfg.noise_power = num();
        else if (key == "noise_dbm") cfg.noise_power = ScenarioConfig::dbm_to_watts(num());
        else if (key == "wavelength") cfg.wavelength = num();
        else if (key == "quant_res_kappa0") cfg.quant_res_kappa0 = static_cast<int>(num());
        else if (key == "init_pos_x0") { cfg.init_pos_x0 = num(); have_x0 = true; }
        else if (key == "pathloss_rho0") cfg.pathloss_rho0 = num();
        else if (key == "rho0_db") cfg.pathloss_rho0 = ScenarioConfig::db_to_linear(num());
        else if (key == "pathloss_exp_xi0") cfg.pathloss_exp_xi0 = num();
        else if (key == "user_radius_r") cfg.user_radius_r = num();
        else if (key == "sca_eps") cfg.sca_eps = num();
        else if (key == "rng_seed") cfg.rng_seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "multi_starts") cfg.multi_starts = static_cast<int>(num());
        else if (key == "n_rand") cfg.n_rand = static_cast<int>(num());
        else throw std::invalid_argument("config: unknown key " + key);
    }
    if (!have_x0) cfg.init_pos_x0 = cfg.region_len_A / 2.0;
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    return config_from_kv(parse_kv(f));
}

} // namespace matopt

#endif
