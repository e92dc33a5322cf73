// Command-line harness over the swiptsec C API: single solves, Monte
// Carlo sweeps, constraint audits of saved reports, and the
// chance-constraint quantile helper.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "swiptsec.h"

namespace {

struct StringGuard {
    char* ptr = nullptr;
    ~StringGuard() { swiptsec_string_free(ptr); }
};

struct ScenarioGuard {
    swiptsec_scenario* ptr = nullptr;
    ~ScenarioGuard() { swiptsec_scenario_free(ptr); }
};

// Exit-code contract: 0 optimal / 2 infeasible / 1 anything else.
int exit_code_for(int rc) {
    if (rc == SWIPTSEC_OK) return 0;
    if (rc == SWIPTSEC_ERR_INFEASIBLE) return 2;
    return 1;
}

std::string default_out_dir() {
    const char* env = std::getenv("SWIPTSEC_OUTDIR");
    return env != nullptr ? env : ".";
}

bool write_file(const std::string& path, const char* text) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    out << text;
    return true;
}

int load_scenario(const std::string& path, ScenarioGuard& guard) {
    const int rc = swiptsec_scenario_load(path.c_str(), &guard.ptr);
    if (rc != SWIPTSEC_OK) {
        std::cerr << "error: " << swiptsec_last_error() << "\n";
    }
    return rc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure SWIPT downlink beamforming optimizer"};
    app.require_subcommand(1);

    // solve: one channel draw, one scheme, reports + audit to disk.
    auto* solve_cmd = app.add_subcommand("solve", "Solve a single channel realization");
    std::string solve_scenario;
    std::string solve_scheme = "optimal";
    std::uint64_t solve_seed = 1;
    std::string solve_out = default_out_dir();
    solve_cmd->add_option("--scenario", solve_scenario, "Scenario JSON file")->required();
    solve_cmd->add_option("--scheme", solve_scheme,
                          "optimal|suboptimal|baseline1|baseline2|benchmark_kappa0");
    solve_cmd->add_option("--seed", solve_seed, "Channel realization seed");
    solve_cmd->add_option("--out", solve_out, "Output directory");

    // sweep: Monte Carlo study, CSV out.
    auto* sweep_cmd = app.add_subcommand("sweep", "Run the Monte Carlo parameter sweep");
    std::string sweep_scenario;
    std::string sweep_schemes;
    int sweep_trials = 0;
    int sweep_jobs = 0;
    std::uint64_t sweep_seed = 0;
    std::string sweep_out;
    sweep_cmd->add_option("--scenario", sweep_scenario, "Scenario JSON file")->required();
    sweep_cmd->add_option("--schemes", sweep_schemes, "Comma-separated scheme list");
    sweep_cmd->add_option("--trials", sweep_trials, "Trials per sweep value");
    sweep_cmd->add_option("--jobs", sweep_jobs, "Worker threads");
    sweep_cmd->add_option("--seed", sweep_seed, "Master seed");
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path (default: <outdir>/sweep.csv)");

    // audit: rerun the constraint evaluation of a stored report.
    auto* audit_cmd = app.add_subcommand("audit", "Audit a stored solve report");
    std::string audit_scenario, audit_report, audit_out;
    audit_cmd->add_option("--scenario", audit_scenario, "Scenario JSON file")->required();
    audit_cmd->add_option("--report", audit_report, "solve report JSON file")->required();
    audit_cmd->add_option("--out", audit_out, "Audit JSON path (default: stdout)");

    // quantile: chance-constraint replacement data.
    auto* quant_cmd = app.add_subcommand("quantile", "Print the chance-bound quantile");
    int q_nt = 6, q_j = 5;
    double q_kappa = 0.99, q_gamma_tol_db = 0.0, q_sigma_tilde_sq = 1.0;
    quant_cmd->add_option("--n-t", q_nt, "Transmit antennas");
    quant_cmd->add_option("--kappa", q_kappa, "Required outage probability");
    quant_cmd->add_option("--j", q_j, "Passive eavesdropper count");
    quant_cmd->add_option("--gamma-tol-db", q_gamma_tol_db, "SINR cap (dB)");
    quant_cmd->add_option("--sigma-tilde-sq", q_sigma_tilde_sq, "Normalized noise power");

    // defaults: emit the built-in scenario for editing.
    auto* def_cmd = app.add_subcommand("defaults", "Print the default scenario JSON");

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) {
        ScenarioGuard scenario;
        if (int rc = load_scenario(solve_scenario, scenario); rc != SWIPTSEC_OK) {
            return exit_code_for(rc);
        }
        StringGuard report, audit;
        const int rc = swiptsec_solve_trial(scenario.ptr, solve_scheme.c_str(), solve_seed,
                                            &report.ptr, &audit.ptr);
        if (rc != SWIPTSEC_OK) std::cerr << "solve: " << swiptsec_last_error() << "\n";
        std::filesystem::create_directories(solve_out);
        bool ok = true;
        if (report.ptr != nullptr) {
            ok &= write_file(solve_out + "/solve_report.json", report.ptr);
        }
        if (rc == SWIPTSEC_OK && audit.ptr != nullptr) {
            ok &= write_file(solve_out + "/constraint_report.json", audit.ptr);
        }
        if (!ok) return 1;
        return exit_code_for(rc);
    }

    if (sweep_cmd->parsed()) {
        ScenarioGuard scenario;
        if (int rc = load_scenario(sweep_scenario, scenario); rc != SWIPTSEC_OK) {
            return exit_code_for(rc);
        }
        StringGuard csv;
        const int rc = swiptsec_run_sweep(
            scenario.ptr, sweep_schemes.empty() ? nullptr : sweep_schemes.c_str(),
            sweep_trials, sweep_jobs, sweep_seed, &csv.ptr);
        if (rc != SWIPTSEC_OK) {
            std::cerr << "sweep: " << swiptsec_last_error() << "\n";
            return exit_code_for(rc);
        }
        const std::string out_path =
            sweep_out.empty() ? default_out_dir() + "/sweep.csv" : sweep_out;
        std::filesystem::create_directories(
            std::filesystem::path(out_path).parent_path().empty()
                ? "."
                : std::filesystem::path(out_path).parent_path().string());
        if (!write_file(out_path, csv.ptr)) return 1;
        std::cout << out_path << "\n";
        return 0;
    }

    if (audit_cmd->parsed()) {
        ScenarioGuard scenario;
        if (int rc = load_scenario(audit_scenario, scenario); rc != SWIPTSEC_OK) {
            return exit_code_for(rc);
        }
        std::string report_text;
        try {
            report_text = read_file(audit_report);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        StringGuard audit;
        const int rc =
            swiptsec_audit_report(scenario.ptr, report_text.c_str(), &audit.ptr);
        if (rc != SWIPTSEC_OK) {
            std::cerr << "audit: " << swiptsec_last_error() << "\n";
            return exit_code_for(rc);
        }
        if (audit_out.empty()) {
            std::cout << audit.ptr << "\n";
        } else if (!write_file(audit_out, audit.ptr)) {
            return 1;
        }
        return 0;
    }

    if (quant_cmd->parsed()) {
        double coeff = 0.0, rhs = 0.0;
        const double gamma_tol = std::pow(10.0, q_gamma_tol_db / 10.0);
        const int rc = swiptsec_chance_quantile(q_nt, q_kappa, q_j, gamma_tol,
                                                q_sigma_tilde_sq, &coeff, &rhs);
        if (rc != SWIPTSEC_OK) {
            std::cerr << "quantile: " << swiptsec_last_error() << "\n";
            return exit_code_for(rc);
        }
        std::cout << "{\n  \"n_t\": " << q_nt << ",\n  \"kappa\": " << q_kappa
                  << ",\n  \"j\": " << q_j << ",\n  \"quantile_coeff\": " << coeff
                  << ",\n  \"rhs_scale\": " << rhs << "\n}\n";
        return 0;
    }

    if (def_cmd->parsed()) {
        StringGuard text;
        if (swiptsec_default_scenario(&text.ptr) != SWIPTSEC_OK) return 1;
        std::cout << text.ptr << "\n";
        return 0;
    }

    return 1;
}
