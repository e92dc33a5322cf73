#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/conic_solver.hpp"
#include "core/recovery.hpp"

// Monte Carlo driver: draws channel realizations, solves the selected
// schemes per trial (shared channels and eavesdropper pool within a
// trial, so scheme comparisons are paired), applies rank recovery, and
// aggregates sweep tables. Trial seeds depend only on (master_seed,
// trial index); together with the nested channel substreams this pairs
// trials across sweep values as well.

namespace swiptsec {

struct SweepSpec {
    std::string swept_parameter = "gamma_req_db";  // n_t | k_total | sigma_est_sq
    std::vector<double> values;
    int trials = 200;
    std::vector<Variant> schemes = {Variant::kOptimal};
    SystemConfig base_config;
    FadingSpec base_fading;
    std::uint64_t master_seed = 1;
    int jobs = 1;
    int outage_groups = 2000;  // per-trial empirical outage sample
    double solver_tol = 1e-8;

    void validate() const;
};

// One (instance, scheme) outcome.
struct TrialRecord {
    std::uint64_t instance_id = 0;
    std::string scheme;
    std::string status;
    double objective_w = 0.0;
    double tr_w = 0.0, tr_v = 0.0, tr_we = 0.0;
    double rho = 0.0;
    int w_rank = 0;
    bool prop1 = false;
    bool recovery_invoked = false;
    bool recovery_ok = true;
    double secrecy_sampled_bps_hz = 0.0;    // eavesdropper term at sampled channels
    double secrecy_guarantee_bps_hz = 0.0;  // eavesdropper term at the SINR caps
    double harvest_desired_w = 0.0;
    double harvest_idle_mean_w = 0.0;
    double empirical_outage = 1.0;
    double min_margin = 0.0;  // worst audited constraint margin (C3 excluded)
};

SystemConfig config_for_value(const SystemConfig& base, const std::string& parameter,
                              double value);

std::vector<TrialRecord> run_trial(const SystemConfig& config, const FadingSpec& fading,
                                   std::uint64_t seed, const std::vector<Variant>& schemes,
                                   double solver_tol = 1e-8, int outage_groups = 2000);

// Fraction of J-grouped draws with max_j passive SINR <= Gamma_tol.
double empirical_outage(const TransmitPolicy& policy, const SystemConfig& config,
                        double sigma_tilde_sq, int groups, std::uint64_t seed);

// Same on a prebuilt pool matrix (one draw per column, J consecutive
// columns per group).
double empirical_outage_pool(const TransmitPolicy& policy, const SystemConfig& config,
                             double sigma_tilde_sq, const CMat& pool);

CMat pool_matrix(const std::vector<CVec>& draws);

// Independent check of the joint splitting-ratio reformulation: solves
// the SDP on a rho grid (C1/C4 become linear) and refines the best point
// with a golden-section pass. Empty when every grid point is infeasible.
std::optional<double> rho_grid_oracle(const ChannelSet& channels,
                                      const SystemConfig& config, Variant variant,
                                      int grid_points, double solver_tol = 1e-8);

struct SweepRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    std::string scheme;
    int trials_ok = 0;
    double mean_power_dbm = 0.0;
    double mean_trW_dbm = 0.0;
    double mean_trV_dbm = 0.0;
    double mean_trWE_dbm = 0.0;
    double mean_rho = 0.0;
    double rank1_frac = 0.0;
    double prop1_frac = 0.0;
    double mean_secrecy_bps_hz = 0.0;
    double mean_harvest_desired_dbm = 0.0;
    double mean_harvest_idle_dbm = 0.0;
    double empirical_outage = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;                    // value-major, scheme-minor
    std::vector<std::vector<TrialRecord>> trials;  // [value][trial x scheme]
};

SweepResult sweep(const SweepSpec& spec);

// The exact tabular schema consumed by downstream tooling.
std::string sweep_csv(const std::vector<SweepRow>& rows);

double watts_to_dbm(double watts);
double dbm_to_watts(double dbm);

}  // namespace swiptsec
