#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/conic_solver.hpp"

// Rank certification and repair for the relaxed beamforming covariance.
// The sufficient-condition check reads the dual certificate; the
// constructive path moves the null-space mass of the stationarity matrix
// into the artificial-noise / energy covariances without changing the
// objective, leaving a rank-one information beam.

namespace swiptsec {

struct Prop1Result {
    std::vector<bool> per_k;
    bool all = true;
};

// True per k iff D_c2k / Gamma_tol_k - D_c5k >= 0 (within tolerance);
// aggregate requires all k. Holds vacuously without idle receivers.
Prop1Result check_prop1(const DualCertificate& duals, const SystemConfig& config);

struct RecoveryWorkspace {
    CMat b_star;
    CMat upsilon;             // orthonormal null basis of b_star
    int rank_b = 0;
    CVec u_dir;               // unit beam direction orthogonal to upsilon
    std::vector<double> gamma;  // null-direction weights (Watts)
    double f_scale = 0.0;       // beam power (Watts)
    std::vector<double> pi;     // split of the null mass between V and W_E
};

struct RecoveryOutcome {
    TransmitPolicy policy;
    bool invoked = false;   // construction path was needed
    bool success = false;   // false: recovery_failure
    double objective_w = 0.0;
    std::string message;
    RecoveryWorkspace workspace;  // populated when invoked
};

// If the solved W is already (numerically) rank one, returns the policy
// with the beam vector extracted. Otherwise substitutes
//   W = f u u^H,  V = V* + sum_t pi_t gamma_t r_t r_t^H,
//   W_E = W_E* + sum_t (1 - pi_t) gamma_t r_t r_t^H
// with rho, delta, nu frozen, and solves the small convex program in
// (f, gamma). pi defaults to all ones (all null mass into the artificial
// noise). f <= 0 or an infeasible subproblem is reported as a failure.
RecoveryOutcome construct_rank_one(const SolveReport& report, const SdpProblem& problem,
                                   const std::vector<double>& pi = {});

struct RankAuditRow {
    std::uint64_t instance_id = 0;
    int w_rank = 0;
    bool prop1 = false;
    bool recovery_invoked = false;
    bool recovery_ok = true;
};

struct RankAuditSummary {
    std::vector<RankAuditRow> rows;
    int total = 0;
    int rank_one_before = 0;      // rank-one straight out of the solver
    int prop1_true = 0;
    int prop1_true_rank_one = 0;  // the implication direction that must hold
    int recovery_invoked = 0;
    int recovery_failures = 0;

    std::string to_csv() const;
};

RankAuditSummary rank_one_audit(const std::vector<RankAuditRow>& rows);

}  // namespace swiptsec
