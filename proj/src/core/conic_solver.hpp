#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/sdp_problem.hpp"
#include "core/system_model.hpp"

// Primal-dual interior-point solve of an SdpProblem. Complex Hermitian
// blocks are lowered to real symmetric blocks through the exact
// [[Re, -Im], [Im, Re]] embedding; the block duals are lifted back and
// rescaled to physical units, so they satisfy the complex KKT system of
// the original formulation.

namespace swiptsec {

enum class SolveStatus { kOptimal, kInfeasible, kNumericalFailure };

const char* status_name(SolveStatus s);

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 200;
    bool verbose = false;  // per-iteration trace on stderr
    // Keep iterating past the tolerance while the metrics still improve
    // and return the best iterate; sharpens complementarity products at
    // the cost of extra iterations.
    bool polish = false;
    // Optional warm data: the solve re-centers from this point instead of
    // the default cold start.
    std::vector<double> warm_x;
};

// Lagrange multipliers of the tagged blocks, in physical units.
struct DualCertificate {
    CMat y_mat;               // W >= 0
    std::vector<CMat> d_c2;   // C2_k, dim N_T+1
    CMat d_c3bar;             // chance-bound block (empty when absent)
    std::vector<CMat> d_c5;   // C5_k (zero matrices for the W-free variant)
    double mu = 0.0;          // C4
    double beta = 0.0;        // C1
    std::vector<double> theta;  // C6_n
};

struct SolveReport {
    SolveStatus status = SolveStatus::kNumericalFailure;
    double objective_w = 0.0;  // physical Watts
    TransmitPolicy policy;
    DualCertificate duals;
    std::map<std::string, double> kkt_residuals;
    int w_rank = 0;
    int iterations = 0;
    double wall_time_s = 0.0;
    double rel_gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    std::string message;

    // Solver-unit solution kept for the recovery subproblem.
    Eigen::VectorXd x_scaled;
    std::vector<CMat> block_duals_phys;   // per block, physical units
    std::vector<std::string> block_tags;

    const CMat* dual_for(const std::string& tag) const;
};

SolveReport solve(const SdpProblem& problem, const SolverOptions& options = {});

// Maps a solver-unit variable vector back to a physical-unit policy
// according to the problem layout.
TransmitPolicy policy_from_solution(const SdpProblem& problem, const Eigen::VectorXd& x);

// Rebuilds the stationarity matrix for the beamforming covariance from
// the dual certificate: I + D_c3bar + sum_n theta_n Psi_n
// + sum_k U_k (D_c2k / Gamma_tol_k - D_c5k) U_k^H, in physical units.
CMat build_b_star(const SdpProblem& problem, const DualCertificate& duals);

// Independent KKT audit: stationarity of the W block against
// Y* + (mu* + beta*) H, complementary slackness ||Y* W*||, the closed-form
// power-splitting identity, and the raw dual-feasibility residual.
std::map<std::string, double> verify_kkt(const SdpProblem& problem,
                                         const SolveReport& report);

}  // namespace swiptsec
