#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/chance.hpp"
#include "core/channel.hpp"
#include "core/config.hpp"
#include "core/hermitian.hpp"

// Assembles the relaxed power-minimization problems as block-structured
// SDP data over a real scalarization of the decision variables
// (W, V, W_E, rho, delta_k, nu_k plus Schur auxiliaries s, t).
//
// Everything is assembled in solver units: powers divided by power_scale,
// channel vectors by sqrt(gain_scale). The two factors are chosen per
// problem so that noise corners, channel norms and covariance entries all
// land within a few orders of magnitude of 1. Solutions and duals are
// mapped back to Watts by the solver adapter using the per-variable and
// per-block records kept here.

namespace swiptsec {

enum class Variant {
    kOptimal,         // relaxed problem: C1..C8, C10, chance bound
    kSuboptimal,      // C5 replaced by its W-free strengthening
    kBaseline1,       // isotropic energy covariance W_E = (p_E/N_T) I
    kBaseline2,       // baseline 1 plus MRT information beam W = p_w hh^H/||h||^2
    kBenchmarkKappa0  // optimal with the chance constraint removed
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Hermitian matrix <-> real parameter vector (n diagonal entries, then
// re/im pairs over the upper triangle in row-major order).
int herm_param_count(int n);
CMat herm_from_params(const double* params, int n);
void params_from_herm(const CMat& x, double* params);
CMat herm_basis(int n, int param);

struct VarLayout {
    int n_t = 0;
    int k_idle = 0;
    Variant variant = Variant::kOptimal;
    std::optional<double> fixed_rho;

    int w_off = -1;      // matrix params (n_t^2 each), -1 when scalarized away
    int v_off = -1;
    int we_off = -1;
    int pw_idx = -1;     // baseline 2 information power
    int pe_idx = -1;     // baseline 1/2 energy power
    int rho_idx = -1;
    int s_idx = -1;      // Schur auxiliary for sigma_s^2 / rho
    int t_idx = -1;      // Schur auxiliary for P_min / ((1-rho) eta)
    int delta_off = -1;  // k_idle entries
    int nu_off = -1;
    int total = 0;

    int mat_params() const { return n_t * n_t; }
};

// One PSD constraint: f0 + sum_i x_i coeff_i >= 0 (Hermitian affine).
struct ConstraintBlock {
    std::string tag;
    CMat f0;
    std::vector<std::pair<int, CMat>> coeffs;
    // Physical block = diag(dual_unit) * scaled block * diag(dual_unit)
    // divided by power_scale; used to lift duals back to Watts.
    RVec dual_unit;

    int dim() const { return static_cast<int>(f0.rows()); }
    CMat eval(const Eigen::VectorXd& x) const;
};

struct SdpProblem {
    VarLayout layout;
    Eigen::VectorXd c;       // objective, linear in the scaled variables
    double c_const = 0.0;    // constant offset (restricted subproblems)
    std::vector<ConstraintBlock> blocks;

    double power_scale = 1.0;  // physical Watts per solver power unit
    double gain_scale = 1.0;   // physical gain per solver gain unit
    RVec var_scale;            // physical value = var_scale[i] * x[i]

    SystemConfig config;       // physical units, kept for reporting
    ChannelSet channels;       // physical units

    // Plain-text regression dump: variables, block dims and tags.
    std::string debug_dump() const;
};

struct AssembleOptions {
    Variant variant = Variant::kOptimal;
    std::optional<double> fixed_rho;  // used by the rho-grid oracle
};

// Individual builders, exposed for direct testing. All inputs already in
// solver units; offsets taken from the layout (pass -1 vars to drop).
ConstraintBlock build_c2_lmi(const CVec& g_hat, double epsilon, double gamma_tol_k,
                             double sigma_ant_sq, double sigma_s_sq,
                             const VarLayout& layout, int k);
ConstraintBlock build_c5_lmi(const CVec& g_hat, double epsilon, double p_min_idle,
                             double sigma_ant_sq, double eta, const VarLayout& layout,
                             int k, bool include_w);
ConstraintBlock build_c3bar(const ChanceBound& bound, double gamma_tol,
                            double sigma_tilde_sq, const VarLayout& layout);

// The full problem for one channel realization.
SdpProblem assemble(const AssembleOptions& options, const ChannelSet& channels,
                    const SystemConfig& config);

// Affine change of variables x = x0 + basis * y, used by the rank-one
// recovery subproblem. Block tags, scales and dual units carry over.
SdpProblem substitute(const SdpProblem& src, const Eigen::VectorXd& x0,
                      const Eigen::MatrixXd& basis, const RVec& new_var_scale);

// Exact two-point affinity probe (returns the largest deviation from
// B(a x + (1-a) y) = a B(x) + (1-a) B(y) over all blocks).
double affinity_residual(const SdpProblem& problem, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, double alpha);

}  // namespace swiptsec
