#include "core/sdp_problem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace swiptsec {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::kOptimal: return "optimal";
        case Variant::kSuboptimal: return "suboptimal";
        case Variant::kBaseline1: return "baseline1";
        case Variant::kBaseline2: return "baseline2";
        case Variant::kBenchmarkKappa0: return "benchmark_kappa0";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "optimal") return Variant::kOptimal;
    if (name == "suboptimal") return Variant::kSuboptimal;
    if (name == "baseline1") return Variant::kBaseline1;
    if (name == "baseline2") return Variant::kBaseline2;
    if (name == "benchmark_kappa0") return Variant::kBenchmarkKappa0;
    throw std::invalid_argument("unknown scheme: " + name);
}

int herm_param_count(int n) { return n * n; }

CMat herm_from_params(const double* params, int n) {
    CMat x = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) x(i, i) = params[i];
    int idx = n;
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const Complex v(params[idx], params[idx + 1]);
            x(p, q) = v;
            x(q, p) = std::conj(v);
            idx += 2;
        }
    }
    return x;
}

void params_from_herm(const CMat& x, double* params) {
    const int n = static_cast<int>(x.rows());
    for (int i = 0; i < n; ++i) params[i] = std::real(x(i, i));
    int idx = n;
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            params[idx] = std::real(x(p, q));
            params[idx + 1] = std::imag(x(p, q));
            idx += 2;
        }
    }
}

CMat herm_basis(int n, int param) {
    CMat b = CMat::Zero(n, n);
    if (param < n) {
        b(param, param) = 1.0;
        return b;
    }
    int idx = n;
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            if (param == idx) {
                b(p, q) = 1.0;
                b(q, p) = 1.0;
                return b;
            }
            if (param == idx + 1) {
                b(p, q) = Complex(0.0, 1.0);
                b(q, p) = Complex(0.0, -1.0);
                return b;
            }
            idx += 2;
        }
    }
    throw std::out_of_range("herm_basis: parameter index out of range");
}

CMat ConstraintBlock::eval(const Eigen::VectorXd& x) const {
    CMat b = f0;
    for (const auto& [var, coeff] : coeffs) b += x(var) * coeff;
    return b;
}

namespace {

// Adds the coefficients of mult * A^H M A for matrix variable M starting
// at param offset `off`, where A has one row per matrix dimension.
// Row p of A enters as the column vector a_p = A.row(p)^H, giving
// A^H E_pq A = a_p a_q^H.
void add_congruence(ConstraintBlock& block, int off, const CMat& a, double mult) {
    if (off < 0) return;
    const int n = static_cast<int>(a.rows());
    std::vector<CVec> ap(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) ap[static_cast<std::size_t>(p)] = a.row(p).adjoint();
    for (int p = 0; p < n; ++p) {
        block.coeffs.emplace_back(
            off + p, CMat(mult * ap[static_cast<std::size_t>(p)] *
                          ap[static_cast<std::size_t>(p)].adjoint()));
    }
    int idx = n;
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const CMat cross = ap[static_cast<std::size_t>(p)] *
                               ap[static_cast<std::size_t>(q)].adjoint();
            block.coeffs.emplace_back(off + idx, CMat(mult * (cross + cross.adjoint())));
            block.coeffs.emplace_back(
                off + idx + 1,
                CMat(mult * (Complex(0, 1) * cross + (Complex(0, 1) * cross).adjoint())));
            idx += 2;
        }
    }
}

// Same congruence applied to a rank-one substitute M = y * P (scalar
// variable y, fixed Hermitian P): adds one coefficient mult * A^H P A.
void add_congruence_fixed(ConstraintBlock& block, int var, const CMat& a, const CMat& p,
                          double mult) {
    if (var < 0) return;
    block.coeffs.emplace_back(var, CMat(mult * a.adjoint() * p * a));
}

// Adds mult * Tr(H M) to a 1x1 block for matrix variable M at `off`.
void add_trace(ConstraintBlock& block, int off, const CMat& h, double mult) {
    if (off < 0) return;
    const int n = static_cast<int>(h.rows());
    for (int p = 0; p < n; ++p) {
        CMat c(1, 1);
        c(0, 0) = mult * std::real(h(p, p));
        block.coeffs.emplace_back(off + p, c);
    }
    int idx = n;
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            CMat cr(1, 1), ci(1, 1);
            cr(0, 0) = mult * 2.0 * std::real(h(p, q));
            ci(0, 0) = mult * 2.0 * std::imag(h(p, q));
            block.coeffs.emplace_back(off + idx, cr);
            block.coeffs.emplace_back(off + idx + 1, ci);
            idx += 2;
        }
    }
}

void add_scalar(ConstraintBlock& block, int var, double coeff) {
    if (var < 0) return;
    CMat c(1, 1);
    c(0, 0) = coeff;
    block.coeffs.emplace_back(var, c);
}

ConstraintBlock scalar_block(const std::string& tag, double f0, double dual_unit) {
    ConstraintBlock b;
    b.tag = tag;
    b.f0 = CMat::Constant(1, 1, Complex(f0, 0.0));
    b.dual_unit = RVec::Constant(1, dual_unit);
    return b;
}

// A = [I  g] of size n x (n+1): the congruence matrix of the S-procedure
// LMIs, applied as A^H M A.
CMat s_proc_map(const CVec& g) {
    const int n = static_cast<int>(g.size());
    CMat a(n, n + 1);
    a.leftCols(n) = CMat::Identity(n, n);
    a.col(n) = g;
    return a;
}

}  // namespace

ConstraintBlock build_c2_lmi(const CVec& g_hat, double epsilon, double gamma_tol_k,
                             double sigma_ant_sq, double sigma_s_sq,
                             const VarLayout& layout, int k) {
    if (!(gamma_tol_k > 0.0)) {
        throw std::invalid_argument("build_c2_lmi: gamma_tol_k must be positive");
    }
    if (epsilon < 0.0) throw std::invalid_argument("build_c2_lmi: epsilon >= 0");
    const int n = static_cast<int>(g_hat.size());
    ConstraintBlock b;
    b.tag = "C2_" + std::to_string(k);
    b.f0 = CMat::Zero(n + 1, n + 1);
    b.f0(n, n) = sigma_ant_sq + sigma_s_sq;

    const CMat u = s_proc_map(g_hat);
    // delta_k * diag(I, -eps^2)
    if (layout.delta_off >= 0) {
        CMat d = CMat::Identity(n + 1, n + 1);
        d(n, n) = -epsilon * epsilon;
        b.coeffs.emplace_back(layout.delta_off + k, d);
    }
    add_congruence(b, layout.v_off, u, 1.0);                    // U^H V U
    add_congruence(b, layout.w_off, u, -1.0 / gamma_tol_k);     // -(1/Gamma) U^H W U
    return b;
}

ConstraintBlock build_c5_lmi(const CVec& g_hat, double epsilon, double p_min_idle,
                             double sigma_ant_sq, double eta, const VarLayout& layout,
                             int k, bool include_w) {
    if (epsilon < 0.0) throw std::invalid_argument("build_c5_lmi: epsilon >= 0");
    if (p_min_idle < 0.0) throw std::invalid_argument("build_c5_lmi: p_min_idle >= 0");
    const int n = static_cast<int>(g_hat.size());
    ConstraintBlock b;
    b.tag = (include_w ? "C5_" : "C5bar_") + std::to_string(k);
    b.f0 = CMat::Zero(n + 1, n + 1);
    b.f0(n, n) = sigma_ant_sq - p_min_idle / eta;

    const CMat u = s_proc_map(g_hat);
    if (layout.nu_off >= 0) {
        CMat d = CMat::Identity(n + 1, n + 1);
        d(n, n) = -epsilon * epsilon;
        b.coeffs.emplace_back(layout.nu_off + k, d);
    }
    add_congruence(b, layout.v_off, u, 1.0);
    if (layout.we_off >= 0) {
        add_congruence(b, layout.we_off, u, 1.0);
    } else if (layout.pe_idx >= 0) {
        add_congruence_fixed(b, layout.pe_idx, u,
                             CMat::Identity(n, n) / static_cast<double>(n), 1.0);
    }
    if (include_w) {
        if (layout.w_off >= 0) add_congruence(b, layout.w_off, u, 1.0);
        // baseline 2: W = p_w * P_mrt handled by the caller via the
        // fixed-direction coefficient.
    }
    return b;
}

ConstraintBlock build_c3bar(const ChanceBound& bound, double gamma_tol,
                            double sigma_tilde_sq, const VarLayout& layout) {
    if (bound.dropped) {
        throw std::invalid_argument("build_c3bar: bound marked dropped (kappa = 0)");
    }
    const int n = layout.n_t;
    ConstraintBlock b;
    b.tag = "C3bar";
    const double rhs = bound.quantile_coeff * gamma_tol * sigma_tilde_sq;
    b.f0 = rhs * CMat::Identity(n, n);
    const CMat eye = CMat::Identity(n, n);
    add_congruence(b, layout.w_off, eye, -1.0);
    add_congruence(b, layout.v_off, eye, gamma_tol);
    if (layout.we_off >= 0) {
        add_congruence(b, layout.we_off, eye, gamma_tol);
    } else if (layout.pe_idx >= 0) {
        add_congruence_fixed(b, layout.pe_idx, eye, eye / static_cast<double>(n), gamma_tol);
    }
    return b;
}

namespace {

VarLayout make_layout(const AssembleOptions& options, const SystemConfig& config) {
    VarLayout l;
    l.n_t = config.n_t;
    l.k_idle = config.idle_count();
    l.variant = options.variant;
    l.fixed_rho = options.fixed_rho;

    const bool w_mat = options.variant != Variant::kBaseline2;
    const bool we_mat = options.variant == Variant::kOptimal ||
                        options.variant == Variant::kSuboptimal ||
                        options.variant == Variant::kBenchmarkKappa0;
    int pos = 0;
    if (w_mat) {
        l.w_off = pos;
        pos += l.mat_params();
    }
    l.v_off = pos;
    pos += l.mat_params();
    if (we_mat) {
        l.we_off = pos;
        pos += l.mat_params();
    }
    if (!w_mat) l.pw_idx = pos++;
    if (!we_mat) l.pe_idx = pos++;
    if (!options.fixed_rho) {
        l.rho_idx = pos++;
        l.s_idx = pos++;
        l.t_idx = pos++;
    }
    if (l.k_idle > 0) {
        l.delta_off = pos;
        pos += l.k_idle;
        l.nu_off = pos;
        pos += l.k_idle;
    }
    l.total = pos;
    return l;
}

}  // namespace

SdpProblem assemble(const AssembleOptions& options, const ChannelSet& channels,
                    const SystemConfig& config) {
    config.validate();
    if (channels.n_t() != config.n_t) {
        throw std::invalid_argument("assemble: channel/config dimension mismatch");
    }
    if (static_cast<int>(channels.g_hat.size()) != config.idle_count()) {
        throw std::invalid_argument("assemble: channel/config idle count mismatch");
    }
    if (options.fixed_rho) {
        const double r = *options.fixed_rho;
        if (!(r > 0.0) || r > 1.0 || (config.p_min_desired_w > 0.0 && r >= 1.0)) {
            throw std::invalid_argument("assemble: fixed rho outside its domain");
        }
    }

    SdpProblem prob;
    prob.layout = make_layout(options, config);
    prob.config = config;
    prob.channels = channels;

    // Solver units: gain q makes channel vectors O(1), power p makes the
    // dominant noise corner exactly 1. q is the geometric mean of the
    // per-antenna channel powers actually present in the instance.
    double log_acc = 0.0;
    int log_n = 0;
    const double h_pow = channels.h.squaredNorm() / config.n_t;
    if (h_pow > 0.0) {
        log_acc += std::log(h_pow);
        ++log_n;
    }
    for (const auto& g : channels.g_hat) {
        const double g_pow = g.squaredNorm() / config.n_t;
        if (g_pow > 0.0) {
            log_acc += std::log(g_pow);
            ++log_n;
        }
    }
    const double q = log_n > 0 ? std::exp(log_acc / log_n)
                               : channels.l_up_scale / config.n_t;
    // Power unit: aim the solution magnitude at O(10). The QoS floors
    // give a computable lower-bound scale for the objective; the noise
    // floor keeps degenerate configurations sane.
    double est_obj = 0.0;
    if (channels.h.squaredNorm() > 0.0) {
        est_obj += config.gamma_req * (config.sigma_ant_sq_w + config.sigma_s_sq_w) /
                   channels.h.squaredNorm();
        est_obj += config.p_min_desired_w / (config.eta * channels.h.squaredNorm());
    }
    for (int k = 0; k < config.idle_count(); ++k) {
        const double gn = channels.g_hat[static_cast<std::size_t>(k)].squaredNorm();
        if (gn > 0.0) est_obj += config.p_min_idle_for(k) / (config.eta * gn);
    }
    const double p_noise = config.sigma_s_sq_w > 0.0 ? config.sigma_s_sq_w / q : 1.0 / q;
    const double p = std::max(p_noise, est_obj / 10.0);
    prob.gain_scale = q;
    prob.power_scale = p;

    const int n = config.n_t;
    const int k_idle = config.idle_count();
    const double rq = std::sqrt(q);
    const CVec h_s = channels.h / rq;
    const double sig_a = config.sigma_ant_sq_w / (p * q);
    const double sig_s = config.sigma_s_sq_w / (p * q);
    const double p_min = config.p_min_desired_w / (p * q);
    const CMat h_outer = h_s * h_s.adjoint();
    const CMat mrt = h_outer / h_s.squaredNorm();  // scale-free direction

    const VarLayout& l = prob.layout;
    const double sp = std::sqrt(p);
    const double spq = std::sqrt(p * q);

    // Objective: Tr(W) + Tr(V) + Tr(W_E) in solver power units.
    prob.c = Eigen::VectorXd::Zero(l.total);
    auto add_trace_objective = [&](int off) {
        if (off < 0) return;
        for (int i = 0; i < n; ++i) prob.c(off + i) = 1.0;
    };
    add_trace_objective(l.w_off);
    add_trace_objective(l.v_off);
    add_trace_objective(l.we_off);
    if (l.pw_idx >= 0) prob.c(l.pw_idx) = 1.0;
    if (l.pe_idx >= 0) prob.c(l.pe_idx) = 1.0;

    prob.var_scale = RVec::Constant(l.total, p);
    if (l.rho_idx >= 0) prob.var_scale(l.rho_idx) = 1.0;
    if (l.s_idx >= 0) prob.var_scale(l.s_idx) = p * q;
    if (l.t_idx >= 0) prob.var_scale(l.t_idx) = p * q;

    auto mat_dual_unit = [&](int dim) { return RVec::Constant(dim, sp); };
    auto sproc_dual_unit = [&]() {
        RVec d = RVec::Constant(n + 1, sp);
        d(n) = spq;
        return d;
    };

    // C1: Tr(HW) - Gamma_req sigma_ant^2 - Gamma_req Tr(HV) - s >= 0.
    {
        ConstraintBlock b = scalar_block("C1", -config.gamma_req * sig_a, spq);
        add_trace(b, l.w_off, h_outer, 1.0);
        add_congruence_fixed(b, l.pw_idx, CMat(h_s), mrt, 1.0);
        add_trace(b, l.v_off, h_outer, -config.gamma_req);
        if (l.s_idx >= 0) {
            add_scalar(b, l.s_idx, -1.0);
        } else {
            b.f0(0, 0) -= config.gamma_req * sig_s / *options.fixed_rho;
        }
        prob.blocks.push_back(std::move(b));
    }

    // C2 LMIs.
    for (int k = 0; k < k_idle; ++k) {
        const CVec g = channels.g_hat[static_cast<std::size_t>(k)] / rq;
        const double eps = channels.epsilon[static_cast<std::size_t>(k)] / rq;
        ConstraintBlock b =
            build_c2_lmi(g, eps, config.gamma_tol_for(k), sig_a, sig_s, l, k);
        if (l.pw_idx >= 0) {
            add_congruence_fixed(b, l.pw_idx, s_proc_map(g), mrt,
                                 -1.0 / config.gamma_tol_for(k));
        }
        b.dual_unit = sproc_dual_unit();
        prob.blocks.push_back(std::move(b));
    }

    // Chance-constraint replacement (dropped for kappa = 0 and for the
    // benchmark variant).
    if (options.variant != Variant::kBenchmarkKappa0 && config.kappa > 0.0 &&
        config.j_eaves > 0) {
        const ChanceBound bound = chance_quantile(n, config.kappa, config.j_eaves);
        ConstraintBlock b =
            build_c3bar(bound, config.gamma_tol, channels.sigma_tilde_sq / p, l);
        if (l.pw_idx >= 0) {
            add_congruence_fixed(b, l.pw_idx, CMat::Identity(n, n), mrt, -1.0);
        }
        b.dual_unit = mat_dual_unit(n);
        prob.blocks.push_back(std::move(b));
    }

    // C4: Tr(HW) + Tr(HV) + Tr(HW_E) + sigma_ant^2 - t >= 0.
    {
        ConstraintBlock b = scalar_block("C4", sig_a, spq);
        add_trace(b, l.w_off, h_outer, 1.0);
        add_congruence_fixed(b, l.pw_idx, CMat(h_s), mrt, 1.0);
        add_trace(b, l.v_off, h_outer, 1.0);
        add_trace(b, l.we_off, h_outer, 1.0);
        if (l.pe_idx >= 0) {
            add_scalar(b, l.pe_idx, h_s.squaredNorm() / static_cast<double>(n));
        }
        if (l.t_idx >= 0) {
            add_scalar(b, l.t_idx, -1.0);
        } else if (p_min > 0.0) {
            b.f0(0, 0) -= p_min / ((1.0 - *options.fixed_rho) * config.eta);
        }
        prob.blocks.push_back(std::move(b));
    }

    // C5 LMIs (W-free strengthening for the suboptimal variant).
    for (int k = 0; k < k_idle; ++k) {
        const CVec g = channels.g_hat[static_cast<std::size_t>(k)] / rq;
        const double eps = channels.epsilon[static_cast<std::size_t>(k)] / rq;
        const bool include_w = options.variant != Variant::kSuboptimal;
        ConstraintBlock b = build_c5_lmi(g, eps, config.p_min_idle_for(k) / (p * q),
                                         sig_a, config.eta, l, k, include_w);
        if (include_w && l.pw_idx >= 0) {
            add_congruence_fixed(b, l.pw_idx, s_proc_map(g), mrt, 1.0);
        }
        b.dual_unit = sproc_dual_unit();
        prob.blocks.push_back(std::move(b));
    }

    // C6: per-antenna power caps.
    for (int an = 0; an < n; ++an) {
        ConstraintBlock b =
            scalar_block("C6_" + std::to_string(an), config.p_max_for(an) / p, sp);
        CMat psi = CMat::Zero(n, n);
        psi(an, an) = 1.0;
        add_trace(b, l.w_off, psi, -1.0);
        add_trace(b, l.v_off, psi, -1.0);
        add_trace(b, l.we_off, psi, -1.0);
        if (l.pw_idx >= 0) add_scalar(b, l.pw_idx, -std::real(mrt(an, an)));
        if (l.pe_idx >= 0) add_scalar(b, l.pe_idx, -1.0 / static_cast<double>(n));
        prob.blocks.push_back(std::move(b));
    }

    // C7 bounds for rho; the domain is clipped away from the endpoints
    // where the Schur auxiliaries would blow up.
    if (l.rho_idx >= 0) {
        const double lo = 1e-6;
        const double hi = config.p_min_desired_w > 0.0 ? 1.0 - 1e-6 : 1.0;
        ConstraintBlock blo = scalar_block("C7_lo", -lo, 1.0);
        add_scalar(blo, l.rho_idx, 1.0);
        prob.blocks.push_back(std::move(blo));
        ConstraintBlock bhi = scalar_block("C7_hi", hi, 1.0);
        add_scalar(bhi, l.rho_idx, -1.0);
        prob.blocks.push_back(std::move(bhi));
    }

    // C8 PSD cones.
    auto add_psd = [&](const char* tag, int off) {
        if (off < 0) return;
        ConstraintBlock b;
        b.tag = tag;
        b.f0 = CMat::Zero(n, n);
        add_congruence(b, off, CMat::Identity(n, n), 1.0);
        b.dual_unit = mat_dual_unit(n);
        prob.blocks.push_back(std::move(b));
    };
    add_psd("C8_W", l.w_off);
    add_psd("C8_V", l.v_off);
    add_psd("C8_WE", l.we_off);
    if (l.pw_idx >= 0) {
        ConstraintBlock b = scalar_block("AUX_pw", 0.0, sp);
        add_scalar(b, l.pw_idx, 1.0);
        prob.blocks.push_back(std::move(b));
    }
    if (l.pe_idx >= 0) {
        ConstraintBlock b = scalar_block("AUX_pe", 0.0, sp);
        add_scalar(b, l.pe_idx, 1.0);
        prob.blocks.push_back(std::move(b));
    }

    // C10: S-procedure multipliers stay nonnegative.
    for (int k = 0; k < k_idle; ++k) {
        ConstraintBlock bd = scalar_block("C10_delta_" + std::to_string(k), 0.0, sp);
        add_scalar(bd, l.delta_off + k, 1.0);
        prob.blocks.push_back(std::move(bd));
        ConstraintBlock bn = scalar_block("C10_nu_" + std::to_string(k), 0.0, sp);
        add_scalar(bn, l.nu_off + k, 1.0);
        prob.blocks.push_back(std::move(bn));
    }

    // Schur blocks tying s and t to the hyperbolic rho terms:
    // [[s, a],[a, rho]] >= 0 <=> s rho >= a^2 = Gamma_req sigma_s^2, and
    // [[t, b],[b, 1-rho]] >= 0 <=> t (1-rho) >= b^2 = P_min / eta.
    if (l.rho_idx >= 0) {
        {
            ConstraintBlock b;
            b.tag = "AUX_s";
            b.f0 = CMat::Zero(2, 2);
            const double a = std::sqrt(config.gamma_req * sig_s);
            b.f0(0, 1) = a;
            b.f0(1, 0) = a;
            CMat es = CMat::Zero(2, 2);
            es(0, 0) = 1.0;
            b.coeffs.emplace_back(l.s_idx, es);
            CMat er = CMat::Zero(2, 2);
            er(1, 1) = 1.0;
            b.coeffs.emplace_back(l.rho_idx, er);
            b.dual_unit = RVec::Constant(2, 1.0);
            b.dual_unit(0) = spq;
            prob.blocks.push_back(std::move(b));
        }
        {
            ConstraintBlock b;
            b.tag = "AUX_t";
            b.f0 = CMat::Zero(2, 2);
            const double bb = std::sqrt(p_min / config.eta);
            b.f0(0, 1) = bb;
            b.f0(1, 0) = bb;
            b.f0(1, 1) = 1.0;
            CMat et = CMat::Zero(2, 2);
            et(0, 0) = 1.0;
            b.coeffs.emplace_back(l.t_idx, et);
            CMat er = CMat::Zero(2, 2);
            er(1, 1) = -1.0;
            b.coeffs.emplace_back(l.rho_idx, er);
            b.dual_unit = RVec::Constant(2, 1.0);
            b.dual_unit(0) = spq;
            prob.blocks.push_back(std::move(b));
        }
    }

    // Default dual units for the scalar blocks built via scalar_block are
    // already set; the matrix blocks were set at construction.
    for (auto& b : prob.blocks) {
        if (b.dual_unit.size() != b.dim()) {
            throw std::logic_error("assemble: missing dual unit on block " + b.tag);
        }
    }
    return prob;
}

SdpProblem substitute(const SdpProblem& src, const Eigen::VectorXd& x0,
                      const Eigen::MatrixXd& basis, const RVec& new_var_scale) {
    if (x0.size() != src.c.size() || basis.rows() != src.c.size() ||
        new_var_scale.size() != basis.cols()) {
        throw std::invalid_argument("substitute: dimension mismatch");
    }
    SdpProblem out;
    out.layout = src.layout;
    out.layout.w_off = out.layout.v_off = out.layout.we_off = -1;
    out.layout.pw_idx = out.layout.pe_idx = -1;
    out.layout.rho_idx = out.layout.s_idx = out.layout.t_idx = -1;
    out.layout.delta_off = out.layout.nu_off = -1;
    out.layout.total = static_cast<int>(basis.cols());
    out.power_scale = src.power_scale;
    out.gain_scale = src.gain_scale;
    out.config = src.config;
    out.channels = src.channels;
    out.var_scale = new_var_scale;
    out.c = basis.transpose() * src.c;
    out.c_const = src.c_const + src.c.dot(x0);

    for (const auto& b : src.blocks) {
        ConstraintBlock nb;
        nb.tag = b.tag;
        nb.f0 = b.eval(x0);
        nb.dual_unit = b.dual_unit;
        for (int j = 0; j < basis.cols(); ++j) {
            CMat coeff = CMat::Zero(b.dim(), b.dim());
            bool nonzero = false;
            for (const auto& [var, c] : b.coeffs) {
                const double w = basis(var, j);
                if (w != 0.0) {
                    coeff += w * c;
                    nonzero = true;
                }
            }
            if (nonzero) nb.coeffs.emplace_back(j, std::move(coeff));
        }
        out.blocks.push_back(std::move(nb));
    }
    return out;
}

double affinity_residual(const SdpProblem& problem, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, double alpha) {
    double worst = 0.0;
    const Eigen::VectorXd mid = alpha * x + (1.0 - alpha) * y;
    for (const auto& b : problem.blocks) {
        const CMat lhs = b.eval(mid);
        const CMat rhs = alpha * b.eval(x) + (1.0 - alpha) * b.eval(y);
        const double scale = std::max({1.0, lhs.cwiseAbs().maxCoeff(),
                                       b.eval(x).cwiseAbs().maxCoeff(),
                                       b.eval(y).cwiseAbs().maxCoeff()});
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

std::string SdpProblem::debug_dump() const {
    std::ostringstream os;
    os << "variant=" << variant_name(layout.variant) << " n_t=" << layout.n_t
       << " k_idle=" << layout.k_idle << " vars=" << layout.total;
    if (layout.fixed_rho) os << " fixed_rho=" << *layout.fixed_rho;
    os << "\n";
    os << "offsets: w=" << layout.w_off << " v=" << layout.v_off
       << " we=" << layout.we_off << " pw=" << layout.pw_idx << " pe=" << layout.pe_idx
       << " rho=" << layout.rho_idx << " s=" << layout.s_idx << " t=" << layout.t_idx
       << " delta=" << layout.delta_off << " nu=" << layout.nu_off << "\n";
    for (const auto& b : blocks) {
        os << b.tag << " dim=" << b.dim() << " nnz_vars=" << b.coeffs.size() << "\n";
    }
    return os.str();
}

}  // namespace swiptsec
