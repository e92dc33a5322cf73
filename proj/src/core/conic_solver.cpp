#include "core/conic_solver.hpp"

#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swiptsec {

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kInfeasible: return "infeasible";
        case SolveStatus::kNumericalFailure: return "numerical_failure";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ----------------------------------------------------------------------
// Real symmetric lowering.
//
// A complex Hermitian block of dimension d becomes the 2d x 2d symmetric
// block [[Re, -Im], [Im, Re]]; PSD-ness is preserved exactly in both
// directions. Blocks that are already real (1x1 bounds, the 2x2 Schur
// blocks) are kept at their native dimension. For an embedded block the
// real dual X lifts to the complex dual 2 * (P + iQ) with
// P = (X11 + X22)/2 and Q = (X21 - X12)/2; the factor 2 compensates
// <embed(A), X>_real = 2 Tr(A lift(X)) so the lifted duals satisfy the
// complex KKT equations in their natural form.
// ----------------------------------------------------------------------

struct RealBlock {
    int cdim = 0;   // complex dimension of the source block
    int dim = 0;    // real dimension (2*cdim when embedded)
    bool embedded = false;
    RMat f0;
    std::vector<std::pair<int, RMat>> coeffs;
};

struct RealSdp {
    int m = 0;
    Eigen::VectorXd c;
    std::vector<RealBlock> blocks;
};

RMat embed(const CMat& a) {
    const Eigen::Index n = a.rows();
    RMat r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = a.real();
    r.topRightCorner(n, n) = -a.imag();
    r.bottomLeftCorner(n, n) = a.imag();
    r.bottomRightCorner(n, n) = a.real();
    return r;
}

bool block_is_real(const ConstraintBlock& b) {
    double scale = 1.0 + b.f0.real().cwiseAbs().maxCoeff();
    double imag = b.f0.imag().cwiseAbs().maxCoeff();
    for (const auto& [var, c] : b.coeffs) {
        scale = std::max(scale, c.real().cwiseAbs().maxCoeff());
        imag = std::max(imag, c.imag().cwiseAbs().maxCoeff());
    }
    return imag <= 1e-14 * scale;
}

RealSdp lower(const SdpProblem& p) {
    RealSdp r;
    r.m = static_cast<int>(p.c.size());
    r.c = p.c;
    r.blocks.reserve(p.blocks.size());
    for (const auto& b : p.blocks) {
        RealBlock rb;
        rb.cdim = b.dim();
        rb.embedded = !block_is_real(b);
        rb.dim = rb.embedded ? 2 * rb.cdim : rb.cdim;
        rb.f0 = rb.embedded ? embed(b.f0) : RMat(b.f0.real());
        rb.coeffs.reserve(b.coeffs.size());
        for (const auto& [var, c] : b.coeffs) {
            rb.coeffs.emplace_back(var, rb.embedded ? embed(c) : RMat(c.real()));
        }
        r.blocks.push_back(std::move(rb));
    }
    return r;
}

CMat lift(const RealBlock& rb, const RMat& x, double factor) {
    if (!rb.embedded) return factor * x.cast<Complex>();
    const int n = rb.cdim;
    const RMat p = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
    const RMat q = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
    CMat out(n, n);
    out.real() = factor * p;
    out.imag() = factor * q;
    return out;
}

// ----------------------------------------------------------------------
// HKM predictor-corrector interior point method on the LMI form
//   min c^T x  s.t.  S = F0 + sum_i x_i F_i >= 0
// with block-diagonal S and multiplier X. Infeasible start: S is an
// independent iterate pulled onto F(x) through the primal residual.
// ----------------------------------------------------------------------

struct IpmResult {
    SolveStatus status = SolveStatus::kNumericalFailure;
    Eigen::VectorXd x;
    std::vector<RMat> dual_x;
    std::vector<RMat> slack_s;
    int iterations = 0;
    double rel_gap = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    std::string message;
};

double sym_inner(const RMat& a, const RMat& b) { return (a.cwiseProduct(b)).sum(); }

RMat block_value(const RealBlock& rb, const Eigen::VectorXd& x) {
    RMat v = rb.f0;
    for (const auto& [var, f] : rb.coeffs) v += x(var) * f;
    return v;
}

// Largest alpha with S + alpha dS > 0 (up to a tiny slack), via the
// Cholesky-whitened eigenvalue bound.
double max_step(const RMat& s, const RMat& ds) {
    Eigen::LLT<RMat> llt(s);
    if (llt.info() != Eigen::Success) return 0.0;
    const RMat a = llt.matrixL().solve(ds);
    RMat t = llt.matrixL().solve(a.transpose());
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(t, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-13) return kInf;
    return -1.0 / lmin;
}

IpmResult run_ipm(const RealSdp& sdp, const SolverOptions& opt) {
    const int m = sdp.m;
    const std::size_t nb = sdp.blocks.size();
    IpmResult res;

    double total_dim = 0.0;
    for (const auto& b : sdp.blocks) total_dim += b.dim;
    const double cmax = std::max(1.0, sdp.c.cwiseAbs().maxCoeff());

    // Iterates.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    std::vector<RMat> s(nb), xm(nb);
    double init_xnorm = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const auto& rb = sdp.blocks[b];
        double fmax = rb.f0.cwiseAbs().maxCoeff();
        for (const auto& [var, f] : rb.coeffs) fmax = std::max(fmax, f.cwiseAbs().maxCoeff());
        s[b] = std::max(10.0, 2.0 * fmax) * RMat::Identity(rb.dim, rb.dim);
        xm[b] = std::max(10.0, cmax) * RMat::Identity(rb.dim, rb.dim);
        init_xnorm += xm[b].squaredNorm();
    }
    init_xnorm = std::sqrt(init_xnorm);

    if (!opt.warm_x.empty()) {
        if (static_cast<int>(opt.warm_x.size()) != m) {
            throw std::invalid_argument("solve: warm start dimension mismatch");
        }
        for (int i = 0; i < m; ++i) x(i) = opt.warm_x[static_cast<std::size_t>(i)];
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& rb = sdp.blocks[b];
            RMat v = block_value(rb, x);
            v = 0.5 * (v + v.transpose());
            Eigen::SelfAdjointEigenSolver<RMat> es(v, Eigen::EigenvaluesOnly);
            const double floor_s = std::max(1e-3, 1e-3 * v.cwiseAbs().maxCoeff());
            const double lmin = es.eigenvalues().minCoeff();
            s[b] = v + std::max(0.0, floor_s - lmin) * RMat::Identity(rb.dim, rb.dim);
        }
    }

    // Frobenius norms of the coefficient matrices; residual rows are
    // judged relative to the magnitude of the terms that cancel in them.
    std::vector<std::vector<double>> fnorm(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        for (const auto& [var, f] : sdp.blocks[b].coeffs) {
            fnorm[b].push_back(f.norm());
        }
    }

    std::vector<RMat> sinv(nb), rp(nb), dxa(nb), dsa(nb), dxm(nb), ds(nb);
    Eigen::VectorXd rd(m), tr_f_sinv(m), h(m), h_rp(m), dx(m), row_scale(m);
    RMat schur(m, m);

    // Iterations past the tolerance can degrade again once the Schur
    // system conditioning hits the double-precision floor; keep the best
    // iterate seen and fall back to it.
    double best_metric = kInf;
    int best_iter = 0;
    Eigen::VectorXd best_x;
    std::vector<RMat> best_xm, best_s;
    double best_gap = kInf, best_pres = kInf, best_dres = kInf;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iterations = iter;

        // Residuals and gap.
        double pres = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            rp[b] = block_value(sdp.blocks[b], x) - s[b];
            pres = std::max(pres, rp[b].cwiseAbs().maxCoeff() /
                                      (1.0 + sdp.blocks[b].f0.cwiseAbs().maxCoeff() +
                                       s[b].cwiseAbs().maxCoeff()));
        }
        rd = sdp.c;
        row_scale.setConstant(1.0);
        row_scale += sdp.c.cwiseAbs();
        double dobj = 0.0;
        double mu = 0.0;
        double xnorm = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& rb = sdp.blocks[b];
            const double xnb = xm[b].norm();
            std::size_t ci = 0;
            for (const auto& [var, f] : rb.coeffs) {
                rd(var) -= sym_inner(f, xm[b]);
                row_scale(var) += fnorm[b][ci++] * xnb;
            }
            dobj -= sym_inner(rb.f0, xm[b]);
            mu += sym_inner(xm[b], s[b]);
            xnorm += xm[b].squaredNorm();
        }
        mu /= total_dim;
        xnorm = std::sqrt(xnorm);
        const double pobj = sdp.c.dot(x);
        const double dres = (rd.cwiseAbs().cwiseQuotient(row_scale)).maxCoeff();
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        res.rel_gap = gap;
        res.primal_res = pres;
        res.dual_res = dres;

        if (opt.verbose) {
            int worst = 0;
            rd.cwiseAbs().maxCoeff(&worst);
            std::fprintf(stderr,
                         "ipm %3d mu=%9.2e pres=%9.2e dres=%9.2e gap=%9.2e "
                         "pobj=%+12.5e dobj=%+12.5e |X|=%9.2e rdarg=%d\n",
                         iter, mu, pres, dres, gap, pobj, dobj, xnorm, worst);
        }

        if (!opt.polish && pres <= opt.tol && dres <= opt.tol && gap <= opt.tol) {
            res.status = SolveStatus::kOptimal;
            res.x = x;
            res.dual_x = xm;
            res.slack_s = s;
            return res;
        }

        // Track the best iterate; stop when the worst metric has not made
        // real progress for a while.
        const double metric = std::max({pres, dres, gap});
        if (metric < best_metric) {
            if (metric < 0.8 * best_metric) best_iter = iter;
            best_metric = metric;
            best_x = x;
            best_xm = xm;
            best_s = s;
            best_gap = gap;
            best_pres = pres;
            best_dres = dres;
        } else if (iter - best_iter > 25) {
            res.message = "progress stalled";
            break;
        }

        // Primal infeasibility: X grows along a ray with <F_i, X> pinned
        // at c_i, so <F_i, X>/||X|| -> 0 while -<F0, X> -> +inf.
        if (xnorm > 1e7 * init_xnorm) {
            double ray_res = 0.0;
            for (int i = 0; i < m; ++i) {
                ray_res = std::max(ray_res, std::abs(sdp.c(i) - rd(i)));
            }
            ray_res /= xnorm;
            const double ray_obj = dobj / xnorm;
            if (ray_obj > 1e3 * ray_res) {
                res.status = SolveStatus::kInfeasible;
                res.x = x;
                res.dual_x = xm;
                res.slack_s = s;
                res.message = "dual objective diverges along an improving ray";
                return res;
            }
        }

        // Factor the slacks.
        std::vector<Eigen::LLT<RMat>> llts(nb);
        bool chol_ok = true;
        for (std::size_t b = 0; b < nb; ++b) {
            llts[b].compute(s[b]);
            if (llts[b].info() != Eigen::Success) chol_ok = false;
        }
        if (!chol_ok) {
            res.message = "slack Cholesky failed";
            break;
        }
        for (std::size_t b = 0; b < nb; ++b) {
            sinv[b] = llts[b].solve(RMat::Identity(sdp.blocks[b].dim, sdp.blocks[b].dim));
            sinv[b] = 0.5 * (sinv[b] + sinv[b].transpose());
        }

        // Schur complement M_ij = sum_b Tr(F_i X F_j S^{-1}) plus the
        // right-hand side pieces shared by all directions.
        schur.setZero();
        tr_f_sinv.setZero();
        h_rp.setZero();
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& rb = sdp.blocks[b];
            const RMat xrs = xm[b] * rp[b] * sinv[b];
            for (const auto& [vi, fi] : rb.coeffs) {
                tr_f_sinv(vi) += sym_inner(fi, sinv[b]);
                h_rp(vi) += (fi.cwiseProduct(xrs.transpose())).sum();
            }
            for (const auto& [vj, fj] : rb.coeffs) {
                const RMat kj = (xm[b] * fj * sinv[b]).transpose();
                for (const auto& [vi, fi] : rb.coeffs) {
                    schur(vi, vj) += (fi.cwiseProduct(kj)).sum();
                }
            }
        }
        schur = 0.5 * (schur + schur.transpose());
        h = -sdp.c - h_rp;  // predictor: sigma = 0

        Eigen::LLT<RMat> mf(schur);
        if (mf.info() != Eigen::Success) {
            // Tiny ridge keeps the direction usable when M is nearly
            // singular close to the optimum.
            const double ridge = 1e-12 * (schur.trace() / m + 1.0);
            for (int r = 0; r < 8 && mf.info() != Eigen::Success; ++r) {
                schur += ridge * std::pow(10.0, r) * RMat::Identity(m, m);
                mf.compute(schur);
            }
            if (mf.info() != Eigen::Success) {
                res.message = "Schur factorization failed";
                break;
            }
        }
        auto solve_refined = [&](const Eigen::VectorXd& rhs) {
            Eigen::VectorXd sol = mf.solve(rhs);
            double prev = (rhs - schur * sol).norm();
            for (int pass = 0; pass < 3; ++pass) {
                const Eigen::VectorXd resid = rhs - schur * sol;
                const Eigen::VectorXd upd = sol + mf.solve(resid);
                const double cur = (rhs - schur * upd).norm();
                if (cur >= prev) break;
                sol = upd;
                prev = cur;
            }
            return sol;
        };

        dx = solve_refined(h);
        double ap_aff = 1.0, ad_aff = 1.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& rb = sdp.blocks[b];
            dsa[b] = rp[b];
            for (const auto& [var, f] : rb.coeffs) dsa[b] += dx(var) * f;
            RMat d = -xm[b] - xm[b] * dsa[b] * sinv[b];
            dxa[b] = 0.5 * (d + d.transpose());
            ap_aff = std::min(ap_aff, max_step(s[b], dsa[b]));
            ad_aff = std::min(ad_aff, max_step(xm[b], dxa[b]));
        }
        double mu_aff = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            mu_aff += sym_inner(xm[b] + ad_aff * dxa[b], s[b] + ap_aff * dsa[b]);
        }
        mu_aff /= total_dim;
        const double sigma =
            std::min(1.0, std::max(0.0, std::pow(mu_aff / std::max(mu, 1e-300), 3.0)));

        // Corrector.
        h.setZero();
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& rb = sdp.blocks[b];
            const RMat corr = (dxa[b] * dsa[b]) * sinv[b];
            for (const auto& [vi, fi] : rb.coeffs) {
                h(vi) -= (fi.cwiseProduct(corr.transpose())).sum();
            }
        }
        h += sigma * mu * tr_f_sinv - sdp.c - h_rp;

        dx = solve_refined(h);
        double ap = 1.0, ad = 1.0;
        const double tau = 0.98;
        for (std::size_t b = 0; b < nb; ++b) {
            const auto& rb = sdp.blocks[b];
            ds[b] = rp[b];
            for (const auto& [var, f] : rb.coeffs) ds[b] += dx(var) * f;
            RMat d = sigma * mu * sinv[b] - xm[b] -
                     (dxa[b] * dsa[b] + xm[b] * ds[b]) * sinv[b];
            dxm[b] = 0.5 * (d + d.transpose());
            ap = std::min(ap, tau * max_step(s[b], ds[b]));
            ad = std::min(ad, tau * max_step(xm[b], dxm[b]));
        }
        ap = std::min(ap, 1.0);
        ad = std::min(ad, 1.0);

        // Mehrotra directions can degenerate once the Schur system is at
        // the precision floor; a plain centering step usually restores
        // progress.
        if (ap <= 1e-7 && ad <= 1e-7) {
            h = mu * tr_f_sinv - sdp.c - h_rp;
            dx = solve_refined(h);
            ap = 1.0;
            ad = 1.0;
            for (std::size_t b = 0; b < nb; ++b) {
                const auto& rb = sdp.blocks[b];
                ds[b] = rp[b];
                for (const auto& [var, f] : rb.coeffs) ds[b] += dx(var) * f;
                RMat d = mu * sinv[b] - xm[b] - xm[b] * ds[b] * sinv[b];
                dxm[b] = 0.5 * (d + d.transpose());
                ap = std::min(ap, tau * max_step(s[b], ds[b]));
                ad = std::min(ad, tau * max_step(xm[b], dxm[b]));
            }
            ap = std::min(ap, 1.0);
            ad = std::min(ad, 1.0);
        }
        if (ap <= 1e-10 && ad <= 1e-10) {
            res.message = "step length collapsed";
            break;
        }

        x += ap * dx;
        for (std::size_t b = 0; b < nb; ++b) {
            s[b] += ap * ds[b];
            s[b] = 0.5 * (s[b] + s[b].transpose());
            xm[b] += ad * dxm[b];
            xm[b] = 0.5 * (xm[b] + xm[b].transpose());
        }
    }

    res.status = SolveStatus::kNumericalFailure;
    if (best_x.size() == m) {
        res.x = best_x;
        res.dual_x = best_xm;
        res.slack_s = best_s;
        res.rel_gap = best_gap;
        res.primal_res = best_pres;
        res.dual_res = best_dres;
        if (best_pres <= opt.tol && best_dres <= opt.tol && best_gap <= opt.tol) {
            res.status = SolveStatus::kOptimal;
            res.message.clear();
        }
    } else {
        res.x = x;
        res.dual_x = xm;
        res.slack_s = s;
    }
    if (res.status != SolveStatus::kOptimal && res.message.empty()) {
        res.message = "iteration limit reached";
    }
    return res;
}

}  // namespace

TransmitPolicy policy_from_solution(const SdpProblem& p, const Eigen::VectorXd& x) {
    const VarLayout& l = p.layout;
    const int n = l.n_t;
    const double ps = p.power_scale;
    TransmitPolicy pol;
    if (l.w_off >= 0) {
        pol.w_cov = ps * herm_from_params(x.data() + l.w_off, n);
    } else if (l.pw_idx >= 0) {
        const CMat mrt = p.channels.h * p.channels.h.adjoint();
        pol.w_cov = ps * x(l.pw_idx) * mrt / p.channels.h.squaredNorm();
        pol.beam_vector =
            std::sqrt(std::max(0.0, ps * x(l.pw_idx))) * p.channels.h.normalized();
    } else {
        pol.w_cov = CMat::Zero(n, n);
    }
    pol.an_cov = l.v_off >= 0 ? CMat(ps * herm_from_params(x.data() + l.v_off, n))
                              : CMat(CMat::Zero(n, n));
    if (l.we_off >= 0) {
        pol.es_cov = ps * herm_from_params(x.data() + l.we_off, n);
    } else if (l.pe_idx >= 0) {
        pol.es_cov = ps * x(l.pe_idx) / static_cast<double>(n) * CMat::Identity(n, n);
    } else {
        pol.es_cov = CMat::Zero(n, n);
    }
    pol.w_cov = hermitize(pol.w_cov);
    pol.an_cov = hermitize(pol.an_cov);
    pol.es_cov = hermitize(pol.es_cov);
    pol.rho = l.fixed_rho ? *l.fixed_rho : (l.rho_idx >= 0 ? x(l.rho_idx) : 1.0);
    for (int k = 0; k < l.k_idle; ++k) {
        if (l.delta_off >= 0) pol.delta.push_back(ps * x(l.delta_off + k));
        if (l.nu_off >= 0) pol.nu.push_back(ps * x(l.nu_off + k));
    }
    return pol;
}

const CMat* SolveReport::dual_for(const std::string& tag) const {
    for (std::size_t i = 0; i < block_tags.size(); ++i) {
        if (block_tags[i] == tag) return &block_duals_phys[i];
    }
    return nullptr;
}

SolveReport solve(const SdpProblem& problem, const SolverOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const RealSdp real = lower(problem);
    IpmResult r = run_ipm(real, options);

    SolveReport rep;
    rep.status = r.status;
    rep.iterations = r.iterations;
    rep.rel_gap = r.rel_gap;
    rep.primal_residual = r.primal_res;
    rep.dual_residual = r.dual_res;
    rep.message = r.message;
    rep.x_scaled = r.x;

    if (r.status == SolveStatus::kOptimal) {
        rep.objective_w =
            problem.power_scale * (problem.c.dot(r.x) + problem.c_const);
        rep.policy = policy_from_solution(problem, r.x);

        // Lift duals to physical units:
        //   D_phys = power_scale * diag(1/d) lift(X_real) diag(1/d)
        // with d the per-row unit scale recorded at assembly.
        rep.block_tags.reserve(problem.blocks.size());
        rep.block_duals_phys.reserve(problem.blocks.size());
        for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
            const auto& cb = problem.blocks[b];
            const CMat lifted = lift(real.blocks[b], r.dual_x[b],
                                     real.blocks[b].embedded ? 2.0 : 1.0);
            const RVec inv = cb.dual_unit.cwiseInverse();
            CMat phys = problem.power_scale *
                        (inv.asDiagonal() * lifted * inv.asDiagonal());
            rep.block_tags.push_back(cb.tag);
            rep.block_duals_phys.push_back(std::move(phys));
        }

        // Tagged certificate.
        const int n = problem.layout.n_t;
        rep.duals.y_mat = CMat::Zero(n, n);
        rep.duals.d_c3bar = CMat::Zero(n, n);
        rep.duals.theta.assign(static_cast<std::size_t>(n), 0.0);
        rep.duals.d_c2.assign(static_cast<std::size_t>(problem.layout.k_idle),
                              CMat::Zero(n + 1, n + 1));
        rep.duals.d_c5.assign(static_cast<std::size_t>(problem.layout.k_idle),
                              CMat::Zero(n + 1, n + 1));
        for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
            const std::string& tag = problem.blocks[b].tag;
            const CMat& d = rep.block_duals_phys[b];
            if (tag == "C8_W") {
                rep.duals.y_mat = d;
            } else if (tag == "C3bar") {
                rep.duals.d_c3bar = d;
            } else if (tag == "C1") {
                rep.duals.beta = std::real(d(0, 0));
            } else if (tag == "C4") {
                rep.duals.mu = std::real(d(0, 0));
            } else if (tag.rfind("C6_", 0) == 0) {
                rep.duals.theta[std::stoul(tag.substr(3))] = std::real(d(0, 0));
            } else if (tag.rfind("C2_", 0) == 0) {
                rep.duals.d_c2[std::stoul(tag.substr(3))] = d;
            } else if (tag.rfind("C5_", 0) == 0) {
                rep.duals.d_c5[std::stoul(tag.substr(3))] = d;
            }
        }

        rep.w_rank = numeric_rank(rep.policy.w_cov, 1e-6);
        rep.kkt_residuals = verify_kkt(problem, rep);
    } else if (r.status == SolveStatus::kInfeasible) {
        rep.message = "infeasible: " + r.message;
    }

    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

CMat build_b_star(const SdpProblem& problem, const DualCertificate& duals) {
    const int n = problem.layout.n_t;
    CMat b = CMat::Identity(n, n);
    if (duals.d_c3bar.rows() == n) b += duals.d_c3bar;
    for (int an = 0; an < n; ++an) {
        b(an, an) += duals.theta[static_cast<std::size_t>(an)];
    }
    for (int k = 0; k < problem.layout.k_idle; ++k) {
        const CVec& g = problem.channels.g_hat[static_cast<std::size_t>(k)];
        CMat u(n, n + 1);
        u.leftCols(n) = CMat::Identity(n, n);
        u.col(n) = g;
        const CMat diff =
            duals.d_c2[static_cast<std::size_t>(k)] / problem.config.gamma_tol_for(k) -
            duals.d_c5[static_cast<std::size_t>(k)];
        b += u * diff * u.adjoint();
    }
    return hermitize(b);
}

std::map<std::string, double> verify_kkt(const SdpProblem& problem,
                                         const SolveReport& report) {
    if (report.status != SolveStatus::kOptimal) {
        throw std::invalid_argument("verify_kkt: report is not optimal");
    }
    std::map<std::string, double> out;
    out["dual_feasibility"] = report.dual_residual;
    out["primal_feasibility"] = report.primal_residual;
    out["rel_gap"] = report.rel_gap;

    const bool has_w_matrix = problem.layout.w_off >= 0;
    if (has_w_matrix) {
        const CMat b = build_b_star(problem, report.duals);
        const CMat h = problem.channels.h * problem.channels.h.adjoint();
        const CMat y = report.duals.y_mat;
        const double mu = report.duals.mu;
        const double beta = report.duals.beta;
        out["stationarity_w_rel"] =
            (b - y - (mu + beta) * h).norm() / std::max(b.norm(), 1e-300);
        out["complementarity_yw_rel"] =
            (y * report.policy.w_cov).norm() /
            std::max(report.policy.w_cov.norm(), 1e-300);
    }

    const double pmin = problem.config.p_min_desired_w;
    if (pmin > 0.0 && report.duals.beta > 0.0 && report.duals.mu > 0.0 &&
        !problem.layout.fixed_rho) {
        const double a = std::sqrt(report.duals.beta * problem.config.sigma_s_sq_w *
                                   problem.config.gamma_req);
        const double bb = std::sqrt(report.duals.mu * pmin / problem.config.eta);
        const double rho_pred = a / (a + bb);
        out["rho_identity_rel"] =
            std::abs(report.policy.rho - rho_pred) / std::max(rho_pred, 1e-300);
    }
    return out;
}

}  // namespace swiptsec
