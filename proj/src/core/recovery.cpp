#include "core/recovery.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace swiptsec {

Prop1Result check_prop1(const DualCertificate& duals, const SystemConfig& config) {
    Prop1Result res;
    const std::size_t k_idle = duals.d_c2.size();
    res.per_k.resize(k_idle, true);
    for (std::size_t k = 0; k < k_idle; ++k) {
        const CMat diff = duals.d_c2[k] / config.gamma_tol_for(static_cast<int>(k)) -
                          duals.d_c5[k];
        Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(diff), Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        res.per_k[k] = lo >= -1e-8 * scale;
        res.all = res.all && res.per_k[k];
    }
    return res;
}

namespace {

void fail(RecoveryOutcome& out, const std::string& why) {
    out.success = false;
    out.message = "recovery_failure: " + why;
}

// Worst normalized block violation of the substituted problem at y.
double block_violation(const SdpProblem& sub, const Eigen::VectorXd& y) {
    double worst = 0.0;
    for (const auto& b : sub.blocks) {
        const CMat v = hermitize(b.eval(y));
        Eigen::SelfAdjointEigenSolver<CMat> es(v, Eigen::EigenvaluesOnly);
        const double scale =
            std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        worst = std::max(worst, -es.eigenvalues().minCoeff() / scale);
    }
    return worst;
}

}  // namespace

RecoveryOutcome construct_rank_one(const SolveReport& report, const SdpProblem& problem,
                                   const std::vector<double>& pi) {
    if (report.status != SolveStatus::kOptimal) {
        throw std::invalid_argument("construct_rank_one: report is not optimal");
    }
    const VarLayout& l = problem.layout;
    RecoveryOutcome out;
    out.policy = report.policy;
    out.objective_w = report.objective_w;

    const CMat w = hermitize(report.policy.w_cov);
    if (numeric_rank(w, 1e-6) <= 1) {
        EigenResult er = eig_hermitian(w);
        if (er.eigenvalues(0) > 0.0) {
            out.policy.beam_vector = std::sqrt(er.eigenvalues(0)) * er.eigenvectors.col(0);
        }
        out.invoked = false;
        out.success = true;
        return out;
    }

    if (l.w_off < 0) {
        fail(out, "variant has no matrix-valued beamforming variable");
        return out;
    }

    out.invoked = true;
    RecoveryWorkspace& ws = out.workspace;
    ws.b_star = build_b_star(problem, report.duals);
    // The null space of B* is orthogonal to h (B* = Y* + (mu*+beta*)H with
    // both terms PSD). When mu+beta is numerically tiny that orthogonality
    // is poorly resolved, so deflate along h before extracting the basis;
    // this leaves the exact null space untouched.
    const CVec& h_vec = problem.channels.h;
    const CMat deflated =
        ws.b_star +
        (lambda_max(ws.b_star) / h_vec.squaredNorm()) * (h_vec * h_vec.adjoint());
    ws.upsilon = null_basis(deflated, 1e-6);
    ws.rank_b = static_cast<int>(ws.b_star.rows() - ws.upsilon.cols());
    const int t_count = static_cast<int>(ws.upsilon.cols());

    // pi entries map to shed directions in order; missing entries
    // default to 1 (all mass into the artificial noise).
    ws.pi = pi;
    ws.pi.resize(static_cast<std::size_t>(std::max<int>(t_count, l.n_t)), 1.0);
    for (double p : ws.pi) {
        if (p < 0.0 || p > 1.0) {
            throw std::invalid_argument("construct_rank_one: pi entries must lie in [0,1]");
        }
    }
    if (l.we_off < 0) {
        // Isotropic-energy variants keep W_E fixed: all mass goes to V.
        for (double p : ws.pi) {
            if (p != 1.0) {
                throw std::invalid_argument(
                    "construct_rank_one: pi < 1 requires a matrix energy covariance");
            }
        }
    }

    const int mp = l.mat_params();
    bool have_solution = false;
    Eigen::VectorXd x_full;
    std::string path;

    // Null-space construction: W = f u u^H with the shed mass moved into
    // V / W_E along the null directions, everything else frozen, then the
    // small convex program in (f, gamma). The program often has an empty
    // interior (the harvest LMIs stay exactly tight along the family), in
    // which case the decomposition weights are read off W* directly.
    if (t_count > 0) {
        const CMat proj =
            CMat::Identity(l.n_t, l.n_t) - ws.upsilon * ws.upsilon.adjoint();
        EigenResult pm = eig_hermitian(hermitize(proj * w * proj));
        if (pm.eigenvalues(0) > 0.0) {
            ws.u_dir = pm.eigenvectors.col(0);

            Eigen::VectorXd x0 = report.x_scaled;
            x0.segment(l.w_off, mp).setZero();
            Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(l.total, 1 + t_count);
            std::vector<double> params(static_cast<std::size_t>(mp));
            params_from_herm(ws.u_dir * ws.u_dir.adjoint(), params.data());
            for (int i = 0; i < mp; ++i) {
                basis(l.w_off + i, 0) = params[static_cast<std::size_t>(i)];
            }
            for (int t = 0; t < t_count; ++t) {
                const CVec r = ws.upsilon.col(t);
                params_from_herm(r * r.adjoint(), params.data());
                const double pit = ws.pi[static_cast<std::size_t>(t)];
                for (int i = 0; i < mp; ++i) {
                    basis(l.v_off + i, 1 + t) =
                        pit * params[static_cast<std::size_t>(i)];
                    if (l.we_off >= 0) {
                        basis(l.we_off + i, 1 + t) =
                            (1.0 - pit) * params[static_cast<std::size_t>(i)];
                    }
                }
            }

            SdpProblem sub = substitute(problem, x0, basis,
                                        RVec::Constant(1 + t_count, problem.power_scale));
            for (int j = 0; j < 1 + t_count; ++j) {
                ConstraintBlock b;
                b.tag = j == 0 ? "AUX_f" : "AUX_gamma_" + std::to_string(j - 1);
                b.f0 = CMat::Zero(1, 1);
                CMat one(1, 1);
                one(0, 0) = 1.0;
                b.coeffs.emplace_back(j, one);
                b.dual_unit = RVec::Constant(1, std::sqrt(problem.power_scale));
                sub.blocks.push_back(std::move(b));
            }

            SolverOptions opt;
            opt.tol = 1e-9;
            opt.max_iter = 300;
            SolveReport subrep = solve(sub, opt);

            Eigen::VectorXd y;
            if (subrep.status == SolveStatus::kOptimal &&
                std::abs(subrep.objective_w - report.objective_w) <=
                    1e-6 * std::max(report.objective_w, 1e-12)) {
                y = subrep.x_scaled;
                path = "construction program";
                if (!(y(0) > 0.0)) {
                    fail(out, "constructed beam power f is not positive");
                    return out;
                }
                have_solution = true;
            } else {
                y.resize(1 + t_count);
                const CMat w_scaled = w / problem.power_scale;
                y(0) = std::real(Complex(ws.u_dir.adjoint() * w_scaled * ws.u_dir));
                for (int t = 0; t < t_count; ++t) {
                    const CVec r = ws.upsilon.col(t);
                    y(1 + t) = std::real(Complex(r.adjoint() * w_scaled * r));
                }
                path = "direct decomposition";
                have_solution = y(0) > 0.0 && block_violation(sub, y) <= 1e-6;
            }
            if (have_solution) {
                ws.f_scale = problem.power_scale * y(0);
                ws.gamma.resize(static_cast<std::size_t>(t_count));
                for (int t = 0; t < t_count; ++t) {
                    ws.gamma[static_cast<std::size_t>(t)] =
                        problem.power_scale * std::max(0.0, y(1 + t));
                }
                x_full = x0 + basis * y;
            }
        }
    }

    if (have_solution) {
        out.policy = policy_from_solution(problem, x_full);
        out.policy.w_cov = ws.f_scale * (ws.u_dir * ws.u_dir.adjoint());
        out.policy.beam_vector = std::sqrt(ws.f_scale) * ws.u_dir;
        out.objective_w =
            problem.power_scale * (problem.c.dot(x_full) + problem.c_const);
        out.success = true;
        out.message = path;
        if (std::abs(out.objective_w - report.objective_w) >
            1e-6 * std::max(report.objective_w, 1e-12)) {
            fail(out, "objective not conserved by the construction");
        }
        return out;
    }

    // Exact algebraic repair for the remaining cases (degenerate faces
    // where the stationarity matrix carries no usable null space): keep
    // only the beam W delivers through h and split the PSD remainder,
    //   W~ = W h h^H W / (h^H W h),   remainder * h = 0,
    // over its eigendirections into V / W_E according to pi. C1 stays
    // exact, every S-procedure block gains PSD slack, the per-antenna
    // and harvest totals are unchanged, and the trace is conserved.
    const CVec wh = w * h_vec;
    const double gain = std::real(Complex(h_vec.adjoint() * w * h_vec));
    if (!(gain > 0.0)) {
        fail(out, "beamforming covariance delivers no power through h");
        return out;
    }
    const CMat w_tilde = (wh * wh.adjoint()) / gain;
    const CMat remainder = hermitize(w - w_tilde);

    EigenResult erem = eig_hermitian(remainder);
    CMat to_noise = CMat::Zero(l.n_t, l.n_t);
    CMat to_energy = CMat::Zero(l.n_t, l.n_t);
    std::vector<double> shed;
    std::vector<CVec> shed_dirs;
    for (int i = 0; i < l.n_t; ++i) {
        const double lam = std::max(0.0, erem.eigenvalues(i));
        if (lam <= 1e-14 * std::max(1.0, erem.eigenvalues(0))) continue;
        const double pit = shed.size() < ws.pi.size() ? ws.pi[shed.size()] : 1.0;
        const CMat dir =
            erem.eigenvectors.col(i) * erem.eigenvectors.col(i).adjoint();
        to_noise += pit * lam * dir;
        to_energy += (1.0 - pit) * lam * dir;
        shed.push_back(lam);
        shed_dirs.push_back(erem.eigenvectors.col(i));
    }

    out.policy = report.policy;
    out.policy.an_cov = hermitize(report.policy.an_cov + to_noise);
    if (l.we_off >= 0) {
        out.policy.es_cov = hermitize(report.policy.es_cov + to_energy);
    }
    ws.f_scale = std::real(w_tilde.trace());
    ws.u_dir = wh.normalized();
    ws.gamma = shed;
    ws.upsilon.resize(l.n_t, static_cast<Eigen::Index>(shed_dirs.size()));
    for (std::size_t i = 0; i < shed_dirs.size(); ++i) {
        ws.upsilon.col(static_cast<Eigen::Index>(i)) = shed_dirs[i];
    }
    out.policy.w_cov = ws.f_scale * (ws.u_dir * ws.u_dir.adjoint());
    out.policy.beam_vector = std::sqrt(ws.f_scale) * ws.u_dir;
    out.objective_w = report.objective_w;
    out.success = true;
    out.message = "delivered-beam projection";
    return out;
}

std::string RankAuditSummary::to_csv() const {
    std::ostringstream os;
    os << "instance_id,w_rank,prop1,recovered\n";
    for (const auto& r : rows) {
        os << r.instance_id << ',' << r.w_rank << ',' << (r.prop1 ? 1 : 0) << ','
           << (r.recovery_invoked ? 1 : 0) << '\n';
    }
    return os.str();
}

RankAuditSummary rank_one_audit(const std::vector<RankAuditRow>& rows) {
    RankAuditSummary s;
    s.rows = rows;
    s.total = static_cast<int>(rows.size());
    for (const auto& r : rows) {
        if (r.w_rank == 1) ++s.rank_one_before;
        if (r.prop1) {
            ++s.prop1_true;
            if (r.w_rank == 1) ++s.prop1_true_rank_one;
        }
        if (r.recovery_invoked) ++s.recovery_invoked;
        if (!r.recovery_ok) ++s.recovery_failures;
    }
    return s;
}

}  // namespace swiptsec
