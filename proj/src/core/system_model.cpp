#include "core/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/chance.hpp"

namespace swiptsec {

void SystemConfig::validate() const {
    if (n_t < 1) throw std::invalid_argument("SystemConfig: n_t >= 1");
    if (k_total < 1) throw std::invalid_argument("SystemConfig: k_total >= 1");
    if (j_eaves < 0) throw std::invalid_argument("SystemConfig: j_eaves >= 0");
    if (!(gamma_req > 0.0)) throw std::invalid_argument("SystemConfig: gamma_req > 0");
    if (!(gamma_tol > 0.0)) throw std::invalid_argument("SystemConfig: gamma_tol > 0");
    for (double g : gamma_tol_k) {
        if (!(g > 0.0)) throw std::invalid_argument("SystemConfig: gamma_tol_k > 0");
    }
    if (!(kappa >= 0.0) || kappa >= 1.0) {
        throw std::invalid_argument("SystemConfig: kappa in [0, 1)");
    }
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("SystemConfig: eta in (0, 1]");
    if (p_min_desired_w < 0.0) throw std::invalid_argument("SystemConfig: p_min >= 0");
    for (double p : p_min_idle_w) {
        if (p < 0.0) throw std::invalid_argument("SystemConfig: p_min_idle >= 0");
    }
    for (double p : p_max_antenna_w) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("SystemConfig: p_max_antenna finite and >= 0");
        }
    }
    if (sigma_ant_sq_w < 0.0 || sigma_s_sq_w < 0.0) {
        throw std::invalid_argument("SystemConfig: noise powers >= 0");
    }
    if (!(sigma_est_sq >= 0.0) || sigma_est_sq >= 1.0) {
        throw std::invalid_argument("SystemConfig: sigma_est_sq in [0, 1)");
    }
}

namespace {

// Re Tr(X g g^H) = g^H X g for Hermitian X.
double quad_form(const CMat& x, const CVec& g) {
    return std::real(Complex(g.adjoint() * x * g));
}

double cap(double sinr) { return std::log2(1.0 + std::max(0.0, sinr)); }

}  // namespace

double ConstraintReport::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) m = std::min(m, e.margin);
    return m;
}

const ConstraintReport::Entry* ConstraintReport::find(const std::string& tag) const {
    for (const auto& e : entries) {
        if (e.tag == tag) return &e;
    }
    return nullptr;
}

double sinr_desired(const TransmitPolicy& policy, const CVec& h, const SystemConfig& config) {
    if (!(policy.rho > 0.0)) {
        throw std::invalid_argument("sinr_desired: rho must be positive");
    }
    const double sig = policy.rho * quad_form(policy.w_cov, h);
    const double noise = policy.rho * (config.sigma_ant_sq_w + quad_form(policy.an_cov, h)) +
                         config.sigma_s_sq_w;
    return sig / noise;
}

double sinr_idle_worstsplit(const TransmitPolicy& policy, const CVec& g,
                            const SystemConfig& config) {
    const double sig = quad_form(policy.w_cov, g);
    const double noise =
        config.sigma_ant_sq_w + quad_form(policy.an_cov, g) + config.sigma_s_sq_w;
    return sig / noise;
}

double sinr_passive(const TransmitPolicy& policy, const CVec& l_tilde, double sigma_tilde_sq) {
    const double sig = quad_form(policy.w_cov, l_tilde);
    const double noise =
        quad_form(policy.es_cov, l_tilde) + quad_form(policy.an_cov, l_tilde) + sigma_tilde_sq;
    return sig / noise;
}

double secrecy_capacity(const TransmitPolicy& policy, const ChannelSet& channels,
                        const std::vector<CVec>& eaves_draws, const SystemConfig& config) {
    const double c_desired = policy.rho > 0.0
                                 ? cap(sinr_desired(policy, channels.h, config))
                                 : 0.0;
    double c_eaves = 0.0;
    for (const auto& g : channels.g_true) {
        c_eaves = std::max(c_eaves, cap(sinr_idle_worstsplit(policy, g, config)));
    }
    for (const auto& l : eaves_draws) {
        c_eaves = std::max(c_eaves, cap(sinr_passive(policy, l, channels.sigma_tilde_sq)));
    }
    return std::max(0.0, c_desired - c_eaves);
}

double harvested_power_desired(const TransmitPolicy& policy, const CVec& h,
                               const SystemConfig& config) {
    const double received = quad_form(policy.w_cov, h) + quad_form(policy.an_cov, h) +
                            quad_form(policy.es_cov, h) + config.sigma_ant_sq_w;
    return (1.0 - policy.rho) * config.eta * received;
}

double harvested_power_idle(const TransmitPolicy& policy, const CVec& g,
                            const SystemConfig& config) {
    const double received = quad_form(policy.w_cov, g) + quad_form(policy.an_cov, g) +
                            quad_form(policy.es_cov, g) + config.sigma_ant_sq_w;
    return config.eta * received;
}

double per_antenna_power(const TransmitPolicy& policy, int n) {
    if (n < 0 || n >= policy.n_t()) {
        throw std::out_of_range("per_antenna_power: antenna index out of range");
    }
    return std::real(policy.w_cov(n, n) + policy.an_cov(n, n) + policy.es_cov(n, n));
}

namespace {

double psd_margin(const CMat& x) {
    if (x.size() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(x), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return lo / std::max(1e-12, std::abs(hi));
}

}  // namespace

ConstraintReport evaluate_constraints(const TransmitPolicy& policy,
                                      const ChannelSet& channels,
                                      const SystemConfig& config,
                                      int robustness_samples,
                                      const std::vector<CVec>& eaves_pool) {
    if (robustness_samples < 0) {
        throw std::invalid_argument("evaluate_constraints: robustness_samples >= 0");
    }
    ConstraintReport report;
    report.robustness_samples = robustness_samples;
    const int k_idle = channels.idle_count();

    // C1, normalized as SINR / Gamma_req - 1 (safe at rho = 0).
    {
        const double num = policy.rho * quad_form(policy.w_cov, channels.h);
        const double den =
            policy.rho * (config.sigma_ant_sq_w + quad_form(policy.an_cov, channels.h)) +
            config.sigma_s_sq_w;
        report.entries.push_back({"C1", num / (config.gamma_req * den) - 1.0});
    }

    // C2 / C5: worst case over sampled uncertainty (nominal point, ball
    // boundary, ball interior), aggregated over idle receivers.
    {
        double c2 = 1.0;
        double c5 = 1.0;
        Rng rng(mix_seed(channels.rng_seed, 0xC25ULL));
        for (int k = 0; k < k_idle; ++k) {
            const double gtol = config.gamma_tol_for(k);
            const double pmin = config.p_min_idle_for(k);
            const double pscale = std::max(pmin, 1e-9);
            auto eval_point = [&](const CVec& g) {
                c2 = std::min(c2, 1.0 - sinr_idle_worstsplit(policy, g, config) / gtol);
                c5 = std::min(c5, (harvested_power_idle(policy, g, config) - pmin) / pscale);
            };
            eval_point(channels.g_hat[static_cast<std::size_t>(k)]);
            for (int s = 0; s < robustness_samples; ++s) {
                const bool boundary = (s % 2 == 0);
                const CVec dg = sample_uncertainty(channels, k, rng, boundary);
                eval_point(channels.g_hat[static_cast<std::size_t>(k)] + dg);
            }
        }
        report.entries.push_back({"C2", k_idle > 0 ? c2 : 1.0});
        // C5 appended below in tag order.
        report.entries.push_back({"C3", 0.0});  // placeholder, filled next
        report.entries.push_back(
            {"C4", (harvested_power_desired(policy, channels.h, config) -
                    config.p_min_desired_w) /
                       std::max(config.p_min_desired_w, 1e-9)});
        report.entries.push_back({"C5", k_idle > 0 ? c5 : 1.0});
    }

    // C3: empirical success fraction minus kappa over J-grouped draws.
    // Without a pool the deterministic certificate margin is reported
    // instead (positive implies the chance constraint holds).
    {
        double margin = 1.0;
        if (config.kappa > 0.0 && config.j_eaves > 0) {
            const std::size_t group = static_cast<std::size_t>(config.j_eaves);
            const std::size_t n_groups = eaves_pool.size() / group;
            if (n_groups > 0) {
                std::size_t ok = 0;
                for (std::size_t gi = 0; gi < n_groups; ++gi) {
                    bool intercepted = false;
                    for (std::size_t j = 0; j < group; ++j) {
                        if (sinr_passive(policy, eaves_pool[gi * group + j],
                                         channels.sigma_tilde_sq) > config.gamma_tol) {
                            intercepted = true;
                            break;
                        }
                    }
                    if (!intercepted) ++ok;
                }
                report.empirical_outage =
                    static_cast<double>(ok) / static_cast<double>(n_groups);
                margin = report.empirical_outage - config.kappa;
            } else {
                const ChanceBound bound =
                    chance_quantile(channels.n_t(), config.kappa, config.j_eaves);
                const double rhs = bound.quantile_coeff * config.gamma_tol *
                                   channels.sigma_tilde_sq;
                const CMat q = policy.w_cov - config.gamma_tol * policy.es_cov -
                               config.gamma_tol * policy.an_cov;
                margin = (rhs - lambda_max(q)) / rhs;
            }
        }
        for (auto& e : report.entries) {
            if (e.tag == "C3") e.margin = margin;
        }
    }

    // C6: per-antenna power, worst antenna.
    {
        double m = 1.0;
        for (int n = 0; n < policy.n_t(); ++n) {
            const double pmax = config.p_max_for(n);
            m = std::min(m, (pmax - per_antenna_power(policy, n)) / std::max(pmax, 1e-12));
        }
        report.entries.push_back({"C6", m});
    }

    report.entries.push_back({"C7", std::min(policy.rho, 1.0 - policy.rho)});
    report.entries.push_back(
        {"C8", std::min({psd_margin(policy.w_cov), psd_margin(policy.an_cov),
                         psd_margin(policy.es_cov)})});

    // C9: rank-one within the numeric_rank threshold, via lambda2/lambda1.
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(policy.w_cov), Eigen::EigenvaluesOnly);
        const Eigen::Index n = es.eigenvalues().size();
        const double l1 = es.eigenvalues()(n - 1);
        const double l2 = n > 1 ? std::abs(es.eigenvalues()(n - 2)) : 0.0;
        double m = -1.0;
        if (l1 > 0.0) m = 1.0 - (l2 / l1) / 1e-6;
        report.entries.push_back({"C9", m});
    }

    // C10: nonnegativity of the S-procedure multipliers.
    {
        double m = 1.0;
        bool any = false;
        for (double v : policy.delta) {
            m = std::min(m, v / std::max(1.0, std::abs(v)));
            any = true;
        }
        for (double v : policy.nu) {
            m = std::min(m, v / std::max(1.0, std::abs(v)));
            any = true;
        }
        report.entries.push_back({"C10", any ? m : 1.0});
    }

    return report;
}

}  // namespace swiptsec
