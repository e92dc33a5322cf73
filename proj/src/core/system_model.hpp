#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/channel.hpp"
#include "core/config.hpp"
#include "core/hermitian.hpp"

namespace swiptsec {

// Decision variables of one transmit policy: information covariance W,
// artificial noise covariance V, energy-signal covariance W_E, the power
// splitting ratio rho, and the S-procedure multipliers. beam_vector is
// present iff w_cov is (numerically) rank one.
struct TransmitPolicy {
    CMat w_cov;
    CMat an_cov;
    CMat es_cov;
    double rho = 1.0;
    std::vector<double> delta;
    std::vector<double> nu;
    std::optional<CVec> beam_vector;

    int n_t() const { return static_cast<int>(w_cov.rows()); }
};

// Normalized feasibility margins, one entry per constraint tag;
// margin >= 0 means satisfied. Vacuous constraints (e.g. C2 with no idle
// receivers) report margin 1. empirical_outage is the measured
// Pr(max_j SINR_PE_j <= Gamma_tol) when an eavesdropper pool was supplied.
struct ConstraintReport {
    struct Entry {
        std::string tag;
        double margin = 0.0;
    };
    std::vector<Entry> entries;
    double empirical_outage = 1.0;
    int robustness_samples = 0;

    double min_margin() const;
    const Entry* find(const std::string& tag) const;
};

// SINR at the desired receiver with the energy signal cancelled
// (Tr(H W_E) removed): rho Tr(HW) / (rho(sigma_ant^2 + Tr(HV)) + sigma_s^2).
// Throws when rho <= 0.
double sinr_desired(const TransmitPolicy& policy, const CVec& h, const SystemConfig& config);

// Upper bound on the idle-receiver SINR: the receiver gives up harvesting,
// so its splitting ratio drops out: Tr(GW)/(sigma_ant^2 + Tr(GV) + sigma_s^2).
double sinr_idle_worstsplit(const TransmitPolicy& policy, const CVec& g,
                            const SystemConfig& config);

// Passive-eavesdropper SINR on the normalized channel; the energy signal
// cannot be cancelled and counts as interference.
double sinr_passive(const TransmitPolicy& policy, const CVec& l_tilde, double sigma_tilde_sq);

// [log2(1+SINR_desired) - max over eavesdroppers of log2(1+SINR)]^+,
// using the upper-bound SINRs. Empty eavesdropper/idle sets contribute 0.
double secrecy_capacity(const TransmitPolicy& policy, const ChannelSet& channels,
                        const std::vector<CVec>& eaves_draws, const SystemConfig& config);

// (1-rho) * eta * (Tr(HW) + Tr(HV) + Tr(HW_E) + sigma_ant^2)
double harvested_power_desired(const TransmitPolicy& policy, const CVec& h,
                               const SystemConfig& config);

// eta * (Tr(GW) + Tr(GV) + Tr(GW_E) + sigma_ant^2); idle receivers devote
// all received power to harvesting, so no splitting factor.
double harvested_power_idle(const TransmitPolicy& policy, const CVec& g,
                            const SystemConfig& config);

// [W + V + W_E]_{n,n}; antenna index is zero-based, throws when out of range.
double per_antenna_power(const TransmitPolicy& policy, int n);

// Evaluates every constraint tag C1..C10 on an explicit realization.
// C2/C5 margins are worst cases over `robustness_samples` draws of the
// uncertainty set (half on the ball boundary, half interior). C3 is the
// empirical outage over the supplied pool, grouped into J-tuples.
ConstraintReport evaluate_constraints(const TransmitPolicy& policy,
                                      const ChannelSet& channels,
                                      const SystemConfig& config,
                                      int robustness_samples,
                                      const std::vector<CVec>& eaves_pool = {});

}  // namespace swiptsec
