#pragma once

#include <cstdint>
#include <vector>

namespace swiptsec {

// Scenario scalars. All powers are linear Watts and all SINR targets are
// linear ratios; dB/dBm conversions happen at the CLI/scenario boundary
// only.
struct SystemConfig {
    int n_t = 6;      // transmit antennas
    int k_total = 4;  // legitimate receivers (1 desired + k_total-1 idle)
    int j_eaves = 5;  // passive eavesdroppers handled by the chance constraint

    double gamma_req = 31.6227766016837933;  // min desired-receiver SINR (15 dB)
    std::vector<double> gamma_tol_k;         // per idle receiver, default 0 dB
    double gamma_tol = 1.0;                  // passive-eavesdropper SINR cap
    double kappa = 0.99;                     // chance-constraint probability

    double p_min_desired_w = 1e-3;           // C4 minimum harvested power (0 dBm)
    std::vector<double> p_min_idle_w;        // C5 per idle receiver
    std::vector<double> p_max_antenna_w;     // C6 per antenna (30 dBm default)

    double eta = 0.5;                 // energy harvesting efficiency
    double sigma_ant_sq_w = 7.943282347242789e-15;  // antenna noise (-111 dBm)
    double sigma_s_sq_w = 3.1622776601683792e-07;   // processing noise (-35 dBm)

    double sigma_est_sq = 0.05;  // normalized CSI error eps_k^2 / ||g_k||^2

    int idle_count() const { return k_total - 1; }

    // Per-k / per-antenna accessors with scalar broadcast: a vector with
    // fewer entries than needed repeats its last value, an empty vector
    // falls back to the default.
    double gamma_tol_for(int k) const { return broadcast(gamma_tol_k, k, 1.0); }
    double p_min_idle_for(int k) const { return broadcast(p_min_idle_w, k, 1e-3); }
    double p_max_for(int n) const { return broadcast(p_max_antenna_w, n, 1.0); }

    // Throws std::invalid_argument when a field is out of its domain.
    void validate() const;

  private:
    static double broadcast(const std::vector<double>& v, int i, double fallback) {
        if (v.empty()) return fallback;
        const std::size_t idx = static_cast<std::size_t>(i);
        return idx < v.size() ? v[idx] : v.back();
    }
};

}  // namespace swiptsec
