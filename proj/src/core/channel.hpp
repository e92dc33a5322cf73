#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "core/hermitian.hpp"
#include "core/rng.hpp"

namespace swiptsec {

// Indoor TGn-style path loss plus the fading parameters of the scenario.
// Free-space decay up to the breakpoint, a steeper log-distance segment
// beyond it, continuous at the breakpoint. Breakpoint distances scale
// with the wavelength, so at a 470 MHz carrier the breakpoint sits past
// the 20 m service range and the default service area sees free-space
// decay; harvested-power floors around 0 dBm stop being deliverable at
// the far edge otherwise.
struct FadingSpec {
    double rician_k_factor_db = 6.0;  // legitimate links
    double shadowing_db = 0.0;
    double carrier_freq_hz = 470e6;
    double antenna_gain_db = 10.0;  // joint tx+rx gain
    double ref_distance_m = 2.0;
    double max_distance_m = 20.0;
    double breakpoint_m = 30.0;
    double pathloss_exp_near = 2.0;
    double pathloss_exp_far = 3.5;

    void validate() const;
};

// One realization of every channel the transmitter reasons about.
// g_true are the actual idle-receiver links; g_hat the (possibly stale)
// estimates with ||g_true[k] - g_hat[k]|| <= epsilon[k].
struct ChannelSet {
    CVec h;                        // desired link, perfect CSI
    std::vector<CVec> g_true;      // idle links, k = 0..K-2
    std::vector<CVec> g_hat;       // estimates available to the optimizer
    std::vector<double> epsilon;   // uncertainty radii
    double l_up_scale = 1.0;       // E{||l_up||^2} at the reference distance
    double sigma_tilde_sq = 0.0;   // (sigma_ant^2 + sigma_s^2) / l_up_scale
    std::vector<double> distances; // meters, desired receiver first
    std::uint64_t rng_seed = 0;

    int n_t() const { return static_cast<int>(h.size()); }
    int idle_count() const { return static_cast<int>(g_true.size()); }
};

// Linear power gain (includes antenna gain and shadowing) at a distance.
// Monotone non-increasing; throws for distances inside the guard zone
// (closer than the reference distance).
double path_gain(double distance_m, const FadingSpec& spec);

// Draws h and g_true with Rician small-scale fading scaled by the path
// gain of a uniformly drawn distance in [ref, max]. Deterministic for a
// fixed seed; receiver r and antenna a use a substream keyed on (r, a)
// so draws nest across K and N_T. Estimates start perfect (epsilon = 0).
ChannelSet draw_legitimate_channels(const SystemConfig& config,
                                    const FadingSpec& spec,
                                    std::uint64_t seed);

// Sets epsilon[k] = sqrt(normalized_error) * ||g_true[k]|| and redraws
// g_hat[k] = g_true[k] - dg with dg uniform in the epsilon-ball.
// normalized_error in [0, 1); throws otherwise.
ChannelSet apply_csi_uncertainty(const ChannelSet& channels, double normalized_error);

// One point of the uncertainty set Omega_k around g_hat[k]: uniform over
// the ball, or on the sphere ||dg|| = epsilon for worst-case stress tests.
CVec sample_uncertainty(const ChannelSet& channels, int k, Rng& rng, bool boundary);

// i.i.d. normalized passive-eavesdropper draws: CSCG vectors with
// per-entry variance 1/N_T, so E{||l_tilde||^2} = 1. Used only by the
// Monte Carlo validators and the quantile oracle.
std::vector<CVec> draw_eavesdropper_channels(const SystemConfig& config,
                                             const FadingSpec& spec,
                                             int count,
                                             std::uint64_t seed);

}  // namespace swiptsec
