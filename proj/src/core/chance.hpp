#pragma once

namespace swiptsec {

// Deterministic replacement data for the passive-eavesdropper chance
// constraint. quantile_coeff is the (1 - kappa^(1/J))-quantile of
// 1/Tr(L_tilde) under the adopted normalization E{||l_tilde||^2} = 1,
// i.e. Tr(L_tilde) ~ Gamma(shape N_T, scale 1/N_T); in closed form
// 1 / F_Gamma^{-1}(kappa^(1/J)). Monotone non-increasing in kappa.
struct ChanceBound {
    double quantile_coeff = 0.0;
    double rhs_scale = 0.0;  // quantile_coeff * gamma_tol * sigma_tilde_sq
    int n_t = 0;
    double kappa = 0.0;
    int j = 0;
    bool dropped = false;  // kappa == 0: the constraint can be removed
};

// kappa in [0, 1); kappa == 1 throws (the quantile is unbounded).
ChanceBound chance_quantile(int n_t, double kappa, int j);

// Same bound with the scenario scale folded in.
ChanceBound chance_quantile_scaled(int n_t, double kappa, int j, double gamma_tol,
                                   double sigma_tilde_sq);

}  // namespace swiptsec
