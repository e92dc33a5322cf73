#include "swiptsec.h"

#include <cstring>
#include <sstream>
#include <string>

#include "core/recovery.hpp"
#include "core/scenario.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int set_error(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, e.what());
    } catch (const std::exception& e) {
        return set_error(SWIPTSEC_ERR_INTERNAL, e.what());
    }
}

std::vector<swiptsec::Variant> parse_schemes(const char* csv) {
    std::vector<swiptsec::Variant> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(swiptsec::variant_from_name(item));
    }
    if (out.empty()) throw std::invalid_argument("no schemes given");
    return out;
}

}  // namespace

struct swiptsec_scenario {
    swiptsec::Scenario scenario;
};

extern "C" {

const char* swiptsec_version(void) { return "0.1.0"; }

const char* swiptsec_last_error(void) { return g_last_error.c_str(); }

void swiptsec_string_free(char* s) { delete[] s; }

int swiptsec_scenario_parse(const char* json_text, swiptsec_scenario** out) {
    if (json_text == nullptr || out == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    }
    return guarded([&] {
        try {
            auto* handle = new swiptsec_scenario{swiptsec::scenario_from_string(json_text)};
            *out = handle;
            return SWIPTSEC_OK;
        } catch (const std::invalid_argument& e) {
            return set_error(SWIPTSEC_ERR_PARSE, e.what());
        }
    });
}

int swiptsec_scenario_load(const char* path, swiptsec_scenario** out) {
    if (path == nullptr || out == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    }
    return guarded([&] {
        try {
            auto* handle = new swiptsec_scenario{swiptsec::scenario_load(path)};
            *out = handle;
            return SWIPTSEC_OK;
        } catch (const std::invalid_argument& e) {
            return set_error(SWIPTSEC_ERR_PARSE, e.what());
        } catch (const std::runtime_error& e) {
            return set_error(SWIPTSEC_ERR_IO, e.what());
        }
    });
}

int swiptsec_scenario_to_json(const swiptsec_scenario* s, char** json_out) {
    if (s == nullptr || json_out == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    }
    return guarded([&] {
        *json_out = dup_string(swiptsec::scenario_to_json(s->scenario).dump(2));
        return SWIPTSEC_OK;
    });
}

void swiptsec_scenario_free(swiptsec_scenario* s) { delete s; }

int swiptsec_default_scenario(char** json_out) {
    if (json_out == nullptr) return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    return guarded([&] {
        *json_out = dup_string(swiptsec::default_scenario_json().dump(2));
        return SWIPTSEC_OK;
    });
}

int swiptsec_solve_trial(const swiptsec_scenario* s, const char* scheme, uint64_t seed,
                         char** report_json, char** audit_json) {
    if (s == nullptr || scheme == nullptr || report_json == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    }
    return guarded([&]() -> int {
        using namespace swiptsec;
        const Scenario& sc = s->scenario;
        const Variant variant = variant_from_name(scheme);

        const ChannelSet channels = apply_csi_uncertainty(
            draw_legitimate_channels(sc.system, sc.fading, seed), sc.system.sigma_est_sq);
        const SdpProblem problem = assemble({variant, {}}, channels, sc.system);
        SolverOptions opt;
        opt.tol = sc.solver.tol;
        opt.max_iter = sc.solver.max_iter;
        SolveReport report = solve(problem, opt);

        nlohmann::json rj;
        if (report.status == SolveStatus::kOptimal && problem.layout.w_off >= 0) {
            const RecoveryOutcome ro = construct_rank_one(report, problem);
            rj = solve_report_to_json(report, scheme, seed);
            rj["recovery"] = nlohmann::json{{"invoked", ro.invoked},
                                            {"success", ro.success},
                                            {"message", ro.message}};
            if (ro.success) {
                report.policy = ro.policy;
                rj["policy"] = policy_to_json(ro.policy);
                rj["w_rank"] = numeric_rank(ro.policy.w_cov, 1e-6);
            }
        } else {
            rj = solve_report_to_json(report, scheme, seed);
        }
        *report_json = dup_string(rj.dump(2));

        if (report.status != SolveStatus::kOptimal) {
            if (audit_json != nullptr) *audit_json = dup_string("{}");
            return report.status == SolveStatus::kInfeasible
                       ? set_error(SWIPTSEC_ERR_INFEASIBLE, report.message)
                       : set_error(SWIPTSEC_ERR_NUMERICAL, report.message);
        }
        if (audit_json != nullptr) {
            const auto pool = draw_eavesdropper_channels(
                sc.system, sc.fading, 2000 * std::max(1, sc.system.j_eaves),
                mix_seed(seed, 0xE5));
            const ConstraintReport audit =
                evaluate_constraints(report.policy, channels, sc.system, 2000, pool);
            *audit_json = dup_string(constraint_report_to_json(audit).dump(2));
        }
        return SWIPTSEC_OK;
    });
}

int swiptsec_run_sweep(const swiptsec_scenario* s, const char* schemes_csv, int trials,
                       int jobs, uint64_t master_seed, char** csv_out) {
    if (s == nullptr || csv_out == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    }
    return guarded([&]() -> int {
        using namespace swiptsec;
        const Scenario& sc = s->scenario;
        SweepSpec spec;
        if (sc.sweep) {
            spec = *sc.sweep;
        } else {
            spec.base_config = sc.system;
            spec.base_fading = sc.fading;
            spec.values = {5.0, 10.0, 15.0, 20.0};
            spec.solver_tol = sc.solver.tol;
        }
        if (schemes_csv != nullptr) spec.schemes = parse_schemes(schemes_csv);
        if (trials > 0) spec.trials = trials;
        if (jobs > 0) spec.jobs = jobs;
        if (master_seed > 0) spec.master_seed = master_seed;
        const SweepResult result = sweep(spec);
        *csv_out = dup_string(sweep_csv(result.rows));
        return SWIPTSEC_OK;
    });
}

int swiptsec_audit_report(const swiptsec_scenario* s, const char* report_json,
                          char** audit_json) {
    if (s == nullptr || report_json == nullptr || audit_json == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null argument");
    }
    return guarded([&]() -> int {
        using namespace swiptsec;
        nlohmann::json rj;
        try {
            rj = nlohmann::json::parse(report_json);
        } catch (const nlohmann::json::parse_error& e) {
            return set_error(SWIPTSEC_ERR_PARSE, e.what());
        }
        if (!rj.contains("policy") || !rj.contains("seed")) {
            return set_error(SWIPTSEC_ERR_PARSE, "report lacks policy/seed fields");
        }
        const Scenario& sc = s->scenario;
        const TransmitPolicy policy = policy_from_json(rj.at("policy"));
        const std::uint64_t seed = rj.at("seed").get<std::uint64_t>();
        const ChannelSet channels = apply_csi_uncertainty(
            draw_legitimate_channels(sc.system, sc.fading, seed), sc.system.sigma_est_sq);
        const auto pool = draw_eavesdropper_channels(
            sc.system, sc.fading, 2000 * std::max(1, sc.system.j_eaves),
            mix_seed(seed, 0xE5));
        const ConstraintReport audit =
            evaluate_constraints(policy, channels, sc.system, 2000, pool);
        *audit_json = dup_string(constraint_report_to_json(audit).dump(2));
        return SWIPTSEC_OK;
    });
}

int swiptsec_chance_quantile(int n_t, double kappa, int j, double gamma_tol,
                             double sigma_tilde_sq, double* quantile_coeff,
                             double* rhs_scale) {
    if (quantile_coeff == nullptr) {
        return set_error(SWIPTSEC_ERR_INVALID_ARG, "null output");
    }
    return guarded([&]() -> int {
        const swiptsec::ChanceBound b =
            swiptsec::chance_quantile_scaled(n_t, kappa, j, gamma_tol, sigma_tilde_sq);
        *quantile_coeff = b.dropped ? 0.0 : b.quantile_coeff;
        if (rhs_scale != nullptr) *rhs_scale = b.rhs_scale;
        return SWIPTSEC_OK;
    });
}

}  // extern "C"
