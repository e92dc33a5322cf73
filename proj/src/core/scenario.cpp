#include "core/scenario.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace swiptsec {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw std::invalid_argument("scenario field '" + path + "': " + why);
}

double get_finite(const json& j, const std::string& path, double fallback) {
    if (!j.contains(path)) return fallback;
    const json& v = j.at(path);
    if (!v.is_number()) bad_field(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad_field(path, "must be finite");
    return d;
}

int get_int(const json& j, const std::string& path, int fallback) {
    if (!j.contains(path)) return fallback;
    const json& v = j.at(path);
    if (!v.is_number_integer()) bad_field(path, "expected an integer");
    return v.get<int>();
}

// Scalar or array of dBm values -> Watts vector (scalar broadcasts).
// null disables the bound/floor (0 W or the caller-chosen meaning).
std::vector<double> get_dbm_list(const json& j, const std::string& path,
                                 double fallback_dbm) {
    std::vector<double> out;
    if (!j.contains(path)) {
        out.push_back(dbm_to_watts(fallback_dbm));
        return out;
    }
    const json& v = j.at(path);
    if (v.is_null()) {
        out.push_back(0.0);
        return out;
    }
    auto one = [&](const json& e) {
        if (!e.is_number()) bad_field(path, "expected dBm numbers");
        const double d = e.get<double>();
        if (!std::isfinite(d)) bad_field(path, "dBm values must be finite");
        out.push_back(dbm_to_watts(d));
    };
    if (v.is_array()) {
        if (v.empty()) bad_field(path, "array must be non-empty");
        for (const auto& e : v) one(e);
    } else {
        one(v);
    }
    return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

json default_scenario_json() {
    return json::parse(R"({
  "system": {
    "n_t": 6,
    "k_total": 4,
    "j_eaves": 5,
    "gamma_req_db": 15.0,
    "gamma_tol_db": 0.0,
    "gamma_tol_k_db": 0.0,
    "kappa": 0.99,
    "p_min_dbm": 0.0,
    "p_min_idle_dbm": 0.0,
    "p_max_antenna_dbm": 30.0,
    "eta": 0.5,
    "sigma_ant_sq_dbm": -111.0,
    "sigma_s_sq_dbm": -35.0,
    "sigma_est_sq": 0.05
  },
  "fading": {
    "rician_k_factor_db": 6.0,
    "shadowing_db": 0.0,
    "carrier_freq_hz": 470000000.0,
    "antenna_gain_db": 10.0,
    "ref_distance_m": 2.0,
    "max_distance_m": 20.0,
    "breakpoint_m": 30.0,
    "pathloss_exp_near": 2.0,
    "pathloss_exp_far": 3.5
  },
  "solver": { "tol": 1e-8, "max_iter": 200 },
  "output": { "directory": ".", "formats": ["json", "csv"] }
})");
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("scenario: expected a JSON object");
    Scenario s;
    const json defaults = default_scenario_json();
    json norm = defaults;

    const json sys = j.value("system", json::object());
    for (const auto& [key, val] : sys.items()) {
        if (!defaults.at("system").contains(key)) {
            bad_field("system." + key, "unknown field");
        }
        norm["system"][key] = val;
    }
    const json& ns = norm.at("system");

    s.system.n_t = get_int(ns, "n_t", 6);
    s.system.k_total = get_int(ns, "k_total", 4);
    s.system.j_eaves = get_int(ns, "j_eaves", 5);
    s.system.gamma_req = db_to_linear(get_finite(ns, "gamma_req_db", 15.0));
    s.system.gamma_tol = db_to_linear(get_finite(ns, "gamma_tol_db", 0.0));
    {
        const json& v = ns.at("gamma_tol_k_db");
        s.system.gamma_tol_k.clear();
        if (v.is_array()) {
            for (const auto& e : v) s.system.gamma_tol_k.push_back(db_to_linear(e.get<double>()));
        } else if (v.is_number()) {
            s.system.gamma_tol_k.push_back(db_to_linear(v.get<double>()));
        } else {
            bad_field("system.gamma_tol_k_db", "expected dB number or array");
        }
    }
    s.system.kappa = get_finite(ns, "kappa", 0.99);
    s.system.p_min_desired_w = get_dbm_list(ns, "p_min_dbm", 0.0).front();
    s.system.p_min_idle_w = get_dbm_list(ns, "p_min_idle_dbm", 0.0);
    s.system.p_max_antenna_w = get_dbm_list(ns, "p_max_antenna_dbm", 30.0);
    s.system.eta = get_finite(ns, "eta", 0.5);
    s.system.sigma_ant_sq_w = dbm_to_watts(get_finite(ns, "sigma_ant_sq_dbm", -111.0));
    s.system.sigma_s_sq_w = dbm_to_watts(get_finite(ns, "sigma_s_sq_dbm", -35.0));
    s.system.sigma_est_sq = get_finite(ns, "sigma_est_sq", 0.05);
    try {
        s.system.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("scenario system: ") + e.what());
    }

    const json fad = j.value("fading", json::object());
    for (const auto& [key, val] : fad.items()) {
        if (!defaults.at("fading").contains(key)) {
            bad_field("fading." + key, "unknown field");
        }
        norm["fading"][key] = val;
    }
    const json& nf = norm.at("fading");
    s.fading.rician_k_factor_db = get_finite(nf, "rician_k_factor_db", 6.0);
    s.fading.shadowing_db = get_finite(nf, "shadowing_db", 0.0);
    s.fading.carrier_freq_hz = get_finite(nf, "carrier_freq_hz", 470e6);
    s.fading.antenna_gain_db = get_finite(nf, "antenna_gain_db", 10.0);
    s.fading.ref_distance_m = get_finite(nf, "ref_distance_m", 2.0);
    s.fading.max_distance_m = get_finite(nf, "max_distance_m", 20.0);
    s.fading.breakpoint_m = get_finite(nf, "breakpoint_m", 30.0);
    s.fading.pathloss_exp_near = get_finite(nf, "pathloss_exp_near", 2.0);
    s.fading.pathloss_exp_far = get_finite(nf, "pathloss_exp_far", 3.5);
    try {
        s.fading.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("scenario fading: ") + e.what());
    }

    if (j.contains("solver")) {
        const json& sol = j.at("solver");
        s.solver.tol = get_finite(sol, "tol", 1e-8);
        s.solver.max_iter = get_int(sol, "max_iter", 200);
        if (s.solver.tol <= 0.0 || s.solver.max_iter < 1) {
            bad_field("solver", "tol > 0 and max_iter >= 1 required");
        }
        norm["solver"] = json{{"tol", s.solver.tol}, {"max_iter", s.solver.max_iter}};
    }
    if (j.contains("output")) {
        const json& out = j.at("output");
        s.output.directory = out.value("directory", std::string("."));
        if (out.contains("formats")) {
            s.output.formats = out.at("formats").get<std::vector<std::string>>();
        }
        norm["output"] =
            json{{"directory", s.output.directory}, {"formats", s.output.formats}};
    }

    if (j.contains("sweep")) {
        const json& sw = j.at("sweep");
        SweepSpec spec;
        spec.swept_parameter = sw.value("parameter", std::string("gamma_req_db"));
        if (sw.contains("values")) {
            spec.values = sw.at("values").get<std::vector<double>>();
        } else {
            spec.values = {5.0, 10.0, 15.0, 20.0};
        }
        spec.trials = sw.value("trials", 200);
        spec.master_seed = sw.value("master_seed", std::uint64_t{1});
        spec.outage_groups = sw.value("outage_groups", 2000);
        spec.schemes.clear();
        if (sw.contains("schemes")) {
            for (const auto& name : sw.at("schemes")) {
                spec.schemes.push_back(variant_from_name(name.get<std::string>()));
            }
        } else {
            spec.schemes = {Variant::kOptimal, Variant::kSuboptimal, Variant::kBaseline1,
                            Variant::kBaseline2, Variant::kBenchmarkKappa0};
        }
        spec.base_config = s.system;
        spec.base_fading = s.fading;
        spec.solver_tol = s.solver.tol;
        try {
            spec.validate();
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("scenario sweep: ") + e.what());
        }
        norm["sweep"] = sw;
        s.sweep = std::move(spec);
    }

    s.normalized = std::move(norm);
    return s;
}

Scenario scenario_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

Scenario scenario_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return scenario_from_string(text);
}

json scenario_to_json(const Scenario& s) { return s.normalized; }

json policy_to_json(const TransmitPolicy& policy) {
    auto mat = [](const CMat& m) {
        json re = json::array(), im = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            json rr = json::array(), ri = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                rr.push_back(std::real(m(i, c)));
                ri.push_back(std::imag(m(i, c)));
            }
            re.push_back(std::move(rr));
            im.push_back(std::move(ri));
        }
        return json{{"re", std::move(re)}, {"im", std::move(im)}};
    };
    json j{{"w_cov", mat(policy.w_cov)},
           {"an_cov", mat(policy.an_cov)},
           {"es_cov", mat(policy.es_cov)},
           {"rho", policy.rho},
           {"delta", policy.delta},
           {"nu", policy.nu}};
    if (policy.beam_vector) {
        json re = json::array(), im = json::array();
        for (Eigen::Index i = 0; i < policy.beam_vector->size(); ++i) {
            re.push_back(std::real((*policy.beam_vector)(i)));
            im.push_back(std::imag((*policy.beam_vector)(i)));
        }
        j["beam_vector"] = json{{"re", std::move(re)}, {"im", std::move(im)}};
    }
    return j;
}

TransmitPolicy policy_from_json(const json& j) {
    auto mat = [](const json& mj) {
        const auto& re = mj.at("re");
        const auto& im = mj.at("im");
        const Eigen::Index n = static_cast<Eigen::Index>(re.size());
        CMat m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < n; ++c) {
                m(i, c) = Complex(re.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>(),
                                  im.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>());
            }
        }
        return m;
    };
    TransmitPolicy p;
    p.w_cov = mat(j.at("w_cov"));
    p.an_cov = mat(j.at("an_cov"));
    p.es_cov = mat(j.at("es_cov"));
    p.rho = j.at("rho").get<double>();
    p.delta = j.value("delta", std::vector<double>{});
    p.nu = j.value("nu", std::vector<double>{});
    return p;
}

json solve_report_to_json(const SolveReport& report, const std::string& scheme,
                          std::uint64_t seed) {
    json j{{"scheme", scheme},
           {"seed", seed},
           {"status", status_name(report.status)},
           {"iterations", report.iterations},
           {"wall_time_s", report.wall_time_s},
           {"rel_gap", report.rel_gap},
           {"primal_residual", report.primal_residual},
           {"dual_residual", report.dual_residual}};
    if (!report.message.empty()) j["message"] = report.message;
    if (report.status == SolveStatus::kOptimal) {
        j["objective_w"] = report.objective_w;
        j["objective_dbm"] = watts_to_dbm(report.objective_w);
        j["w_rank"] = report.w_rank;
        j["policy"] = policy_to_json(report.policy);
        j["kkt_residuals"] = report.kkt_residuals;
        j["duals"] = json{{"mu", report.duals.mu},
                          {"beta", report.duals.beta},
                          {"theta", report.duals.theta}};
    }
    return j;
}

json constraint_report_to_json(const ConstraintReport& report) {
    json margins = json::object();
    for (const auto& e : report.entries) margins[e.tag] = e.margin;
    return json{{"margins", margins},
                {"min_margin", report.min_margin()},
                {"empirical_outage", report.empirical_outage},
                {"robustness_samples", report.robustness_samples}};
}

}  // namespace swiptsec
