#include "lht/cli.hpp"

#include <cmath>

#include "lht/io.hpp"
#include "lht/stats.hpp"

namespace lht::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config field '" + field + "': " + why);
}

int require_int(const json& cfg, const std::string& field, int lo, int hi) {
    if (!cfg.contains(field)) bad_field(field, "missing");
    if (!cfg[field].is_number_integer()) bad_field(field, "must be an integer");
    const auto v = cfg[field].get<long long>();
    if (v < lo || v > hi)
        bad_field(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

double require_number(const json& cfg, const std::string& field, double lo, double hi) {
    if (!cfg.contains(field)) bad_field(field, "missing");
    if (!cfg[field].is_number()) bad_field(field, "must be a number");
    const double v = cfg[field].get<double>();
    if (!(v >= lo && v <= hi)) bad_field(field, "out of range");
    return v;
}

double optional_number(const json& cfg, const std::string& field, double fallback) {
    if (!cfg.contains(field)) return fallback;
    if (!cfg[field].is_number()) bad_field(field, "must be a number");
    return cfg[field].get<double>();
}

spectra::MomentProfile parse_moments(const json& cfg) {
    spectra::MomentProfile m;
    if (!cfg.contains("moments")) return m;
    const auto& j = cfg["moments"];
    m.alpha_x = optional_number(j, "alpha_x", 1.0);
    m.beta_x = optional_number(j, "beta_x", 0.0);
    if (m.alpha_x < 0.0 || m.alpha_x > 1.0) bad_field("moments.alpha_x", "must lie in [0,1]");
    if (!std::isfinite(m.beta_x)) bad_field("moments.beta_x", "must be finite");
    return m;
}

std::vector<spectra::SpikeGroup> parse_spike_groups(const json& arr, const std::string& field) {
    if (!arr.is_array()) bad_field(field, "must be an array of {alpha, d}");
    std::vector<spectra::SpikeGroup> groups;
    for (const auto& g : arr) {
        spectra::SpikeGroup sg;
        sg.alpha = require_number(g, "alpha", 0.0, 1e18);
        sg.d = g.contains("d") ? require_int(g, "d", 1, 1 << 20) : 1;
        groups.push_back(sg);
    }
    return groups;
}

std::optional<spectra::SpikeSpec> parse_spikes(const json& cfg, int p) {
    if (!cfg.contains("spikes")) return std::nullopt;
    const auto& j = cfg["spikes"];
    spectra::SpikeSpec spec;
    spec.groups = parse_spike_groups(j.contains("groups") ? j["groups"] : json::array(),
                                     "spikes.groups");
    spec.standard_basis = true;
    if (j.contains("basis") && j["basis"].is_string() &&
        j["basis"].get<std::string>() != "standard-basis")
        bad_field("spikes.basis", "only 'standard-basis' is accepted in config files");
    (void)p;
    return spec;
}

json series_to_json(const mp::SeriesConstants& s) {
    return {{"i1", s.i1}, {"i2", s.i2}, {"j1", s.j1}};
}

json ratio_constants(double c) {
    json j;
    j["c"] = c;
    j["rho"] = mp::rho(c);
    j["ctilde"] = mp::ctilde(c);
    j["ct"] = mp::ct_value(c);
    j["v_center"] = mp::v_center(c);
    j["series_u"] = series_to_json(mp::series_constants_U(c));
    j["series_v"] = series_to_json(mp::series_constants_V(c));
    return j;
}

} // namespace

CommandOutput run_calibrate(const json& config) {
    const int p = require_int(config, "p", 2, 1 << 24);
    const int n = require_int(config, "n", 2, 1 << 24);
    const auto moments = parse_moments(config);
    const double level = optional_number(config, "level", 0.05);
    if (!(level > 0.0 && level < 1.0)) bad_field("level", "must lie in (0,1)");
    auto spikes = parse_spikes(config, p);
    const int M = spikes ? spikes->total_multiplicity() : 0;

    const mp::AspectRatio ratios(p, n, M);
    const mp::AspectRatio null_ratios(p, n, 0);

    CommandOutput out;
    json& j = out.report;
    j["p"] = p;
    j["n"] = n;
    j["M"] = M;
    j["c_n"] = ratios.c_n();
    j["c_nM"] = ratios.c_nM();
    j["level"] = level;

    json constants;
    constants["null"] = ratio_constants(ratios.c_n());
    if (spikes && M > 0) {
        json alt = ratio_constants(ratios.c_nM());
        const auto extra = mp::extra_terms(ratios.c_nM(), M);
        alt["extra_terms"] = {{"u", extra.u}, {"w", extra.w}, {"v", extra.v}};
        constants["alternative"] = alt;
    }
    j["constants"] = constants;

    json tests;
    const spectra::SpikeSpec* sp = (spikes && M > 0) ? &*spikes : nullptr;
    tests["U"]["null"] = io::calibration_to_json(calib::calib_U(null_ratios, nullptr, moments));
    tests["W"]["null"] = io::calibration_to_json(calib::calib_W(null_ratios, nullptr, moments));
    tests["V"]["null"] = io::calibration_to_json(calib::calib_V(null_ratios, nullptr, moments));
    if (sp) {
        tests["U"]["alternative"] = io::calibration_to_json(calib::calib_U(ratios, sp, moments));
        tests["W"]["alternative"] = io::calibration_to_json(calib::calib_W(ratios, sp, moments));
        tests["V"]["alternative"] = io::calibration_to_json(calib::calib_V(ratios, sp, moments));
    } else if (spikes) {
        // M = 0 request: the alternative block equals the null block
        spectra::SpikeSpec empty;
        tests["U"]["alternative"] =
            io::calibration_to_json(calib::calib_U(null_ratios, &empty, moments));
        tests["W"]["alternative"] =
            io::calibration_to_json(calib::calib_W(null_ratios, &empty, moments));
        tests["V"]["alternative"] =
            io::calibration_to_json(calib::calib_V(null_ratios, &empty, moments));
    }
    const auto rl = calib::rlrt_calibration(null_ratios);
    tests["R"]["null"] = {{"mu_r", rl.mu_r}, {"sigma_r", rl.sigma_r}};
    j["tests"] = tests;
    return out;
}

CommandOutput run_test(const json& config) {
    const int p = require_int(config, "p", 2, 1 << 24);
    const int n = require_int(config, "n", 2, 1 << 24);
    if (p >= n) bad_field("p", "this analysis requires p < n");
    const auto moments = parse_moments(config);
    const double level = require_number(config, "level", 0.0051, 0.4999);
    if (!config.contains("data")) bad_field("data", "missing");
    const auto& d = config["data"];
    if (!d.contains("path") || !d["path"].is_string()) bad_field("data.path", "missing");
    const std::string path = d["path"].get<std::string>();
    const std::string format = d.contains("format") ? d["format"].get<std::string>() : "csv";

    Eigen::MatrixXd data;
    if (format == "csv") {
        data = io::load_matrix_csv(path, p, n);
    } else if (format == "bin") {
        data = io::load_matrix_bin(path, p, n);
    } else {
        bad_field("data.format", "must be 'csv' or 'bin'");
    }

    const auto B = spectra::sample_covariance(data);
    const auto spectrum = spectra::eigen_spectrum(B);
    const auto raw = spectra::raw_statistics(spectrum);

    const mp::AspectRatio ratios(p, n, 0);
    const auto repU = calib::test_statistic(raw.u, calib::calib_U(ratios, nullptr, moments), level);
    const auto repW = calib::test_statistic(raw.w, calib::calib_W(ratios, nullptr, moments), level);
    const auto repV = calib::test_statistic(raw.v, calib::calib_V(ratios, nullptr, moments), level);
    const auto repR = calib::test_statistic_rlrt(raw.r, calib::rlrt_calibration(ratios), level);

    auto rep_json = [](const calib::TestReport& r) {
        return json{{"raw", r.raw}, {"z", r.z}, {"p_value", r.p_value}, {"reject", r.reject}};
    };

    CommandOutput out;
    out.report = {{"p", p},
                  {"n", n},
                  {"level", level},
                  {"alpha_x", moments.alpha_x},
                  {"beta_x", moments.beta_x},
                  {"statistics",
                   {{"U", rep_json(repU)},
                    {"W", rep_json(repW)},
                    {"V", rep_json(repV)},
                    {"R", rep_json(repR)}}}};

    std::string csv = "stat,raw,z,p_value,reject\n";
    auto row = [&](const char* name, const calib::TestReport& r) {
        csv += std::string(name) + "," + io::format_g17(r.raw) + "," + io::format_g17(r.z) + "," +
               io::format_g17(r.p_value) + "," + (r.reject ? "1" : "0") + "\n";
    };
    row("U", repU);
    row("W", repW);
    row("V", repV);
    row("R", repR);
    out.csv_files["test_report.csv"] = csv;
    return out;
}

CommandOutput run_simulate(const json& config, Exec exec) {
    sim::ExperimentConfig ec;
    ec.p = require_int(config, "p", 2, 1 << 20);
    ec.n = require_int(config, "n", 2, 1 << 20);
    if (ec.p >= ec.n) bad_field("p", "this analysis requires p < n");
    ec.reps = require_int(config, "reps", 1, 1 << 24);
    ec.level = require_number(config, "level", 0.0051, 0.4999);
    ec.seed = config.contains("seed")
                  ? static_cast<std::uint64_t>(require_int(config, "seed", 0, 1 << 30))
                  : 1;

    const std::string dist =
        config.contains("dist") ? config["dist"].get<std::string>() : "gaussian";
    if (dist == "gaussian") {
        ec.dist = sim::DistKind::Gaussian;
    } else if (dist == "gamma_shifted") {
        ec.dist = sim::DistKind::GammaShifted;
    } else {
        bad_field("dist", "must be 'gaussian' or 'gamma_shifted'");
    }

    std::string model = "null";
    if (config.contains("model")) {
        if (config["model"].is_string()) {
            model = config["model"].get<std::string>();
        } else if (config["model"].is_object()) {
            model = "custom";
            ec.model.custom_spikes =
                parse_spike_groups(config["model"]["custom_spikes"], "model.custom_spikes");
        } else {
            bad_field("model", "must be a string or an object with custom_spikes");
        }
    }
    if (model == "null") {
        ec.model.kind = sim::ModelKind::Null;
    } else if (model == "M1") {
        ec.model.kind = sim::ModelKind::M1;
    } else if (model == "M2") {
        ec.model.kind = sim::ModelKind::M2;
    } else if (model == "M3") {
        ec.model.kind = sim::ModelKind::M3;
    } else if (model == "M4") {
        ec.model.kind = sim::ModelKind::M4;
    } else if (model == "custom") {
        ec.model.kind = sim::ModelKind::Custom;
    } else {
        bad_field("model", "must be one of null, M1, M2, M3, M4 or a custom object");
    }
    if (config.contains("rotation_seed"))
        ec.model.rotation_seed =
            static_cast<std::uint64_t>(require_int(config, "rotation_seed", 0, 1 << 30));

    const auto report = sim::run_experiment(ec, exec);

    CommandOutput out;
    out.report = io::summary_to_json(report);
    out.csv_files["qq.csv"] = io::qq_csv(report);
    out.csv_files["histograms.csv"] = io::histogram_csv(report);
    return out;
}

CommandOutput run_power(const json& config) {
    const int p = require_int(config, "p", 2, 1 << 20);
    const int n = require_int(config, "n", 2, 1 << 20);
    if (p >= n) bad_field("p", "this analysis requires p < n");
    const auto moments = parse_moments(config);
    const double xi = require_number(config, "level", 0.0051, 0.4999);
    if (!config.contains("alpha_grid") || !config["alpha_grid"].is_array())
        bad_field("alpha_grid", "must be an array of spike values");
    const int d = config.contains("d") ? require_int(config, "d", 1, 1 << 10) : 1;
    const bool include_null_row =
        config.contains("include_null_row") && config["include_null_row"].get<bool>();

    std::string csv =
        "alpha,power_U,power_W,power_V,power_R,kappa_U,kappa_W,kappa_V,kappa_R\n";
    const double z = stats::normal_quantile(1.0 - xi);

    if (include_null_row) {
        // no spikes: every test's power collapses to its size
        csv += "0," + io::format_g17(xi) + "," + io::format_g17(xi) + "," + io::format_g17(xi) +
               "," + io::format_g17(xi) + "," + io::format_g17(-z) + "," + io::format_g17(-z) +
               "," + io::format_g17(-z) + ",nan\n";
    }

    for (const auto& av : config["alpha_grid"]) {
        if (!av.is_number()) bad_field("alpha_grid", "entries must be numbers");
        const double alpha = av.get<double>();
        const mp::AspectRatio ratios(p, n, d);
        spectra::SpikeSpec spikes;
        spikes.groups = {{alpha, d}};
        spikes.standard_basis = true;
        spectra::validate_spike_spec(spikes, ratios); // subcritical grid points fail here

        const auto pu = calib::power_U(ratios, spikes, moments, xi);
        const auto pw = calib::power_W(ratios, spikes, moments, xi);
        const auto pv = calib::power_V(ratios, spikes, moments, xi);
        const auto panel = calib::kappa_panel(ratios, spikes, moments, xi);
        std::string pr = "nan", kr = "nan";
        if (panel.has_r) {
            const double s1sq = spectra::s_k_squared(alpha, 1, 1.0, moments, ratios.c_n());
            const auto prr = calib::power_R(ratios, alpha, 1, s1sq, xi);
            pr = io::format_g17(prr.power);
            kr = io::format_g17(panel.r);
        }
        csv += io::format_g17(alpha) + "," + io::format_g17(pu.power) + "," +
               io::format_g17(pw.power) + "," + io::format_g17(pv.power) + "," + pr + "," +
               io::format_g17(pu.kappa) + "," + io::format_g17(panel.w) + "," +
               io::format_g17(panel.v) + "," + kr + "\n";
    }

    CommandOutput out;
    out.report = {{"p", p}, {"n", n}, {"level", xi}};
    out.csv_files["power_curve.csv"] = csv;
    return out;
}

CommandOutput run_oracle_check(const json& config, Exec exec) {
    std::vector<double> grid;
    if (config.contains("c_grid")) {
        for (const auto& v : config["c_grid"]) {
            if (!v.is_number()) bad_field("c_grid", "entries must be numbers");
            grid.push_back(v.get<double>());
        }
    } else {
        for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
    }
    std::vector<std::string> quantities = {"series_U", "series_V", "ct",
                                           "v_center", "extra_U", "extra_W", "extra_V"};
    if (config.contains("quantities")) {
        quantities.clear();
        for (const auto& q : config["quantities"]) quantities.push_back(q.get<std::string>());
    }

    oracle::QuadPolicy policy;
    CommandOutput out;
    json rows = json::array();
    bool all_pass = true;

    auto push = [&](double c, const std::string& name, double closed, double orac, double tol) {
        const double diff = std::abs(closed - orac);
        const bool pass = diff <= tol;
        all_pass = all_pass && pass;
        rows.push_back({{"c", c},
                        {"quantity", name},
                        {"closed_form", closed},
                        {"oracle", orac},
                        {"abs_diff", diff},
                        {"tol", tol},
                        {"pass", pass}});
    };

    for (double c : grid) {
        for (const auto& q : quantities) {
            if (q == "series_U") {
                const auto s = mp::series_constants_U(c);
                const auto o = oracle::contour_series_U(c, policy, exec);
                push(c, "I1_U", s.i1, o.i1, 1e-6);
                push(c, "I2_U", s.i2, o.i2, 1e-6);
                push(c, "J1_U", s.j1, o.j1, 1e-6);
            } else if (q == "series_V") {
                const auto s = mp::series_constants_V(c);
                const auto o = oracle::contour_series_V(c, policy, exec);
                push(c, "I1_V", s.i1, o.i1, 1e-6);
                push(c, "I2_V", s.i2, o.i2, 1e-6);
                push(c, "J1_V", s.j1, o.j1, 1e-6);
            } else if (q == "ct") {
                push(c, "ct", mp::ct_value(c),
                     oracle::mp_expectation(oracle::Kernel::Log1p, c, policy), 1e-8);
            } else if (q == "v_center") {
                push(c, "v_center", mp::v_center(c),
                     oracle::mp_expectation(oracle::Kernel::Ratio, c, policy), 1e-8);
            } else if (q == "extra_U") {
                push(c, "extra_U", mp::extra_terms(c, 1).u,
                     oracle::extra_term_num(calib::StatKind::U, c, policy), 1e-6);
            } else if (q == "extra_W") {
                push(c, "extra_W", mp::extra_terms(c, 1).w,
                     oracle::extra_term_num(calib::StatKind::W, c, policy), 1e-8);
            } else if (q == "extra_V") {
                push(c, "extra_V", mp::extra_terms(c, 1).v,
                     oracle::extra_term_num(calib::StatKind::V, c, policy), 1e-6);
            } else {
                bad_field("quantities", "unknown quantity '" + q + "'");
            }
        }
    }

    out.report = {{"policy",
                   {{"nodes", policy.nodes},
                    {"nodes_j1_base", policy.nodes_j1},
                    {"r_schedule", policy.r_values}}},
                  {"rows", rows},
                  {"all_pass", all_pass}};
    out.ok = all_pass;
    return out;
}

} // namespace lht::cli
