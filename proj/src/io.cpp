#include "lht/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace lht::io {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path, int p, int n) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open data file: " + path);
    Eigen::MatrixXd m(p, n);
    std::string line;
    int row = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (row >= p)
            throw std::invalid_argument(path + ": more than the declared " +
                                        std::to_string(p) + " rows at line " +
                                        std::to_string(lineno));
        std::stringstream ss(line);
        std::string field;
        int col = 0;
        while (std::getline(ss, field, ',')) {
            if (col >= n)
                throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                            " has more than the declared " +
                                            std::to_string(n) + " columns");
            std::size_t used = 0;
            double value;
            try {
                value = std::stod(field, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                            ": malformed number '" + field + "'");
            }
            while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
                ++used;
            if (used != field.size())
                throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                            ": malformed number '" + field + "'");
            if (!std::isfinite(value))
                throw std::invalid_argument(path + ": line " + std::to_string(lineno) +
                                            ": non-finite entry");
            m(row, col++) = value;
        }
        if (col != n)
            throw std::invalid_argument(path + ": line " + std::to_string(lineno) + " has " +
                                        std::to_string(col) + " columns, expected " +
                                        std::to_string(n));
        ++row;
    }
    if (row != p)
        throw std::invalid_argument(path + ": found " + std::to_string(row) +
                                    " rows, expected " + std::to_string(p));
    return m;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_g17(m(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd load_matrix_bin(const std::string& path, int p, int n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open data file: " + path);
    std::uint64_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw std::invalid_argument(path + ": truncated header");
    if (dims[0] != static_cast<std::uint64_t>(p) || dims[1] != static_cast<std::uint64_t>(n))
        throw std::invalid_argument(path + ": stored dimensions " + std::to_string(dims[0]) +
                                    "x" + std::to_string(dims[1]) +
                                    " disagree with the declared " + std::to_string(p) + "x" +
                                    std::to_string(n));
    Eigen::MatrixXd m(p, n); // Eigen default storage is column-major
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * p * n));
    if (!in) throw std::invalid_argument(path + ": truncated payload");
    if (!m.allFinite()) throw std::invalid_argument(path + ": non-finite entries");
    return m;
}

void save_matrix_bin(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                   static_cast<std::uint64_t>(m.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json calibration_to_json(const calib::TestCalibration& cal) {
    return {{"center", cal.center},
            {"mu", cal.mu},
            {"sigma", cal.sigma},
            {"hypothesis", cal.hypothesis == calib::Hypothesis::Null ? "null" : "spiked"}};
}

nlohmann::json summary_to_json(const sim::SummaryReport& report) {
    nlohmann::json j;
    nlohmann::json cfg = {{"p", report.config.p},
                          {"n", report.config.n},
                          {"model", sim::to_string(report.config.model.kind)},
                          {"dist", sim::to_string(report.config.dist)},
                          {"reps", report.config.reps},
                          {"level", report.config.level},
                          {"seed", report.config.seed}};
    if (report.config.model.kind == sim::ModelKind::M3 ||
        report.config.model.kind == sim::ModelKind::M4)
        cfg["rotation_seed"] = report.config.model.rotation_seed;
    if (report.config.model.kind == sim::ModelKind::Custom) {
        nlohmann::json spikes = nlohmann::json::array();
        for (const auto& g : report.config.model.custom_spikes)
            spikes.push_back({{"alpha", g.alpha}, {"d", g.d}});
        cfg["custom_spikes"] = spikes;
    }
    j["config"] = cfg;
    j["hypothesis"] = report.null_model ? "null" : "spiked";

    nlohmann::json stats;
    for (const auto& [name, s] : report.stats)
        stats[name] = {{"empirical_mean", s.empirical_mean},
                       {"empirical_variance", s.empirical_variance},
                       {"ks_distance", s.ks_distance},
                       {"rejection_rate", s.rejection_rate}};
    nlohmann::json rstat = {{"rejection_rate", report.r_rejection_rate}};
    if (report.r_null_summary) {
        rstat["empirical_mean"] = report.r_null_summary->empirical_mean;
        rstat["empirical_variance"] = report.r_null_summary->empirical_variance;
    }
    stats["R"] = rstat;
    j["statistics"] = stats;

    j["predicted"] = report.predicted;

    nlohmann::json cals;
    for (const auto& [name, cal] : report.calibrations_used)
        cals[name] = calibration_to_json(cal);
    j["calibration"] = cals;
    return j;
}

std::string qq_csv(const sim::SummaryReport& report) {
    std::string out = "stat,theoretical,empirical\n";
    for (const auto& [name, pairs] : report.qq)
        for (const auto& pr : pairs)
            out += name + "," + format_g17(pr.theoretical) + "," + format_g17(pr.empirical) + "\n";
    return out;
}

std::string histogram_csv(const sim::SummaryReport& report) {
    std::string out = "stat,bin_left,bin_right,count\n";
    for (const auto& [name, bins] : report.histograms)
        for (const auto& b : bins)
            out += name + "," + format_g17(b.left) + "," + format_g17(b.right) + "," +
                   std::to_string(b.count) + "\n";
    return out;
}

} // namespace lht::io
