#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

#include "lht/calibration.hpp"
#include "lht/simharness.hpp"

namespace lht::io {

// Doubles round-trip exactly at 17 significant digits.
std::string format_g17(double v);

// Header-free CSV, one variable per line, one observation per column.
// Dimensions must match exactly; parse errors name the offending line.
Eigen::MatrixXd load_matrix_csv(const std::string& path, int p, int n);
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// Raw little-endian binary: uint64 p, uint64 n, then p*n float64 column-major.
Eigen::MatrixXd load_matrix_bin(const std::string& path, int p, int n);
void save_matrix_bin(const std::string& path, const Eigen::MatrixXd& m);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

nlohmann::json calibration_to_json(const calib::TestCalibration& cal);
nlohmann::json summary_to_json(const sim::SummaryReport& report);

// CSV emissions for plotting: stat,theoretical,empirical / stat,left,right,count
std::string qq_csv(const sim::SummaryReport& report);
std::string histogram_csv(const sim::SummaryReport& report);

} // namespace lht::io
