#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "lht/cli.hpp"
#include "lht/io.hpp"
#include "lht/simharness.hpp"

using namespace lht;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "lht_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

// Validates the subset of JSON Schema the shipped schemas use:
// type, required, properties, items and local $ref into $defs.
bool validate(const json& schema, const json& doc, const json& root,
              std::string* why) {
    if (schema.contains("$ref")) {
        const std::string ref = schema["$ref"].get<std::string>();
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0) {
            *why = "unsupported $ref " + ref;
            return false;
        }
        return validate(root["$defs"][ref.substr(prefix.size())], doc, root, why);
    }
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        const bool ok = (type == "object" && doc.is_object()) ||
                        (type == "array" && doc.is_array()) ||
                        (type == "string" && doc.is_string()) ||
                        (type == "boolean" && doc.is_boolean()) ||
                        (type == "integer" && doc.is_number_integer()) ||
                        (type == "number" && doc.is_number());
        if (!ok) {
            *why = "expected " + type + ", got " + doc.dump().substr(0, 60);
            return false;
        }
    }
    if (schema.contains("required"))
        for (const auto& key : schema["required"]) {
            if (!doc.contains(key.get<std::string>())) {
                *why = "missing required key " + key.get<std::string>();
                return false;
            }
        }
    if (schema.contains("properties") && doc.is_object())
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (!doc.contains(key)) continue;
            if (!validate(sub, doc[key], root, why)) {
                *why = key + ": " + *why;
                return false;
            }
        }
    if (schema.contains("items") && doc.is_array())
        for (const auto& item : doc)
            if (!validate(schema["items"], item, root, why)) return false;
    return true;
}

void check_schema(const char* schema_file, const json& doc) {
    const auto schema = json::parse(
        io::read_text_file(std::string(LHT_SOURCE_DIR) + "/schemas/" + schema_file));
    std::string why;
    const bool ok = validate(schema, doc, schema, &why);
    INFO(schema_file << ": " << why);
    CHECK(ok);
}

} // namespace

TEST_CASE("matrix round trips through both data formats") {
    const auto dir = temp_dir();
    const auto m = sim::gen_entries(sim::DistKind::Gaussian, 7, 9, 3, 0);

    const auto csv = (dir / "roundtrip.csv").string();
    io::save_matrix_csv(csv, m);
    CHECK((io::load_matrix_csv(csv, 7, 9) - m).cwiseAbs().maxCoeff() == 0.0);

    const auto bin = (dir / "roundtrip.bin").string();
    io::save_matrix_bin(bin, m);
    CHECK((io::load_matrix_bin(bin, 7, 9) - m).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(io::load_matrix_bin(bin, 9, 7), std::invalid_argument);
}

TEST_CASE("malformed CSV rows name the line number") {
    const auto dir = temp_dir();
    const auto path = (dir / "broken.csv").string();
    io::write_text_file(path, "1.0,2.0\n3.0,oops\n");
    try {
        io::load_matrix_csv(path, 2, 2);
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    io::write_text_file(path, "1.0,2.0\n3.0\n");
    try {
        io::load_matrix_csv(path, 2, 2);
        FAIL("expected a shape error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("cmd calibrate: ratios, determinism, M = 0 equivalence") {
    json cfg = {{"p", 200}, {"n", 600}};
    const auto out = cli::run_calibrate(cfg);
    CHECK(out.report["c_n"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    check_schema("calibration.schema.json", out.report);

    // byte-identical across repeated runs
    const auto again = cli::run_calibrate(cfg);
    CHECK(out.report.dump() == again.report.dump());

    // an explicit M = 0 spike block reproduces the null block
    json cfg0 = cfg;
    cfg0["spikes"] = {{"groups", json::array()}};
    const auto with_empty = cli::run_calibrate(cfg0);
    CHECK(with_empty.report["tests"]["U"]["alternative"]["sigma"] ==
          with_empty.report["tests"]["U"]["null"]["sigma"]);

    json cfg1 = cfg;
    cfg1["spikes"] = {{"groups", {{{"alpha", 601.0}, {"d", 1}}}}};
    const auto spiked = cli::run_calibrate(cfg1);
    check_schema("calibration.schema.json", spiked.report);
    CHECK(spiked.report["constants"].contains("alternative"));

    CHECK_THROWS_AS(cli::run_calibrate(json{{"p", 200}}), std::invalid_argument);
}

TEST_CASE("cmd test: null data accepts, spiked data rejects") {
    const auto dir = temp_dir();
    const int p = 60, n = 240;

    const auto null_data = sim::gen_entries(sim::DistKind::Gaussian, p, n, 21, 0);
    const auto null_path = (dir / "null.csv").string();
    io::save_matrix_csv(null_path, null_data);
    json cfg = {{"p", p},
                {"n", n},
                {"level", 0.05},
                {"data", {{"path", null_path}, {"format", "csv"}}}};
    const auto out = cli::run_test(cfg);
    check_schema("test_report.schema.json", out.report);
    CHECK(out.csv_files.count("test_report.csv") == 1);

    const auto model = sim::resolve_model({sim::ModelKind::M1, 0, {}}, p, n);
    const auto spiked = sim::apply_model(model, null_data);
    const auto spiked_path = (dir / "spiked.bin").string();
    io::save_matrix_bin(spiked_path, spiked);
    json cfg2 = {{"p", p},
                 {"n", n},
                 {"level", 0.05},
                 {"data", {{"path", spiked_path}, {"format", "bin"}}}};
    const auto rep = cli::run_test(cfg2);
    for (const auto& name : {"U", "W", "V", "R"})
        CHECK(rep.report["statistics"][name]["reject"].get<bool>());

    json bad = cfg;
    bad["n"] = n + 1;
    CHECK_THROWS_AS(cli::run_test(bad), std::invalid_argument);
}

TEST_CASE("cmd simulate: schema, CSV layout, determinism") {
    json cfg = {{"p", 24}, {"n", 72},    {"model", "M1"},
                {"dist", "gaussian"},    {"reps", 12},
                {"level", 0.05},         {"seed", 9}};
    const auto out = cli::run_simulate(cfg);
    check_schema("summary.schema.json", out.report);
    CHECK(out.csv_files.at("qq.csv").rfind("stat,theoretical,empirical\n", 0) == 0);
    CHECK(out.csv_files.at("histograms.csv").rfind("stat,bin_left,bin_right,count\n", 0) == 0);

    const auto again = cli::run_simulate(cfg);
    CHECK(out.report.dump() == again.report.dump());
    CHECK(out.csv_files.at("qq.csv") == again.csv_files.at("qq.csv"));

    json bad = cfg;
    bad["dist"] = "cauchy";
    CHECK_THROWS_AS(cli::run_simulate(bad), std::invalid_argument);
}

TEST_CASE("cmd power: grid monotonicity and the null row") {
    json cfg = {{"p", 200},
                {"n", 600},
                {"level", 0.05},
                {"alpha_grid", {3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 601.0}},
                {"include_null_row", true}};
    const auto out = cli::run_power(cfg);
    const auto& csv = out.csv_files.at("power_curve.csv");

    std::vector<std::array<double, 4>> rows;
    std::size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
        const auto end = csv.find('\n', pos);
        const std::string line = csv.substr(pos, end - pos);
        std::array<double, 4> row{};
        std::sscanf(line.c_str(), "%*lf,%lf,%lf,%lf,%lf", &row[0], &row[1], &row[2], &row[3]);
        rows.push_back(row);
        pos = end + 1;
    }
    REQUIRE(rows.size() == 8);
    for (int j = 0; j < 4; ++j) CHECK(rows[0][j] == doctest::Approx(0.05).epsilon(1e-9));
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
        for (int j = 0; j < 4; ++j) CHECK(rows[i + 1][j] >= rows[i][j] - 1e-12);

    json bad = cfg;
    bad["alpha_grid"] = {1.2}; // subcritical
    CHECK_THROWS_AS(cli::run_power(bad), std::domain_error);
}

TEST_CASE("cmd oracle-check: single quantity selection and schema") {
    json cfg = {{"c_grid", {0.5}}, {"quantities", {"ct", "extra_W"}}};
    const auto out = cli::run_oracle_check(cfg);
    check_schema("oracle_report.schema.json", out.report);
    CHECK(out.ok);
    CHECK(out.report["rows"].size() == 2);
    for (const auto& row : out.report["rows"]) CHECK(row["pass"].get<bool>());
}
