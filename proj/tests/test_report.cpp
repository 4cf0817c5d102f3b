#include "dysonprop/report.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dysonprop;

namespace {

Report sample() {
    Report r;
    r.command = "sample";
    r.add_param("eps", 0.1);
    r.add_param("label", std::string("a,b"));
    r.input_keys = {"name", "x"};
    r.add_row({std::string("first, quoted \"one\""), 0.1}, cplx(1.0 / 3.0, -2.0), cplx(0.3333, -2.0));
    r.add_row({std::string("second"), 1e-300}, cplx(0.0), cplx(0.0));
    return r;
}

std::size_t count_fields(const std::string& line) {
    std::size_t fields = 1;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) ++fields;
    }
    return fields;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("row errors") {
    CHECK(row_abs_error(cplx(3.0, 4.0), cplx(0.0)) == 5.0);
    CHECK(row_rel_error(cplx(3.0, 4.0), cplx(0.0)) == 5.0);
    CHECK(row_rel_error(cplx(1.1), cplx(1.0)) == std::abs(cplx(1.1) - cplx(1.0)));
    CHECK(row_rel_error(cplx(2.2), cplx(2.0)) == std::abs(cplx(2.2) - cplx(2.0)) / 2.0);

    Report r;
    r.input_keys = {"a"};
    CHECK_THROWS_AS(r.add_row({1.0, 2.0}, cplx(0.0), cplx(0.0)), Error);
}

TEST_CASE("empty report gives a header-only CSV") {
    Report r;
    r.command = "empty";
    r.input_keys = {"k", "n"};
    CHECK(to_csv(r) == "k,n,computed_re,computed_im,oracle_re,oracle_im,abs_error,rel_error\n");
    const auto doc = nlohmann::json::parse(to_json(r));
    CHECK(doc["rows"].empty());
    CHECK(doc["pass"] == true);
}

TEST_CASE("CSV field count is constant") {
    const std::string csv = to_csv(sample());
    std::istringstream in(csv);
    std::string line;
    std::vector<std::size_t> counts;
    while (std::getline(in, line)) counts.push_back(count_fields(line));
    REQUIRE(counts.size() == 3);
    CHECK(counts[0] == 8);
    CHECK(counts[1] == 8);
    CHECK(counts[2] == 8);
}

TEST_CASE("JSON round trip preserves every number") {
    Report r = sample();
    r.check_max("small", 1e-9, 1e-8);
    r.check_ratio("ratio", 7.9, 8.0, 0.25);
    const auto doc = nlohmann::json::parse(to_json(r));
    CHECK(doc["command"] == "sample");
    CHECK(doc["params"]["eps"].get<double>() == 0.1);
    CHECK(doc["params"]["label"] == "a,b");
    REQUIRE(doc["rows"].size() == 2);
    const auto& row = doc["rows"][0];
    CHECK(row["inputs"]["name"] == "first, quoted \"one\"");
    CHECK(row["computed"][0].get<double>() == 1.0 / 3.0);
    CHECK(row["oracle"][0].get<double>() == 0.3333);
    CHECK(row["abs_error"].get<double>() == r.rows[0].abs_error);
    CHECK(row["rel_error"].get<double>() == r.rows[0].rel_error);
    CHECK(doc["rows"][1]["inputs"]["x"].get<double>() == 1e-300);
    CHECK(doc["summary"][1]["target"].get<double>() == 8.0);
    CHECK(doc["summary"][0]["target"].is_null());
    CHECK(doc["pass"] == true);
}

TEST_CASE("criteria") {
    Report r;
    CHECK(r.check_max("a", 1.0, 1.0).pass);
    CHECK_FALSE(r.check_max("b", std::nan(""), 1.0).pass);
    CHECK(r.check_min("c", 600.0, 500.0).pass);
    CHECK_FALSE(r.check_ratio("d", 16.0, 8.0, 0.25).pass);
    CHECK(r.check_ratio("e", 9.9, 8.0, 0.25).pass);
    CHECK_FALSE(r.passed());
    CHECK(nlohmann::json::parse(to_json(r))["summary"][1]["value"].is_null());
}

TEST_CASE("absorbing reports") {
    Report merged;
    merged.command = "all";
    Report a = sample();
    a.check_max("x", 0.0, 1.0);
    Report b;
    b.command = "other";
    b.input_keys = {"x", "y"};
    b.add_row({2.0, 3.0}, cplx(1.0), cplx(1.0));
    merged.absorb(a);
    merged.absorb(b);
    CHECK(merged.input_keys == std::vector<std::string>{"suite", "name", "x", "y"});
    REQUIRE(merged.rows.size() == 3);
    CHECK(std::get<std::string>(merged.rows[0].inputs[0]) == "sample");
    CHECK(std::get<std::string>(merged.rows[2].inputs[0]) == "other");
    CHECK(std::get<double>(merged.rows[2].inputs[2]) == 2.0);
    CHECK(std::get<std::string>(merged.rows[2].inputs[1]).empty());
    CHECK(merged.summary.front().name == "sample.x");
    CHECK(merged.params.front().first == "sample.eps");
}

TEST_CASE("emission checks stored errors and writes files") {
    const auto dir = std::filesystem::temp_directory_path() / "dysonprop_report_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "r.csv").string();
    const Report r = sample();
    emit_report(r, ReportFormat::csv, path);
    CHECK(slurp(path) == to_csv(r));
    emit_report(r, ReportFormat::json, path);
    CHECK(slurp(path) == to_json(r));

    Report tampered = r;
    tampered.rows[0].abs_error = std::nextafter(tampered.rows[0].abs_error, 1.0);
    CHECK_THROWS_AS(emit_report(tampered, ReportFormat::json, path), Error);
    CHECK_THROWS_AS(emit_report(r, ReportFormat::json, (dir / "missing" / "r.json").string()), Error);
    std::filesystem::remove_all(dir);
}
