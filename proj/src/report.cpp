#include "dysonprop/report.hpp"

#include "dysonprop/numfmt.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dysonprop {

double row_abs_error(cplx computed, cplx oracle) { return std::abs(computed - oracle); }

double row_rel_error(cplx computed, cplx oracle) {
    const double scale = std::abs(oracle);
    const double err = row_abs_error(computed, oracle);
    return scale > 0.0 ? err / scale : err;
}

void Report::add_param(std::string key, ReportValue value) {
    params.emplace_back(std::move(key), std::move(value));
}

void Report::add_row(std::vector<ReportValue> inputs, cplx computed, cplx oracle) {
    if (inputs.size() != input_keys.size()) throw Error("report row does not match input keys");
    rows.push_back(ReportRow{std::move(inputs), computed, oracle, row_abs_error(computed, oracle),
                             row_rel_error(computed, oracle)});
}

const Criterion& Report::check_max(std::string name, double value, double threshold) {
    summary.push_back(Criterion{std::move(name), "max", value, std::nullopt, threshold, value <= threshold});
    return summary.back();
}

const Criterion& Report::check_min(std::string name, double value, double threshold) {
    summary.push_back(Criterion{std::move(name), "min", value, std::nullopt, threshold, value >= threshold});
    return summary.back();
}

const Criterion& Report::check_ratio(std::string name, double value, double target, double rel_tol) {
    const bool pass = std::abs(value / target - 1.0) <= rel_tol;
    summary.push_back(Criterion{std::move(name), "ratio", value, target, rel_tol, pass});
    return summary.back();
}

bool Report::passed() const {
    for (const auto& c : summary) {
        if (!c.pass) return false;
    }
    return true;
}

void Report::absorb(const Report& other) {
    const std::string prefix = other.command + ".";
    for (const auto& [k, v] : other.params) params.emplace_back(prefix + k, v);
    for (Criterion c : other.summary) {
        c.name = prefix + c.name;
        summary.push_back(std::move(c));
    }

    if (input_keys.empty() || input_keys.front() != "suite") {
        input_keys.insert(input_keys.begin(), "suite");
        for (auto& row : rows) row.inputs.insert(row.inputs.begin(), std::string());
    }
    std::vector<std::size_t> slot;
    for (const auto& key : other.input_keys) {
        std::size_t at = 0;
        while (at < input_keys.size() && input_keys[at] != key) ++at;
        if (at == input_keys.size()) {
            input_keys.push_back(key);
            for (auto& row : rows) row.inputs.emplace_back(std::string());
        }
        slot.push_back(at);
    }
    for (const auto& src : other.rows) {
        ReportRow row = src;
        row.inputs.assign(input_keys.size(), std::string());
        row.inputs[0] = other.command;
        for (std::size_t k = 0; k < slot.size(); ++k) row.inputs[slot[k]] = src.inputs[k];
        rows.push_back(std::move(row));
    }
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_value(const ReportValue& v) {
    if (const double* x = std::get_if<double>(&v)) return format_number(*x);
    return csv_field(std::get<std::string>(v));
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_value(const ReportValue& v) {
    if (const double* x = std::get_if<double>(&v)) return format_json_number(*x);
    return json_string(std::get<std::string>(v));
}

std::string json_complex(cplx z) {
    return "[" + format_json_number(z.real()) + ", " + format_json_number(z.imag()) + "]";
}

void verify_rows(const Report& report) {
    for (const auto& row : report.rows) {
        const double again = row_abs_error(row.computed, row.oracle);
        const bool same = again == row.abs_error || (std::isnan(again) && std::isnan(row.abs_error));
        if (!same) throw Error("report: stored abs_error does not match |computed - oracle|");
    }
}

}  // namespace

std::string to_csv(const Report& report) {
    std::ostringstream out;
    for (const auto& key : report.input_keys) out << csv_field(key) << ',';
    out << "computed_re,computed_im,oracle_re,oracle_im,abs_error,rel_error\n";
    for (const auto& row : report.rows) {
        for (const auto& v : row.inputs) out << csv_value(v) << ',';
        out << format_number(row.computed.real()) << ',' << format_number(row.computed.imag()) << ','
            << format_number(row.oracle.real()) << ',' << format_number(row.oracle.imag()) << ','
            << format_number(row.abs_error) << ',' << format_number(row.rel_error) << '\n';
    }
    return out.str();
}

std::string to_json(const Report& report) {
    std::ostringstream out;
    out << "{\n  \"command\": " << json_string(report.command) << ",\n  \"params\": {";
    for (std::size_t k = 0; k < report.params.size(); ++k) {
        out << (k ? ",\n    " : "\n    ") << json_string(report.params[k].first) << ": "
            << json_value(report.params[k].second);
    }
    out << (report.params.empty() ? "}" : "\n  }") << ",\n  \"input_keys\": [";
    for (std::size_t k = 0; k < report.input_keys.size(); ++k) {
        out << (k ? ", " : "") << json_string(report.input_keys[k]);
    }
    out << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const auto& row = report.rows[r];
        out << (r ? ",\n    " : "\n    ") << "{\"inputs\": {";
        for (std::size_t k = 0; k < row.inputs.size(); ++k) {
            out << (k ? ", " : "") << json_string(report.input_keys[k]) << ": " << json_value(row.inputs[k]);
        }
        out << "}, \"computed\": " << json_complex(row.computed) << ", \"oracle\": " << json_complex(row.oracle)
            << ", \"abs_error\": " << format_json_number(row.abs_error)
            << ", \"rel_error\": " << format_json_number(row.rel_error) << "}";
    }
    out << (report.rows.empty() ? "]" : "\n  ]") << ",\n  \"summary\": [";
    for (std::size_t k = 0; k < report.summary.size(); ++k) {
        const auto& c = report.summary[k];
        out << (k ? ",\n    " : "\n    ") << "{\"name\": " << json_string(c.name)
            << ", \"rule\": " << json_string(c.rule) << ", \"value\": " << format_json_number(c.value)
            << ", \"target\": " << (c.target ? format_json_number(*c.target) : std::string("null"))
            << ", \"threshold\": " << format_json_number(c.threshold)
            << ", \"pass\": " << (c.pass ? "true" : "false") << "}";
    }
    out << (report.summary.empty() ? "]" : "\n  ]") << ",\n  \"pass\": " << (report.passed() ? "true" : "false")
        << "\n}\n";
    return out.str();
}

void emit_report(const Report& report, ReportFormat format, const std::string& path) {
    verify_rows(report);
    const std::string text = format == ReportFormat::csv ? to_csv(report) : to_json(report);
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw Error("report: failed writing to stdout");
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("report: cannot open '" + path + "' for writing");
    file << text;
    file.close();
    if (!file) throw Error("report: failed writing '" + path + "'");
}

}  // namespace dysonprop
