// report.hpp — tabular experiment reports (CSV / JSON).
#pragma once

#include "dysonprop/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dysonprop {

using ReportValue = std::variant<double, std::string>;

struct ReportRow {
    std::vector<ReportValue> inputs;  // aligned with Report::input_keys
    cplx computed;
    cplx oracle;
    double abs_error{0.0};
    double rel_error{0.0};
};

struct Criterion {
    std::string name;
    std::string rule;  // "max": value ≤ threshold; "min": value ≥ threshold;
                       // "ratio": |value/target − 1| ≤ threshold
    double value{0.0};
    std::optional<double> target;
    double threshold{0.0};
    bool pass{false};
};

/// |computed − oracle|.
double row_abs_error(cplx computed, cplx oracle);
/// abs_error / |oracle|, or abs_error when the oracle is exactly zero.
double row_rel_error(cplx computed, cplx oracle);

struct Report {
    std::string command;
    std::vector<std::pair<std::string, ReportValue>> params;
    std::vector<std::string> input_keys;
    std::vector<ReportRow> rows;
    std::vector<Criterion> summary;

    void add_param(std::string key, ReportValue value);
    void add_row(std::vector<ReportValue> inputs, cplx computed, cplx oracle);
    /// value ≤ threshold.
    const Criterion& check_max(std::string name, double value, double threshold);
    /// value ≥ threshold.
    const Criterion& check_min(std::string name, double value, double threshold);
    /// |value/target − 1| ≤ rel_tol.
    const Criterion& check_ratio(std::string name, double value, double target, double rel_tol);

    bool passed() const;

    /// Append another report, prefixing its params and criteria with its command name and
    /// tagging its rows with a leading "suite" column.
    void absorb(const Report& other);
};

enum class ReportFormat { csv, json };

std::string to_csv(const Report& report);
std::string to_json(const Report& report);

/// Writes to `path`, or to stdout for "" or "-". Throws Error on I/O failure, or if a stored
/// abs_error no longer matches |computed − oracle|.
void emit_report(const Report& report, ReportFormat format, const std::string& path);

}  // namespace dysonprop
