// cli.hpp — batch commands behind the `dysonprop` executable.
//
// Each command runs one validation suite and returns a Report whose summary holds the
// pass/fail criteria. Unset numeric options fall back to per-command defaults, and the values
// actually used are recorded in the report params.
#pragma once

#include "dysonprop/report.hpp"
#include "dysonprop/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dysonprop {

struct UsageError : Error {
    using Error::Error;
};

enum class Command { identity_check, propagate, converge, dyson_check, green_ft, amplitude, selftest };

std::string_view command_name(Command c);

struct Options {
    Command command{Command::selftest};
    std::optional<std::string> model_path;
    std::optional<std::string> lattice_path;
    std::optional<double> t;
    std::optional<int> order;
    std::optional<double> eps;
    Sign sign{Sign::plus};
    std::uint64_t seed{20240901};
    std::optional<double> lambda;
    ReportFormat format{ReportFormat::json};
    std::string out{"-"};
    std::optional<int> quad_points;
    std::optional<double> quad_domain;
    int max_nodes{6};
    std::optional<double> tol;
    std::optional<double> ratio_tol;
};

struct ParseResult {
    std::optional<Options> options;  // empty when help was requested
    std::string help;
};

/// argv without the program name. Throws UsageError on an unknown command or a bad value.
ParseResult parse_args(const std::vector<std::string>& args);

Report run_command(const Options& options);

Report run_identity_check(const Options& options);
Report run_propagate(const Options& options);
Report run_converge(const Options& options);
Report run_dyson_check(const Options& options);
Report run_green_ft(const Options& options);
Report run_amplitude(const Options& options);
Report run_selftest(const Options& options);

/// Full program: parse, run, emit, print the summary to `err`. Returns 0 iff every criterion
/// passed, 1 on a failed criterion, 2 on a usage or runtime error.
int run_main(const std::vector<std::string>& args, std::ostream& err);

}  // namespace dysonprop
