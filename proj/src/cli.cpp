#include "dysonprop/cli.hpp"

#include "dysonprop/amplitude.hpp"
#include "dysonprop/divdiff.hpp"
#include "dysonprop/green.hpp"
#include "dysonprop/model.hpp"
#include "dysonprop/numfmt.hpp"
#include "dysonprop/oracle.hpp"
#include "dysonprop/propagator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace dysonprop {

namespace {

// Integer nodes for the identity suite: twelve points of [−10, 10], unevenly spaced so the
// lists mix unit gaps with wide ones.
constexpr std::array<std::int64_t, 12> kIdentityPool{-10, -7, -5, -4, -2, -1, 0, 1, 3, 6, 8, 10};

double value_or(const std::optional<double>& v, double fallback) { return v ? *v : fallback; }
int value_or(const std::optional<int>& v, int fallback) { return v ? *v : fallback; }

std::string short_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string sign_text(Sign s) { return s == Sign::plus ? "+" : "-"; }

std::string join_nodes(const std::vector<std::int64_t>& nodes) {
    std::string s;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += (k ? " " : "") + std::to_string(nodes[k]);
    return s;
}

void add_matrix_rows(Report& report, const std::vector<ReportValue>& prefix, const Matrix& computed,
                     const Matrix& oracle) {
    for (Eigen::Index r = 0; r < computed.rows(); ++r) {
        for (Eigen::Index c = 0; c < computed.cols(); ++c) {
            std::vector<ReportValue> inputs = prefix;
            inputs.emplace_back(static_cast<double>(r));
            inputs.emplace_back(static_cast<double>(c));
            report.add_row(std::move(inputs), computed(r, c), oracle(r, c));
        }
    }
}

std::vector<SpectralModel> models_or_random(const Options& o, const std::vector<std::size_t>& dims,
                                            double lambda) {
    std::vector<SpectralModel> out;
    if (o.model_path) {
        out.push_back(load_model_file(*o.model_path));
        return out;
    }
    for (std::size_t d : dims) out.push_back(random_model(d, o.seed + d, lambda));
    return out;
}

void common_params(Report& r, const Options& o) {
    r.add_param("seed", static_cast<double>(o.seed));
    if (o.model_path) r.add_param("model", *o.model_path);
    if (o.lattice_path) r.add_param("lattice", *o.lattice_path);
}

}  // namespace

std::string_view command_name(Command c) {
    switch (c) {
        case Command::identity_check: return "identity-check";
        case Command::propagate: return "propagate";
        case Command::converge: return "converge";
        case Command::dyson_check: return "dyson-check";
        case Command::green_ft: return "green-ft";
        case Command::amplitude: return "amplitude";
        case Command::selftest: return "selftest";
    }
    return "unknown";
}

// ------------------------------------------------------------------ parsing ---

ParseResult parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Dyson-series propagators, resolvents and transition amplitudes", "dysonprop"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    Options o;
    std::string model, lattice, sign = "+", format = "json";
    double t = 0, eps = 0, lambda = 0, quad_domain = 0, tol = 0, ratio_tol = 0;
    int order = 0, quad_points = 0;

    auto finite = CLI::Validator(
        [](const std::string& s) {
            try {
                return std::isfinite(std::stod(s)) ? std::string() : "value must be finite";
            } catch (const std::exception&) {
                return std::string("value must be a number");
            }
        },
        "FINITE");

    auto* o_model = app.add_option("--model", model, "Model file (JSON)");
    auto* o_lattice = app.add_option("--lattice", lattice, "Lattice file (JSON)");
    auto* o_t = app.add_option("--t", t, "Time, or t_b - t_a for amplitudes")->check(finite);
    auto* o_order = app.add_option("--order", order, "Truncation order N")->check(CLI::NonNegativeNumber);
    auto* o_eps = app.add_option("--eps", eps, "Regularization epsilon")->check(CLI::PositiveNumber & finite);
    app.add_option("--sign", sign, "Prescription: + (retarded) or - (advanced)")
        ->check(CLI::IsMember({"+", "-"}));
    app.add_option("--seed", o.seed, "Seed for random models");
    auto* o_lambda =
        app.add_option("--lambda", lambda, "Coupling scale")->check(CLI::NonNegativeNumber & finite);
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out, "Report path ('-' for stdout)");
    auto* o_qp = app.add_option("--quad-points", quad_points, "Quadrature points")
                     ->check(CLI::Range(2, 10'000'000));
    auto* o_qd = app.add_option("--quad-domain", quad_domain, "Quadrature domain length T")
                     ->check(CLI::PositiveNumber & finite);
    auto* o_tol = app.add_option("--tol", tol, "Absolute tolerance of the main check")
                      ->check(CLI::PositiveNumber & finite);
    auto* o_rtol = app.add_option("--ratio-tol", ratio_tol, "Relative tolerance of ratio checks")
                       ->check(CLI::PositiveNumber & finite);

    auto* identity = app.add_subcommand("identity-check", "Monomial divided-difference identities");
    identity->add_option("--max-nodes", o.max_nodes, "Largest node list")
                      ->check(CLI::Range(1, static_cast<int>(kIdentityPool.size())));
    app.add_subcommand("propagate", "Series coefficients against quadrature and the epsilon form");
    app.add_subcommand("converge", "Truncation-error scaling in the coupling");
    app.add_subcommand("dyson-check", "Dyson resolvent series against a direct solve");
    app.add_subcommand("green-ft", "Fourier pair of the time-dependent Green operator");
    app.add_subcommand("amplitude", "Lattice transition amplitudes and the kernel relation");
    app.add_subcommand("selftest", "All suites with default settings");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream text, ignored;
        app.exit(e, text, ignored);
        return ParseResult{std::nullopt, text.str()};
    } catch (const CLI::CallForAllHelp& e) {
        std::ostringstream text, ignored;
        app.exit(e, text, ignored);
        return ParseResult{std::nullopt, text.str()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + app.help());
    }

    const std::string name = app.get_subcommands().front()->get_name();
    for (Command c : {Command::identity_check, Command::propagate, Command::converge, Command::dyson_check,
                      Command::green_ft, Command::amplitude, Command::selftest}) {
        if (command_name(c) == name) o.command = c;
    }
    if (o_model->count()) o.model_path = model;
    if (o_lattice->count()) o.lattice_path = lattice;
    if (o_t->count()) o.t = t;
    if (o_order->count()) o.order = order;
    if (o_eps->count()) o.eps = eps;
    if (o_lambda->count()) o.lambda = lambda;
    if (o_qp->count()) o.quad_points = quad_points;
    if (o_qd->count()) o.quad_domain = quad_domain;
    if (o_tol->count()) o.tol = tol;
    if (o_rtol->count()) o.ratio_tol = ratio_tol;
    o.sign = sign == "+" ? Sign::plus : Sign::minus;
    o.format = format == "csv" ? ReportFormat::csv : ReportFormat::json;
    return ParseResult{o, {}};
}

// ----------------------------------------------------------------- commands ---

Report run_identity_check(const Options& o) {
    const double tol = value_or(o.tol, 1e-12);
    if (o.max_nodes < 1 || o.max_nodes > static_cast<int>(kIdentityPool.size())) {
        throw ValidationError("identity-check: --max-nodes must be in [1, 12]");
    }
    Report r;
    r.command = "identity-check";
    r.add_param("max_nodes", static_cast<double>(o.max_nodes));
    r.add_param("pool", join_nodes({kIdentityPool.begin(), kIdentityPool.end()}));
    r.add_param("tol", tol);
    r.input_keys = {"nodes", "n", "K"};

    std::size_t lists = 0, exact_failures = 0;
    double worst = 0.0;
    const unsigned full = 1u << kIdentityPool.size();
    for (int n = 1; n <= o.max_nodes; ++n) {
        for (unsigned mask = 1; mask < full; ++mask) {
            if (std::popcount(mask) != n) continue;
            std::vector<std::int64_t> nodes;
            for (std::size_t k = 0; k < kIdentityPool.size(); ++k) {
                if (mask & (1u << k)) nodes.push_back(kIdentityPool[k]);
            }
            std::vector<cplx> zs(nodes.begin(), nodes.end());
            const NodeList list(zs);
            ++lists;
            for (unsigned K = 0; K + 1 <= static_cast<unsigned>(n); ++K) {
                const Rational expected = K + 1 == static_cast<unsigned>(n) ? 1 : 0;
                const Rational exact = dd_monomial_exact(nodes, K);
                if (exact != expected) ++exact_failures;
                const cplx floating = dd_monomial(list, K);
                const cplx truth = static_cast<double>(expected);
                worst = std::max(worst, std::abs(floating - truth));
                r.add_row({join_nodes(nodes), static_cast<double>(n), static_cast<double>(K)}, floating, truth);
            }
        }
    }
    r.add_param("lists", static_cast<double>(lists));
    // The coverage floor applies to the full configuration (lists of up to six nodes).
    if (o.max_nodes >= 6) r.check_min("lists", static_cast<double>(lists), 500.0);
    r.check_max("exact-mismatches", static_cast<double>(exact_failures), 0.0);
    r.check_max("float-max-error", worst, tol);
    return r;
}

Report run_propagate(const Options& o) {
    const double tol = value_or(o.tol, 1e-6);
    const double lambda = value_or(o.lambda, 0.5);
    const int npoints = value_or(o.quad_points, 64);
    const double eps = value_or(o.eps, 1e-2);
    const int max_l = std::min(value_or(o.order, 2), 3);
    std::vector<double> times = o.t ? std::vector<double>{*o.t} : std::vector<double>{0.5, 1.0, 2.0};

    Report r;
    r.command = "propagate";
    common_params(r, o);
    r.add_param("lambda", lambda);
    r.add_param("quad_points", static_cast<double>(npoints));
    r.add_param("max_order", static_cast<double>(max_l));
    r.add_param("eps", eps);
    r.add_param("sign", sign_text(o.sign));
    r.add_param("tol", tol);
    r.input_keys = {"check", "model", "order", "t", "row", "col"};

    double worst_quad = 0.0;
    for (const auto& model : models_or_random(o, {2, 3, 4}, lambda)) {
        for (int l = 0; l <= max_l; ++l) {
            for (double t : times) {
                const Matrix series = a_matrix(model, l, t).entries;
                const Matrix quad = oracle::dyson_term_quadrature(model, l, t, npoints).entries;
                worst_quad = std::max(worst_quad, max_entry_diff(series, quad));
                add_matrix_rows(r, {std::string("quadrature"), model.label(), static_cast<double>(l), t}, series,
                                quad);
            }
        }
    }
    r.check_max("order-equivalence", worst_quad, tol);

    double worst_eps = 0.0;
    const double t_eps = value_or(o.t, 1.0);
    std::vector<int> orders = o.order ? std::vector<int>{*o.order} : std::vector<int>{0, 1, 2};
    for (const auto& model : models_or_random(o, {1, 2, 3}, lambda)) {
        for (int n : orders) {
            const TruncationSpec spec(n);
            const Matrix extrap = epsilon_form_extrapolated(model, spec, t_eps, eps, o.sign).entries;
            const Matrix direct = truncated_evolution(model, spec, t_eps).entries;
            worst_eps = std::max(worst_eps, max_entry_diff(extrap, direct));
            add_matrix_rows(r, {std::string("epsilon-form"), model.label(), static_cast<double>(n), t_eps}, extrap,
                            direct);
        }
    }
    r.check_max("epsilon-form", worst_eps, tol);
    return r;
}

Report run_converge(const Options& o) {
    const double lambda = value_or(o.lambda, 0.1);
    const double t = value_or(o.t, 1.0);
    const double rtol = value_or(o.ratio_tol, 0.25);
    std::vector<int> orders = o.order ? std::vector<int>{*o.order} : std::vector<int>{1, 2, 3};
    const SpectralModel base = o.model_path ? load_model_file(*o.model_path) : two_level_model(1.0, 1.0);

    Report r;
    r.command = "converge";
    common_params(r, o);
    r.add_param("model_label", base.label());
    r.add_param("lambda", lambda);
    r.add_param("t", t);
    r.add_param("ratio_tol", rtol);
    r.input_keys = {"lambda", "order", "row", "col"};

    for (int n : orders) {
        double err[2], defect[2];
        for (int k = 0; k < 2; ++k) {
            const double lam = k == 0 ? lambda : lambda / 2.0;
            const SpectralModel model = scale_coupling(base, CouplingScale(lam));
            const Matrix u = truncated_evolution(model, TruncationSpec(n), t).entries;
            const Matrix exact = oracle::exact_evolution(model, t).entries;
            err[k] = max_entry_diff(u, exact);
            defect[k] = unitarity_defect(u);
            add_matrix_rows(r, {lam, static_cast<double>(n)}, u, exact);
        }
        const double target = std::ldexp(1.0, n + 1);
        const std::string tag = "N=" + std::to_string(n);
        r.check_ratio("error-ratio." + tag, err[0] / err[1], target, rtol);
        r.check_ratio("unitarity-ratio." + tag, defect[0] / defect[1], target, rtol);
    }
    return r;
}

Report run_dyson_check(const Options& o) {
    const double tol = value_or(o.tol, 1e-8);
    const double eps = value_or(o.eps, 1e-2);
    const int order = value_or(o.order, 40);
    constexpr double rho_target = 0.45;
    SpectralModel model = o.model_path ? load_model_file(*o.model_path) : random_model(4, o.seed, value_or(o.lambda, 1.0));
    const double energy = model.min_energy() - 1.0;
    const ResolventQuery q(energy, o.sign, eps);

    const double rho0 = dyson_partial(model, q, 0).rho;
    double scale = 1.0;
    if (rho0 > rho_target) {
        scale = rho_target / rho0;
        model = scale_coupling(model, CouplingScale(scale));
    }

    Report r;
    r.command = "dyson-check";
    common_params(r, o);
    r.add_param("energy", energy);
    r.add_param("eps", eps);
    r.add_param("sign", sign_text(o.sign));
    r.add_param("order", static_cast<double>(order));
    r.add_param("coupling_scale", scale);
    r.add_param("rho_target", rho_target);
    r.add_param("tol", tol);
    r.input_keys = {"order", "row", "col"};

    const Matrix direct = complete_resolvent_direct(model, q).entries;
    const DysonResult series = dyson_partial(model, q, order);
    add_matrix_rows(r, {static_cast<double>(order)}, series.resolvent.entries, direct);
    r.check_max("contraction", series.rho, 0.5);
    r.check_max("resolvent-match", max_entry_diff(series.resolvent.entries, direct), tol);

    // Measured tail ‖G − G_N‖₂ against ‖G₀‖ρ^{N+1}/(1−ρ) across orders.
    double worst = 0.0;
    for (int n : {0, 1, 2, 4, 8, 16, 32, order}) {
        if (n > order) continue;
        const DysonResult partial = dyson_partial(model, q, n);
        const double tail = oracle::spectral_norm(partial.resolvent.entries - direct);
        worst = std::max(worst, tail / partial.tail_bound(n));
    }
    r.check_max("tail-over-bound", worst, 1.0);
    return r;
}

Report run_green_ft(const Options& o) {
    const double tol = value_or(o.tol, 1e-5);
    const double eps = value_or(o.eps, 0.1);
    const double domain = value_or(o.quad_domain, 200.0);
    const int npoints = value_or(o.quad_points, 2000);
    const int order = value_or(o.order, 2);
    const double causal_tol = 1e-3;
    const SpectralModel model =
        o.model_path ? load_model_file(*o.model_path) : two_level_model(1.0, value_or(o.lambda, 0.2));
    const TruncationSpec spec(order);
    const ForwardFourierOptions fwd;

    Report r;
    r.command = "green-ft";
    common_params(r, o);
    r.add_param("model_label", model.label());
    r.add_param("eps", eps);
    r.add_param("sign", sign_text(o.sign));
    r.add_param("order", static_cast<double>(order));
    r.add_param("quad_domain", domain);
    r.add_param("quad_points", static_cast<double>(npoints));
    r.add_param("forward_window", fwd.window);
    r.add_param("forward_points", static_cast<double>(fwd.npoints));
    r.add_param("tol", tol);
    r.add_param("causal_tol", causal_tol);
    r.input_keys = {"check", "x", "row", "col"};

    double worst_inverse = 0.0;
    const QuadratureSpec quad(0.0, domain, npoints);
    for (double energy : {-0.5, 0.0, 0.5, 1.0, 1.5}) {
        const Matrix transform = inverse_fourier_check(model, spec, energy, o.sign, eps, quad).entries;
        const Matrix series = dyson_partial(model, ResolventQuery(energy, o.sign, eps), order).resolvent.entries;
        worst_inverse = std::max(worst_inverse, max_entry_diff(transform, series));
        add_matrix_rows(r, {std::string("inverse"), energy}, transform, series);
    }
    r.check_max("inverse-transform", worst_inverse, tol);

    // Acausal side: τ < 0 for the retarded operator, τ > 0 for the advanced one.
    const double s = sign_factor(o.sign);
    double worst_acausal = 0.0, worst_forward = 0.0;
    for (double tau : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        const Matrix g = forward_fourier(model, tau, 0.0, o.sign, eps, fwd).entries;
        const Matrix oracle = damped_green_oracle(model, tau, o.sign, eps).entries;
        worst_forward = std::max(worst_forward, max_entry_diff(g, oracle));
        if (s * tau < 0.0) worst_acausal = std::max(worst_acausal, g.cwiseAbs().maxCoeff());
        add_matrix_rows(r, {std::string("forward"), tau}, g, oracle);
    }
    r.check_max("causality", worst_acausal, causal_tol);
    r.check_max("forward-transform", worst_forward, causal_tol);
    return r;
}

Report run_amplitude(const Options& o) {
    const double lambda = value_or(o.lambda, 0.1);
    const double tau = value_or(o.t, 1.0);
    const double eps = value_or(o.eps, 1e-2);
    const int order = value_or(o.order, 2);
    const double rtol = value_or(o.ratio_tol, 0.30);
    const double tol = value_or(o.tol, 1e-12);
    const double consistency_tol = 1e-4;
    const LatticeSpec base = o.lattice_path ? load_lattice_file(*o.lattice_path) : default_well_lattice();
    const TruncationSpec spec(order);
    if (tau < 0.0) throw ValidationError("amplitude: t_b - t_a must be nonnegative");

    Report r;
    r.command = "amplitude";
    common_params(r, o);
    r.add_param("points", static_cast<double>(base.points));
    r.add_param("lambda", lambda);
    r.add_param("t", tau);
    r.add_param("eps", eps);
    r.add_param("sign", sign_text(o.sign));
    r.add_param("order", static_cast<double>(order));
    r.add_param("ratio_tol", rtol);
    r.add_param("tol", tol);
    r.add_param("consistency_tol", consistency_tol);
    r.input_keys = {"check", "lambda", "xb", "xa"};

    double err_rel[2], err_dir[2], consistency = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double lam = k == 0 ? lambda : lambda / 2.0;
        const LatticeSystem sys = build_lattice(scale_perturbation(base, lam));
        const Matrix relation = k_via_relation_extrapolated(sys, spec, eps, tau, o.sign);
        const Matrix direct = k_truncated_matrix(sys, spec, tau);
        const Matrix exact = k_exact_matrix(sys, tau);
        err_rel[k] = max_entry_diff(relation, exact);
        err_dir[k] = max_entry_diff(direct, exact);
        consistency = std::max(consistency, max_entry_diff(relation, direct));
        add_matrix_rows(r, {std::string("relation"), lam}, relation, exact);
        add_matrix_rows(r, {std::string("direct"), lam}, direct, exact);
    }
    const double target = std::ldexp(1.0, order + 1);
    r.check_ratio("relation-ratio", err_rel[0] / err_rel[1], target, rtol);
    r.check_ratio("direct-ratio", err_dir[0] / err_dir[1], target, rtol);
    r.check_max("relation-vs-direct", consistency, consistency_tol);

    const LatticeSystem free = build_lattice(scale_perturbation(base, 0.0));
    const Matrix k0 = k0_matrix(free, tau);
    const Matrix relation = k_via_relation_matrix(free, spec, eps, tau, o.sign);
    const Matrix direct = k_truncated_matrix(free, spec, tau);
    const Matrix exact = k_exact_matrix(free, tau);
    add_matrix_rows(r, {std::string("free"), 0.0}, relation, k0);
    const double free_err =
        std::max({max_entry_diff(relation, k0), max_entry_diff(direct, k0), max_entry_diff(exact, k0)});
    r.check_max("free-reduction", free_err, tol);
    return r;
}

Report run_selftest(const Options& o) {
    auto suite = [&] {
        Options base;
        base.seed = o.seed;
        Report merged;
        merged.command = "selftest";
        merged.add_param("seed", static_cast<double>(o.seed));
        merged.absorb(run_identity_check(base));
        merged.absorb(run_propagate(base));
        merged.absorb(run_converge(base));
        merged.absorb(run_dyson_check(base));
        merged.absorb(run_green_ft(base));
        merged.absorb(run_amplitude(base));
        return merged;
    };
    Report first = suite();
    // A second pass must serialize identically.
    const bool same = to_json(first) == to_json(suite());
    first.check_max("determinism-mismatch", same ? 0.0 : 1.0, 0.0);
    return first;
}

Report run_command(const Options& o) {
    switch (o.command) {
        case Command::identity_check: return run_identity_check(o);
        case Command::propagate: return run_propagate(o);
        case Command::converge: return run_converge(o);
        case Command::dyson_check: return run_dyson_check(o);
        case Command::green_ft: return run_green_ft(o);
        case Command::amplitude: return run_amplitude(o);
        case Command::selftest: return run_selftest(o);
    }
    throw UsageError("unknown command");
}

int run_main(const std::vector<std::string>& args, std::ostream& err) {
    Options options;
    try {
        ParseResult parsed = parse_args(args);
        if (!parsed.options) {
            err << parsed.help;
            return 0;
        }
        options = *parsed.options;
    } catch (const UsageError& e) {
        err << "dysonprop: " << e.what() << '\n';
        return 2;
    }

    try {
        const Report report = run_command(options);
        emit_report(report, options.format, options.out);
        for (const auto& c : report.summary) {
            err << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.rule << " value=" << short_number(c.value);
            if (c.target) err << " target=" << short_number(*c.target);
            err << " threshold=" << short_number(c.threshold) << '\n';
        }
        return report.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        err << "dysonprop " << command_name(options.command) << ": " << e.what() << '\n';
        return 2;
    }
}

}  // namespace dysonprop
