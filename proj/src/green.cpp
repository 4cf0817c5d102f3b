#include "dysonprop/green.hpp"

#include "dysonprop/oracle.hpp"
#include "dysonprop/propagator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace dysonprop {

namespace {

double step(double tau) {
    if (tau > 0.0) return 1.0;
    if (tau < 0.0) return 0.0;
    return 0.5;
}

OperatorMatrix tagged(Matrix m, OperatorKind kind, const ResolventQuery& q) {
    OperatorMatrix out;
    out.entries = std::move(m);
    out.kind = kind;
    out.params.energy = q.energy;
    out.params.eps = q.eps;
    out.params.sign = q.sign;
    return out;
}

}  // namespace

ResolventQuery::ResolventQuery(double e, Sign s, double epsilon) : energy(e), sign(s), eps(epsilon) {
    if (!std::isfinite(e)) throw ValidationError("resolvent energy must be finite");
    if (!(epsilon > 0.0)) throw ValidationError("resolvent eps must be positive");
}

OperatorMatrix unperturbed_resolvent(const SpectralModel& model, const ResolventQuery& q) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    Matrix g0 = Matrix::Zero(d, d);
    const cplx z = q.shifted();
    for (Eigen::Index g = 0; g < d; ++g) g0(g, g) = 1.0 / (z - model.energy(static_cast<std::size_t>(g)));
    return tagged(std::move(g0), OperatorKind::resolvent, q);
}

OperatorMatrix complete_resolvent_direct(const SpectralModel& model, const ResolventQuery& q) {
    const auto d = static_cast<Eigen::Index>(model.dim());
    const Matrix a = q.shifted() * Matrix::Identity(d, d) - model.hamiltonian();
    const Matrix identity = Matrix::Identity(d, d);
    Matrix x = oracle::linear_solve(a, identity);
    const double residual = (a * x - identity).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-10)) {
        throw SolverError("complete_resolvent_direct: residual " + std::to_string(residual) +
                              " exceeds 1e-10",
                          oracle::condition_estimate(a));
    }
    return tagged(std::move(x), OperatorKind::resolvent, q);
}

double DysonResult::tail_bound(int order) const {
    if (rho >= 1.0) return std::numeric_limits<double>::infinity();
    return g0_norm * std::pow(rho, order + 1) / (1.0 - rho);
}

DysonResult dyson_partial(const SpectralModel& model, const ResolventQuery& q, int order) {
    if (order < 0) throw ValidationError("dyson_partial: order must be nonnegative");
    const OperatorMatrix g0 = unperturbed_resolvent(model, q);
    const Matrix kernel = model.h1() * g0.entries;  // H₁G₀

    Matrix term = g0.entries;
    Matrix sum = g0.entries;
    for (int l = 1; l <= order; ++l) {
        term = (term * kernel).eval();
        sum += term;
    }

    DysonResult out{tagged(std::move(sum), OperatorKind::resolvent, q), 0.0, 0.0};
    out.resolvent.params.order = order;
    out.rho = oracle::spectral_norm(kernel);
    out.g0_norm = oracle::spectral_norm(g0.entries);
    return out;
}

OperatorMatrix timedep_green(const SpectralModel& model, TruncationSpec spec, double t, double tp,
                             Sign sign) {
    const double tau = t - tp;
    const double theta = sign == Sign::plus ? step(tau) : step(-tau);
    const auto d = static_cast<Eigen::Index>(model.dim());

    OperatorMatrix out;
    out.kind = OperatorKind::green_td;
    out.params.t = tau;
    out.params.sign = sign;
    out.params.order = spec.order;
    if (theta == 0.0) {
        out.entries = Matrix::Zero(d, d);
        return out;
    }
    const cplx prefactor = -sign_factor(sign) * kI * theta;
    out.entries = prefactor * truncated_evolution(model, spec, tau).entries;
    return out;
}

OperatorMatrix inverse_fourier_check(const SpectralModel& model, TruncationSpec spec, double energy,
                                     Sign sign, double eps, const QuadratureSpec& quad) {
    if (!(eps > 0.0)) throw ValidationError("inverse_fourier_check: eps must be positive");
    if (quad.a != 0.0) {
        throw QuadratureError("inverse_fourier_check: |τ| range must start at 0");
    }
    if (std::exp(-eps * quad.b) > 1e-8) {
        throw QuadratureError("inverse_fourier_check: domain too short, e^{-eps T} = " +
                              std::to_string(std::exp(-eps * quad.b)) + " > 1e-8");
    }
    const double s = sign_factor(sign);
    const QuadratureRule rule = make_rule(quad);
    const auto d = static_cast<Eigen::Index>(model.dim());

    // On the support the step is 1 (one-sided limit), so the series is sampled directly.
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double tau = s * rule.nodes[k];
        const cplx weight = rule.weights[k] * std::exp(kI * energy * tau) * std::exp(-eps * std::abs(tau));
        sum += weight * truncated_evolution(model, spec, tau).entries;
    }

    OperatorMatrix out;
    out.entries = (-s * kI) * sum;
    out.kind = OperatorKind::resolvent;
    out.params.energy = energy;
    out.params.eps = eps;
    out.params.sign = sign;
    out.params.order = spec.order;
    return out;
}

OperatorMatrix forward_fourier(const SpectralModel& model, double t, double tp, Sign sign,
                               double eps, const ForwardFourierOptions& options) {
    if (!(eps > 0.0)) throw ValidationError("forward_fourier: eps must be positive");
    if (options.window < 50.0 * eps) {
        throw QuadratureError("forward_fourier: window W must be at least 50*eps");
    }
    const double tau = t - tp;
    const double s = sign_factor(sign);
    const double lo = model.min_energy() - options.window;
    const double hi = model.max_energy() + options.window;
    const QuadratureRule rule = make_rule(QuadratureSpec(lo, hi, options.npoints, options.rule));
    const auto d = static_cast<Eigen::Index>(model.dim());
    const Matrix identity = Matrix::Identity(d, d);
    const double center = 0.5 * (model.min_energy() + model.max_energy());

    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const ResolventQuery q(rule.nodes[k], sign, eps);
        Matrix g = options.order ? dyson_partial(model, q, *options.order).resolvent.entries
                                 : complete_resolvent_direct(model, q).entries;
        if (options.tail_subtraction) g -= identity / (q.shifted() - center);
        sum += (rule.weights[k] * std::exp(-kI * rule.nodes[k] * tau)) * g;
    }
    Matrix result = sum / (2.0 * std::numbers::pi);
    if (options.tail_subtraction) {
        // (1/2π)∫dE e^{−iEτ}/(E − c ± iε) = ∓iθ(±τ) e^{−icτ} e^{−ε|τ|}
        const double theta = sign == Sign::plus ? step(tau) : step(-tau);
        const cplx ref = -s * kI * theta * std::exp(-kI * center * tau) * std::exp(-eps * std::abs(tau));
        result += ref * identity;
    }

    OperatorMatrix out;
    out.entries = std::move(result);
    out.kind = OperatorKind::green_td;
    out.params.t = tau;
    out.params.eps = eps;
    out.params.sign = sign;
    out.params.order = options.order;
    return out;
}

OperatorMatrix damped_green_oracle(const SpectralModel& model, double tau, Sign sign, double eps) {
    const double theta = sign == Sign::plus ? step(tau) : step(-tau);
    OperatorMatrix out;
    out.entries = (-sign_factor(sign) * kI * theta * std::exp(-eps * std::abs(tau))) *
                  oracle::exact_evolution(model.hamiltonian(), tau);
    out.kind = OperatorKind::green_td;
    out.params.t = tau;
    out.params.eps = eps;
    out.params.sign = sign;
    return out;
}

}  // namespace dysonprop
