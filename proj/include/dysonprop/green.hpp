// green.hpp — stationary resolvents, Dyson partial sums, the time-dependent complete Green
// operator, and quadrature checks of the Fourier pair linking them.
//
// Conventions: G^{(±)}_E = (E − H ± iε)⁻¹ and G^{(±)}(τ) = ∓iθ(±τ) e^{−iHτ}, τ = t − t′,
// with θ(0) = 1/2.

#pragma once

#include "dysonprop/model.hpp"
#include "dysonprop/quadrature.hpp"
#include "dysonprop/types.hpp"

#include <optional>

namespace dysonprop {

struct ResolventQuery {
    double energy{0.0};
    Sign sign{Sign::plus};
    double eps{0.1};

    ResolventQuery(double e, Sign s, double epsilon);

    /// E ± iε
    cplx shifted() const { return {energy, sign_factor(sign) * eps}; }
};

/// diag(1/(E − E_γ ± iε)).
OperatorMatrix unperturbed_resolvent(const SpectralModel& model, const ResolventQuery& q);

/// (E − H ± iε)⁻¹ by dense solve. Throws SolverError when the residual exceeds 1e−10.
OperatorMatrix complete_resolvent_direct(const SpectralModel& model, const ResolventQuery& q);

struct DysonResult {
    OperatorMatrix resolvent;
    double rho{0.0};      // ‖H₁G₀‖₂
    double g0_norm{0.0};  // ‖G₀‖₂

    /// ‖G₀‖ρ^{N+1}/(1−ρ); +inf when ρ ≥ 1.
    double tail_bound(int order) const;
};

/// G₀ Σ_{l=0}^{N} (H₁G₀)^l. Divergence (ρ ≥ 1) is reported through rho, not thrown.
DysonResult dyson_partial(const SpectralModel& model, const ResolventQuery& q, int order);

/// ∓iθ(±(t−t′)) U_N(t−t′).
OperatorMatrix timedep_green(const SpectralModel& model, TruncationSpec spec, double t, double tp,
                             Sign sign);

/// ∫dτ G^{(±)}(τ) e^{iEτ} e^{−ε|τ|} over τ ∈ [0, T] (sign +) or [−T, 0] (sign −), with G^{(±)}
/// the N-truncated series. quad.a/quad.b give |τ| range [0, T]; requires e^{−εT} ≤ 1e−8.
OperatorMatrix inverse_fourier_check(const SpectralModel& model, TruncationSpec spec, double energy,
                                     Sign sign, double eps, const QuadratureSpec& quad);

struct ForwardFourierOptions {
    double window{100.0};  // W: energies span [min E_γ − W, max E_γ + W]
    int npoints{8000};
    QuadRule rule{QuadRule::gauss_legendre};
    /// Subtract a scalar reference pole 1/(E − c ± iε) (c = spectral midpoint) whose transform
    /// is known in closed form; the quadrature then only sees an O(E⁻²) remainder.
    bool tail_subtraction{true};
    /// Use the Dyson partial sum of this order instead of the direct resolvent.
    std::optional<int> order;
};

/// (1/2π)∫dE G_E^{(±)} e^{−iE(t−t′)} over the truncated energy window.
/// Throws QuadratureError when W < 50ε.
OperatorMatrix forward_fourier(const SpectralModel& model, double t, double tp, Sign sign,
                               double eps, const ForwardFourierOptions& options = {});

/// ∓iθ(±τ) e^{−iHτ} e^{−ε|τ|} from the exact propagator (θ(0) = 1/2).
OperatorMatrix damped_green_oracle(const SpectralModel& model, double tau, Sign sign, double eps);

}  // namespace dysonprop
