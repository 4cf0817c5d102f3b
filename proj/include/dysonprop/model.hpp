// model.hpp — spectral models: the H₀ spectrum plus the perturbing matrix in the H₀ eigenbasis.
//
// H₀ is carried only through its eigenvalues; the standard basis is its eigenbasis. Every
// expansion in this library reads a SpectralModel and nothing else.

#pragma once

#include "dysonprop/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dysonprop {

/// Gap below which two unperturbed levels count as coincident (absolute, energy units).
inline constexpr double kDegeneracyTol = 1e-9;

/// Relative tolerance for the Hermiticity check on h1.
inline constexpr double kHermitianTol = 1e-12;

class SpectralModel {
public:
    /// Validates and stores. h1 is symmetrized to exact Hermiticity after the tolerance check.
    SpectralModel(std::vector<double> energies, Matrix h1, std::string label = {});

    std::size_t dim() const noexcept { return energies_.size(); }
    const std::vector<double>& energies() const noexcept { return energies_; }
    double energy(std::size_t g) const { return energies_[g]; }
    const Matrix& h1() const noexcept { return h1_; }
    const std::string& label() const noexcept { return label_; }

    /// True iff every pair of levels is separated by more than kDegeneracyTol.
    bool nondegenerate() const noexcept { return nondegenerate_; }

    /// diag(E_γ) as a dense complex matrix.
    Matrix h0_matrix() const;
    /// H₀ + H₁ in the H₀ eigenbasis.
    Matrix hamiltonian() const;

    double min_energy() const;
    double max_energy() const;

    bool operator==(const SpectralModel& other) const;

private:
    std::vector<double> energies_;
    Matrix h1_;
    std::string label_;
    bool nondegenerate_{true};
};

/// Nonnegative multiplier applied to h1.
struct CouplingScale {
    double lambda{1.0};

    explicit CouplingScale(double l) : lambda(l) {
        if (!(l >= 0.0)) throw ValidationError("coupling scale must be nonnegative");
    }
};

/// max |h1 − h1†| over all entries.
double hermiticity_residual(const Matrix& h1);

/// Parse a model file (JSON object: dim, energies, h1 as [re, im] pairs, optional label).
SpectralModel load_model(std::string_view text);

/// Inverse of load_model; numbers are written with 17 significant digits.
std::string emit_model(const SpectralModel& model);

SpectralModel load_model_file(const std::string& path);

/// Deterministic random model. Energies ascend with gaps ≥ 0.05; |h1 entries| ≤ lambda.
SpectralModel random_model(std::size_t dim, std::uint64_t seed, double lambda);

SpectralModel scale_coupling(const SpectralModel& model, CouplingScale s);

/// Two-level model E = (0, ω), H₁ = v·σx.
SpectralModel two_level_model(double omega, double v);

}  // namespace dysonprop
