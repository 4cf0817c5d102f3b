#include "dysonprop/model.hpp"

#include "dysonprop/numfmt.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace dysonprop {

using json = nlohmann::json;

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

double hermiticity_residual(const Matrix& h1) {
    if (h1.size() == 0) return 0.0;
    return (h1 - h1.adjoint()).cwiseAbs().maxCoeff();
}

SpectralModel::SpectralModel(std::vector<double> energies, Matrix h1, std::string label)
    : energies_(std::move(energies)), h1_(std::move(h1)), label_(std::move(label)) {
    const auto d = static_cast<Eigen::Index>(energies_.size());
    if (d == 0) throw ValidationError("model dimension must be positive");
    if (h1_.rows() != d || h1_.cols() != d) {
        throw ValidationError("h1 is " + std::to_string(h1_.rows()) + "x" +
                              std::to_string(h1_.cols()) + " but there are " +
                              std::to_string(d) + " energies");
    }
    for (double e : energies_) {
        if (!std::isfinite(e)) throw ValidationError("energies must be finite");
    }
    if (!h1_.allFinite()) throw ValidationError("h1 entries must be finite");

    const double scale = std::max(1.0, max_abs(h1_));
    if (hermiticity_residual(h1_) > kHermitianTol * scale) {
        throw ValidationError("h1 is not Hermitian (residual " +
                              format_number(hermiticity_residual(h1_)) + ")");
    }
    // Exact symmetrization; idempotent on already-Hermitian input.
    for (Eigen::Index a = 0; a < d; ++a) {
        h1_(a, a) = cplx(h1_(a, a).real(), 0.0);
        for (Eigen::Index b = a + 1; b < d; ++b) {
            const cplx avg = 0.5 * (h1_(a, b) + std::conj(h1_(b, a)));
            h1_(a, b) = avg;
            h1_(b, a) = std::conj(avg);
        }
    }

    for (std::size_t a = 0; a < energies_.size() && nondegenerate_; ++a) {
        for (std::size_t b = a + 1; b < energies_.size(); ++b) {
            if (std::abs(energies_[a] - energies_[b]) <= kDegeneracyTol) {
                nondegenerate_ = false;
                break;
            }
        }
    }
}

Matrix SpectralModel::h0_matrix() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Matrix h0 = Matrix::Zero(d, d);
    for (Eigen::Index g = 0; g < d; ++g) h0(g, g) = energies_[static_cast<std::size_t>(g)];
    return h0;
}

Matrix SpectralModel::hamiltonian() const { return h0_matrix() + h1_; }

double SpectralModel::min_energy() const {
    return *std::min_element(energies_.begin(), energies_.end());
}

double SpectralModel::max_energy() const {
    return *std::max_element(energies_.begin(), energies_.end());
}

bool SpectralModel::operator==(const SpectralModel& other) const {
    return energies_ == other.energies_ && h1_ == other.h1_ && label_ == other.label_;
}

SpectralModel load_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw ParseError("model file: top level must be an object");
        const auto dim = doc.at("dim").get<long long>();
        if (dim <= 0) throw ValidationError("model file: dim must be positive");
        const auto& jenergies = doc.at("energies");
        const auto& jh1 = doc.at("h1");
        if (!jenergies.is_array() || !jh1.is_array()) {
            throw ParseError("model file: energies and h1 must be arrays");
        }
        if (static_cast<long long>(jenergies.size()) != dim ||
            static_cast<long long>(jh1.size()) != dim) {
            throw ValidationError("model file: dimension mismatch");
        }
        std::vector<double> energies;
        energies.reserve(static_cast<std::size_t>(dim));
        for (const auto& e : jenergies) energies.push_back(e.get<double>());

        Matrix h1(dim, dim);
        for (long long r = 0; r < dim; ++r) {
            const auto& row = jh1[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<long long>(row.size()) != dim) {
                throw ValidationError("model file: h1 row " + std::to_string(r) +
                                      " has wrong length");
            }
            for (long long c = 0; c < dim; ++c) {
                const auto& z = row[static_cast<std::size_t>(c)];
                if (!z.is_array() || z.size() != 2) {
                    throw ParseError("model file: h1 entries must be [re, im] pairs");
                }
                h1(r, c) = cplx(z[0].get<double>(), z[1].get<double>());
            }
        }
        std::string label = doc.value("label", std::string{});
        return SpectralModel(std::move(energies), std::move(h1), std::move(label));
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

std::string emit_model(const SpectralModel& model) {
    std::ostringstream out;
    out << "{\n  \"dim\": " << model.dim() << ",\n  \"energies\": [";
    for (std::size_t g = 0; g < model.dim(); ++g) {
        out << (g ? ", " : "") << format_number(model.energy(g));
    }
    out << "],\n  \"h1\": [\n";
    const auto d = static_cast<Eigen::Index>(model.dim());
    for (Eigen::Index r = 0; r < d; ++r) {
        out << "    [";
        for (Eigen::Index c = 0; c < d; ++c) {
            const cplx z = model.h1()(r, c);
            out << (c ? ", " : "") << '[' << format_number(z.real()) << ", "
                << format_number(z.imag()) << ']';
        }
        out << ']' << (r + 1 < d ? "," : "") << '\n';
    }
    out << "  ],\n  \"label\": " << json(model.label()).dump() << "\n}\n";
    return out.str();
}

SpectralModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str());
}

SpectralModel random_model(std::size_t dim, std::uint64_t seed, double lambda) {
    if (dim == 0) throw ValidationError("random_model: dim must be positive");
    if (!(lambda >= 0.0)) throw ValidationError("random_model: lambda must be nonnegative");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Gaps are drawn from [0.06, 1.0] so rounding never pushes them below 0.05.
    std::vector<double> energies(dim);
    energies[0] = -unit(rng);
    for (std::size_t g = 1; g < dim; ++g) {
        energies[g] = energies[g - 1] + (0.06 + 0.94 * unit(rng));
    }

    const auto d = static_cast<Eigen::Index>(dim);
    Matrix h1 = Matrix::Zero(d, d);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index a = 0; a < d; ++a) {
        h1(a, a) = cplx(lambda * (2.0 * unit(rng) - 1.0), 0.0);
        for (Eigen::Index b = a + 1; b < d; ++b) {
            const double re = (2.0 * unit(rng) - 1.0) * inv_sqrt2;
            const double im = (2.0 * unit(rng) - 1.0) * inv_sqrt2;
            h1(a, b) = lambda * cplx(re, im);
            h1(b, a) = std::conj(h1(a, b));
        }
    }
    return SpectralModel(std::move(energies), std::move(h1),
                         "random(dim=" + std::to_string(dim) + ",seed=" + std::to_string(seed) +
                             ")");
}

SpectralModel scale_coupling(const SpectralModel& model, CouplingScale s) {
    return SpectralModel(model.energies(), model.h1() * s.lambda, model.label());
}

SpectralModel two_level_model(double omega, double v) {
    Matrix h1(2, 2);
    h1 << 0.0, v, v, 0.0;
    return SpectralModel({0.0, omega}, std::move(h1), "two-level");
}

}  // namespace dysonprop
