#include "dysonprop/amplitude.hpp"

#include "dysonprop/numfmt.hpp"
#include "dysonprop/oracle.hpp"
#include "dysonprop/propagator.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace dysonprop {

using json = nlohmann::json;

void LatticeSpec::validate() const {
    if (points < 2) throw ValidationError("lattice: M must be at least 2");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("lattice: h must be positive");
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ValidationError("lattice: mass must be positive");
    if (!std::isfinite(x0)) throw ValidationError("lattice: x0 must be finite");
    if (v0.size() != points || v1.size() != points) {
        throw ValidationError("lattice: v0 and v1 must have M entries");
    }
    for (std::size_t n = 0; n < points; ++n) {
        if (!std::isfinite(v0[n]) || !std::isfinite(v1[n])) {
            throw ValidationError("lattice: potentials must be finite");
        }
    }
}

RealMatrix LatticeSpec::h0() const {
    validate();
    const auto m = static_cast<Eigen::Index>(points);
    const double kinetic = 1.0 / (2.0 * mass * spacing * spacing);
    RealMatrix h = RealMatrix::Zero(m, m);
    for (Eigen::Index n = 0; n < m; ++n) {
        h(n, n) = 2.0 * kinetic + v0[static_cast<std::size_t>(n)];
        if (n + 1 < m) {
            h(n, n + 1) = -kinetic;
            h(n + 1, n) = -kinetic;
        }
    }
    return h;
}

LatticeSpec load_lattice(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("lattice file: ") + e.what());
    }
    LatticeSpec spec;
    try {
        if (!doc.is_object()) throw ParseError("lattice file: top level must be an object");
        const auto m = doc.at("M").get<long long>();
        if (m < 2) throw ValidationError("lattice: M must be at least 2");
        spec.points = static_cast<std::size_t>(m);
        spec.x0 = doc.value("x0", 0.0);
        spec.spacing = doc.at("h").get<double>();
        spec.mass = doc.value("mass", 1.0);
        spec.v0 = doc.at("v0").get<std::vector<double>>();
        spec.v1 = doc.at("v1").get<std::vector<double>>();
        if (doc.contains("bc") && doc["bc"].get<std::string>() != "dirichlet") {
            throw ValidationError("lattice: only Dirichlet boundaries are supported");
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("lattice file: ") + e.what());
    }
    spec.validate();
    return spec;
}

LatticeSpec load_lattice_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open lattice file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_lattice(buf.str());
}

std::string emit_lattice(const LatticeSpec& spec) {
    auto array = [](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + format_number(v[k]);
        return s + "]";
    };
    std::ostringstream out;
    out << "{\n  \"M\": " << spec.points << ",\n  \"x0\": " << format_number(spec.x0)
        << ",\n  \"h\": " << format_number(spec.spacing) << ",\n  \"mass\": " << format_number(spec.mass)
        << ",\n  \"v0\": " << array(spec.v0) << ",\n  \"v1\": " << array(spec.v1)
        << ",\n  \"bc\": \"dirichlet\"\n}\n";
    return out.str();
}

LatticeSpec scale_perturbation(LatticeSpec spec, double lambda) {
    for (double& v : spec.v1) v *= lambda;
    return spec;
}

LatticeSystem build_lattice(const LatticeSpec& spec) {
    const RealMatrix h0 = spec.h0();
    const oracle::EigenDecomposition eig = oracle::hermitian_eigendecomposition(h0.cast<cplx>());
    // Real symmetric input keeps every Jacobi rotation real.
    const RealMatrix u = eig.vectors.real();
    const double h = spec.spacing;

    RealVector v1(static_cast<Eigen::Index>(spec.points));
    for (std::size_t n = 0; n < spec.points; ++n) v1(static_cast<Eigen::Index>(n)) = spec.v1[n];
    RealMatrix h1 = u.transpose() * v1.asDiagonal() * u;
    h1 = 0.5 * (h1 + h1.transpose()).eval();

    std::vector<double> energies(eig.values.data(), eig.values.data() + eig.values.size());
    SpectralModel model(std::move(energies), h1.cast<cplx>(), "lattice");
    return LatticeSystem{spec, std::move(model), u / std::sqrt(h)};
}

namespace {

void check_times(double tb, double ta) {
    if (tb < ta) throw ValidationError("transition amplitude requires tb >= ta");
}

void check_index(const LatticeSystem& sys, std::size_t n) {
    if (n >= sys.size()) throw ValidationError("grid index out of range");
}

Matrix sandwich(const LatticeSystem& sys, const Matrix& eigen_op) {
    const Matrix b = sys.basis.cast<cplx>();
    return b * eigen_op * b.transpose();
}

}  // namespace

Matrix k0_matrix(const LatticeSystem& sys, double tau) {
    const auto d = static_cast<Eigen::Index>(sys.model.dim());
    Vector phases(d);
    for (Eigen::Index g = 0; g < d; ++g) {
        phases(g) = std::exp(-kI * sys.model.energy(static_cast<std::size_t>(g)) * tau);
    }
    return sandwich(sys, phases.asDiagonal().toDenseMatrix());
}

Matrix k_exact_matrix(const LatticeSystem& sys, double tau) {
    RealMatrix h = sys.spec.h0();
    for (std::size_t n = 0; n < sys.size(); ++n) {
        h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) += sys.spec.v1[n];
    }
    return oracle::exact_evolution(h.cast<cplx>(), tau) / sys.h();
}

Matrix k_truncated_matrix(const LatticeSystem& sys, TruncationSpec spec, double tau) {
    return sandwich(sys, truncated_evolution(sys.model, spec, tau).entries);
}

cplx k0_amplitude(const LatticeSystem& sys, std::size_t xb, double tb, std::size_t xa, double ta) {
    check_times(tb, ta);
    check_index(sys, xb);
    check_index(sys, xa);
    cplx sum = 0.0;
    for (std::size_t g = 0; g < sys.model.dim(); ++g) {
        const auto gi = static_cast<Eigen::Index>(g);
        sum += sys.basis(static_cast<Eigen::Index>(xb), gi) * std::exp(-kI * sys.model.energy(g) * (tb - ta)) *
               sys.basis(static_cast<Eigen::Index>(xa), gi);
    }
    return sum;
}

cplx k_exact(const LatticeSystem& sys, std::size_t xb, double tb, std::size_t xa, double ta) {
    check_times(tb, ta);
    check_index(sys, xb);
    check_index(sys, xa);
    return k_exact_matrix(sys, tb - ta)(static_cast<Eigen::Index>(xb), static_cast<Eigen::Index>(xa));
}

cplx k_truncated_direct(const LatticeSystem& sys, TruncationSpec spec, std::size_t xb, double tb,
                        std::size_t xa, double ta) {
    check_times(tb, ta);
    check_index(sys, xb);
    check_index(sys, xa);
    return k_truncated_matrix(sys, spec, tb - ta)(static_cast<Eigen::Index>(xb),
                                                  static_cast<Eigen::Index>(xa));
}

RelationKernel::RelationKernel(const LatticeSystem& sys, TruncationSpec spec, double eps, Sign sign)
    : basis_(sys.basis), eps_(eps), sign_(sign) {
    if (!(eps > 0.0)) throw ValidationError("c_kernel: eps must be positive");
    const auto d = static_cast<Eigen::Index>(sys.model.dim());
    const auto& e = sys.model.energies();
    const Matrix& h1 = sys.model.h1();
    const Matrix b = basis_.cast<cplx>();
    const double s = sign_factor(sign);
    const int n = spec.order;

    // Slot at distance `dist` from the projector: left strings get +i·dist·ε (times the sign),
    // right strings the opposite, matching nodes E_{γ_k} ± i(k−1)ε.
    auto resolvent = [&](double center, int dist, bool left) {
        const double shift = (left ? 1.0 : -1.0) * s * eps * dist;
        Vector r(d);
        for (Eigen::Index g = 0; g < d; ++g) r(g) = 1.0 / (center - e[static_cast<std::size_t>(g)] + kI * shift);
        return r;
    };

    slots_.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n + 1; ++i) {
        SlotTerm& slot = slots_[static_cast<std::size_t>(i - 1)];
        for (Eigen::Index g = 0; g < d; ++g) {
            const double eg = e[static_cast<std::size_t>(g)];
            Matrix x = Matrix::Identity(d, d);
            for (int k = 1; k <= i - 1; ++k) x = (x * resolvent(eg, i - k, true).asDiagonal() * h1).eval();
            slot.left.push_back(b * x * b.transpose());

            Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(d);
            row(g) = 1.0;
            Eigen::RowVectorXcd total = row;
            for (int dist = 1; dist <= n + 1 - i; ++dist) {
                row = (row * h1).cwiseProduct(resolvent(eg, dist, false).transpose());
                total += row;
            }
            slot.right.push_back((total * b.transpose()).transpose());
        }
    }
}

cplx RelationKernel::slot(int i, std::size_t xb, std::size_t yb, std::size_t xa, std::size_t ya) const {
    if (i < 1 || i > slots()) throw ValidationError("c_kernel: slot out of range");
    const SlotTerm& term = slots_[static_cast<std::size_t>(i - 1)];
    const auto b = static_cast<Eigen::Index>(xb), y = static_cast<Eigen::Index>(yb);
    const auto a = static_cast<Eigen::Index>(xa), ya_i = static_cast<Eigen::Index>(ya);
    cplx sum = 0.0;
    for (std::size_t g = 0; g < term.left.size(); ++g) {
        sum += term.left[g](b, y) * basis_(ya_i, static_cast<Eigen::Index>(g)) * term.right[g](a);
    }
    return sum;
}

cplx RelationKernel::operator()(std::size_t xb, std::size_t yb, std::size_t xa, std::size_t ya) const {
    cplx sum = 0.0;
    for (int i = 1; i <= slots(); ++i) sum += slot(i, xb, yb, xa, ya);
    return sum;
}

cplx RelationKernel::contract(const Matrix& k0, double h, std::size_t xb, std::size_t xa,
                              double tau) const {
    const auto m = static_cast<std::size_t>(k0.rows());
    const double s = sign_factor(sign_);
    cplx total = 0.0;
    for (int i = 1; i <= slots(); ++i) {
        cplx sum = 0.0;
        for (std::size_t yb = 0; yb < m; ++yb) {
            for (std::size_t ya = 0; ya < m; ++ya) {
                sum += slot(i, xb, yb, xa, ya) *
                       k0(static_cast<Eigen::Index>(yb), static_cast<Eigen::Index>(ya));
            }
        }
        total += std::exp(s * (i - 1) * eps_ * tau) * sum;
    }
    return h * h * total;
}

cplx RelationKernel::contract(const LatticeSystem& sys, std::size_t xb, std::size_t xa, double tau) const {
    return contract(k0_matrix(sys, tau), sys.h(), xb, xa, tau);
}

cplx c_kernel(const LatticeSystem& sys, TruncationSpec spec, double eps, std::size_t xb,
              std::size_t yb, std::size_t xa, std::size_t ya, Sign sign) {
    for (std::size_t n : {xb, yb, xa, ya}) check_index(sys, n);
    return RelationKernel(sys, spec, eps, sign)(xb, yb, xa, ya);
}

cplx k_via_relation(const LatticeSystem& sys, TruncationSpec spec, double eps, std::size_t xb,
                    double tb, std::size_t xa, double ta, Sign sign) {
    check_times(tb, ta);
    check_index(sys, xb);
    check_index(sys, xa);
    return RelationKernel(sys, spec, eps, sign).contract(sys, xb, xa, tb - ta);
}

Matrix k_via_relation_matrix(const LatticeSystem& sys, TruncationSpec spec, double eps, double tau,
                             Sign sign) {
    const RelationKernel kernel(sys, spec, eps, sign);
    const Matrix k0 = k0_matrix(sys, tau);
    const auto m = static_cast<Eigen::Index>(sys.size());
    Matrix out(m, m);
    for (Eigen::Index b = 0; b < m; ++b) {
        for (Eigen::Index a = 0; a < m; ++a) {
            out(b, a) = kernel.contract(k0, sys.h(), static_cast<std::size_t>(b),
                                        static_cast<std::size_t>(a), tau);
        }
    }
    return out;
}

Matrix k_via_relation_extrapolated(const LatticeSystem& sys, TruncationSpec spec, double eps,
                                   double tau, Sign sign) {
    return richardson3<Matrix>(k_via_relation_matrix(sys, spec, eps, tau, sign),
                               k_via_relation_matrix(sys, spec, eps / 2.0, tau, sign),
                               k_via_relation_matrix(sys, spec, eps / 4.0, tau, sign));
}

LatticeSpec default_well_lattice(std::size_t points, double depth) {
    LatticeSpec spec;
    spec.points = points;
    spec.x0 = 0.0;
    spec.spacing = 1.0;
    spec.mass = 1.0;
    spec.v0.assign(points, 0.0);
    spec.v1.resize(points);
    const double center = 0.5 * static_cast<double>(points - 1);
    const double width = 0.25 * static_cast<double>(points);
    for (std::size_t n = 0; n < points; ++n) {
        const double z = (static_cast<double>(n) - center) / width;
        spec.v1[n] = -depth * std::exp(-z * z);
    }
    spec.validate();
    return spec;
}

}  // namespace dysonprop
