#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "heatctl/errors.hpp"
#include "heatctl/geometry.hpp"

namespace heatctl::spectral {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

enum class BoundaryCondition { periodic, dirichlet, neumann };

/// Laplacian eigenbasis descriptor on the cube (0, 2 pi L)^d.
///
/// Index sets and eigenvalues:
///   periodic   k in Z^d,   lambda_k = |k|^2 / L^2
///   dirichlet  k in N^d,   lambda_k = |k|^2 / (2L)^2
///   neumann    k in N_0^d, lambda_k = |k|^2 / (2L)^2
struct SpectralBasis {
    int dim = 1;
    double L = 1.0;
    BoundaryCondition bc = BoundaryCondition::periodic;

    void validate() const {
        if (dim < 1) throw InvalidArgument("SpectralBasis: dimension must be >= 1");
        if (!(L > 0.0)) throw InvalidArgument("SpectralBasis: L must be positive");
    }

    double cell_extent() const { return 2.0 * M_PI * L; }

    bool valid_index(const MultiIndex& k) const {
        if (static_cast<int>(k.size()) != dim) return false;
        for (int kj : k) {
            if (bc == BoundaryCondition::dirichlet && kj < 1) return false;
            if (bc == BoundaryCondition::neumann && kj < 0) return false;
        }
        return true;
    }

    friend bool operator==(const SpectralBasis& a, const SpectralBasis& b) {
        return a.dim == b.dim && a.L == b.L && a.bc == b.bc;
    }
};

inline double eigenvalue(const SpectralBasis& basis, const MultiIndex& k) {
    if (!basis.valid_index(k)) throw InvalidIndex("eigenvalue: index outside basis index set");
    double kk = 0.0;
    for (int kj : k) kk += static_cast<double>(kj) * kj;
    double denom = basis.bc == BoundaryCondition::periodic ? basis.L : 2.0 * basis.L;
    return kk / (denom * denom);
}

namespace detail {

// one-dimensional orthonormal factor of the tensor eigenfunction
inline Complex axis_factor(BoundaryCondition bc, double L, int k, double x) {
    switch (bc) {
        case BoundaryCondition::periodic: {
            double norm = 1.0 / std::sqrt(2.0 * M_PI * L);
            double phase = k * x / L;
            return Complex(norm * std::cos(phase), norm * std::sin(phase));
        }
        case BoundaryCondition::dirichlet:
            return Complex(std::sin(k * x / (2.0 * L)) / std::sqrt(M_PI * L), 0.0);
        case BoundaryCondition::neumann: {
            // the constant factor needs the wider normalization (2 pi L)^{-1/2}
            double norm = k == 0 ? 1.0 / std::sqrt(2.0 * M_PI * L) : 1.0 / std::sqrt(M_PI * L);
            return Complex(norm * std::cos(k * x / (2.0 * L)), 0.0);
        }
    }
    return {};
}

}  // namespace detail

/// Finitely supported coefficient vector over a Laplacian eigenbasis.
/// Dirichlet/Neumann expansions are real-valued; their coefficients are kept
/// real (zero imaginary part, enforced at insertion).
class ModeVector {
  public:
    explicit ModeVector(SpectralBasis basis) : basis_(std::move(basis)) { basis_.validate(); }

    const SpectralBasis& basis() const { return basis_; }
    const std::map<MultiIndex, Complex>& coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }

    void set_coefficient(const MultiIndex& k, Complex z) {
        if (!basis_.valid_index(k))
            throw InvalidIndex("ModeVector: index outside basis index set");
        if (basis_.bc != BoundaryCondition::periodic && z.imag() != 0.0)
            throw InvalidArgument("ModeVector: Dirichlet/Neumann coefficients must be real");
        if (z == Complex(0.0, 0.0))
            coeffs_.erase(k);
        else
            coeffs_[k] = z;
    }

    void add_coefficient(const MultiIndex& k, Complex z) { set_coefficient(k, coefficient(k) + z); }

    Complex coefficient(const MultiIndex& k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Complex(0.0, 0.0) : it->second;
    }

    /// L^2 norm; equals the Euclidean norm of the coefficients by
    /// orthonormality.
    double norm() const {
        double s = 0.0;
        for (const auto& [k, z] : coeffs_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_eigenvalue() const {
        double m = 0.0;
        for (const auto& [k, z] : coeffs_) m = std::max(m, eigenvalue(basis_, k));
        return m;
    }

    ModeVector scaled(Complex s) const {
        ModeVector out(basis_);
        if (s == Complex(0.0, 0.0)) return out;
        for (const auto& [k, z] : coeffs_) out.coeffs_[k] = s * z;
        return out;
    }

    friend bool operator==(const ModeVector& a, const ModeVector& b) {
        return a.basis_ == b.basis_ && a.coeffs_ == b.coeffs_;
    }

  private:
    SpectralBasis basis_;
    std::map<MultiIndex, Complex> coeffs_;
};

/// Pointwise evaluation as a sum of coefficients times eigenfunctions.
inline std::vector<Complex> evaluate(const ModeVector& f,
                                     const std::vector<std::vector<double>>& points) {
    const auto& basis = f.basis();
    std::vector<Complex> out(points.size(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].size()) != basis.dim)
            throw InvalidArgument("evaluate: point dimension mismatch");
        Complex acc(0.0, 0.0);
        for (const auto& [k, z] : f.coeffs()) {
            Complex phi(1.0, 0.0);
            for (int j = 0; j < basis.dim; ++j)
                phi *= detail::axis_factor(basis.bc, basis.L, k[j], points[i][j]);
            acc += z * phi;
        }
        out[i] = acc;
    }
    return out;
}

inline Complex evaluate_at(const ModeVector& f, const std::vector<double>& x) {
    return evaluate(f, {x})[0];
}

/// Default quadrature resolution per axis (midpoint rule on the cell).
inline int default_resolution(int dim) { return dim <= 2 ? 256 : 64; }

/// Values of f on the midpoint tensor grid of [0, 2 pi L]^d, row-major with
/// the last axis fastest.  Tensor structure is exploited per axis.
inline std::vector<Complex> evaluate_on_grid(const ModeVector& f, int resolution) {
    const auto& basis = f.basis();
    const int d = basis.dim;
    if (resolution < 1) throw InvalidArgument("evaluate_on_grid: resolution must be positive");
    const double h = basis.cell_extent() / resolution;
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(resolution);
    std::vector<Complex> out(total, Complex(0.0, 0.0));
    if (f.empty()) return out;

    // per-axis mode values present in the coefficient map
    std::vector<std::vector<int>> axis_modes(d);
    for (const auto& [k, z] : f.coeffs())
        for (int j = 0; j < d; ++j) axis_modes[j].push_back(k[j]);
    for (auto& v : axis_modes) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    auto axis_pos = [&](int j, int kj) {
        return static_cast<int>(std::lower_bound(axis_modes[j].begin(), axis_modes[j].end(), kj) -
                                axis_modes[j].begin());
    };
    std::vector<Eigen::MatrixXcd> tables(d);  // tables[j](mode, grid point)
    for (int j = 0; j < d; ++j) {
        tables[j].resize(axis_modes[j].size(), resolution);
        for (std::size_t m = 0; m < axis_modes[j].size(); ++m)
            for (int i = 0; i < resolution; ++i)
                tables[j](m, i) =
                    detail::axis_factor(basis.bc, basis.L, axis_modes[j][m], (i + 0.5) * h);
    }

    if (d == 1) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(axis_modes[0].size());
        for (const auto& [k, z] : f.coeffs()) c(axis_pos(0, k[0])) += z;
        Eigen::Map<Eigen::VectorXcd>(out.data(), resolution) = tables[0].transpose() * c;
        return out;
    }
    if (d == 2) {
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(axis_modes[0].size(), axis_modes[1].size());
        for (const auto& [k, z] : f.coeffs()) C(axis_pos(0, k[0]), axis_pos(1, k[1])) += z;
        Eigen::MatrixXcd vals = tables[0].transpose() * C * tables[1];  // res x res
        for (int i = 0; i < resolution; ++i)
            for (int l = 0; l < resolution; ++l)
                out[static_cast<std::size_t>(i) * resolution + l] = vals(i, l);
        return out;
    }
    // generic d
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Complex acc(0.0, 0.0);
        for (const auto& [k, z] : f.coeffs()) {
            Complex phi(1.0, 0.0);
            for (int j = 0; j < d; ++j) phi *= tables[j](axis_pos(j, k[j]), idx[j]);
            acc += z * phi;
        }
        out[flat] = acc;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == resolution) idx[j--] = 0;
    }
    return out;
}

/// Spectral projector onto eigenvalues <= E (closed threshold).
inline ModeVector project_below(const ModeVector& f, double E) {
    if (E < 0.0) throw InvalidArgument("project_below: E must be nonnegative");
    ModeVector out(f.basis());
    for (const auto& [k, z] : f.coeffs())
        if (eigenvalue(f.basis(), k) <= E) out.set_coefficient(k, z);
    return out;
}

/// Heat semigroup e^{t Laplacian}: coefficientwise decay exp(-lambda_k t).
inline ModeVector heat_semigroup(const ModeVector& f, double t) {
    if (t < 0.0) throw InvalidArgument("heat_semigroup: t must be nonnegative");
    ModeVector out(f.basis());
    for (const auto& [k, z] : f.coeffs())
        out.set_coefficient(k, z * std::exp(-eigenvalue(f.basis(), k) * t));
    return out;
}

/// Quadrature of ||f||_{L^2(S n cell)} by midpoint rule on the rasterized
/// indicator of S.
inline double restricted_norm(const ModeVector& f, const geometry::BoxUnionSet& S,
                              int resolution = 0) {
    const auto& basis = f.basis();
    if (S.dim() != basis.dim) throw InvalidArgument("restricted_norm: dimension mismatch");
    if (resolution <= 0) resolution = default_resolution(basis.dim);
    std::vector<double> lo(basis.dim, 0.0), hi(basis.dim, basis.cell_extent());
    auto grid = geometry::rasterize(S, lo, hi, std::vector<int>(basis.dim, resolution));
    auto vals = evaluate_on_grid(f, resolution);
    double s = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (grid.values[i]) s += std::norm(vals[i]);
    return std::sqrt(s * grid.cell_volume());
}

/// Same integral with exact per-cell coverage fractions as weights; never
/// exceeds the Parseval norm for band-limited f below the aliasing limit.
inline double restricted_norm_weighted(const ModeVector& f, const geometry::BoxUnionSet& S,
                                       int resolution = 0) {
    const auto& basis = f.basis();
    if (S.dim() != basis.dim)
        throw InvalidArgument("restricted_norm_weighted: dimension mismatch");
    if (resolution <= 0) resolution = default_resolution(basis.dim);
    std::vector<double> lo(basis.dim, 0.0), hi(basis.dim, basis.cell_extent());
    auto cov = geometry::coverage_grid(S, lo, hi, std::vector<int>(basis.dim, resolution));
    auto vals = evaluate_on_grid(f, resolution);
    double s = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) s += cov.fractions[i] * std::norm(vals[i]);
    return std::sqrt(s * cov.cell_volume());
}

/// Extend a Dirichlet/Neumann expansion on (0, 2 pi L)^d to its Fourier
/// series on the doubled torus (0, 4 pi L)^d.
///
/// Each sine/cosine factor splits into exponentials with frequency k/(2L),
/// which is a lattice frequency of the doubled torus.  With orthonormal bases
/// on both sides the coefficients come out as
///   dirichlet  a_{k~} = alpha_{|k~|} (-i)^d prod_j sgn(k~_j)
///   neumann    a_{k~} = alpha_{|k~|} 2^{z/2},  z = #{j : k~_j = 0}
/// and the extension satisfies ||f~||^2 = 2^d ||f||^2.
inline ModeVector extend_to_double_torus(const ModeVector& f) {
    const auto& basis = f.basis();
    if (basis.bc == BoundaryCondition::periodic)
        throw InvalidArgument("extend_to_double_torus: input is already periodic");
    SpectralBasis doubled{basis.dim, 2.0 * basis.L, BoundaryCondition::periodic};
    ModeVector out(doubled);
    const int d = basis.dim;

    Complex minus_i_pow_d(1.0, 0.0);
    for (int j = 0; j < d; ++j) minus_i_pow_d *= Complex(0.0, -1.0);

    for (const auto& [k, alpha] : f.coeffs()) {
        // sign patterns over the nonzero components
        std::vector<int> free_axes;
        int zeros = 0;
        for (int j = 0; j < d; ++j) {
            if (k[j] == 0)
                ++zeros;
            else
                free_axes.push_back(j);
        }
        const int n_free = static_cast<int>(free_axes.size());
        for (int mask = 0; mask < (1 << n_free); ++mask) {
            MultiIndex kt = k;
            double sign_prod = 1.0;
            for (int b = 0; b < n_free; ++b)
                if (mask & (1 << b)) {
                    kt[free_axes[b]] = -kt[free_axes[b]];
                    sign_prod = -sign_prod;
                }
            Complex value;
            if (basis.bc == BoundaryCondition::dirichlet)
                value = alpha * minus_i_pow_d * sign_prod;
            else
                value = alpha * std::pow(2.0, 0.5 * zeros);
            out.add_coefficient(kt, value);
        }
    }
    return out;
}

struct DissipationReport {
    double high_norm = 0.0;   // ||(1 - pi_E) e^{t Lap} f||
    double input_norm = 0.0;  // ||f||
    double ratio = 0.0;
    double bound = 0.0;  // e^{-t E}
    bool satisfied = false;
};

/// Check the high-frequency decay ||(1-pi_E) e^{t Lap} f|| <= e^{-tE} ||f||.
/// The inequality is exact coefficientwise, so only rounding-level slack is
/// tolerated.
inline DissipationReport dissipation_check(const ModeVector& f, double E, double t) {
    if (f.empty() || f.norm() == 0.0)
        throw InvalidArgument("dissipation_check: f must be nonzero");
    if (E < 0.0) throw InvalidArgument("dissipation_check: E must be nonnegative");
    if (t < 0.0) throw InvalidArgument("dissipation_check: t must be nonnegative");
    DissipationReport rep;
    rep.input_norm = f.norm();
    double s = 0.0;
    for (const auto& [k, z] : f.coeffs()) {
        double lam = eigenvalue(f.basis(), k);
        if (lam > E) s += std::norm(z) * std::exp(-2.0 * lam * t);
    }
    rep.high_norm = std::sqrt(s);
    rep.ratio = rep.high_norm / rep.input_norm;
    rep.bound = std::exp(-t * E);
    rep.satisfied = rep.ratio <= rep.bound * (1.0 + 1e-14);
    return rep;
}

/// All basis indices with eigenvalue <= E, in lexicographic order.
inline std::vector<MultiIndex> modes_below(const SpectralBasis& basis, double E) {
    basis.validate();
    if (E < 0.0) throw InvalidArgument("modes_below: E must be nonnegative");
    double denom = basis.bc == BoundaryCondition::periodic ? basis.L : 2.0 * basis.L;
    double radius2 = E * denom * denom;
    int kmax = static_cast<int>(std::floor(std::sqrt(radius2) + 1e-12));
    int lo = basis.bc == BoundaryCondition::periodic ? -kmax
             : basis.bc == BoundaryCondition::dirichlet ? 1
                                                        : 0;
    std::vector<MultiIndex> out;
    MultiIndex k(basis.dim, lo);
    if (lo > kmax) return out;
    while (true) {
        double kk = 0.0;
        for (int kj : k) kk += static_cast<double>(kj) * kj;
        if (kk <= radius2 * (1.0 + 1e-14)) out.push_back(k);
        int j = basis.dim - 1;
        while (j >= 0 && ++k[j] > kmax) k[j--] = lo;
        if (j < 0) break;
    }
    return out;
}

}  // namespace heatctl::spectral
