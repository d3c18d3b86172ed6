#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "heatctl/geometry.hpp"
#include "heatctl/spectral.hpp"

namespace heatctl::spectral {

namespace detail {

// integral of cos(m x / (2L)) over [alpha, beta]
inline double cos_integral(int m, double L, double alpha, double beta) {
    if (m == 0) return beta - alpha;
    double w = m / (2.0 * L);
    return (std::sin(w * beta) - std::sin(w * alpha)) / w;
}

// one axis factor of <phi_k, chi_box phi_l>: integral over [alpha, beta] of
// conj(phi_k) phi_l for the 1-d factors of the tensor eigenbasis
inline Complex axis_pair_integral(BoundaryCondition bc, double L, int k, int l, double alpha,
                                  double beta) {
    switch (bc) {
        case BoundaryCondition::periodic: {
            const double norm = 1.0 / (2.0 * M_PI * L);
            const int m = l - k;
            if (m == 0) return Complex(norm * (beta - alpha), 0.0);
            const double w = m / L;
            // integral of e^{i w x} = (e^{i w beta} - e^{i w alpha}) / (i w)
            Complex num = std::polar(1.0, w * beta) - std::polar(1.0, w * alpha);
            return norm * num / Complex(0.0, w);
        }
        case BoundaryCondition::dirichlet: {
            const double norm = 1.0 / (M_PI * L);
            double v = 0.5 * (cos_integral(k - l, L, alpha, beta) -
                              cos_integral(k + l, L, alpha, beta));
            return Complex(norm * v, 0.0);
        }
        case BoundaryCondition::neumann: {
            double nk = k == 0 ? 1.0 / std::sqrt(2.0 * M_PI * L) : 1.0 / std::sqrt(M_PI * L);
            double nl = l == 0 ? 1.0 / std::sqrt(2.0 * M_PI * L) : 1.0 / std::sqrt(M_PI * L);
            double v = 0.5 * (cos_integral(k - l, L, alpha, beta) +
                              cos_integral(k + l, L, alpha, beta));
            return Complex(nk * nl * v, 0.0);
        }
    }
    return {};
}

}  // namespace detail

/// Mass matrix B_{kl} = <phi_k, chi_S phi_l> over the cell [0, 2 pi L]^d by
/// midpoint quadrature with exact per-cell coverage fractions of S as
/// weights.  B is Hermitian PSD by construction, and below the aliasing
/// limit the same weights reproduce the identity on the full cell, so
/// 0 <= B <= I as quadratic forms.
inline Eigen::MatrixXcd mass_matrix(const SpectralBasis& basis, const geometry::BoxUnionSet& S,
                                    const std::vector<MultiIndex>& modes, int resolution = 0) {
    basis.validate();
    if (S.dim() != basis.dim) throw InvalidArgument("mass_matrix: dimension mismatch");
    if (modes.empty()) throw InvalidArgument("mass_matrix: empty mode list");
    if (resolution <= 0) resolution = default_resolution(basis.dim);
    const int d = basis.dim;
    const int N = static_cast<int>(modes.size());
    const double h = basis.cell_extent() / resolution;

    std::vector<double> lo(d, 0.0), hi(d, basis.cell_extent());
    auto cov = geometry::coverage_grid(S, lo, hi, std::vector<int>(d, resolution));
    const double cellvol = cov.cell_volume();

    // per-axis eigenfunction samples at cell midpoints for the mode values
    // actually present
    std::vector<std::vector<int>> axis_modes(d);
    for (const auto& k : modes)
        for (int j = 0; j < d; ++j) axis_modes[j].push_back(k[j]);
    for (auto& v : axis_modes) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    std::vector<Eigen::MatrixXcd> tables(d);
    for (int j = 0; j < d; ++j) {
        tables[j].resize(axis_modes[j].size(), resolution);
        for (std::size_t m = 0; m < axis_modes[j].size(); ++m)
            for (int i = 0; i < resolution; ++i)
                tables[j](m, i) =
                    detail::axis_factor(basis.bc, basis.L, axis_modes[j][m], (i + 0.5) * h);
    }
    std::vector<std::vector<int>> mode_pos(d, std::vector<int>(N));
    for (int n = 0; n < N; ++n)
        for (int j = 0; j < d; ++j)
            mode_pos[j][n] = static_cast<int>(
                std::lower_bound(axis_modes[j].begin(), axis_modes[j].end(), modes[n][j]) -
                axis_modes[j].begin());

    // accumulate Psi^H Psi in blocks, Psi = sqrt(w * vol) Phi
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N, N);
    std::size_t total = cov.fractions.size();
    const std::size_t block = 4096;
    Eigen::MatrixXcd Psi(block, N);
    std::vector<int> idx(d, 0);
    std::size_t fill = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        double w = cov.fractions[flat];
        if (w > 0.0) {
            double scale = std::sqrt(w * cellvol);
            for (int n = 0; n < N; ++n) {
                Complex phi(scale, 0.0);
                for (int j = 0; j < d; ++j) phi *= tables[j](mode_pos[j][n], idx[j]);
                Psi(fill, n) = phi;
            }
            if (++fill == block) {
                B.noalias() += Psi.adjoint() * Psi;
                fill = 0;
            }
        }
        int j = d - 1;
        while (j >= 0 && ++idx[j] == resolution) idx[j--] = 0;
    }
    if (fill > 0) B.noalias() += Psi.topRows(fill).adjoint() * Psi.topRows(fill);
    return 0.5 * (B + B.adjoint().eval());
}

/// Same matrix assembled from closed-form trigonometric integrals over the
/// boxes of S realized in the cell; used as the oracle route and for
/// eigensolves where exactness matters.
inline Eigen::MatrixXcd mass_matrix_exact(const SpectralBasis& basis,
                                          const geometry::BoxUnionSet& S,
                                          const std::vector<MultiIndex>& modes) {
    basis.validate();
    if (S.dim() != basis.dim) throw InvalidArgument("mass_matrix_exact: dimension mismatch");
    if (modes.empty()) throw InvalidArgument("mass_matrix_exact: empty mode list");
    const int d = basis.dim;
    const int N = static_cast<int>(modes.size());
    std::vector<double> lo(d, 0.0), hi(d, basis.cell_extent());
    auto boxes = S.boxes_in_window(lo, hi);

    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(N, N);
    for (const auto& box : boxes) {
        for (int r = 0; r < N; ++r) {
            for (int c = r; c < N; ++c) {
                Complex v(1.0, 0.0);
                for (int j = 0; j < d && v != Complex(0.0, 0.0); ++j)
                    v *= detail::axis_pair_integral(basis.bc, basis.L, modes[r][j], modes[c][j],
                                                    box.corner[j], box.upper(j));
                B(r, c) += v;
            }
        }
    }
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < r; ++c) B(r, c) = std::conj(B(c, r));
    return B;
}

}  // namespace heatctl::spectral
