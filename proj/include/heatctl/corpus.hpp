#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "heatctl/geometry.hpp"
#include "heatctl/spectral.hpp"

namespace heatctl::corpus {

// splitmix64; decouples per-case seeds from generator internals so corpus
// membership is stable regardless of how many draws each case consumes
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Random periodic box union with n_boxes boxes inside the fundamental cell.
inline geometry::BoxUnionSet random_periodic_set(std::uint64_t seed, int d,
                                                 const std::vector<double>& period, int n_boxes,
                                                 double min_side_frac = 0.05,
                                                 double max_side_frac = 0.45) {
    std::mt19937_64 rng(mix_seed(seed, 0xb0e5));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<geometry::Box> boxes;
    for (int i = 0; i < n_boxes; ++i) {
        geometry::Box b;
        b.corner.resize(d);
        b.sides.resize(d);
        for (int j = 0; j < d; ++j) {
            b.corner[j] = unit(rng) * period[j];
            b.sides[j] = (min_side_frac + (max_side_frac - min_side_frac) * unit(rng)) * period[j];
        }
        boxes.push_back(std::move(b));
    }
    return geometry::BoxUnionSet(d, std::move(boxes), period);
}

/// Periodic set with exact per-cell density gamma: one box [0, gamma*p_1] x
/// [0, p_2] x ... per cell.  For a = (m_1 p_1, ..., m_d p_d) with integer m,
/// every translate of A contains exactly prod m_j periods, so the set is
/// (gamma, a)-thick with the stated gamma attained everywhere.
inline geometry::BoxUnionSet striped_set(int d, double gamma, const std::vector<double>& period) {
    geometry::Box b;
    b.corner.assign(d, 0.0);
    b.sides = period;
    b.sides[0] *= gamma;
    return geometry::BoxUnionSet(d, {b}, period);
}

/// The half-cells set U_n [n, n+1/2] in d = 1 (period 1).
inline geometry::BoxUnionSet half_cells_set() {
    return geometry::BoxUnionSet(1, {{{0.0}, {0.5}}}, std::vector<double>{1.0});
}

/// Random unit-norm mode vector supported on eigenvalues <= E_max.  Periodic
/// coefficients are complex Gaussian, Dirichlet/Neumann ones real Gaussian.
inline spectral::ModeVector random_mode_vector(std::uint64_t seed,
                                               const spectral::SpectralBasis& basis,
                                               double E_max) {
    std::mt19937_64 rng(mix_seed(seed, 0x30de));
    std::normal_distribution<double> gauss(0.0, 1.0);
    spectral::ModeVector f(basis);
    for (const auto& k : spectral::modes_below(basis, E_max)) {
        if (basis.bc == spectral::BoundaryCondition::periodic)
            f.set_coefficient(k, {gauss(rng), gauss(rng)});
        else
            f.set_coefficient(k, {gauss(rng), 0.0});
    }
    double n = f.norm();
    return n > 0.0 ? f.scaled({1.0 / n, 0.0}) : f;
}

/// Truncated heat kernel centered at `center`, smoothed for time t0 and
/// normalized: a concrete localized initial-datum profile that is stable
/// under changes of the torus size.
inline spectral::ModeVector bump_initial_datum(const spectral::SpectralBasis& basis, double E_max,
                                               const std::vector<double>& center, double t0) {
    spectral::ModeVector f(basis);
    for (const auto& k : spectral::modes_below(basis, E_max)) {
        spectral::Complex phi(1.0, 0.0);
        for (int j = 0; j < basis.dim; ++j)
            phi *= spectral::detail::axis_factor(basis.bc, basis.L, k[j], center[j]);
        spectral::Complex c = std::exp(-spectral::eigenvalue(basis, k) * t0) * std::conj(phi);
        if (basis.bc != spectral::BoundaryCondition::periodic) c = {c.real(), 0.0};
        if (c != spectral::Complex(0.0, 0.0)) f.set_coefficient(k, c);
    }
    double n = f.norm();
    return n > 0.0 ? f.scaled({1.0 / n, 0.0}) : f;
}

}  // namespace heatctl::corpus
