#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "heatctl/constants.hpp"
#include "heatctl/corpus.hpp"
#include "heatctl/errors.hpp"
#include "heatctl/geometry.hpp"
#include "heatctl/massmatrix.hpp"
#include "heatctl/spectral.hpp"

namespace heatctl::lsineq {

using spectral::BoundaryCondition;
using spectral::Complex;
using spectral::ModeVector;
using spectral::MultiIndex;
using spectral::SpectralBasis;

/// A bandlimited function paired with a thick set on the same torus.  The
/// spectrum box J defaults to the smallest axis-aligned box containing the
/// active frequencies (for Dirichlet/Neumann: of the doubled-torus
/// extension); an explicit J may widen it.
struct LSInstance {
    ModeVector f;
    geometry::BoxUnionSet S;
    double gamma = 1.0;
    std::vector<double> a;
    std::optional<std::pair<std::vector<double>, std::vector<double>>> J;  // freq-space box

    LSInstance(ModeVector f_, geometry::BoxUnionSet S_, double gamma_, std::vector<double> a_)
        : f(std::move(f_)), S(std::move(S_)), gamma(gamma_), a(std::move(a_)) {
        validate();
    }

    void validate() const {
        const auto& basis = f.basis();
        if (S.dim() != basis.dim) throw InvalidArgument("LSInstance: dimension mismatch");
        if (!(gamma > 0.0) || gamma > 1.0) throw InvalidArgument("LSInstance: gamma in (0,1]");
        if (static_cast<int>(a.size()) != basis.dim)
            throw InvalidArgument("LSInstance: a must have d entries");
        for (double aj : a) {
            if (!(aj > 0.0)) throw InvalidArgument("LSInstance: a entries must be positive");
            if (aj > basis.cell_extent() * (1.0 + 1e-12))
                throw HypothesisViolation("LSInstance: a_j <= 2*pi*L required");
        }
        if (J) {
            auto inferred = spectrum_box_inferred();
            for (int j = 0; j < basis.dim; ++j)
                if (J->first[j] > inferred.first[j] + 1e-12 ||
                    J->second[j] < inferred.second[j] - 1e-12)
                    throw InvalidArgument("LSInstance: explicit J does not contain supp f^");
        }
    }

    /// Smallest frequency box containing the active modes.
    std::pair<std::vector<double>, std::vector<double>> spectrum_box_inferred() const {
        const auto& basis = f.basis();
        const int d = basis.dim;
        std::vector<double> lo(d, 0.0), hi(d, 0.0);
        bool first = true;
        for (const auto& [k, z] : f.coeffs()) {
            for (int j = 0; j < d; ++j) {
                double freq;
                if (basis.bc == BoundaryCondition::periodic) {
                    freq = k[j] / basis.L;
                    if (first || freq < lo[j]) lo[j] = std::min(first ? freq : lo[j], freq);
                    if (first || freq > hi[j]) hi[j] = std::max(first ? freq : hi[j], freq);
                } else {
                    // the doubled-torus extension populates +-k/(2L)
                    freq = k[j] / (2.0 * basis.L);
                    lo[j] = std::min(lo[j], -freq);
                    hi[j] = std::max(hi[j], freq);
                }
            }
            first = false;
        }
        return {lo, hi};
    }

    std::pair<std::vector<double>, std::vector<double>> spectrum_box() const {
        return J ? *J : spectrum_box_inferred();
    }

    /// Side lengths of the spectrum box.
    std::vector<double> b() const {
        auto [lo, hi] = spectrum_box();
        std::vector<double> out(lo.size());
        for (std::size_t j = 0; j < lo.size(); ++j) out[j] = hi[j] - lo[j];
        return out;
    }

    double a_dot_b() const {
        auto bb = b();
        double s = 0.0;
        for (std::size_t j = 0; j < bb.size(); ++j) s += a[j] * bb[j];
        return s;
    }
};

/// Norm quotient ||f||_{L^2(cell)} / ||f||_{L^2(S n cell)}: Parseval above,
/// coverage-weighted quadrature below.  Always >= 1 up to rounding since the
/// weighted restriction never exceeds the full norm.
inline double ls_ratio(const LSInstance& inst, int resolution = 0) {
    double full = inst.f.norm();
    if (full == 0.0) throw InvalidArgument("ls_ratio: f must be nonzero");
    double restricted = spectral::restricted_norm_weighted(inst.f, inst.S, resolution);
    if (restricted == 0.0)
        throw IndeterminateRatio("ls_ratio: restricted norm vanished at this resolution");
    return full / restricted;
}

struct VerifyReport {
    double ratio = 0.0;
    long double log_ratio = 0.0;
    long double log_bound = 0.0;
    long double margin = 0.0;  // log bound - log ratio
    bool pass = false;
    int resolution = 0;
    int retries = 0;
    double a_dot_b = 0.0;
    double gamma_used = 0.0;  // gamma entering the bound (halved per axis for D/N)
};

/// Compare the measured ratio against the Logvinenko-Sereda constant
/// (K1^d/gamma)^{K1 (a.b + d)}.  Dirichlet/Neumann instances are bounded
/// through their doubled-torus extension, whose set is (gamma/2^d, 2a)-thick;
/// the extension leaves the ratio unchanged, so the native ratio is compared
/// against the bound with halved gamma and doubled a.  A failing comparison
/// is retried at doubled resolution before being reported.
inline VerifyReport verify_ls(const LSInstance& inst, double K1, int resolution = 0) {
    inst.validate();
    const auto& basis = inst.f.basis();
    const int d = basis.dim;
    if (resolution <= 0) resolution = spectral::default_resolution(d);

    VerifyReport rep;
    rep.a_dot_b = inst.a_dot_b();
    double gamma = inst.gamma;
    double ab = rep.a_dot_b;
    if (basis.bc != BoundaryCondition::periodic) {
        gamma = inst.gamma / std::pow(2.0, d);
        ab = 2.0 * rep.a_dot_b;
    }
    rep.gamma_used = gamma;
    rep.log_bound = constants::ls_bound_log(gamma, ab, d, K1);

    for (int attempt = 0; attempt < 3; ++attempt) {
        rep.resolution = resolution;
        rep.retries = attempt;
        rep.ratio = ls_ratio(inst, resolution);
        rep.log_ratio = std::log(static_cast<long double>(rep.ratio));
        rep.margin = rep.log_bound - rep.log_ratio;
        rep.pass = rep.margin >= 0.0L;
        if (rep.pass) break;
        resolution *= 2;
    }
    return rep;
}

struct AdversarialOptions {
    int trials = 8;
    int steps = 60;            // coordinate-ascent sweeps per restart
    std::uint64_t seed = 0;
    bool force_ascent = false;  // skip the eigensolve even for small J
    int eigensolve_mode_limit = 512;
};

struct AdversarialResult {
    ModeVector worst;
    double max_ratio = 0.0;
    double mu_max = 0.0;  // top eigenvalue of the complement mass matrix
    bool used_eigensolve = false;
    std::vector<double> restart_ratios;  // final ratio of each ascent restart
};

namespace detail {

inline double rayleigh(const Eigen::MatrixXcd& C, const Eigen::VectorXcd& c) {
    return (c.adjoint() * C * c).real()(0) / c.squaredNorm();
}

// full optimization of coordinate i of the Rayleigh quotient of C
inline void ascend_coordinate(const Eigen::MatrixXcd& C, Eigen::VectorXcd& c, int i) {
    Eigen::VectorXcd rest = c;
    rest(i) = Complex(0.0, 0.0);
    double n = rest.squaredNorm();
    if (n < 1e-300) return;  // vector concentrated on i already
    Complex b = (C.row(i) * rest)(0);  // (C rest)_i via Hermitian row
    double A = (rest.adjoint() * C * rest).real()(0);
    double D = C(i, i).real();
    double babs = std::abs(b);
    Complex phase = babs > 0.0 ? b / babs : Complex(1.0, 0.0);
    double r;
    if (babs < 1e-300) {
        if (D * n > A) {
            c.setZero();
            c(i) = Complex(1.0, 0.0);
            return;
        }
        r = 0.0;
    } else {
        double disc = (A - D * n) * (A - D * n) + 4.0 * babs * babs * n;
        r = (-(A - D * n) + std::sqrt(disc)) / (2.0 * babs);
    }
    c = rest;
    c(i) = r * phase;
    double norm = c.norm();
    if (norm > 0.0) c /= norm;
}

}  // namespace detail

/// Empirical lower bound on the extremal LS ratio over functions bandlimited
/// to the index box `band`: maximize the mass fraction on the complement of
/// S.  The exact maximizer is the top eigenvector of C = I - B_S, with
/// extremal ratio (1 - mu_max)^{-1/2}; for small bands that eigensolve is
/// used directly, otherwise seeded random restarts with exact coordinate
/// ascent on the Rayleigh quotient.
inline AdversarialResult adversarial_search(const SpectralBasis& basis,
                                            const geometry::BoxUnionSet& S,
                                            const std::vector<std::pair<int, int>>& band,
                                            const AdversarialOptions& opts = {}) {
    basis.validate();
    if (static_cast<int>(band.size()) != basis.dim)
        throw InvalidArgument("adversarial_search: band must have d entries");
    if (opts.trials < 1 || opts.steps < 1)
        throw InvalidArgument("adversarial_search: trials and steps must be >= 1");

    std::vector<MultiIndex> modes;
    MultiIndex k(basis.dim);
    for (int j = 0; j < basis.dim; ++j) {
        if (band[j].first > band[j].second)
            throw InvalidArgument("adversarial_search: empty band");
        k[j] = band[j].first;
    }
    while (true) {
        if (basis.valid_index(k)) modes.push_back(k);
        int j = basis.dim - 1;
        while (j >= 0 && ++k[j] > band[j].second) k[j--] = band[j].first;
        if (j < 0) break;
    }
    if (modes.empty()) throw InvalidArgument("adversarial_search: band holds no basis indices");
    const int N = static_cast<int>(modes.size());

    Eigen::MatrixXcd B = spectral::mass_matrix_exact(basis, S, modes);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(N, N) - B;

    AdversarialResult res{ModeVector(basis)};
    Eigen::VectorXcd best_vec;

    if (N <= opts.eigensolve_mode_limit && !opts.force_ascent) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(C);
        if (eig.info() != Eigen::Success)
            throw NumericalFailure("adversarial_search: eigensolve failed");
        res.mu_max = eig.eigenvalues()(N - 1);
        best_vec = eig.eigenvectors().col(N - 1);
        res.used_eigensolve = true;
    } else {
        std::mt19937_64 rng(corpus::mix_seed(opts.seed, 0xad5a));
        std::normal_distribution<double> gauss(0.0, 1.0);
        double best_mu = -1.0;
        for (int trial = 0; trial < opts.trials; ++trial) {
            Eigen::VectorXcd c(N);
            for (int i = 0; i < N; ++i)
                c(i) = basis.bc == BoundaryCondition::periodic ? Complex(gauss(rng), gauss(rng))
                                                               : Complex(gauss(rng), 0.0);
            c /= c.norm();
            for (int step = 0; step < opts.steps; ++step)
                for (int i = 0; i < N; ++i) detail::ascend_coordinate(C, c, i);
            double mu = detail::rayleigh(C, c);
            res.restart_ratios.push_back(mu < 1.0 ? 1.0 / std::sqrt(1.0 - mu)
                                                  : std::numeric_limits<double>::infinity());
            if (mu > best_mu) {
                best_mu = mu;
                best_vec = c;
            }
        }
        res.mu_max = best_mu;
    }

    if (res.mu_max < 0.0) res.mu_max = 0.0;
    if (res.mu_max >= 1.0 - 1e-13)
        throw IndeterminateRatio("adversarial_search: restricted mass vanished on the band");
    res.max_ratio = 1.0 / std::sqrt(1.0 - res.mu_max);
    // gauge away the global phase so real-basis vectors come out real
    int peak = 0;
    for (int n = 1; n < N; ++n)
        if (std::abs(best_vec(n)) > std::abs(best_vec(peak))) peak = n;
    if (std::abs(best_vec(peak)) > 0.0) best_vec *= std::conj(best_vec(peak)) / std::abs(best_vec(peak));
    for (int n = 0; n < N; ++n) {
        Complex z = best_vec(n);
        if (basis.bc != BoundaryCondition::periodic) z = Complex(z.real(), 0.0);
        if (z != Complex(0.0, 0.0)) res.worst.set_coefficient(modes[n], z);
    }
    // Dirichlet/Neumann eigenvectors may lose a sliver of norm when an
    // almost-zero imaginary part is dropped; renormalize
    double n2 = res.worst.norm();
    if (n2 > 0.0) res.worst = res.worst.scaled({1.0 / n2, 0.0});
    return res;
}

/// A deterministic 200-instance verification corpus over d in {1,2},
/// gamma in {1/8, 1/4, 1/2}, and band sizes up to 33 modes per axis.
struct CorpusCase {
    std::string name;
    int d = 1;
    double gamma = 0.5;
    int layout = 0;  // 0: one stripe per cell, 1: split stripes
    double L = 1.0 / (2.0 * M_PI);
    int band = 0;  // modes k with |k_j| <= band
    std::uint64_t seed = 0;
};

inline geometry::BoxUnionSet corpus_set(const CorpusCase& cs) {
    std::vector<double> period(cs.d, 1.0);
    if (cs.layout == 0) {
        geometry::Box b;
        b.corner.assign(cs.d, 0.0);
        b.sides = period;
        b.sides[0] *= cs.gamma;
        return geometry::BoxUnionSet(cs.d, {b}, period);
    }
    // two half-thickness stripes half a period apart
    geometry::Box b1, b2;
    b1.corner.assign(cs.d, 0.0);
    b1.sides = period;
    b1.sides[0] *= 0.5 * cs.gamma;
    b2 = b1;
    b2.corner[0] = 0.5;
    return geometry::BoxUnionSet(cs.d, {b1, b2}, period);
}

inline LSInstance corpus_instance(const CorpusCase& cs) {
    SpectralBasis basis{cs.d, cs.L, BoundaryCondition::periodic};
    double E = (cs.band / basis.L) * (cs.band / basis.L);
    ModeVector f = corpus::random_mode_vector(cs.seed, basis, E);
    // every translate of the unit window contains exactly measure gamma, so
    // (gamma, (1,...,1)) is an exact thickness certificate for these sets
    return LSInstance(std::move(f), corpus_set(cs), cs.gamma, std::vector<double>(cs.d, 1.0));
}

inline std::vector<CorpusCase> builtin_corpus() {
    std::vector<CorpusCase> cases;
    const double gammas[] = {0.125, 0.25, 0.5};
    std::uint64_t counter = 0;
    auto push = [&](int d, double g, int layout, int band, std::uint64_t seed) {
        CorpusCase cs;
        cs.d = d;
        cs.gamma = g;
        cs.layout = layout;
        cs.band = band;
        cs.seed = corpus::mix_seed(1234, counter * 131 + seed);
        cs.name = "d" + std::to_string(d) + "_g" + std::to_string(g).substr(0, 5) + "_l" +
                  std::to_string(layout) + "_m" + std::to_string(band) + "_s" +
                  std::to_string(seed);
        ++counter;
        cases.push_back(std::move(cs));
    };
    // d = 1: 3 gammas x 2 layouts x 8 bands x 3 seeds = 144
    for (double g : gammas)
        for (int layout : {0, 1})
            for (int band : {0, 1, 2, 3, 4, 6, 8, 16})
                for (std::uint64_t seed : {0, 1, 2}) push(1, g, layout, band, seed);
    // d = 2: 3 gammas x 2 layouts x 4 bands x 2 seeds = 48
    for (double g : gammas)
        for (int layout : {0, 1})
            for (int band : {0, 1, 2, 4})
                for (std::uint64_t seed : {0, 1}) push(2, g, layout, band, seed);
    // d = 2 wide-band tail to reach 200 instances
    for (std::uint64_t seed : {0, 1, 2, 3}) push(2, 0.5, 0, 16, seed);
    for (std::uint64_t seed : {0, 1, 2, 3}) push(2, 0.25, 1, 8, seed);
    return cases;
}

struct CorpusReport {
    int total = 0;
    int passed = 0;
    long double max_log_ratio = 0.0;
    long double min_margin = 0.0;
    std::string worst_case;
};

inline CorpusReport run_corpus(double K1 = 3.5, int resolution = 0) {
    CorpusReport rep;
    bool first = true;
    for (const auto& cs : builtin_corpus()) {
        auto inst = corpus_instance(cs);
        auto v = verify_ls(inst, K1, resolution);
        ++rep.total;
        if (v.pass) ++rep.passed;
        if (first || v.log_ratio > rep.max_log_ratio) rep.max_log_ratio = v.log_ratio;
        if (first || v.margin < rep.min_margin) {
            rep.min_margin = v.margin;
            rep.worst_case = cs.name;
        }
        first = false;
    }
    return rep;
}

}  // namespace heatctl::lsineq
