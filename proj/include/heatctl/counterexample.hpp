#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "heatctl/errors.hpp"
#include "heatctl/geometry.hpp"

namespace heatctl::counterexample {

/// Index and center of one Gaussian adjoint solution
/// g_k(t,x) = (2t+1)^{-d/2} exp(-|x - x_k|^2 / (2(2t+1))),
/// the free heat flow started from exp(-|x - x_k|^2 / 2).
struct GaussianWitness {
    int index = 1;                // k
    std::vector<double> center;   // x_k
    double horizon = 1.0;         // T

    int dim() const { return static_cast<int>(center.size()); }

    void validate() const {
        if (index < 1) throw InvalidArgument("GaussianWitness: index must be >= 1");
        if (center.empty()) throw InvalidArgument("GaussianWitness: empty center");
        if (!(horizon > 0.0)) throw InvalidArgument("GaussianWitness: horizon must be positive");
    }
};

inline double gaussian_solution(const GaussianWitness& w, double t, const std::vector<double>& x) {
    w.validate();
    if (t < 0.0) throw InvalidArgument("gaussian_solution: t must be nonnegative");
    if (x.size() != w.center.size())
        throw InvalidArgument("gaussian_solution: dimension mismatch");
    double r2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double dxj = x[j] - w.center[j];
        r2 += dxj * dxj;
    }
    double s = 2.0 * t + 1.0;
    return std::pow(s, -0.5 * x.size()) * std::exp(-r2 / (2.0 * s));
}

/// ||g_k(t,.)||^2 over the whole space: pi^{d/2} (2t+1)^{-d/2}, independent
/// of the center.
inline double full_norm_sq(double t, int d) {
    if (t < 0.0) throw InvalidArgument("full_norm_sq: t must be nonnegative");
    if (d < 1) throw InvalidArgument("full_norm_sq: d must be >= 1");
    return std::pow(M_PI, 0.5 * d) * std::pow(2.0 * t + 1.0, -0.5 * d);
}

namespace detail {

// adaptive Simpson on [a, b]
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// integral over one axis segment [alpha, beta] of exp(-(x-c)^2 / s)
inline double gauss_segment(double alpha, double beta, double c, double s) {
    double sig = std::sqrt(s);
    return 0.5 * std::sqrt(M_PI) * sig * (std::erf((beta - c) / sig) - std::erf((alpha - c) / sig));
}

}  // namespace detail

/// Tail mass int_{|y| > radius} exp(-|y|^2 / (2T+1)) dy, reduced to the
/// radial integral and evaluated by adaptive quadrature.  Strictly
/// decreasing in the radius.
inline double gaussian_tail(double radius, double T, int d) {
    if (radius < 0.0) throw InvalidArgument("gaussian_tail: radius must be nonnegative");
    if (d < 1) throw InvalidArgument("gaussian_tail: d must be >= 1");
    double s = 2.0 * T + 1.0;
    double sigma = std::sqrt(s);
    double surface = 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
    auto radial = [&](double r) { return std::pow(r, d - 1) * std::exp(-r * r / s); };
    // beyond radius + 15 sigma the integrand is below 1e-90 of its scale
    double upper = radius + 15.0 * sigma;
    return surface * detail::integrate(radial, radius, upper, 1e-14 * s);
}

/// Exact measure of S within the euclidean ball B(center, r) for d = 1
/// (balls are intervals); rasterized estimate in higher dimension.
inline double ball_intersection_measure(const geometry::BoxUnionSet& S,
                                        const std::vector<double>& center, double r,
                                        int resolution = 512) {
    const int d = S.dim();
    if (static_cast<int>(center.size()) != d)
        throw InvalidArgument("ball_intersection_measure: dimension mismatch");
    if (!(r > 0.0)) throw InvalidArgument("ball_intersection_measure: radius must be positive");
    if (d == 1) return geometry::intersection_measure(S, {center[0] - r}, {2.0 * r});
    std::vector<double> lo(d), hi(d);
    std::vector<int> res(d, resolution);
    for (int j = 0; j < d; ++j) {
        lo[j] = center[j] - r;
        hi[j] = center[j] + r;
    }
    auto grid = geometry::rasterize(S, lo, hi, res);
    // keep only cells whose center lies in the ball
    double cell = grid.cell_volume();
    double h = 2.0 * r / resolution;
    double total = 0.0;
    std::vector<int> idx(d, 0);
    for (std::size_t flat = 0; flat < grid.values.size(); ++flat) {
        if (grid.values[flat]) {
            double r2 = 0.0;
            for (int j = 0; j < d; ++j) {
                double cj = lo[j] + (idx[j] + 0.5) * h - center[j];
                r2 += cj * cj;
            }
            if (r2 <= r * r) total += cell;
        }
        int j = d - 1;
        while (j >= 0 && ++idx[j] == resolution) idx[j--] = 0;
    }
    return total;
}

struct EnergyResult {
    double value = 0.0;
    double error_bound = 0.0;
};

/// Observed energy int_0^T ||g_k(t,.)||^2_{L2(S)} dt.  The spatial integral
/// is an erf product per box over the window of radius 8 sqrt(2T+1) around
/// the center (outside it the integrand is below 1e-27 of its peak); the
/// time integral is composite midpoint.  The error bound combines the
/// analytic window tail with a Richardson estimate of the time quadrature.
inline EnergyResult observed_energy(const geometry::BoxUnionSet& S, const GaussianWitness& w,
                                    int time_steps = 128) {
    w.validate();
    const int d = S.dim();
    if (d != w.dim()) throw InvalidArgument("observed_energy: dimension mismatch");
    if (time_steps < 2) throw InvalidArgument("observed_energy: time_steps must be >= 2");
    const double T = w.horizon;
    const double R = 8.0 * std::sqrt(2.0 * T + 1.0);

    std::vector<double> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        lo[j] = w.center[j] - R;
        hi[j] = w.center[j] + R;
    }
    auto boxes = S.boxes_in_window(lo, hi);

    auto spatial = [&](double t) {
        // |g|^2 = (2t+1)^{-d} exp(-|x - c|^2 / (2t+1))
        double s = 2.0 * t + 1.0;
        double sum = 0.0;
        for (const auto& b : boxes) {
            double v = std::pow(s, -d);
            for (int j = 0; j < d && v != 0.0; ++j)
                v *= detail::gauss_segment(b.corner[j], b.upper(j), w.center[j], s);
            sum += v;
        }
        return sum;
    };
    auto midpoint = [&](int n) {
        double dt = T / n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += spatial((i + 0.5) * dt) * dt;
        return acc;
    };
    double coarse = midpoint(time_steps / 2);
    double fine = midpoint(time_steps);

    EnergyResult out;
    out.value = fine;
    out.error_bound = std::abs(fine - coarse) / 3.0 + T * gaussian_tail(R, T, d);
    return out;
}

struct DivergenceRow {
    int k = 0;
    double terminal_norm_sq = 0.0;  // ||g_k(T,.)||^2, k-independent
    double observed_energy = 0.0;
    double ratio = 0.0;
    double tail_bound = 0.0;  // T * tail(k, T)
};

struct DivergenceTable {
    std::vector<DivergenceRow> rows;
    bool ratio_increasing = false;
};

/// A one-parameter family of Gaussian centers x_k = base^k e_1, optionally
/// with the balls B(x_k, k) removed from the ambient space (the non-thick
/// configuration).
struct GaussianFamily {
    int dim = 1;
    double center_base = 4.0;
    bool punctured = true;
    double hole_radius_factor = 1.0;  // radius actually removed, relative to k

    std::vector<double> center(int k) const {
        std::vector<double> c(dim, 0.0);
        c[0] = std::pow(center_base, k);
        return c;
    }
};

inline GaussianFamily builtin_nonthick_family() { return {}; }

inline GaussianFamily thick_contrast_family() {
    GaussianFamily f;
    f.punctured = false;
    return f;
}

/// Realize the family inside [lo, hi] as a box union (d = 1): the window
/// minus every removed ball that meets it.
inline geometry::BoxUnionSet family_set_in_window(const GaussianFamily& fam, double lo, double hi,
                                                  int k_max) {
    if (fam.dim != 1)
        throw UnsupportedInput("family_set_in_window: only d = 1 families are built in");
    std::vector<std::pair<double, double>> kept{{lo, hi}};
    if (fam.punctured) {
        for (int k = 1; k <= k_max; ++k) {
            double c = fam.center(k)[0];
            double r = fam.hole_radius_factor * k;
            double a = c - r, b = c + r;
            std::vector<std::pair<double, double>> next;
            for (auto [s, e] : kept) {
                if (b <= s || a >= e) {
                    next.push_back({s, e});
                    continue;
                }
                if (a > s) next.push_back({s, a});
                if (b < e) next.push_back({b, e});
            }
            kept = std::move(next);
        }
    }
    std::vector<geometry::Box> boxes;
    for (auto [s, e] : kept)
        if (e - s > 1e-12) boxes.push_back({{s}, {e - s}});
    return geometry::BoxUnionSet(1, std::move(boxes));
}

/// Per-k divergence table: free terminal mass, observed energy on the
/// family's set, their quotient, and the analytic tail bound.  For the
/// punctured family each witness certificate |S n B(x_k, k)| < 1/k is
/// checked before any energy is computed.
inline DivergenceTable divergence_demo(const GaussianFamily& fam, const std::vector<int>& k_list,
                                       double T, int time_steps = 128) {
    if (!(T > 0.0)) throw InvalidArgument("divergence_demo: T must be positive");
    if (k_list.empty()) throw InvalidArgument("divergence_demo: empty k list");
    const double R = 8.0 * std::sqrt(2.0 * T + 1.0);
    int k_max = 0;
    for (int k : k_list) {
        if (k < 1) throw InvalidArgument("divergence_demo: k must be >= 1");
        k_max = std::max(k_max, k);
    }

    DivergenceTable table;
    table.ratio_increasing = true;
    double prev_ratio = 0.0;
    for (int k : k_list) {
        GaussianWitness w{k, fam.center(k), T};
        double c = w.center[0];
        auto S = family_set_in_window(fam, c - R, c + R, k_max);
        if (fam.punctured) {
            double hole_mass = ball_intersection_measure(S, w.center, k);
            if (!(hole_mass < 1.0 / k))
                throw InvalidFamily("divergence_demo: hole certificate |S n B(x_k,k)| < 1/k fails");
        }
        DivergenceRow row;
        row.k = k;
        row.terminal_norm_sq = full_norm_sq(T, fam.dim);
        auto energy = observed_energy(S, w, time_steps);
        row.observed_energy = energy.value;
        row.tail_bound = T * gaussian_tail(static_cast<double>(k), T, fam.dim);
        row.ratio = row.terminal_norm_sq / row.observed_energy;
        if (!table.rows.empty() && row.ratio <= prev_ratio) table.ratio_increasing = false;
        prev_ratio = row.ratio;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace heatctl::counterexample
