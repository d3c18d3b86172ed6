#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "heatctl/errors.hpp"

namespace heatctl::geometry {

/// Axis-aligned box given by its lower corner and strictly positive side
/// lengths.
struct Box {
    std::vector<double> corner;
    std::vector<double> sides;

    double upper(int j) const { return corner[j] + sides[j]; }

    double volume() const {
        double v = 1.0;
        for (double s : sides) v *= s;
        return v;
    }
};

namespace detail {

inline double reduce_mod(double x, double p) {
    double y = std::fmod(x, p);
    if (y < 0.0) y += p;
    if (y >= p) y = 0.0;  // guard against fmod landing exactly on p
    return y;
}

// Overlap length of [l,u] (replicated with period p when p > 0) with the
// window [w, w+a].
inline double interval_overlap(double l, double u, double p, double w, double a) {
    if (p <= 0.0) {
        double lo = std::max(l, w);
        double hi = std::min(u, w + a);
        return hi > lo ? hi - lo : 0.0;
    }
    // translates n with [l,u] + n*p meeting [w, w+a]
    long n_min = static_cast<long>(std::ceil((w - u) / p));
    long n_max = static_cast<long>(std::floor((w + a - l) / p));
    double total = 0.0;
    for (long n = n_min; n <= n_max; ++n) {
        double lo = std::max(l + n * p, w);
        double hi = std::min(u + n * p, w + a);
        if (hi > lo) total += hi - lo;
    }
    return total;
}

inline void sort_unique(std::vector<double>& v, double eps) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) {
        if (out.empty() || x - out.back() > eps) out.push_back(x);
    }
    v = std::move(out);
}

}  // namespace detail

/// A measurable subset of R^d represented as a finite union of axis-aligned
/// boxes, optionally replicated over the lattice generated by a period
/// vector.  Boxes are normalized at construction: reduced into the
/// fundamental cell (periodic case) and rewritten as a disjoint collection,
/// so measure arithmetic downstream is plain summation.
class BoxUnionSet {
  public:
    BoxUnionSet(int dim, std::vector<Box> boxes,
                std::optional<std::vector<double>> period = std::nullopt)
        : dim_(dim), period_(std::move(period)) {
        if (dim_ < 1) throw InvalidArgument("BoxUnionSet: dimension must be >= 1");
        if (period_) {
            if (static_cast<int>(period_->size()) != dim_)
                throw InvalidArgument("BoxUnionSet: period size mismatch");
            for (double p : *period_)
                if (!(p > 0.0)) throw InvalidArgument("BoxUnionSet: period must be positive");
        }
        for (const Box& b : boxes) {
            if (static_cast<int>(b.corner.size()) != dim_ ||
                static_cast<int>(b.sides.size()) != dim_)
                throw InvalidArgument("BoxUnionSet: box dimension mismatch");
            for (double s : b.sides)
                if (!(s > 0.0)) throw InvalidArgument("BoxUnionSet: box sides must be positive");
        }
        std::vector<Box> reduced = period_ ? reduce_periodic(boxes) : std::move(boxes);
        boxes_ = disjointify(reduced);
        measure_ = 0.0;
        for (const Box& b : boxes_) measure_ += b.volume();
    }

    static BoxUnionSet empty_set(int dim, std::optional<std::vector<double>> period = std::nullopt) {
        return BoxUnionSet(dim, {}, std::move(period));
    }

    int dim() const { return dim_; }
    bool is_periodic() const { return period_.has_value(); }
    const std::optional<std::vector<double>>& period() const { return period_; }

    /// Disjoint boxes; inside the fundamental cell when periodic.
    const std::vector<Box>& boxes() const { return boxes_; }
    bool is_empty() const { return boxes_.empty(); }

    /// Total measure of the disjoint boxes (one period cell when periodic).
    double measure() const { return measure_; }

    bool contains(const std::vector<double>& x) const {
        std::vector<double> y = x;
        if (period_)
            for (int j = 0; j < dim_; ++j) y[j] = detail::reduce_mod(y[j], (*period_)[j]);
        for (const Box& b : boxes_) {
            bool in = true;
            for (int j = 0; j < dim_ && in; ++j)
                in = y[j] >= b.corner[j] && y[j] <= b.upper(j);
            if (in) return true;
        }
        return false;
    }

    /// Realization of the set inside [lo, hi]: periodic copies are
    /// replicated and every box is clipped to the window.
    std::vector<Box> boxes_in_window(const std::vector<double>& lo,
                                     const std::vector<double>& hi) const {
        std::vector<Box> out;
        for (const Box& b : boxes_) {
            std::vector<std::vector<std::pair<double, double>>> per_axis(dim_);
            for (int j = 0; j < dim_; ++j) {
                double l = b.corner[j], u = b.upper(j);
                if (!period_) {
                    double a = std::max(l, lo[j]), z = std::min(u, hi[j]);
                    if (z - a > 0.0) per_axis[j].push_back({a, z});
                } else {
                    double p = (*period_)[j];
                    long n_min = static_cast<long>(std::ceil((lo[j] - u) / p));
                    long n_max = static_cast<long>(std::floor((hi[j] - l) / p));
                    for (long n = n_min; n <= n_max; ++n) {
                        double a = std::max(l + n * p, lo[j]), z = std::min(u + n * p, hi[j]);
                        if (z - a > 0.0) per_axis[j].push_back({a, z});
                    }
                }
            }
            bool any_empty = false;
            for (int j = 0; j < dim_; ++j) any_empty |= per_axis[j].empty();
            if (any_empty) continue;
            std::vector<int> idx(dim_, 0);
            while (true) {
                Box c;
                c.corner.resize(dim_);
                c.sides.resize(dim_);
                for (int j = 0; j < dim_; ++j) {
                    c.corner[j] = per_axis[j][idx[j]].first;
                    c.sides[j] = per_axis[j][idx[j]].second - per_axis[j][idx[j]].first;
                }
                out.push_back(std::move(c));
                int j = dim_ - 1;
                while (j >= 0 && ++idx[j] == static_cast<int>(per_axis[j].size())) idx[j--] = 0;
                if (j < 0) break;
            }
        }
        return out;
    }

  private:
    // Reduce corners mod p and split boxes that straddle the cell boundary,
    // so that every stored box lies inside [0,p_1]x...x[0,p_d].
    std::vector<Box> reduce_periodic(const std::vector<Box>& boxes) const {
        std::vector<Box> out;
        for (const Box& b : boxes) {
            std::vector<std::vector<std::pair<double, double>>> seg(dim_);
            for (int j = 0; j < dim_; ++j) {
                double p = (*period_)[j];
                if (b.sides[j] >= p) {
                    seg[j].push_back({0.0, p});
                    continue;
                }
                double l = detail::reduce_mod(b.corner[j], p);
                double u = l + b.sides[j];
                if (u <= p) {
                    seg[j].push_back({l, u});
                } else {
                    seg[j].push_back({l, p});
                    seg[j].push_back({0.0, u - p});
                }
            }
            std::vector<int> idx(dim_, 0);
            while (true) {
                Box c;
                c.corner.resize(dim_);
                c.sides.resize(dim_);
                for (int j = 0; j < dim_; ++j) {
                    c.corner[j] = seg[j][idx[j]].first;
                    c.sides[j] = seg[j][idx[j]].second - seg[j][idx[j]].first;
                }
                out.push_back(std::move(c));
                int j = dim_ - 1;
                while (j >= 0 && ++idx[j] == static_cast<int>(seg[j].size())) idx[j--] = 0;
                if (j < 0) break;
            }
        }
        return out;
    }

    // Coordinate-sweep disjointification: cut space along every box edge,
    // keep the grid cells whose center lies in the union, then merge runs of
    // adjacent cells along the last axis.
    std::vector<Box> disjointify(const std::vector<Box>& boxes) const {
        if (boxes.size() <= 1) return boxes;
        double scale = 0.0;
        for (const Box& b : boxes)
            for (int j = 0; j < dim_; ++j) scale = std::max(scale, std::abs(b.upper(j)));
        double eps = std::max(scale, 1.0) * 1e-13;

        std::vector<std::vector<double>> cuts(dim_);
        for (const Box& b : boxes)
            for (int j = 0; j < dim_; ++j) {
                cuts[j].push_back(b.corner[j]);
                cuts[j].push_back(b.upper(j));
            }
        for (int j = 0; j < dim_; ++j) detail::sort_unique(cuts[j], eps);

        auto center_in_union = [&](const std::vector<double>& c) {
            for (const Box& b : boxes) {
                bool in = true;
                for (int j = 0; j < dim_ && in; ++j)
                    in = c[j] >= b.corner[j] && c[j] <= b.upper(j);
                if (in) return true;
            }
            return false;
        };

        std::vector<Box> out;
        std::vector<int> idx(dim_, 0);
        std::vector<double> center(dim_);
        // iterate over all grid cells; the last axis is innermost so runs of
        // kept cells can be merged on the fly
        std::vector<int> sizes(dim_);
        for (int j = 0; j < dim_; ++j) sizes[j] = static_cast<int>(cuts[j].size()) - 1;
        for (int j = 0; j < dim_; ++j)
            if (sizes[j] <= 0) return {};

        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            // sweep the last axis
            int last = dim_ - 1;
            int run_start = -1;
            for (int i = 0; i <= sizes[last]; ++i) {
                bool keep = false;
                if (i < sizes[last]) {
                    for (int j = 0; j < dim_ - 1; ++j)
                        center[j] = 0.5 * (cuts[j][idx[j]] + cuts[j][idx[j] + 1]);
                    center[last] = 0.5 * (cuts[last][i] + cuts[last][i + 1]);
                    keep = center_in_union(center);
                }
                if (keep && run_start < 0) run_start = i;
                if (!keep && run_start >= 0) {
                    Box c;
                    c.corner.resize(dim_);
                    c.sides.resize(dim_);
                    for (int j = 0; j < dim_ - 1; ++j) {
                        c.corner[j] = cuts[j][idx[j]];
                        c.sides[j] = cuts[j][idx[j] + 1] - cuts[j][idx[j]];
                    }
                    c.corner[last] = cuts[last][run_start];
                    c.sides[last] = cuts[last][i] - cuts[last][run_start];
                    if (c.volume() > 0.0) out.push_back(std::move(c));
                    run_start = -1;
                }
            }
            int j = dim_ - 2;
            while (j >= 0 && ++idx[j] == sizes[j]) idx[j--] = 0;
            if (j < 0 || dim_ == 1) break;
        }
        return out;
    }

    int dim_;
    std::optional<std::vector<double>> period_;
    std::vector<Box> boxes_;
    double measure_ = 0.0;
};

/// Lebesgue measure of S intersected with the translated reference box
/// x + [0,a_1]x...x[0,a_d].  Exact box arithmetic; periodic sets are measured
/// as their full periodic realization.
inline double intersection_measure(const BoxUnionSet& S, const std::vector<double>& x,
                                   const std::vector<double>& a) {
    if (static_cast<int>(x.size()) != S.dim() || static_cast<int>(a.size()) != S.dim())
        throw InvalidArgument("intersection_measure: dimension mismatch");
    for (double aj : a)
        if (!(aj > 0.0)) throw InvalidArgument("intersection_measure: window sides must be positive");
    double total = 0.0;
    for (const Box& b : S.boxes()) {
        double v = 1.0;
        for (int j = 0; j < S.dim() && v > 0.0; ++j) {
            double p = S.is_periodic() ? (*S.period())[j] : 0.0;
            v *= detail::interval_overlap(b.corner[j], b.upper(j), p, x[j], a[j]);
        }
        total += v;
    }
    return total;
}

/// Certificate for thickness parameters: the infimum over translates of
/// |S n (x+A)| normalized by |A|, with the minimizing translate.
struct ThicknessCertificate {
    double gamma = 0.0;
    std::vector<double> a;
    std::vector<double> witness_x;
    double inf_measure = 0.0;
    bool exact = true;
    double error_bound = 0.0;  // additive uncertainty on gamma (raster mode)
};

struct ThicknessOptions {
    enum class Mode { automatic, exact, raster };
    Mode mode = Mode::automatic;
    int raster_resolution = 256;  // translate samples per axis per period
    // translate window for non-periodic sets: x in [window_lo, window_hi]
    std::optional<std::pair<std::vector<double>, std::vector<double>>> window;
};

namespace detail {

struct ScanGrid {
    std::vector<std::vector<double>> values;  // candidate translates per axis
};

// Evaluate m(x) = |S n (x+A)| over the product grid and return the minimum.
// The sum over disjoint boxes factorizes per axis, so the scan reduces to
// per-axis overlap tables combined by outer products.
struct ScanResult {
    double min_measure;
    std::vector<double> argmin;
};

inline ScanResult scan_translates(const BoxUnionSet& S, const std::vector<double>& a,
                                  const ScanGrid& grid) {
    const int d = S.dim();
    const auto& boxes = S.boxes();
    const std::size_t nb = boxes.size();
    ScanResult res;
    res.argmin.assign(d, 0.0);
    if (nb == 0) {
        res.min_measure = 0.0;
        for (int j = 0; j < d; ++j) res.argmin[j] = grid.values[j].empty() ? 0.0 : grid.values[j][0];
        return res;
    }

    std::vector<std::vector<double>> tables(d);  // tables[j][b*m_j + i]
    for (int j = 0; j < d; ++j) {
        const auto& xs = grid.values[j];
        double p = S.is_periodic() ? (*S.period())[j] : 0.0;
        tables[j].resize(nb * xs.size());
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t i = 0; i < xs.size(); ++i)
                tables[j][b * xs.size() + i] =
                    interval_overlap(boxes[b].corner[j], boxes[b].upper(j), p, xs[i], a[j]);
    }

    if (d == 1) {
        const std::size_t m = grid.values[0].size();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t b = 0; b < nb; ++b) s += tables[0][b * m + i];
            if (s < best) {
                best = s;
                best_i = i;
            }
        }
        res.min_measure = best;
        res.argmin[0] = grid.values[0][best_i];
        return res;
    }

    if (d == 2) {
        const std::size_t m1 = grid.values[0].size(), m2 = grid.values[1].size();
        std::vector<double> acc(m1 * m2, 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            const double* t1 = &tables[0][b * m1];
            const double* t2 = &tables[1][b * m2];
            for (std::size_t i = 0; i < m1; ++i) {
                double w = t1[i];
                if (w == 0.0) continue;
                double* row = &acc[i * m2];
                for (std::size_t k = 0; k < m2; ++k) row[k] += w * t2[k];
            }
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < acc.size(); ++i)
            if (acc[i] < acc[best]) best = i;
        res.min_measure = acc[best];
        res.argmin[0] = grid.values[0][best / m2];
        res.argmin[1] = grid.values[1][best % m2];
        return res;
    }

    // generic d: direct mixed-radix iteration
    std::vector<std::size_t> idx(d, 0), m(d);
    for (int j = 0; j < d; ++j) m[j] = grid.values[j].size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_idx(d, 0);
    while (true) {
        double s = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            double v = 1.0;
            for (int j = 0; j < d && v > 0.0; ++j) v *= tables[j][b * m[j] + idx[j]];
            s += v;
        }
        if (s < best) {
            best = s;
            best_idx = idx;
        }
        int j = d - 1;
        while (j >= 0 && ++idx[j] == m[j]) idx[j--] = 0;
        if (j < 0) break;
    }
    res.min_measure = best;
    for (int j = 0; j < d; ++j) res.argmin[j] = grid.values[j][best_idx[j]];
    return res;
}

}  // namespace detail

/// Thickness parameter gamma = inf_x |S n (x+A)| / prod a_j together with the
/// minimizing translate.
///
/// Exact mode exploits that x |-> |S n (x+A)| is piecewise multilinear with
/// per-axis breakpoints at box-edge criticals {l-a, l, u-a, u}; a multilinear
/// function attains its minimum at a vertex of each breakpoint cell, so the
/// sweep over the breakpoint grid is exact.  Raster mode scans a uniform grid
/// and certifies the result with the Lipschitz bound
/// |m(x) - m(y)| <= sum_j |x_j - y_j| * prod_{i != j} a_i.
inline ThicknessCertificate thickness_gamma(const BoxUnionSet& S, const std::vector<double>& a,
                                            const ThicknessOptions& opts = {}) {
    const int d = S.dim();
    if (static_cast<int>(a.size()) != d)
        throw InvalidArgument("thickness_gamma: dimension mismatch");
    for (double aj : a)
        if (!(aj > 0.0)) throw InvalidArgument("thickness_gamma: window sides must be positive");
    if (!S.is_periodic() && !opts.window)
        throw UnsupportedInput("thickness_gamma: non-periodic set requires a translate window");

    double vol_a = 1.0;
    for (double aj : a) vol_a *= aj;

    using Mode = ThicknessOptions::Mode;
    Mode mode = opts.mode;
    if (mode == Mode::automatic) mode = d <= 2 ? Mode::exact : Mode::raster;

    ThicknessCertificate cert;
    cert.a = a;
    cert.exact = (mode == Mode::exact);

    detail::ScanGrid grid;
    grid.values.resize(d);
    if (mode == Mode::exact) {
        for (int j = 0; j < d; ++j) {
            std::vector<double>& g = grid.values[j];
            if (S.is_periodic()) {
                double p = (*S.period())[j];
                for (const Box& b : S.boxes()) {
                    for (double v : {b.corner[j] - a[j], b.corner[j], b.upper(j) - a[j], b.upper(j)})
                        g.push_back(detail::reduce_mod(v, p));
                }
                g.push_back(0.0);
                detail::sort_unique(g, p * 1e-14);
            } else {
                double lo = opts.window->first[j], hi = opts.window->second[j];
                for (const Box& b : S.boxes()) {
                    for (double v : {b.corner[j] - a[j], b.corner[j], b.upper(j) - a[j], b.upper(j)})
                        if (v > lo && v < hi) g.push_back(v);
                }
                g.push_back(lo);
                g.push_back(hi);
                detail::sort_unique(g, std::max(std::abs(hi - lo), 1.0) * 1e-14);
            }
        }
        cert.error_bound = 0.0;
    } else {
        double err = 0.0;
        for (int j = 0; j < d; ++j) {
            std::vector<double>& g = grid.values[j];
            int n = std::max(opts.raster_resolution, 1);
            double lo, hi;
            if (S.is_periodic()) {
                lo = 0.0;
                hi = (*S.period())[j];
            } else {
                lo = opts.window->first[j];
                hi = opts.window->second[j];
            }
            double h = (hi - lo) / n;
            g.resize(n);
            for (int i = 0; i < n; ++i) g[i] = lo + (i + 0.5) * h;
            err += 0.5 * h * vol_a / a[j];  // h/2 * prod_{i != j} a_i
        }
        cert.error_bound = err / vol_a;
    }

    detail::ScanResult scan = detail::scan_translates(S, a, grid);
    cert.inf_measure = scan.min_measure;
    cert.witness_x = scan.argmin;
    cert.gamma = scan.min_measure / vol_a;
    if (cert.gamma > 1.0) cert.gamma = 1.0;  // fp guard; measure <= |A| always
    return cert;
}

struct ThicknessCheck {
    bool thick = false;
    ThicknessCertificate certificate;
};

/// Check whether S is (gamma, a)-thick.  In raster mode the comparison allows
/// the certified scan error.
inline ThicknessCheck is_thick(const BoxUnionSet& S, double gamma, const std::vector<double>& a,
                               const ThicknessOptions& opts = {}) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw InvalidArgument("is_thick: gamma must lie in (0,1]");
    ThicknessCheck check;
    check.certificate = thickness_gamma(S, a, opts);
    double slack = check.certificate.error_bound + 1e-12;
    check.thick = check.certificate.gamma >= gamma - slack;
    return check;
}

/// Even reflection through every coordinate hyperplane followed by
/// periodization: S is clipped to [0,2piL]^d, reflected cumulatively in each
/// axis, and the result is extended (4piL)Z^d-periodically.
inline BoxUnionSet reflect_and_periodize(const BoxUnionSet& S, double L) {
    if (!(L > 0.0)) throw InvalidArgument("reflect_and_periodize: L must be positive");
    const int d = S.dim();
    const double cell = 2.0 * M_PI * L;
    std::vector<double> lo(d, 0.0), hi(d, cell);
    std::vector<Box> boxes = S.boxes_in_window(lo, hi);
    for (int j = 0; j < d; ++j) {
        std::vector<Box> reflected;
        reflected.reserve(boxes.size());
        for (const Box& b : boxes) {
            Box r = b;
            r.corner[j] = -b.upper(j);
            reflected.push_back(std::move(r));
        }
        boxes.insert(boxes.end(), reflected.begin(), reflected.end());
    }
    // shift reflected parts from [-2piL,0] into [2piL,4piL]
    for (Box& b : boxes)
        for (int j = 0; j < d; ++j)
            if (b.corner[j] < 0.0) b.corner[j] += 2.0 * cell;
    return BoxUnionSet(d, std::move(boxes), std::vector<double>(d, 2.0 * cell));
}

/// Cell-centered indicator samples of S over [lo,hi] on a tensor grid.
struct IndicatorGrid {
    std::vector<double> lo, hi;
    std::vector<int> resolution;
    std::vector<std::uint8_t> values;  // row-major, last axis fastest

    double cell_volume() const {
        double v = 1.0;
        for (std::size_t j = 0; j < resolution.size(); ++j)
            v *= (hi[j] - lo[j]) / resolution[j];
        return v;
    }
    double measure_estimate() const {
        std::size_t n = 0;
        for (auto b : values) n += b;
        return static_cast<double>(n) * cell_volume();
    }
};

inline IndicatorGrid rasterize(const BoxUnionSet& S, const std::vector<double>& lo,
                               const std::vector<double>& hi, const std::vector<int>& resolution) {
    const int d = S.dim();
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d ||
        static_cast<int>(resolution.size()) != d)
        throw InvalidArgument("rasterize: dimension mismatch");
    for (int r : resolution)
        if (r < 1) throw InvalidArgument("rasterize: resolution must be positive");
    IndicatorGrid grid;
    grid.lo = lo;
    grid.hi = hi;
    grid.resolution = resolution;
    std::size_t total = 1;
    for (int r : resolution) total *= static_cast<std::size_t>(r);
    grid.values.assign(total, 0);

    std::vector<int> idx(d, 0);
    std::vector<double> c(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (int j = 0; j < d; ++j)
            c[j] = lo[j] + (idx[j] + 0.5) * (hi[j] - lo[j]) / resolution[j];
        grid.values[flat] = S.contains(c) ? 1 : 0;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == resolution[j]) idx[j--] = 0;
    }
    return grid;
}

/// Exact per-cell coverage fractions of S over [lo,hi]: the measure of
/// S n cell divided by the cell volume.  Used as quadrature weights.
struct CoverageGrid {
    std::vector<double> lo, hi;
    std::vector<int> resolution;
    std::vector<double> fractions;  // row-major, last axis fastest

    double cell_volume() const {
        double v = 1.0;
        for (std::size_t j = 0; j < resolution.size(); ++j)
            v *= (hi[j] - lo[j]) / resolution[j];
        return v;
    }
    double measure() const {
        double s = 0.0;
        for (double f : fractions) s += f;
        return s * cell_volume();
    }
};

inline CoverageGrid coverage_grid(const BoxUnionSet& S, const std::vector<double>& lo,
                                  const std::vector<double>& hi, const std::vector<int>& resolution) {
    const int d = S.dim();
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d ||
        static_cast<int>(resolution.size()) != d)
        throw InvalidArgument("coverage_grid: dimension mismatch");
    for (int r : resolution)
        if (r < 1) throw InvalidArgument("coverage_grid: resolution must be positive");
    CoverageGrid grid;
    grid.lo = lo;
    grid.hi = hi;
    grid.resolution = resolution;
    std::size_t total = 1;
    for (int r : resolution) total *= static_cast<std::size_t>(r);
    grid.fractions.assign(total, 0.0);

    std::vector<Box> local = S.boxes_in_window(lo, hi);
    // per-axis overlap of each box with each grid cell, combined by outer
    // products (boxes are disjoint, so mass is additive)
    std::vector<double> h(d);
    for (int j = 0; j < d; ++j) h[j] = (hi[j] - lo[j]) / resolution[j];
    std::vector<std::vector<double>> ov(d);
    for (const Box& b : local) {
        for (int j = 0; j < d; ++j) {
            ov[j].assign(resolution[j], 0.0);
            int i_lo = std::max(0, static_cast<int>(std::floor((b.corner[j] - lo[j]) / h[j])));
            int i_hi = std::min(resolution[j] - 1,
                                static_cast<int>(std::floor((b.upper(j) - lo[j]) / h[j])));
            for (int i = i_lo; i <= i_hi; ++i) {
                double cl = lo[j] + i * h[j], cu = cl + h[j];
                double o = std::min(cu, b.upper(j)) - std::max(cl, b.corner[j]);
                if (o > 0.0) ov[j][i] = o;
            }
        }
        if (d == 1) {
            for (int i = 0; i < resolution[0]; ++i) grid.fractions[i] += ov[0][i];
        } else if (d == 2) {
            for (int i = 0; i < resolution[0]; ++i) {
                if (ov[0][i] == 0.0) continue;
                double* row = &grid.fractions[static_cast<std::size_t>(i) * resolution[1]];
                for (int k = 0; k < resolution[1]; ++k) row[k] += ov[0][i] * ov[1][k];
            }
        } else {
            std::vector<int> idx(d, 0);
            for (std::size_t flat = 0; flat < total; ++flat) {
                double v = 1.0;
                for (int j = 0; j < d && v > 0.0; ++j) v *= ov[j][idx[j]];
                grid.fractions[flat] += v;
                int j = d - 1;
                while (j >= 0 && ++idx[j] == resolution[j]) idx[j--] = 0;
            }
        }
    }
    double cv = 1.0;
    for (int j = 0; j < d; ++j) cv *= h[j];
    for (double& f : grid.fractions) f /= cv;
    return grid;
}

}  // namespace heatctl::geometry
