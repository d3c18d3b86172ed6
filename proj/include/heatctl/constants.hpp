#pragma once

#include <cmath>
#include <vector>

#include "heatctl/errors.hpp"

namespace heatctl::constants {

inline constexpr double euler_e = 2.718281828459045235360287;

enum class DomainKind { full_space, cube_periodic, cube_dirichlet, cube_neumann };

inline bool is_cube(DomainKind k) { return k != DomainKind::full_space; }

/// Geometric and spectral parameters feeding the constant chain.  K1 is the
/// universal Logvinenko-Sereda constant; it is not known numerically, only
/// that it may be taken >= e, so it stays configurable (default 7/2).
struct CostParameters {
    int d = 1;
    double gamma = 1.0;
    std::vector<double> a;
    double K1 = 3.5;
    DomainKind domain = DomainKind::full_space;
    double L = 0.0;  // cube cases only

    void validate() const {
        if (d < 1) throw InvalidArgument("CostParameters: d must be >= 1");
        if (!(gamma > 0.0) || gamma > 1.0)
            throw InvalidArgument("CostParameters: gamma must lie in (0,1]");
        if (static_cast<int>(a.size()) != d)
            throw InvalidArgument("CostParameters: a must have d entries");
        for (double aj : a)
            if (!(aj > 0.0)) throw InvalidArgument("CostParameters: a entries must be positive");
        if (!(K1 >= euler_e)) throw InvalidArgument("CostParameters: K1 must be >= e");
        if (is_cube(domain)) {
            if (!(L > 0.0)) throw InvalidArgument("CostParameters: cube domains need L > 0");
            for (double aj : a)
                if (aj > 2.0 * M_PI * L)
                    throw HypothesisViolation("CostParameters: a_j <= 2*pi*L required on the cube");
        }
    }

    double a_norm1() const {
        double s = 0.0;
        for (double aj : a) s += aj;
        return s;
    }
};

/// Spectral-inequality exponent on the full space (also valid for the
/// periodic cube): c1 = 2 K1 (d + |a|_1) log(K1^d / gamma) >= 2 d^2 e.
inline double c1_full_space(const CostParameters& p) {
    p.validate();
    if (p.domain != DomainKind::full_space && p.domain != DomainKind::cube_periodic)
        throw InvalidArgument("c1_full_space: domain must be full_space or cube_periodic");
    return 2.0 * p.K1 * (p.d + p.a_norm1()) * std::log(std::pow(p.K1, p.d) / p.gamma);
}

/// Spectral-inequality exponent on the cube.  Periodic boundary conditions
/// reuse the full-space shape; Dirichlet/Neumann pass through the doubled
/// torus and pick up doubled constants:
/// c1 = 4 K1 (d + |a|_1) log((2 K1)^d / gamma) >= 4 d^2 e.
inline double c1_cube(const CostParameters& p) {
    p.validate();
    switch (p.domain) {
        case DomainKind::cube_periodic:
            return 2.0 * p.K1 * (p.d + p.a_norm1()) * std::log(std::pow(p.K1, p.d) / p.gamma);
        case DomainKind::cube_dirichlet:
        case DomainKind::cube_neumann:
            return 4.0 * p.K1 * (p.d + p.a_norm1()) *
                   std::log(std::pow(2.0 * p.K1, p.d) / p.gamma);
        default:
            throw InvalidArgument("c1_cube: domain must be a cube domain");
    }
}

inline double c1_for(const CostParameters& p) {
    return p.domain == DomainKind::full_space ? c1_full_space(p) : c1_cube(p);
}

/// Auxiliary constants of the observability machinery, derived from c1 alone.
/// C5 = exp(6 sqrt(2) c1) overflows double precision for realistic c1, so the
/// C5/C3 values are carried as natural logs.
struct AppendixConstants {
    double c1 = 0.0;
    double M = 0.0;     // 8 (3 c1)^2
    double tau0 = 0.0;  // 2^{5/2} 3 c1
    double tau1 = 0.0;  // 2^3 3 c1^2
    double C4 = 0.0;    // 144 c1^2
    long double log_C5 = 0.0;
    long double log_C3 = 0.0;
    bool c5_dominates = false;  // C3 == C5; holds for every c1 >= 0.3086
};

inline AppendixConstants c3_from_c1(double c1) {
    if (!(c1 > 0.0)) throw InvalidArgument("c3_from_c1: c1 must be positive");
    AppendixConstants out;
    out.c1 = c1;
    out.M = 8.0 * 9.0 * c1 * c1;
    out.tau0 = std::pow(2.0, 2.5) * 3.0 * c1;
    out.tau1 = 8.0 * 3.0 * c1 * c1;
    out.C4 = 144.0 * c1 * c1;
    out.log_C5 = 6.0L * std::sqrt(2.0L) * static_cast<long double>(c1);
    long double log_C4 = std::log(static_cast<long double>(out.C4));
    out.c5_dominates = out.log_C5 >= log_C4;
    out.log_C3 = out.c5_dominates ? out.log_C5 : log_C4;
    return out;
}

struct AppendixConditionRow {
    double tau = 0.0;
    bool in_range = false;  // tau < tau0
    bool cond1 = false;     // 2^5 (3 c1)^2 / tau^2 > 1
    bool cond2 = false;     // tau^{-1} exp(-2^3 3 c1^2 / tau) <= 1/4
    bool cond3 = false;     // tau^{-1} exp(2^4 (3 c1)^2 / tau) >= 1
    double value1 = 0.0;
    double value2 = 0.0;
    long double value3 = 0.0;
};

struct AppendixReport {
    double c1 = 0.0;
    double tau0 = 0.0;
    double tau1 = 0.0;
    std::vector<AppendixConditionRow> rows;
    bool chain_ok = false;  // 1/(2^3 3 c1^2 e) <= 1/(96 e^3) < 1/4
    bool all_pass = false;  // conditions (1)-(3) on every in-range row
};

/// Evaluate the three admissibility conditions at the given tau samples.
/// Samples at or beyond tau0 are flagged out-of-range rather than rejected.
inline AppendixReport verify_appendix_conditions(double c1, const std::vector<double>& taus) {
    if (!(c1 > 0.0)) throw InvalidArgument("verify_appendix_conditions: c1 must be positive");
    AppendixReport rep;
    rep.c1 = c1;
    rep.tau0 = std::pow(2.0, 2.5) * 3.0 * c1;
    rep.tau1 = 24.0 * c1 * c1;
    rep.all_pass = true;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw InvalidArgument("verify_appendix_conditions: tau must be positive");
        AppendixConditionRow row;
        row.tau = tau;
        row.in_range = tau < rep.tau0;
        row.value1 = 32.0 * 9.0 * c1 * c1 / (tau * tau);
        row.cond1 = row.value1 > 1.0;
        row.value2 = std::exp(-24.0 * c1 * c1 / tau) / tau;
        row.cond2 = row.value2 <= 0.25;
        row.value3 = std::exp(static_cast<long double>(144.0 * c1 * c1 / tau)) / tau;
        row.cond3 = row.value3 >= 1.0L;
        if (row.in_range && !(row.cond1 && row.cond2 && row.cond3)) rep.all_pass = false;
        rep.rows.push_back(row);
    }
    double at_tau1 = 1.0 / (24.0 * c1 * c1 * euler_e);
    double mid = 1.0 / (96.0 * euler_e * euler_e * euler_e);
    rep.chain_ok = at_tau1 <= mid * (1.0 + 1e-12) && mid < 0.25;
    return rep;
}

inline std::vector<double> default_tau_samples(double c1, int n = 32) {
    double tau0 = std::pow(2.0, 2.5) * 3.0 * c1;
    std::vector<double> taus(n);
    // log-spaced over (tau0/1000, tau0), open at the right end
    for (int i = 0; i < n; ++i)
        taus[i] = tau0 * std::pow(10.0, -3.0 * (1.0 - static_cast<double>(i + 1) / (n + 1)));
    return taus;
}

/// Control-cost bound sqrt(C) exp(C / 2T); monotone decreasing in T.
inline double control_cost_bound(double C, double T) {
    if (!(C >= 1.0)) throw InvalidArgument("control_cost_bound: C must be >= 1");
    if (!(T > 0.0)) throw InvalidArgument("control_cost_bound: T must be positive");
    return std::sqrt(C) * std::exp(C / (2.0 * T));
}

/// log of the control-cost bound given log C.  The second term exp(logC)/(2T)
/// is itself astronomically large for realistic parameters; long double
/// arithmetic keeps it finite up to logC ~ 11350.
inline long double log_control_cost_bound(long double log_C, double T) {
    if (!(T > 0.0)) throw InvalidArgument("log_control_cost_bound: T must be positive");
    return 0.5L * log_C + std::exp(log_C) / (2.0L * T);
}

/// K of the cost-bound theorems: 12 sqrt(2) K1 on the full space, doubled on
/// the cube.
inline double bound_K(const CostParameters& p) {
    double base = 12.0 * std::sqrt(2.0) * p.K1;
    return is_cube(p.domain) ? 2.0 * base : base;
}

/// log of the control-cost constant (K^d / gamma)^{K (d + |a|_1)}.
inline long double log_bound_constant(const CostParameters& p) {
    p.validate();
    long double K = bound_K(p);
    long double exponent = K * (p.d + p.a_norm1());
    return exponent * (p.d * std::log(K) - std::log(static_cast<long double>(p.gamma)));
}

/// log of the Logvinenko-Sereda constant (K1^d / gamma)^{K1 (a.b + d)} for a
/// bandlimited function with spectrum box sides b against a (gamma, a)-thick
/// set.  The same shape covers the full space and, via the unified constant,
/// the torus.
inline long double ls_bound_log(double gamma, double a_dot_b, int d, double K1,
                                DomainKind kind = DomainKind::full_space) {
    if (!(gamma > 0.0) || gamma > 1.0) throw InvalidArgument("ls_bound_log: gamma in (0,1]");
    if (!(K1 >= euler_e)) throw InvalidArgument("ls_bound_log: K1 must be >= e");
    if (a_dot_b < 0.0) throw InvalidArgument("ls_bound_log: a.b must be nonnegative");
    (void)kind;  // both shapes coincide once the unified constant is used
    long double base = d * std::log(static_cast<long double>(K1)) -
                       std::log(static_cast<long double>(gamma));
    return static_cast<long double>(K1) * (a_dot_b + d) * base;
}

/// Raw torus bound (K2^d / gamma)^{K2 a.b + (6d+1)/2} for comparison with the
/// unified form.
inline long double ls_bound_torus_raw_log(double gamma, double a_dot_b, int d, double K2) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw InvalidArgument("ls_bound_torus_raw_log: gamma in (0,1]");
    if (!(K2 >= euler_e)) throw InvalidArgument("ls_bound_torus_raw_log: K2 must be >= e");
    long double base = d * std::log(static_cast<long double>(K2)) -
                       std::log(static_cast<long double>(gamma));
    return (static_cast<long double>(K2) * a_dot_b + (6.0L * d + 1.0L) / 2.0L) * base;
}

/// The full certificate: spectral exponent, auxiliary constants, and the
/// T |-> cost bound, with every potentially huge value kept in log space.
struct CostCertificate {
    CostParameters params;
    double c1 = 0.0;
    AppendixConstants appendix;
    double K = 0.0;
    long double log_bound = 0.0;  // log C1 or log C2

    long double log_cost_bound(double T) const { return log_control_cost_bound(log_bound, T); }
};

inline CostCertificate make_cost_certificate(const CostParameters& p) {
    CostCertificate cert;
    cert.params = p;
    cert.c1 = c1_for(p);
    cert.appendix = c3_from_c1(cert.c1);
    cert.K = bound_K(p);
    cert.log_bound = log_bound_constant(p);
    return cert;
}

}  // namespace heatctl::constants
