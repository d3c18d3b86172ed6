#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "heatctl/errors.hpp"
#include "heatctl/geometry.hpp"
#include "heatctl/massmatrix.hpp"
#include "heatctl/spectral.hpp"

namespace heatctl::control {

using spectral::BoundaryCondition;
using spectral::Complex;
using spectral::ModeVector;
using spectral::MultiIndex;
using spectral::SpectralBasis;

/// Null-control problem on the truncated eigenspace lambda_k <= E_max.
struct ControlProblem {
    SpectralBasis basis;
    geometry::BoxUnionSet omega;
    double T = 1.0;
    ModeVector u0;
    double E_max = 0.0;
    double epsilon = 1e-8;   // Gramian regularization
    int time_steps = 256;    // control sampling / Duhamel quadrature
    int resolution = 0;      // mixing-matrix quadrature, 0 = default

    ControlProblem(SpectralBasis basis_, geometry::BoxUnionSet omega_, double T_, ModeVector u0_,
                   double E_max_)
        : basis(std::move(basis_)), omega(std::move(omega_)), T(T_), u0(std::move(u0_)),
          E_max(E_max_) {}

    void validate() const {
        basis.validate();
        if (omega.dim() != basis.dim) throw InvalidArgument("ControlProblem: dimension mismatch");
        if (omega.measure() <= 0.0)
            throw InvalidArgument("ControlProblem: control set must have positive measure");
        if (!(T > 0.0)) throw InvalidArgument("ControlProblem: T must be positive");
        if (!(epsilon > 0.0)) throw InvalidArgument("ControlProblem: epsilon must be positive");
        if (time_steps < 1) throw InvalidArgument("ControlProblem: time_steps must be >= 1");
        if (E_max < 0.0) throw InvalidArgument("ControlProblem: E_max must be nonnegative");
        if (!(u0.basis() == basis)) throw InvalidArgument("ControlProblem: u0 basis mismatch");
        if (u0.max_eigenvalue() > E_max * (1.0 + 1e-12))
            throw InvalidArgument("ControlProblem: u0 must be supported on lambda <= E_max");
    }
};

/// Mixing matrix B_{kl} = <phi_k, chi_omega phi_l> on the modes with
/// lambda_k <= E_max, by coverage-weighted quadrature.
inline Eigen::MatrixXcd mixing_matrix(const SpectralBasis& basis,
                                      const geometry::BoxUnionSet& omega, double E_max,
                                      int resolution = 0) {
    auto modes = spectral::modes_below(basis, E_max);
    if (modes.empty()) throw InvalidArgument("mixing_matrix: truncation holds no modes");
    return spectral::mass_matrix(basis, omega, modes, resolution);
}

/// Observability Gramian of the truncated adjoint flow:
/// Lambda_{kl} = B_{kl} (1 - e^{-(lambda_k+lambda_l) T}) / (lambda_k+lambda_l),
/// with the limiting value T on the kernel diagonal.
inline Eigen::MatrixXcd gramian(const Eigen::MatrixXcd& B, const std::vector<double>& lambdas,
                                double T) {
    const int N = static_cast<int>(lambdas.size());
    if (B.rows() != N || B.cols() != N) throw InvalidArgument("gramian: dimension mismatch");
    if (!(T > 0.0)) throw InvalidArgument("gramian: T must be positive");
    Eigen::MatrixXcd G(N, N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            double sigma = lambdas[r] + lambdas[c];
            double w = sigma == 0.0 ? T : -std::expm1(-sigma * T) / sigma;
            G(r, c) = B(r, c) * w;
        }
    return G;
}

struct ControlSolution {
    ModeVector phi_T;                  // adjoint final datum
    std::vector<double> sample_times;  // midpoints s_i of the control grid
    std::vector<ModeVector> control;   // adjoint states g(s_i); the control is
                                       // v(s_i) = chi_omega g(s_i)
    std::vector<double> control_norms;  // ||v(s_i)||_{L2(omega)}
    std::vector<double> state_norms;    // ||u(n dt)||, n = 0..time_steps
    double u0_norm = 0.0;
    double control_norm = 0.0;   // L2([0,T] x omega), composite midpoint
    double terminal_norm = 0.0;  // from the Duhamel simulation
    double predicted_terminal_norm = 0.0;  // epsilon ||phi_T||, the algebraic value
    double cost_ratio = 0.0;               // control_norm / ||u0||
    double solver_residual = 0.0;          // ||(Lambda + eps I) phi + e^{T Lap} u0||
    int modes = 0;
    int cg_iterations = 0;  // 0 when the direct solver was used
};

namespace detail {

// Jacobi-preconditioned conjugate gradients for Hermitian positive definite
// systems; used above the direct-solver size cutoff.
inline Eigen::VectorXcd pcg_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                                  double rel_tol, int max_iter, int& iters) {
    Eigen::VectorXd inv_diag = A.diagonal().real().cwiseMax(1e-300).cwiseInverse();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
    Eigen::VectorXcd r = b;
    Eigen::VectorXcd z = inv_diag.asDiagonal() * r;
    Eigen::VectorXcd p = z;
    double rz = r.dot(z).real();
    double b_norm = b.norm();
    iters = 0;
    if (b_norm == 0.0) return x;
    while (iters < max_iter && r.norm() > rel_tol * b_norm) {
        Eigen::VectorXcd Ap = A * p;
        double pAp = p.dot(Ap).real();
        if (!(pAp > 0.0)) throw NumericalFailure("pcg_solve: matrix not positive definite");
        double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        z = inv_diag.asDiagonal() * r;
        double rz_new = r.dot(z).real();
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        ++iters;
    }
    return x;
}

struct Discretization {
    std::vector<MultiIndex> modes;
    std::vector<double> lambdas;
    Eigen::MatrixXcd B;
};

inline Discretization discretize(const ControlProblem& p) {
    Discretization d;
    d.modes = spectral::modes_below(p.basis, p.E_max);
    if (d.modes.empty()) throw InvalidArgument("ControlProblem: truncation holds no modes");
    d.lambdas.resize(d.modes.size());
    for (std::size_t n = 0; n < d.modes.size(); ++n)
        d.lambdas[n] = spectral::eigenvalue(p.basis, d.modes[n]);
    d.B = spectral::mass_matrix(p.basis, p.omega, d.modes, p.resolution);
    return d;
}

inline Eigen::VectorXcd to_vector(const ModeVector& f, const std::vector<MultiIndex>& modes) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(modes.size());
    for (std::size_t n = 0; n < modes.size(); ++n) v(n) = f.coefficient(modes[n]);
    return v;
}

inline ModeVector to_mode_vector(const Eigen::VectorXcd& v, const SpectralBasis& basis,
                                 const std::vector<MultiIndex>& modes) {
    ModeVector f(basis);
    for (std::size_t n = 0; n < modes.size(); ++n) {
        Complex z = v(n);
        if (basis.bc != BoundaryCondition::periodic) z = Complex(z.real(), 0.0);
        if (z != Complex(0.0, 0.0)) f.set_coefficient(modes[n], z);
    }
    return f;
}

// Duhamel integration with exact homogeneous propagation per step and the
// forcing sampled at step midpoints:
//   u_{n+1} = e^{dt Lap} u_n + dt e^{(dt/2) Lap} B g(s_n).
// Expanding the recursion reproduces the composite-midpoint quadrature of
// the Duhamel integral.
struct SimulationCore {
    std::vector<double> state_norms;
    Eigen::VectorXcd terminal;
};

inline SimulationCore simulate_core(const std::vector<double>& lambdas, const Eigen::MatrixXcd& B,
                                    const Eigen::VectorXcd& u0, double T, int steps,
                                    const std::vector<Eigen::VectorXcd>& g_samples) {
    const int N = static_cast<int>(lambdas.size());
    const double dt = T / steps;
    Eigen::ArrayXd lam = Eigen::Map<const Eigen::ArrayXd>(lambdas.data(), N);
    Eigen::ArrayXd full_step = (-lam * dt).exp();
    Eigen::ArrayXd half_step = (-lam * (0.5 * dt)).exp();
    SimulationCore out;
    out.state_norms.reserve(steps + 1);
    Eigen::VectorXcd u = u0;
    out.state_norms.push_back(u.norm());
    for (int n = 0; n < steps; ++n) {
        Eigen::VectorXcd forcing = B * g_samples[n];
        u = (u.array() * full_step).matrix() + dt * (forcing.array() * half_step).matrix();
        out.state_norms.push_back(u.norm());
    }
    out.terminal = std::move(u);
    return out;
}

}  // namespace detail

/// Minimal-norm null control via the regularized observability Gramian:
/// solve (Lambda + eps I) phi_T = -(coefficients of e^{T Lap} u0), take the
/// control v(s) = chi_omega e^{(T-s) Lap} phi_T, and simulate the controlled
/// flow.  The direct Cholesky solver handles up to 2048 modes; larger
/// problems fall back to preconditioned conjugate gradients.
inline ControlSolution solve_hum(const ControlProblem& problem) {
    problem.validate();
    auto disc = detail::discretize(problem);
    const int N = static_cast<int>(disc.modes.size());
    const double T = problem.T;

    Eigen::MatrixXcd G = gramian(disc.B, disc.lambdas, T);
    Eigen::MatrixXcd A = G + problem.epsilon * Eigen::MatrixXcd::Identity(N, N);

    Eigen::VectorXcd u0_vec = detail::to_vector(problem.u0, disc.modes);
    Eigen::ArrayXd decay_T =
        (-Eigen::Map<const Eigen::ArrayXd>(disc.lambdas.data(), N) * T).exp();
    Eigen::VectorXcd rhs = -(u0_vec.array() * decay_T).matrix();

    ControlSolution sol{ModeVector(problem.basis)};
    sol.modes = N;
    sol.u0_norm = problem.u0.norm();

    Eigen::VectorXcd phi;
    if (N <= 2048) {
        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
            double cond = eig.eigenvalues()(N - 1) / std::max(eig.eigenvalues()(0), 1e-300);
            throw NumericalFailure("solve_hum: Cholesky failed on the regularized Gramian", cond);
        }
        phi = llt.solve(rhs);
    } else {
        phi = detail::pcg_solve(A, rhs, 1e-13, 20 * N, sol.cg_iterations);
    }
    sol.solver_residual = (A * phi - rhs).norm();
    sol.phi_T = detail::to_mode_vector(phi, problem.basis, disc.modes);
    sol.predicted_terminal_norm = problem.epsilon * phi.norm();

    // control samples at step midpoints: g(s) = e^{(T-s) Lap} phi_T
    const int steps = problem.time_steps;
    const double dt = T / steps;
    std::vector<Eigen::VectorXcd> g_samples(steps);
    sol.sample_times.resize(steps);
    sol.control_norms.resize(steps);
    double accum = 0.0;
    Eigen::ArrayXd lam = Eigen::Map<const Eigen::ArrayXd>(disc.lambdas.data(), N);
    for (int n = 0; n < steps; ++n) {
        double s = (n + 0.5) * dt;
        sol.sample_times[n] = s;
        g_samples[n] = (phi.array() * (-lam * (T - s)).exp()).matrix();
        double w2 = (g_samples[n].adjoint() * disc.B * g_samples[n]).real()(0);
        sol.control_norms[n] = std::sqrt(std::max(w2, 0.0));
        accum += w2 * dt;
        sol.control.push_back(detail::to_mode_vector(g_samples[n], problem.basis, disc.modes));
    }
    sol.control_norm = std::sqrt(std::max(accum, 0.0));
    sol.cost_ratio = sol.u0_norm > 0.0 ? sol.control_norm / sol.u0_norm : 0.0;

    auto sim = detail::simulate_core(disc.lambdas, disc.B, u0_vec, T, steps, g_samples);
    sol.state_norms = std::move(sim.state_norms);
    sol.terminal_norm = sim.terminal.norm();
    return sol;
}

struct SimulationResult {
    std::vector<double> state_norms;  // ||u(n dt)||, n = 0..time_steps
    ModeVector u_T;
    double terminal_norm = 0.0;
};

/// Simulate the controlled flow for externally supplied adjoint-state
/// samples (one per time step, taken at step midpoints).  The chi_omega
/// action of the control is applied through the mixing matrix.
inline SimulationResult simulate_controlled(const ControlProblem& problem,
                                            const std::vector<ModeVector>& control) {
    problem.validate();
    if (static_cast<int>(control.size()) != problem.time_steps)
        throw InvalidArgument("simulate_controlled: control grid mismatch");
    auto disc = detail::discretize(problem);
    const int N = static_cast<int>(disc.modes.size());

    std::vector<Eigen::VectorXcd> g_samples(control.size());
    for (std::size_t n = 0; n < control.size(); ++n) {
        if (!(control[n].basis() == problem.basis))
            throw InvalidArgument("simulate_controlled: control basis mismatch");
        g_samples[n] = detail::to_vector(control[n], disc.modes);
    }
    Eigen::VectorXcd u0_vec = detail::to_vector(problem.u0, disc.modes);
    auto sim = detail::simulate_core(disc.lambdas, disc.B, u0_vec, problem.T, problem.time_steps,
                                     g_samples);
    SimulationResult out{std::move(sim.state_norms),
                         detail::to_mode_vector(sim.terminal, problem.basis, disc.modes),
                         sim.terminal.norm()};
    (void)N;
    return out;
}

/// Observed-energy quotient ||e^{T Lap} f||^2 / int_0^T ||e^{t Lap} f||^2_{L2(omega)} dt
/// with the time integral by composite midpoint.
inline double observability_ratio(const ModeVector& f, const geometry::BoxUnionSet& omega,
                                  double T, int resolution = 0, int time_steps = 256) {
    if (f.empty()) throw InvalidArgument("observability_ratio: f must be nonzero");
    if (!(T > 0.0)) throw InvalidArgument("observability_ratio: T must be positive");
    if (time_steps < 1) throw InvalidArgument("observability_ratio: time_steps must be >= 1");
    const auto& basis = f.basis();
    if (omega.dim() != basis.dim) throw InvalidArgument("observability_ratio: dimension mismatch");

    std::vector<MultiIndex> modes;
    std::vector<double> lambdas;
    for (const auto& [k, z] : f.coeffs()) {
        modes.push_back(k);
        lambdas.push_back(spectral::eigenvalue(basis, k));
    }
    Eigen::MatrixXcd B = spectral::mass_matrix(basis, omega, modes, resolution);
    Eigen::VectorXcd c = detail::to_vector(f, modes);
    Eigen::ArrayXd lam = Eigen::Map<const Eigen::ArrayXd>(lambdas.data(), lambdas.size());

    double numerator = ((c.array() * (-lam * T).exp()).matrix()).squaredNorm();
    double dt = T / time_steps;
    double denom = 0.0;
    for (int n = 0; n < time_steps; ++n) {
        double t = (n + 0.5) * dt;
        Eigen::VectorXcd g = (c.array() * (-lam * t).exp()).matrix();
        denom += (g.adjoint() * B * g).real()(0) * dt;
    }
    if (denom <= 0.0)
        throw IndeterminateRatio("observability_ratio: observed energy vanished at resolution");
    return numerator / denom;
}

}  // namespace heatctl::control
