#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "heatctl/constants.hpp"
#include "heatctl/control.hpp"
#include "heatctl/corpus.hpp"

using namespace heatctl;
using namespace heatctl::control;
using Catch::Approx;

namespace {

geometry::BoxUnionSet full_cell(int d, double L) {
    geometry::Box b;
    b.corner.assign(d, 0.0);
    b.sides.assign(d, 2.0 * M_PI * L);
    return geometry::BoxUnionSet(d, {b});
}

const SpectralBasis kPer1{1, 1.0, BoundaryCondition::periodic};

}  // namespace

TEST_CASE("mixing matrix reference values", "[control]") {
    // full cell: orthonormality gives the identity
    auto B = mixing_matrix(kPer1, full_cell(1, 1.0), 16.0);
    REQUIRE(B.rows() == 9);  // |k| <= 4
    CHECK((B - Eigen::MatrixXcd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-6);

    // empty control set: zero matrix
    auto Z = mixing_matrix(kPer1, geometry::BoxUnionSet::empty_set(1), 16.0);
    CHECK(Z.cwiseAbs().maxCoeff() == 0.0);

    // half cell: constant |phi_k|^2 integrates to exactly 1/2 on the diagonal
    geometry::BoxUnionSet half(1, {{{0.0}, {M_PI}}});
    auto H = mixing_matrix(kPer1, half, 16.0);
    for (int i = 0; i < H.rows(); ++i) CHECK(H(i, i).real() == Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(mixing_matrix({1, 1.0, BoundaryCondition::dirichlet}, half, 0.01),
                    InvalidArgument);
}

TEST_CASE("quadrature assembly tracks the closed-form matrix", "[control][property]") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        int d = 1 + static_cast<int>(seed % 2);
        SpectralBasis basis{d, 1.0, seed % 3 == 0 ? BoundaryCondition::dirichlet
                                                  : BoundaryCondition::periodic};
        auto S = corpus::random_periodic_set(seed, d, std::vector<double>(d, 1.0), 3);
        auto modes = spectral::modes_below(basis, d == 1 ? 36.0 : 8.0);
        auto Bq = spectral::mass_matrix(basis, S, modes);
        auto Be = spectral::mass_matrix_exact(basis, S, modes);
        CHECK((Bq - Be).cwiseAbs().maxCoeff() < 5e-3);

        // 0 <= B <= I as quadratic forms
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Bq);
        CHECK(eig.eigenvalues()(0) >= -1e-10);
        CHECK(eig.eigenvalues()(eig.eigenvalues().size() - 1) <= 1.0 + 1e-10);
    }
}

TEST_CASE("gramian entries", "[control]") {
    std::vector<double> lambdas{0.0, 1.0, 4.0};
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(3, 3);
    double T = 0.7;
    auto G = gramian(B, lambdas, T);
    CHECK(G(0, 0).real() == Approx(T).epsilon(1e-15));  // kernel pair: exact limit, no NaN
    CHECK(G(1, 1).real() == Approx((1.0 - std::exp(-2.0 * T)) / 2.0).epsilon(1e-14));
    CHECK(G(2, 2).real() == Approx((1.0 - std::exp(-8.0 * T)) / 8.0).epsilon(1e-14));
    CHECK(G(0, 1) == Complex(0.0, 0.0));

    // vanishing horizon: entrywise zero
    auto G0 = gramian(B, lambdas, 1e-13);
    CHECK(G0.cwiseAbs().maxCoeff() < 2e-13);

    CHECK_THROWS_AS(gramian(B, {0.0, 1.0}, T), InvalidArgument);
}

TEST_CASE("gramian is PSD for assembled problems", "[control][property]") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto S = corpus::random_periodic_set(seed, 1, {1.0}, 2);
        auto modes = spectral::modes_below(kPer1, 64.0);
        std::vector<double> lambdas(modes.size());
        for (std::size_t n = 0; n < modes.size(); ++n) lambdas[n] = eigenvalue(kPer1, modes[n]);
        auto B = spectral::mass_matrix(kPer1, S, modes);
        auto G = gramian(B, lambdas, 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
        double top = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        CHECK(eig.eigenvalues()(0) >= -1e-10 * top);
    }
}

TEST_CASE("single-mode full-cell control matches the scalar solution", "[control]") {
    // with B = I the modes decouple; each coefficient follows the scalar
    // closed form phi = -e^{-lambda T} u0 / (g + eps), g = (1-e^{-2 lambda T})/(2 lambda)
    ModeVector u0(kPer1);
    u0.set_coefficient({1}, {1.0, 0.0});
    ControlProblem problem(kPer1, full_cell(1, 1.0), 1.0, u0, 1.0);
    problem.epsilon = 1e-12;
    problem.time_steps = 8192;
    auto sol = solve_hum(problem);
    REQUIRE(sol.modes == 3);  // k in {-1, 0, 1}

    double g = (1.0 - std::exp(-2.0)) / 2.0;
    double phi_expected = -std::exp(-1.0) / (g + problem.epsilon);
    CHECK(sol.phi_T.coefficient({1}).real() == Approx(phi_expected).epsilon(1e-10));
    CHECK(std::abs(sol.phi_T.coefficient({0})) < 1e-12);
    CHECK(std::abs(sol.phi_T.coefficient({-1})) < 1e-12);

    // control samples are e^{-lambda (T - s)} phi
    for (std::size_t i = 0; i < sol.sample_times.size(); i += 1024) {
        double s = sol.sample_times[i];
        CHECK(sol.control[i].coefficient({1}).real() ==
              Approx(phi_expected * std::exp(-(1.0 - s))).epsilon(1e-10));
    }

    // control norm matches the closed-form integral
    CHECK(sol.control_norm ==
          Approx(std::abs(phi_expected) * std::sqrt(g)).epsilon(1e-6));

    CHECK(sol.predicted_terminal_norm ==
          Approx(problem.epsilon * std::abs(phi_expected)).epsilon(1e-10));
    CHECK(sol.terminal_norm <= 1e-8 * sol.u0_norm);
    CHECK(sol.solver_residual < 1e-12);
}

TEST_CASE("zero initial datum yields the zero control", "[control]") {
    ControlProblem problem(kPer1, full_cell(1, 1.0), 1.0, ModeVector(kPer1), 4.0);
    auto sol = solve_hum(problem);
    CHECK(sol.control_norm == 0.0);
    CHECK(sol.terminal_norm == 0.0);
    CHECK(sol.cost_ratio == 0.0);
    for (const auto& v : sol.control) CHECK(v.empty());
}

TEST_CASE("desk-scale null control on the half-cells set", "[control]") {
    auto omega = corpus::half_cells_set();
    constants::CostParameters cp;
    cp.d = 1;
    cp.gamma = 0.5;
    cp.a = {1.0};
    cp.K1 = 3.5;
    cp.domain = constants::DomainKind::cube_periodic;
    cp.L = 1.0;
    auto cert = constants::make_cost_certificate(cp);

    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto u0 = corpus::random_mode_vector(seed, kPer1, 256.0);
        ControlProblem problem(kPer1, omega, 1.0, u0, 256.0);
        problem.epsilon = 1e-8;
        auto sol = solve_hum(problem);
        REQUIRE(sol.modes == 33);
        CHECK(sol.terminal_norm / sol.u0_norm <= 1e-4);
        // log-space bound dominance
        long double log_ratio = std::log(static_cast<long double>(sol.cost_ratio));
        CHECK(log_ratio <= cert.log_cost_bound(1.0));
        // the simulated terminal matches a fresh simulation bit-for-bit
        auto sim = simulate_controlled(problem, sol.control);
        CHECK(sim.terminal_norm == Approx(sol.terminal_norm).epsilon(1e-10));
    }
}

TEST_CASE("free flow is reproduced exactly when the control vanishes", "[control]") {
    auto u0 = corpus::random_mode_vector(4, kPer1, 64.0);
    ControlProblem problem(kPer1, corpus::half_cells_set(), 0.8, u0, 64.0);
    problem.time_steps = 16;
    std::vector<ModeVector> zero_control(problem.time_steps, ModeVector(kPer1));
    auto sim = simulate_controlled(problem, zero_control);
    auto expected = spectral::heat_semigroup(u0, 0.8);
    CHECK(sim.terminal_norm == Approx(expected.norm()).epsilon(1e-14));
    for (const auto& [k, z] : expected.coeffs())
        CHECK(std::abs(sim.u_T.coefficient(k) - z) < 1e-15);

    std::vector<ModeVector> wrong(3, ModeVector(kPer1));
    CHECK_THROWS_AS(simulate_controlled(problem, wrong), InvalidArgument);
}

TEST_CASE("Duhamel quadrature converges at second order", "[control][property]") {
    ModeVector u0(kPer1);
    u0.set_coefficient({0}, {0.6, 0.0});
    u0.set_coefficient({1}, {0.0, 0.5});
    u0.set_coefficient({-2}, {0.4, 0.2});
    ControlProblem problem(kPer1, full_cell(1, 1.0), 1.0, u0, 9.0);
    problem.epsilon = 1e-12;

    problem.time_steps = 256;
    double t256 = solve_hum(problem).terminal_norm;
    problem.time_steps = 1024;
    double t1024 = solve_hum(problem).terminal_norm;
    // the simulated terminal is dominated by the O(dt^2) quadrature error
    // here, so quadrupling the step count shrinks it ~16x
    CHECK(t1024 <= t256 / 8.0);
}

TEST_CASE("regularization path and linearity", "[control][property]") {
    auto omega = corpus::half_cells_set();
    auto u0 = corpus::random_mode_vector(9, kPer1, 64.0);
    ControlProblem problem(kPer1, omega, 1.0, u0, 64.0);

    double prev_pred = std::numeric_limits<double>::infinity();
    for (double eps : {1e-4, 1e-6, 1e-8, 1e-10}) {
        problem.epsilon = eps;
        auto sol = solve_hum(problem);
        CHECK(sol.predicted_terminal_norm < prev_pred);
        prev_pred = sol.predicted_terminal_norm;
    }

    // scaling the datum scales the control linearly
    problem.epsilon = 1e-8;
    auto base = solve_hum(problem);
    ControlProblem scaled = problem;
    scaled.u0 = u0.scaled({3.0, 0.0});
    auto big = solve_hum(scaled);
    CHECK(big.control_norm == Approx(3.0 * base.control_norm).epsilon(1e-12));
    CHECK(big.terminal_norm == Approx(3.0 * base.terminal_norm).epsilon(1e-10));
    CHECK(big.cost_ratio == Approx(base.cost_ratio).epsilon(1e-12));
}

TEST_CASE("observability ratio closed forms", "[control]") {
    auto omega_full = full_cell(1, 1.0);

    // single oscillating mode
    ModeVector f(kPer1);
    f.set_coefficient({2}, {0.0, 1.3});
    double lambda = 4.0, T = 0.9;
    double closed =
        std::exp(-2.0 * lambda * T) * 2.0 * lambda / (1.0 - std::exp(-2.0 * lambda * T));
    CHECK(observability_ratio(f, omega_full, T, 0, 8192) == Approx(closed).epsilon(1e-6));

    // kernel mode: constant in time, ratio 1/T
    ModeVector c(kPer1);
    c.set_coefficient({0}, {1.0, 0.0});
    CHECK(observability_ratio(c, omega_full, 0.5, 0, 64) == Approx(2.0).epsilon(1e-12));

    ModeVector empty(kPer1);
    CHECK_THROWS_AS(observability_ratio(empty, omega_full, 1.0), InvalidArgument);
    CHECK_THROWS_AS(observability_ratio(c, geometry::BoxUnionSet::empty_set(1), 1.0),
                    IndeterminateRatio);
}

TEST_CASE("observability denominator agrees with the Gramian", "[control][property]") {
    // dual routes: composite-midpoint time integral vs the closed-form
    // Gramian quadratic form
    auto omega = corpus::half_cells_set();
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto f = corpus::random_mode_vector(seed, kPer1, 36.0);
        double T = 0.6;
        std::vector<MultiIndex> modes;
        std::vector<double> lambdas;
        for (const auto& [k, z] : f.coeffs()) {
            modes.push_back(k);
            lambdas.push_back(eigenvalue(kPer1, k));
        }
        auto B = spectral::mass_matrix(kPer1, omega, modes);
        auto G = gramian(B, lambdas, T);
        Eigen::VectorXcd c(modes.size());
        for (std::size_t n = 0; n < modes.size(); ++n) c(n) = f.coefficient(modes[n]);
        double denom_exact = (c.adjoint() * G * c).real()(0);
        double numerator = 0.0;
        for (std::size_t n = 0; n < modes.size(); ++n)
            numerator += std::norm(c(n)) * std::exp(-2.0 * lambdas[n] * T);
        double ratio_exact = numerator / denom_exact;
        CHECK(observability_ratio(f, omega, T, 0, 4096) == Approx(ratio_exact).epsilon(1e-5));
    }
}

TEST_CASE("problem validation", "[control]") {
    auto u0 = corpus::random_mode_vector(1, kPer1, 16.0);
    ControlProblem bad_T(kPer1, corpus::half_cells_set(), -1.0, u0, 16.0);
    CHECK_THROWS_AS(bad_T.validate(), InvalidArgument);

    ControlProblem bad_support(kPer1, corpus::half_cells_set(), 1.0, u0, 4.0);
    CHECK_THROWS_AS(bad_support.validate(), InvalidArgument);

    ControlProblem bad_omega(kPer1, geometry::BoxUnionSet::empty_set(1), 1.0, u0, 16.0);
    CHECK_THROWS_AS(bad_omega.validate(), InvalidArgument);
}
