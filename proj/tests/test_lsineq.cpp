#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "heatctl/corpus.hpp"
#include "heatctl/lsineq.hpp"

using namespace heatctl;
using namespace heatctl::lsineq;
using Catch::Approx;

namespace {

geometry::BoxUnionSet full_cell(int d, double L) {
    geometry::Box b;
    b.corner.assign(d, 0.0);
    b.sides.assign(d, 2.0 * M_PI * L);
    return geometry::BoxUnionSet(d, {b});
}

ModeVector constant_mode(const SpectralBasis& basis) {
    ModeVector f(basis);
    f.set_coefficient(MultiIndex(basis.dim, 0), {1.0, 0.0});
    return f;
}

}  // namespace

TEST_CASE("ls_ratio basics", "[lsineq]") {
    SpectralBasis per{1, 1.0, BoundaryCondition::periodic};

    LSInstance full(constant_mode(per), full_cell(1, 1.0), 1.0, {2.0 * M_PI});
    CHECK(ls_ratio(full) == Approx(1.0).epsilon(1e-9));

    // constant on half the cell: sqrt(2)
    geometry::BoxUnionSet half(1, {{{0.0}, {M_PI}}});
    LSInstance hi(constant_mode(per), half, 0.5, {M_PI});
    CHECK(ls_ratio(hi) == Approx(std::sqrt(2.0)).epsilon(1e-9));

    // ratio >= 1 and scaling invariance on random data
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto f = corpus::random_mode_vector(seed, per, 64.0);
        auto S = corpus::random_periodic_set(seed, 1, {1.0}, 2, 0.2, 0.45);
        LSInstance inst(f, S, 0.05, {1.0});
        double r = ls_ratio(inst);
        CHECK(r >= 1.0 - 1e-12);
        LSInstance scaled(f.scaled({0.0, -7.25}), S, 0.05, {1.0});
        CHECK(ls_ratio(scaled) == Approx(r).epsilon(1e-12));
    }

    // vanished restricted norm is reported, not returned as infinity
    LSInstance empty(constant_mode(per), geometry::BoxUnionSet::empty_set(1), 0.5, {1.0});
    CHECK_THROWS_AS(ls_ratio(empty), IndeterminateRatio);
}

TEST_CASE("spectrum box inference", "[lsineq]") {
    SpectralBasis per{1, 2.0, BoundaryCondition::periodic};
    ModeVector f(per);
    f.set_coefficient({-3}, {1.0, 0.0});
    f.set_coefficient({5}, {0.5, 0.0});
    LSInstance inst(f, full_cell(1, 2.0), 1.0, {1.0});
    auto [lo, hi] = inst.spectrum_box();
    CHECK(lo[0] == Approx(-1.5));
    CHECK(hi[0] == Approx(2.5));
    CHECK(inst.b()[0] == Approx(4.0));
    CHECK(inst.a_dot_b() == Approx(4.0));

    // Dirichlet boxes are symmetric via the doubled-torus frequencies
    SpectralBasis dir{1, 1.0, BoundaryCondition::dirichlet};
    ModeVector g(dir);
    g.set_coefficient({4}, {1.0, 0.0});
    LSInstance di(g, full_cell(1, 1.0), 1.0, {1.0});
    CHECK(di.b()[0] == Approx(4.0));

    // explicit J must contain the support
    ModeVector h(per);
    h.set_coefficient({2}, {1.0, 0.0});
    LSInstance ok(h, full_cell(1, 2.0), 1.0, {1.0});
    ok.J = {{-2.0}, {2.0}};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.b()[0] == Approx(4.0));
    ok.J = {{-0.5}, {0.5}};
    CHECK_THROWS_AS(ok.validate(), InvalidArgument);
}

TEST_CASE("verify_ls on reference instances", "[lsineq]") {
    SpectralBasis per{1, 1.0, BoundaryCondition::periodic};

    // whole cell: trivial pass with positive margin
    auto full = LSInstance(constant_mode(per), full_cell(1, 1.0), 1.0, {2.0 * M_PI});
    auto rep = verify_ls(full, 3.5);
    CHECK(rep.pass);
    CHECK(rep.margin > 0.0L);

    // half-cells set on a cell of two whole periods, single oscillating
    // mode, spectrum box [-sqrt(E), sqrt(E)]
    SpectralBasis per2{1, 1.0 / M_PI, BoundaryCondition::periodic};
    ModeVector mode(per2);
    mode.set_coefficient({1}, {1.0, 0.0});
    LSInstance inst(mode, corpus::half_cells_set(), 0.5, {1.0});
    inst.J = {{-M_PI}, {M_PI}};
    auto rep2 = verify_ls(inst, 3.5);
    CHECK(rep2.ratio == Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(rep2.pass);
    CHECK(rep2.log_bound >= 9.0L);
    CHECK(rep2.margin > 0.0L);
}

TEST_CASE("Dirichlet/Neumann ratio equals the doubled-torus ratio", "[lsineq][property]") {
    double L = 0.5;
    for (auto bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
        SpectralBasis basis{1, L, bc};
        auto f = corpus::random_mode_vector(7 + static_cast<int>(bc), basis, 40.0);
        geometry::BoxUnionSet S(1, {{{0.2}, {0.9}}, {{1.8}, {0.8}}});

        LSInstance native(f, S, 0.25, {1.0});
        double r_native = ls_ratio(native, 512);

        auto fext = spectral::extend_to_double_torus(f);
        auto Sext = geometry::reflect_and_periodize(S, L);
        LSInstance doubled(fext, Sext, 0.25 / 2.0, {2.0});
        double r_ext = ls_ratio(doubled, 512);

        CHECK(r_native == Approx(r_ext).epsilon(5e-3));

        // and verify_ls accepts the native instance through the same chain
        auto rep = verify_ls(native, 3.5);
        CHECK(rep.pass);
        CHECK(rep.gamma_used == Approx(0.125));
    }
}

TEST_CASE("adversarial search on the full cell finds nothing", "[lsineq]") {
    SpectralBasis per{1, 1.0, BoundaryCondition::periodic};
    auto res = adversarial_search(per, full_cell(1, 1.0), {{-4, 4}});
    CHECK(res.used_eigensolve);
    CHECK(res.max_ratio == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("adversarial eigensolve matches the measured ratio", "[lsineq]") {
    SpectralBasis per{1, 1.0, BoundaryCondition::periodic};
    auto S = corpus::half_cells_set();
    auto res = adversarial_search(per, S, {{-8, 8}});
    REQUIRE(res.used_eigensolve);
    CHECK(res.max_ratio > 1.0);

    LSInstance inst(res.worst, S, 0.5, {1.0});
    CHECK(ls_ratio(inst, 2048) == Approx(res.max_ratio).epsilon(1e-2));
}

TEST_CASE("coordinate ascent agrees with the eigensolve", "[lsineq][property]") {
    SpectralBasis per{1, 1.0, BoundaryCondition::periodic};
    auto S = corpus::half_cells_set();
    auto eig = adversarial_search(per, S, {{-4, 4}});

    AdversarialOptions opts;
    opts.force_ascent = true;
    opts.trials = 6;
    opts.steps = 120;
    opts.seed = 3;
    auto asc = adversarial_search(per, S, {{-4, 4}}, opts);
    CHECK_FALSE(asc.used_eigensolve);
    REQUIRE(asc.restart_ratios.size() == 6);
    // the reported maximum dominates every restart and never beats the
    // exact eigensolve
    for (double r : asc.restart_ratios) CHECK(asc.max_ratio >= r - 1e-12);
    CHECK(asc.max_ratio <= eig.max_ratio * (1.0 + 1e-9));
    CHECK(asc.max_ratio == Approx(eig.max_ratio).epsilon(1e-4));
}

TEST_CASE("adversarial ratio grows with the band and shrinking sets",
          "[lsineq][property]") {
    SpectralBasis per{1, 1.0, BoundaryCondition::periodic};
    auto S = corpus::half_cells_set();
    double prev = 0.0;
    for (int m : {1, 2, 4, 8}) {
        auto res = adversarial_search(per, S, {{-m, m}});
        CHECK(res.max_ratio >= prev - 1e-12);
        prev = res.max_ratio;
    }

    geometry::BoxUnionSet small(1, {{{0.0}, {0.25}}}, std::vector<double>{1.0});
    geometry::BoxUnionSet big(1, {{{0.0}, {0.25}}, {{0.5}, {0.25}}}, std::vector<double>{1.0});
    auto r_small = adversarial_search(per, small, {{-6, 6}});
    auto r_big = adversarial_search(per, big, {{-6, 6}});
    CHECK(r_small.max_ratio >= r_big.max_ratio - 1e-12);

    CHECK_THROWS_AS(adversarial_search(per, geometry::BoxUnionSet::empty_set(1), {{-2, 2}}),
                    IndeterminateRatio);
}

TEST_CASE("builtin corpus shape and sampled verification", "[lsineq]") {
    auto cases = builtin_corpus();
    CHECK(cases.size() == 200);

    // deterministic regeneration
    auto again = builtin_corpus();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        CHECK(cases[i].seed == again[i].seed);
        CHECK(cases[i].name == again[i].name);
    }

    // a sampled subset passes with the default constant (the full run is part
    // of the acceptance suite)
    for (std::size_t i = 0; i < cases.size(); i += 23) {
        auto inst = corpus_instance(cases[i]);
        auto rep = verify_ls(inst, 3.5);
        INFO(cases[i].name);
        CHECK(rep.pass);
        CHECK(rep.margin > 0.0L);
    }
}
