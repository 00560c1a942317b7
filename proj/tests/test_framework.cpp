#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "duality/errors.hpp"
#include "duality/framework.hpp"
#include "duality/manufacture.hpp"
#include "duality/models.hpp"
#include "duality/weights.hpp"

using namespace duality;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

// ============================================================
// Weight profiles
// ============================================================

TEST_CASE("weight profile closed forms") {
    const WeightProfile flat(0.0, 0.7, 1.5);
    CHECK(flat.h(0.3) == 0.7);
    CHECK(flat.H(0.3) == Catch::Approx(0.7 * 1.2).margin(1e-15));
    CHECK(flat.H(1.5) == 0.0);
    CHECK(flat.slack(0.9) == Catch::Approx(-0.7).margin(1e-15));

    const WeightProfile w(2.0, 0.7, 1.5);
    CHECK(w.h(0.4) == Catch::Approx(0.7 * std::exp(-0.8)).margin(1e-15));
    CHECK(w.H(1.5) == 0.0);
    for (double t : {0.0, 0.2, 0.7, 1.1, 1.4999}) {
        // H' = -h through a centered difference
        const double eps = 1e-6;
        const double fd = (w.H(t + eps) - w.H(std::max(0.0, t - eps))) /
                          (eps + std::min(t, eps));
        CHECK(fd == Catch::Approx(-w.h(t)).epsilon(1e-6));
        CHECK(w.slack(t) <= 1e-15);
    }

    // the relative-entropy slack holds for steep profiles too
    const WeightProfile steep(40.0, 2.0, 0.25);
    for (int s = 0; s <= 100; ++s) CHECK(steep.slack(0.25 * s / 100.0) <= 1e-15);
}

TEST_CASE("weight profile rejects malformed parameters") {
    CHECK_THROWS_AS(WeightProfile(0.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(WeightProfile(0.0, 1.0, -1.0), ConfigError);
    CHECK_THROWS_AS(WeightProfile(0.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(WeightProfile(-0.5, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(WeightProfile(std::nan(""), 1.0, 1.0), ConfigError);
}

TEST_CASE("adapted tail weight at the scalar wave parameters") {
    // gamma = 2 pi / (1 - 0.2 pi) for the unit sine wave at T = 0.1; the
    // tail weight at zero feeds the certificate objective H(0) K0
    const double gamma = kTwoPi / (1.0 - 0.2 * 3.14159265358979323846);
    CHECK(gamma == Catch::Approx(16.90475804273079).margin(1e-11));
    const WeightProfile w(gamma, 1.0, 0.1);
    CHECK(w.H(0.0) == Catch::Approx(0.04824489343415047).margin(1e-13));
}

// ============================================================
// Record bookkeeping
// ============================================================

TEST_CASE("stationary records carry exact entropy timelines") {
    const auto m = make_model("barotropic");
    const StrongSolutionRecord rec = manufacture_stationary(*m, 32, 8, 0.5);
    CHECK(rec.K0 == Catch::Approx(1.0).margin(1e-13));  // U(1) over one period
    const std::vector<double> timeline = rec.entropy_timeline();
    REQUIRE(timeline.size() == 9);
    for (double k : timeline) CHECK(k == rec.K0);
    CHECK(rec.entropy_drift() == 0.0);
    CHECK(rec.v_node.slices == 9);
    CHECK(rec.v_half.slices == 8);
    CHECK(rec.pi_node.slices == 0);  // no side constraint for this model
}

// ============================================================
// Sharp residual
// ============================================================

TEST_CASE("sharp residual vanishes on stationary data with flat weights") {
    for (const char* name : {"barotropic", "qhd", "korteweg"}) {
        const auto m = make_model(name);
        const StrongSolutionRecord rec = manufacture_stationary(*m, 24, 6, 0.4);
        const Stencils st(2, rec.grid.dx());
        const WeightProfile w(0.0, 1.0, 0.4);
        CHECK(sharp_residual(rec, w, st) <= 1e-12);
    }
}

TEST_CASE("sharp residual decays at second order on the scalar wave") {
    const auto m = make_model("burgers");
    TrigSeries v0;
    v0.terms.push_back({1.0, 1, 0.0});

    auto residual = [&](int nx, int nt) {
        const StrongSolutionRecord rec =
            manufacture_burgers_characteristics(*m, v0, nx, nt, 0.1);
        const Stencils st(2, rec.grid.dx());
        const WeightProfile w = adapt_weight(rec, st);
        return sharp_residual(rec, w, st);
    };

    const double coarse = residual(64, 32);
    const double fine = residual(128, 64);
    CHECK(fine < coarse);
    CHECK(coarse / fine >= 3.0);  // O(dx^2 + dt^2) under joint refinement
    CHECK(fine <= 0.1);
}

// ============================================================
// Weight adaptation
// ============================================================

TEST_CASE("adapted weight tracks the steepest characteristic slope") {
    const auto m = make_model("burgers");
    TrigSeries v0;
    v0.terms.push_back({1.0, 1, 0.0});
    const StrongSolutionRecord rec =
        manufacture_burgers_characteristics(*m, v0, 512, 128, 0.1);
    const Stencils st(4, rec.grid.dx());
    const WeightProfile w = adapt_weight(rec, st);

    // analytic: the slope of the steepening wave at t = T is
    // -2 pi / (1 - 2 pi T), and gamma doubles the most negative half
    CHECK(w.gamma == Catch::Approx(16.90475804273079).epsilon(0.02));
    CHECK(w.T == 0.1);
    CHECK(w.amp == 1.0);
    for (int s = 0; s <= 50; ++s) CHECK(w.slack(0.1 * s / 50.0) <= 1e-15);

    // the minimum eigenvalue scan is the negative half of gamma
    CHECK(scan_lstar_min_eig(rec, st) ==
          Catch::Approx(-0.5 * w.gamma).margin(1e-12));
}

TEST_CASE("adapted weight degenerates to zero for stationary flows") {
    for (const char* name : {"burgers", "barotropic", "qhd"}) {
        const auto m = make_model(name);
        const StrongSolutionRecord rec = manufacture_stationary(*m, 16, 4, 0.3);
        const Stencils st(2, rec.grid.dx());
        const WeightProfile w = adapt_weight(rec, st, 2.5);
        CHECK(w.gamma == 0.0);
        CHECK(w.amp == 2.5);
    }
}
