#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "duality/burgers_exact.hpp"
#include "duality/errors.hpp"
#include "duality/series.hpp"

using namespace duality;

namespace {

TrigSeries unit_sine() {
    TrigSeries s;
    s.terms.push_back({1.0, 1, 0.0});
    return s;
}

std::vector<double> midpoints(int nx) {
    std::vector<double> xs(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i) xs[static_cast<size_t>(i)] = (i + 0.5) / nx;
    return xs;
}

// characteristics fixed point v = v0(x - t v), a contraction for t below the
// first shock time; independent of the Hopf-Lax machinery under test
double characteristics_value(const TrigSeries& v0, double t, double x) {
    double v = 0.0;
    for (int it = 0; it < 400; ++it) v = v0.value(x - t * v);
    return v;
}

double tangency_abscissa() {
    // the double tangent of y^2/2 + T phi(y) for sine data at T = 1/2 is
    // symmetric about 1/2, so the chord slope is 1/2 and the contact point
    // solves a + T sin(2 pi a) = 1/2 on (0, 1/4)
    double lo = 0.01, hi = 0.25;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = mid + 0.5 * std::sin(TrigSeries::two_pi * mid) - 0.5;
        (g < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// ============================================================
// Envelope gaps
// ============================================================

TEST_CASE("double-tangent gap matches the scalar tangency equation") {
    SubstituteProfile prof(unit_sine(), 0.5);
    REQUIRE(prof.gaps().size() == 1);
    const BurgersGap& g = prof.gaps()[0];

    const double a_oracle = tangency_abscissa();
    CHECK(std::abs(g.a - a_oracle) < 1e-11);
    CHECK(std::abs(g.b - (1.0 - a_oracle)) < 1e-11);
    CHECK(std::abs(g.c - 0.5) < 1e-12);

    // frozen values, independently reproduced by the bisection above
    CHECK(g.a == Catch::Approx(0.131757775879242).margin(1e-12));
    CHECK(g.b == Catch::Approx(0.868242224120758).margin(1e-12));

    CHECK(prof.closure() < 1e-12);
    CHECK(prof.max_atom_mass() < 1e-12);
    CHECK(prof.horizon() == 0.5);
}

TEST_CASE("pure second harmonic builds two translated gaps") {
    TrigSeries v2;
    v2.terms.push_back({1.0, 2, 0.3});
    SubstituteProfile prof(v2, 0.5);
    REQUIRE(prof.gaps().size() == 2);
    const BurgersGap& g0 = prof.gaps()[0];
    const BurgersGap& g1 = prof.gaps()[1];
    // the data is 1/2-periodic, so the second gap is the first shifted by 1/2
    CHECK(std::abs((g1.a - g0.a) - 0.5) < 1e-9);
    CHECK(std::abs((g1.b - g0.b) - 0.5) < 1e-9);
    CHECK(std::abs((g1.c - g0.c) - 0.5) < 1e-9);
    CHECK(prof.closure() < 1e-12);
    CHECK(prof.max_atom_mass() < 1e-12);

    SubstituteReport rep = verify_substitute(prof, 256, 64);
    CHECK(rep.gap_count == 2);
    CHECK(rep.min_rho > -1e-12);
    CHECK(rep.mass_error < 1e-12);
    CHECK(rep.oleinik_excess == 0.0);
}

// ============================================================
// Trivial and pre-shock reductions
// ============================================================

TEST_CASE("zero data gives the zero substitute") {
    TrigSeries zero;
    SubstituteProfile prof(zero, 0.5);
    CHECK(prof.gaps().empty());
    const std::vector<double> xs = midpoints(64);
    std::vector<double> v;
    prof.slice(0.2, xs, v);
    for (double vi : v) CHECK(vi == 0.0);

    SubstituteReport rep = verify_substitute(prof, 64, 32);
    CHECK(rep.continuity == 0.0);
    CHECK(rep.direction == 0.0);
    CHECK(rep.recovery == 0.0);
    // the terminal comparison inherits the minimizer-location tolerance
    CHECK(rep.terminal_l1 < 1e-11);
    CHECK(rep.min_rho == 0.0);
}

TEST_CASE("before the first shock the substitute is the data itself") {
    const TrigSeries v0 = unit_sine();
    SubstituteProfile prof(v0, 0.1);  // 0.1 < 1/(2 pi)
    CHECK(prof.gaps().empty());

    for (int i = 0; i < 97; ++i) {
        const double x = i / 97.0;
        CHECK(std::abs(prof.v0T(x) - v0.value(x)) < 1e-13);
    }

    // interior slices follow exact characteristics
    const std::vector<double> xs = midpoints(129);
    std::vector<double> v;
    prof.slice(0.06, xs, v);
    double worst = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        worst = std::max(worst, std::abs(v[i] - characteristics_value(
                                                    v0, 0.06, xs[i])));
    CHECK(worst < 1e-9);

    SubstituteReport rep = verify_substitute(prof, 256, 256);
    CHECK(rep.gap_count == 0);
    CHECK(rep.continuity < 1e-6);
    CHECK(rep.direction < 1e-6);
    CHECK(rep.recovery < 1e-5);
    CHECK(rep.min_rho > -1e-13);
}

// ============================================================
// Entropy solution oracle checks
// ============================================================

TEST_CASE("entropy solution matches characteristics before the shock") {
    const TrigSeries v0 = unit_sine();
    const std::vector<double> xs = midpoints(257);
    const std::vector<double> v = lax_oleinik_slice(
        [&](double y) { return v0.antideriv(y); }, 2.0, 0.1, xs);
    double worst = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        worst = std::max(worst,
                         std::abs(v[i] - characteristics_value(v0, 0.1, xs[i])));
    CHECK(worst < 1e-8);
}

TEST_CASE("post-shock entropy solution is odd about the shock point") {
    const TrigSeries v0 = unit_sine();
    const int nx = 1024;
    const std::vector<double> xs = midpoints(nx);
    const std::vector<double> v = lax_oleinik_slice(
        [&](double y) { return v0.antideriv(y); }, 2.0, 0.5, xs);

    // odd symmetry about x = 1/2 (midpoint sampling pairs i with nx-1-i)
    double worst = 0.0;
    for (int i = 0; i < nx / 2; ++i)
        worst = std::max(worst, std::abs(v[static_cast<size_t>(i)] +
                                         v[static_cast<size_t>(nx - 1 - i)]));
    CHECK(worst < 1e-8);

    // a genuine downward jump at the shock, positive left and negative right
    CHECK(v[static_cast<size_t>(nx / 2 - 8)] > 0.2);
    CHECK(v[static_cast<size_t>(nx / 2 + 8)] < -0.2);

    // one-sided Lipschitz (Oleinik) bound away from roundoff
    const double dx = 1.0 / nx;
    double steep = -1e300;
    for (int i = 0; i < nx; ++i) {
        const double dv = (v[static_cast<size_t>((i + 1) % nx)] -
                           v[static_cast<size_t>(i)]) /
                          dx;
        steep = std::max(steep, dv);
    }
    CHECK(steep <= 1.0 / 0.5 + 1e-8);
}

// ============================================================
// Terminal trace and interior structure
// ============================================================

TEST_CASE("substitute terminal slice equals the entropy solution") {
    SubstituteProfile prof(unit_sine(), 0.5);
    const int nx = 1024;
    const std::vector<double> xs = midpoints(nx);
    std::vector<double> vterm;
    prof.slice(0.5, xs, vterm);
    const std::vector<double> vlo = lax_oleinik_slice(
        [&](double y) { return unit_sine().antideriv(y); }, 2.0, 0.5, xs);
    double l1 = 0.0;
    for (int i = 0; i < nx; ++i)
        l1 += std::abs(vterm[static_cast<size_t>(i)] -
                       vlo[static_cast<size_t>(i)]) /
              nx;
    CHECK(l1 < 1e-9);
}

TEST_CASE("transported gap carries an affine profile and zero density") {
    const TrigSeries v0 = unit_sine();
    SubstituteProfile prof(v0, 0.5);
    const BurgersGap& g = prof.gaps()[0];
    const double t = 0.25, T = 0.5;
    const double A = g.a + t * v0.value(g.a);
    const double B = g.b + t * v0.value(g.b);
    REQUIRE(A < B);

    const int nx = 2048;
    const double dx = 1.0 / nx;
    const std::vector<double> xs = midpoints(nx);
    std::vector<double> v;
    prof.slice(t, xs, v);

    double worst_rho = 0.0, worst_slope = 0.0, vmax = 0.0;
    for (int i = 0; i < nx; ++i) {
        vmax = std::max(vmax, std::abs(v[static_cast<size_t>(i)]));
        const double x = xs[static_cast<size_t>(i)];
        if (x < A + 4 * dx || x > B - 4 * dx) continue;
        const double dv = (v[static_cast<size_t>((i + 1) % nx)] -
                           v[static_cast<size_t>((i + nx - 1) % nx)]) /
                          (2.0 * dx);
        worst_rho = std::max(worst_rho, std::abs(1.0 + (T - t) * dv));
        worst_slope = std::max(worst_slope, std::abs(dv + 1.0 / (T - t)));
    }
    CHECK(worst_rho < 1e-10);
    CHECK(worst_slope < 1e-10);
    CHECK(vmax <= 1.0 + 1e-12);  // maximum principle against the data bound

    // density is strictly positive well inside the contact region
    const int i_contact = static_cast<int>(0.99 * nx);  // x near 0.99
    const double dv_c = (v[static_cast<size_t>((i_contact + 1) % nx)] -
                         v[static_cast<size_t>((i_contact + nx - 1) % nx)]) /
                        (2.0 * dx);
    CHECK(1.0 + (T - t) * dv_c > 0.5);
}

// ============================================================
// Weak residuals under refinement
// ============================================================

TEST_CASE("proposition residuals decay under refinement") {
    SubstituteProfile prof(unit_sine(), 0.5);
    const SubstituteReport c = verify_substitute(prof, 512, 128);
    const SubstituteReport f = verify_substitute(prof, 1024, 256);

    CHECK(c.continuity < 1.5e-4);
    CHECK(f.continuity < 2.5e-5);
    CHECK(f.direction < 1.0e-5);
    CHECK(f.recovery < 2.5e-5);
    CHECK(f.continuity * 2.0 < c.continuity);
    CHECK(f.direction * 2.0 < c.direction);
    CHECK(f.recovery * 2.0 < c.recovery);

    for (const SubstituteReport* r : {&c, &f}) {
        CHECK(r->gap_count == 1);
        CHECK(r->mass_error < 1e-12);
        CHECK(r->min_rho > -1e-12);
        CHECK(r->oleinik_excess == 0.0);
        CHECK(r->terminal_l1 < 1e-9);
        CHECK(r->closure < 1e-12);
        CHECK(r->max_atom_mass < 1e-12);
    }
}

TEST_CASE("two-mode data keeps the same decay behavior") {
    TrigSeries v2;
    v2.terms.push_back({1.0, 1, 0.0});
    v2.terms.push_back({0.35, 2, 1.1});
    SubstituteProfile prof(v2, 0.5);
    REQUIRE(prof.gaps().size() == 1);
    CHECK(prof.gaps()[0].a == Catch::Approx(0.079372862630394).margin(1e-9));
    CHECK(prof.gaps()[0].b == Catch::Approx(0.880284808871781).margin(1e-9));
    CHECK(prof.gaps()[0].c == Catch::Approx(0.469809625172949).margin(1e-9));

    const SubstituteReport c = verify_substitute(prof, 512, 128);
    const SubstituteReport f = verify_substitute(prof, 1024, 256);
    CHECK(f.continuity < 2.5e-5);
    CHECK(f.direction < 1.0e-5);
    CHECK(f.recovery < 2.5e-5);
    CHECK(f.continuity * 2.0 < c.continuity);
    CHECK(f.direction * 2.0 < c.direction);
    CHECK(f.recovery * 2.0 < c.recovery);
    CHECK(f.min_rho > -1e-12);
    CHECK(f.terminal_l1 < 1e-9);
}

// ============================================================
// Preconditions
// ============================================================

TEST_CASE("substitute preconditions are enforced") {
    CHECK_THROWS_AS(SubstituteProfile(unit_sine(), 0.0), ConfigError);
    CHECK_THROWS_AS(SubstituteProfile(unit_sine(), -1.0), ConfigError);

    TrigSeries biased = unit_sine();
    biased.constant = 0.3;
    CHECK_THROWS_AS(SubstituteProfile(biased, 0.5), PreconditionError);

    SubstituteProfile prof(unit_sine(), 0.5);
    const std::vector<double> xs = midpoints(8);
    std::vector<double> v;
    CHECK_THROWS_AS(prof.slice(-0.1, xs, v), PreconditionError);
    CHECK_THROWS_AS(prof.slice(0.6, xs, v), PreconditionError);
    CHECK_THROWS_AS(
        lax_oleinik_slice([](double) { return 0.0; }, 1.0, 0.0, xs),
        PreconditionError);
}
