#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "duality/epigraph.hpp"
#include "duality/grid.hpp"
#include "duality/models.hpp"
#include "duality/weights.hpp"

using namespace duality;

namespace {

// independent oracle for the scalar projection: the reduced objective
//   phi(z) = (z - zhat)^2 / 2 + ((z^2 - mhat)_+)^2 / 2
// is convex with the monotone derivative below; bisect it to roundoff
double scalar_project_oracle(double zhat, double mhat) {
    auto dphi = [&](double z) {
        return (z - zhat) + 2.0 * z * std::max(z * z - mhat, 0.0);
    };
    double lo = -8.0 - std::abs(zhat), hi = 8.0 + std::abs(zhat);
    while (dphi(lo) > 0.0) lo *= 2.0;
    while (dphi(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dphi(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Vec vec2(double a, double b) {
    Vec v(2);
    v[0] = a;
    v[1] = b;
    return v;
}

Vec vec3(double a, double b, double c) {
    Vec v(3);
    v[0] = a;
    v[1] = b;
    v[2] = c;
    return v;
}

}  // namespace

// ============================================================
// Negative part
// ============================================================

TEST_CASE("negative part splits the spectrum") {
    Mat m(2);
    m(0, 0) = 2.0;
    m(1, 1) = -3.0;
    const Mat neg = negative_part(m);
    CHECK(neg(0, 0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(neg(1, 1) == Catch::Approx(-3.0).margin(1e-14));
    CHECK(neg(0, 1) == Catch::Approx(0.0).margin(1e-14));

    // psd input has no negative part
    Mat p(2);
    p(0, 0) = 1.0;
    p(0, 1) = p(1, 0) = 0.5;
    p(1, 1) = 1.0;
    CHECK(negative_part(p).max_abs() <= 1e-14);

    // m = psd_clip(m) + negative_part(m) for random symmetric matrices
    std::mt19937_64 rng(7u);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        Mat a(3);
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) a(r, c) = a(c, r) = uni(rng);
        const Mat sum = psd_clip(a) + negative_part(a);
        CHECK((sum - a).max_abs() <= 1e-12);
        CHECK(lambda_max(negative_part(a)) <= 1e-12);
    }
}

// ============================================================
// Scalar projection
// ============================================================

TEST_CASE("scalar projection handles the canonical pairs") {
    const auto m = make_model("burgers");

    // the origin with an infeasible bound projects onto the vertex
    Vec zh(1);
    zh[0] = 0.0;
    Mat mh(1);
    mh(0, 0) = -1.0;
    const EpigraphResult at_vertex = project_epigraph(*m, zh, mh, 1e-6);
    CHECK(at_vertex.z[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(at_vertex.M(0, 0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(at_vertex.dist2 == Catch::Approx(1.0).margin(1e-12));

    // feasible pairs come back unchanged
    zh[0] = 0.3;
    mh(0, 0) = 0.5;
    const EpigraphResult inside = project_epigraph(*m, zh, mh, 1e-6);
    CHECK(inside.z[0] == 0.3);
    CHECK(inside.M(0, 0) == 0.5);
    CHECK(inside.dist2 == 0.0);

    // the boundary counts as feasible
    zh[0] = 1.0;
    mh(0, 0) = 1.0;
    const EpigraphResult boundary = project_epigraph(*m, zh, mh, 1e-6);
    CHECK(boundary.z[0] == 1.0);
    CHECK(boundary.M(0, 0) == 1.0);
    CHECK(boundary.dist2 == 0.0);
}

TEST_CASE("scalar projection matches the bisection oracle") {
    const auto m = make_model("burgers");
    const double cases[][2] = {{1.0, 0.25},  {-1.5, 1.0}, {0.7, -0.3},
                               {2.0, -2.0},  {-0.2, 0.01}, {3.0, 4.0}};
    for (const auto& c : cases) {
        Vec zh(1);
        zh[0] = c[0];
        Mat mh(1);
        mh(0, 0) = c[1];
        const EpigraphResult out = project_epigraph(*m, zh, mh, 1e-6);
        const double zstar = scalar_project_oracle(c[0], c[1]);
        CHECK(out.z[0] == Catch::Approx(zstar).margin(1e-9));
        CHECK(out.M(0, 0) == Catch::Approx(std::max(c[1], zstar * zstar))
                                 .margin(1e-9));
        const double dz = out.z[0] - c[0], dm = out.M(0, 0) - c[1];
        CHECK(out.dist2 == Catch::Approx(dz * dz + dm * dm).margin(1e-12));
    }

    std::mt19937_64 rng(21u);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double zh0 = uni(rng), mh0 = uni(rng);
        Vec zh(1);
        zh[0] = zh0;
        Mat mh(1);
        mh(0, 0) = mh0;
        const EpigraphResult out = project_epigraph(*m, zh, mh, 1e-6);
        const double zstar = scalar_project_oracle(zh0, mh0);
        CHECK(out.z[0] == Catch::Approx(zstar).margin(1e-8));
        CHECK(out.M(0, 0) >= out.z[0] * out.z[0] - 1e-12);
    }
}

// ============================================================
// Fluid projection
// ============================================================

TEST_CASE("fluid projection returns feasible optimal cells") {
    std::mt19937_64 rng(0x5eedu);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double rho_min = 1e-6;

    for (const char* name : {"barotropic", "qhd", "korteweg"}) {
        const auto m = make_model(name);
        const int n = m->state_dim(), N = m->flux_dim();
        for (int trial = 0; trial < 40; ++trial) {
            Vec zh = m->random_point(rng);
            // push some samples out of the domain so the solve has work to do
            if (trial % 3 == 0) zh[m->rho_component()] = 0.2 * uni(rng);
            Mat mh(N);
            for (int r = 0; r < N; ++r)
                for (int c = r; c < N; ++c) mh(r, c) = mh(c, r) = 1.5 * uni(rng);

            const EpigraphResult out = project_epigraph(*m, zh, mh, rho_min);
            const double scale = 1.0 + zh.max_abs() + mh.max_abs();

            // feasibility of the projected pair
            CHECK(out.z[m->rho_component()] >= rho_min * (1.0 - 1e-12));
            CHECK(m->in_domain(out.z));
            CHECK(lambda_min(out.M - m->flux(out.z)) >= -1e-10 * scale);
            CHECK(out.M.asym_norm() <= 1e-13 * scale);
            // M only moves upward in the Loewner order
            CHECK(lambda_min(out.M - mh) >= -1e-12 * scale);
            CHECK(out.dist2 >= 0.0);

            // convexity probe: no nearby admissible point does better
            const double fstar = detail::epi_value(*m, zh, mh, out.z);
            for (int probe = 0; probe < 10; ++probe) {
                Vec zp = out.z;
                for (int c = 0; c < n; ++c) zp[c] += 0.02 * uni(rng);
                if (!m->in_domain(zp) || zp[m->rho_component()] < rho_min) continue;
                CHECK(fstar <= detail::epi_value(*m, zh, mh, zp) + 1e-10 * scale);
            }

            // projecting the projection is a fixed point
            const EpigraphResult again =
                project_epigraph(*m, out.z, out.M, rho_min);
            CHECK((again.z - out.z).max_abs() <= 1e-6 * scale);
            CHECK(again.dist2 <= 1e-10 * scale * scale);

            // a warm start from the solution reproduces it
            const EpigraphResult warm =
                project_epigraph(*m, zh, mh, rho_min, &out.z);
            CHECK((warm.z - out.z).max_abs() <= 1e-6 * scale);
        }
    }
}

// ============================================================
// Dual density: scalar closed forms
// ============================================================

TEST_CASE("scalar dual density has the quadratic closed form") {
    const auto m = make_model("burgers");
    std::mt19937_64 rng(11u);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double e = uni(rng), p = 0.1 + std::abs(uni(rng));
        Vec E(1);
        E[0] = e;
        Mat P(1);
        P(0, 0) = p;
        const DualDensityResult d = dual_density(*m, E, P, 1e-6);
        REQUIRE(!d.unbounded);
        CHECK(d.value == Catch::Approx(-0.5 * e * e / p).margin(1e-14));
        CHECK(d.argmin[0] == Catch::Approx(-e / p).margin(1e-14));
    }

    // degenerate slab: no curvature and a tilt means no lower bound
    Vec E(1);
    Mat P(1);
    E[0] = 0.7;
    P(0, 0) = 0.0;
    CHECK(dual_density(*m, E, P, 1e-6).unbounded);
    E[0] = 0.0;
    const DualDensityResult flat = dual_density(*m, E, P, 1e-6);
    CHECK(!flat.unbounded);
    CHECK(flat.value == 0.0);

    // an indefinite quadratic form is rejected outright
    P(0, 0) = -0.1;
    CHECK(dual_density(*m, E, P, 1e-6).unbounded);
}

TEST_CASE("dual density integrates to the constant-field closed forms") {
    // flat unit weight on [0, 1): P = h I + 2B with B = 0 is the identity,
    // so each cell contributes -E^2/2 and the total is -E^2 T / 2
    const auto m = make_model("burgers");
    const int nx = 16, nt = 8;
    const double T = 1.0;
    const SpaceTimeGrid g(nx, nt, T);
    const WeightProfile w(0.0, 1.0, T);

    auto total = [&](double e) {
        double acc = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double h = w.h(g.t_slab(j));
            Vec E(1);
            E[0] = e;
            Mat P(1);
            P(0, 0) = h;
            for (int i = 0; i < nx; ++i) {
                const DualDensityResult d = dual_density(*m, E, P, 1e-6);
                REQUIRE(!d.unbounded);
                acc += d.value * g.dx() * g.dt();
            }
        }
        return acc;
    };

    CHECK(total(1.0) == Catch::Approx(-0.5).margin(1e-12));
    CHECK(total(0.0) == 0.0);

    std::mt19937_64 rng(31u);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double c = uni(rng);
        CHECK(total(c) == Catch::Approx(-0.5 * c * c * T).margin(1e-12));
    }
}

// ============================================================
// Dual density: fluid stationarity
// ============================================================

TEST_CASE("fluid dual density finds the designed argmin") {
    // pick E = -h v#(z0) with P = h I: the cell integrand z . E + h K(z) is
    // strictly convex with gradient h (v#(z) - v#(z0)), so z0 is the argmin
    struct Case {
        const char* name;
        Vec z0;
    };
    const Case cases[] = {{"barotropic", vec2(0.4, 1.3)},
                          {"qhd", vec3(0.3, -0.2, 1.1)}};
    const double h = 0.8;

    for (const auto& tc : cases) {
        const auto m = make_model(tc.name);
        const int n = m->state_dim(), N = m->flux_dim();
        const Vec sharp0 = m->sharp(tc.z0);
        Vec E(n);
        for (int c = 0; c < n; ++c) E[c] = -h * sharp0[c];
        Mat P(N);
        for (int r = 0; r < N; ++r) P(r, r) = h;

        const DualDensityResult d = dual_density(*m, E, P, 1e-6);
        REQUIRE(!d.unbounded);
        CHECK((d.argmin - tc.z0).max_abs() <= 1e-5);
        const double ref = tc.z0.dot(E) + 0.5 * m->flux(tc.z0).ddot(P);
        CHECK(d.value == Catch::Approx(ref).margin(1e-9));
        CHECK(d.value <= ref);  // reported value never overstates the infimum

        // probe convexity around the argmin
        std::mt19937_64 rng(0xabcdu);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int probe = 0; probe < 30; ++probe) {
            Vec zp = d.argmin;
            for (int c = 0; c < n; ++c) zp[c] += 0.05 * uni(rng);
            if (!m->in_domain(zp)) continue;
            const double fp = zp.dot(E) + 0.5 * m->flux(zp).ddot(P);
            CHECK(d.value <= fp + 1e-12);
        }
    }
}

TEST_CASE("fluid dual density flags indefinite quadratic forms") {
    const auto m = make_model("barotropic");
    Vec E(2);
    E[0] = 0.2;
    E[1] = -0.1;
    Mat P(2);
    P(0, 0) = 1.0;
    P(1, 1) = -0.05;  // one bad eigenvalue sinks the cell
    CHECK(dual_density(*m, E, P, 1e-6).unbounded);
}
