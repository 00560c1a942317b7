// Acceptance harness: one line per criterion, PASS or FAIL with the measured
// numbers inline. Exit status is the number of failed criteria. Tolerances
// are pinned here in code; every oracle value is computed independently of
// the code path under test (closed forms, characteristics, scalar bisection).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "duality/duality.hpp"

using namespace duality;

namespace {

double now_s() {
    using clk = std::chrono::steady_clock;
    return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

TrigSeries unit_sine() {
    TrigSeries s;
    s.terms.push_back({1.0, 1, 0.0});
    return s;
}

int g_failures = 0;

void report(const char* tag, bool pass, const std::string& detail) {
    std::printf("%s: %s (%s)\n", tag, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ============================================================
// 1. Consistency value of the certificate pair
// ============================================================

void criterion_1() {
    const double t0 = now_s();
    const auto m = make_model("burgers");
    double rel[2] = {0.0, 0.0};
    int idx = 0;
    for (int nx : {128, 256}) {
        const StrongSolutionRecord rec =
            manufacture_burgers_characteristics(*m, unit_sine(), nx, nx, 0.1);
        const Stencils st(2, rec.grid.dx());
        const WeightProfile w = adapt_weight(rec, st);
        const CertificatePair pair = build_certificate(rec, w, st);
        const CertificateReport rep = verify_certificate(rec, w, st, pair);
        rel[idx++] = rep.objective_rel_error;
    }
    const double elapsed = now_s() - t0;
    const double ratio = rel[0] / std::max(rel[1], 1e-300);
    const bool pass =
        rel[1] <= 1e-3 && ratio >= 1.7 && elapsed <= 60.0;
    report("criterion 1 (consistency value)", pass,
           fmt("rel128=%.3e rel256=%.3e ratio=%.2f elapsed=%.1fs; need "
               "rel256<=1e-3, ratio>=1.7, <=60s",
               rel[0], rel[1], ratio, elapsed));
}

// ============================================================
// 2. No duality gap on the two reference scenarios
// ============================================================

void criterion_2() {
    // barotropic stationary state, flat weight
    const auto mb = make_model("barotropic");
    const int nxb = 32, ntb = 32;
    const Stencils stb(2, 1.0 / nxb);
    const StateField icb = solver_initial_data(*mb, stb, nxb, "stationary");
    const WeightProfile wb(0.0, 1.0, 0.5);
    SolverOptions ob;
    ob.max_iters = 20000;
    ob.check_every = 250;
    ob.tol_gap_abs = 4.9e-4;  // gap/primal <= 1e-3 at primal ~ 0.5
    ob.tol_gap_rel = 0.0;
    const DualResult rb =
        solve_dual(*mb, stb, SpaceTimeGrid(nxb, ntb, 0.5), icb, wb, ob);
    const double gap_over_primal =
        (rb.primal_value - rb.dual_value) / std::max(rb.primal_value, 1e-300);
    const bool pass_b = rb.converged && gap_over_primal <= 1e-3 &&
                        std::abs(rb.primal_value - 0.5) <= 1e-3;

    // scalar wave data on the adapted weight
    const auto ms = make_model("burgers");
    const int nxs = 64;
    const Stencils sts(2, 1.0 / nxs);
    const StrongSolutionRecord recs =
        manufacture_burgers_characteristics(*ms, unit_sine(), nxs, nxs, 0.1);
    const WeightProfile ws = adapt_weight(recs, sts);
    const StateField ics = solver_initial_data(*ms, sts, nxs, "wave");
    SolverOptions os;
    os.max_iters = 50000;
    os.check_every = 250;
    os.tol_gap_abs = 1e-3;
    os.tol_gap_rel = 0.0;
    const double t1 = now_s();
    const DualResult rs =
        solve_dual(*ms, sts, SpaceTimeGrid(nxs, nxs, 0.1), ics, ws, os);
    const double el = now_s() - t1;
    const bool pass_s =
        rs.converged && rs.gap <= 1e-3 && rs.iterations <= 50000;

    report("criterion 2 (no duality gap)", pass_b && pass_s,
           fmt("stationary: primal=%.6f gap/primal=%.2e iters=%d; scalar: "
               "gap=%.3e iters=%d (%.1fs); need primal=0.5+-1e-3, rel "
               "gap<=1e-3, scalar gap<=1e-3 within 5e4 iters",
               rb.primal_value, gap_over_primal, rb.iterations, rs.gap,
               rs.iterations, el));
}

// ============================================================
// 3. Nonnegativity and weak duality over the test matrix
// ============================================================

void criterion_3() {
    bool pass = true;
    double worst_dual = 1e300, worst_slack = 1e300;
    int entries = 0;
    for (const char* name : {"burgers", "barotropic", "qhd"}) {
        const auto m = make_model(name);
        const int nx = 16, nt = 8;
        const Stencils st(2, 1.0 / nx);
        for (const char* sc : {"stationary", "acoustic", "wave"}) {
            const StateField ic = solver_initial_data(*m, st, nx, sc);
            const WeightProfile w(6.0, 1.0, 0.25);
            SolverOptions opt;
            opt.max_iters = 400;
            opt.check_every = 100;
            opt.tol_gap_abs = 0.0;
            opt.tol_gap_rel = 0.0;
            const DualResult r =
                solve_dual(*m, st, SpaceTimeGrid(nx, nt, 0.25), ic, w, opt);
            for (const GapEntry& e : r.timeline) {
                ++entries;
                worst_dual = std::min(worst_dual, e.dual);
                worst_slack = std::min(worst_slack, e.primal - e.dual + 1e-8);
                if (e.dual < 0.0 || e.primal < e.dual - 1e-8) pass = false;
            }
        }
    }
    report("criterion 3 (J>=0 and weak duality)", pass,
           fmt("%d recorded iterates over 3 models x 3 scenarios; min dual="
               "%.3e, min primal-dual+1e-8=%.3e; need dual>=0 and "
               "primal>=dual-1e-8",
               entries, worst_dual, worst_slack));
}

// ============================================================
// 4. Shock-free substitute at scale
// ============================================================

// terminal distance to the entropy solution computed from the original
// potential, independent of the substitute's own envelope bookkeeping
double terminal_l1_vs_entropy(const SubstituteProfile& prof, int nx) {
    std::vector<double> xs(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i) xs[static_cast<size_t>(i)] = (i + 0.5) / nx;
    std::vector<double> vterm;
    prof.slice(prof.horizon(), xs, vterm);
    const TrigSeries v0 = prof.data();
    const std::vector<double> vlo = lax_oleinik_slice(
        [&](double y) { return v0.antideriv(y); }, 2.0, prof.horizon(), xs);
    double l1 = 0.0;
    for (int i = 0; i < nx; ++i)
        l1 += std::abs(vterm[static_cast<size_t>(i)] -
                       vlo[static_cast<size_t>(i)]) /
              nx;
    return l1;
}

// an error either shrinks at a credible first-order rate, or has already
// converged past the point where rates mean anything (both values at or
// below 1% of the acceptance threshold)
bool improves(double coarse, double fine, double threshold) {
    const double ratio = coarse / std::max(fine, 1e-300);
    if (ratio >= 1.7 && ratio <= 2.3) return true;
    return coarse <= 0.01 * threshold && fine <= 0.01 * threshold;
}

void criterion_4() {
    const double t0 = now_s();
    SubstituteProfile prof(unit_sine(), 0.5);
    const SubstituteReport rc = verify_substitute(prof, 2048, 512);
    const SubstituteReport rf = verify_substitute(prof, 4096, 1024);
    const double term_c = terminal_l1_vs_entropy(prof, 2048);
    const double term_f = terminal_l1_vs_entropy(prof, 4096);
    const double dx_f = 1.0 / 4096;

    const bool bounds = term_f <= 5.0 * dx_f && rf.min_rho >= -1e-12 &&
                        rf.recovery <= 1e-3 && rc.min_rho >= -1e-12;
    const bool impr = improves(term_c, term_f, 5.0 * dx_f) &&
                      improves(rc.recovery, rf.recovery, 1e-3) &&
                      std::max(0.0, -rc.min_rho) <= 1e-12 &&
                      std::max(0.0, -rf.min_rho) <= 1e-12;
    report("criterion 4 (shock-free substitute)", bounds && impr,
           fmt("termL1=%.2e (5dx=%.2e), min_rho=%.1e, recovery=%.2e@4096x1024; "
               "ratios term=%.2f rec=%.2f (converged floors accepted); %.1fs",
               term_f, 5.0 * dx_f, rf.min_rho, rf.recovery, term_c / term_f,
               rc.recovery / rf.recovery, now_s() - t0));
}

// ============================================================
// 5. Conservativity on random constraint-consistent fields
// ============================================================

std::vector<double> random_field(const Model& m, const Stencils& st, int nx,
                                 std::mt19937_64& rng) {
    const int n = m.state_dim();
    std::uniform_real_distribution<double> amp(-0.5, 0.5);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * 3.14159265358979324);
    auto draw_series = [&](double scale) {
        TrigSeries s;
        for (int k = 1; k <= 3; ++k) {
            double a = amp(rng) * scale / k;
            if (std::abs(a) < 0.02 * scale)
                a = (a < 0 ? -1.0 : 1.0) * 0.02 * scale;
            s.terms.push_back({a, k, ph(rng)});
        }
        return s;
    };
    std::vector<double> out(static_cast<size_t>(nx) * n);
    auto x_of = [&](int i) { return (i + 0.5) * st.dx; };
    const Vec base = m.stationary_point();
    if (n == 1) {
        const TrigSeries s = draw_series(1.0);
        for (int i = 0; i < nx; ++i)
            out[static_cast<size_t>(i)] = s.value(x_of(i));
        return out;
    }
    const int rc = m.rho_component();
    const TrigSeries srho = draw_series(0.4), smom = draw_series(0.5);
    std::vector<double> line(static_cast<size_t>(nx)),
        dline(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        for (int c = 0; c < n; ++c)
            out[static_cast<size_t>(i) * n + c] = base[c];
        out[static_cast<size_t>(i) * n + rc] = base[rc] + srho.value(x_of(i));
        out[static_cast<size_t>(i) * n + 0] = smom.value(x_of(i));
    }
    if (n == 3) {  // G matches the discrete derivative of rho
        for (int i = 0; i < nx; ++i)
            line[static_cast<size_t>(i)] = out[static_cast<size_t>(i) * n + rc];
        st.d1.apply_line(line.data(), dline.data(), nx);
        for (int i = 0; i < nx; ++i)
            out[static_cast<size_t>(i) * n + 1] = dline[static_cast<size_t>(i)];
    }
    if (n == 4) {  // independent xi component, G = d1(xi)
        const TrigSeries sxi = draw_series(0.4);
        for (int i = 0; i < nx; ++i)
            line[static_cast<size_t>(i)] = base[2] + sxi.value(x_of(i));
        st.d1.apply_line(line.data(), dline.data(), nx);
        for (int i = 0; i < nx; ++i) {
            out[static_cast<size_t>(i) * n + 2] = line[static_cast<size_t>(i)];
            out[static_cast<size_t>(i) * n + 1] = dline[static_cast<size_t>(i)];
        }
    }
    return out;
}

void criterion_5() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"burgers", "barotropic", "qhd", "korteweg"}) {
        const auto m = make_model(name);
        std::mt19937_64 rng(20260819u);
        double worst = 0.0, worst_order = 1e300;
        for (int trial = 0; trial < 20; ++trial) {
            std::mt19937_64 r1(rng()), r2 = r1;  // same field on both grids
            const Stencils s1(4, 1.0 / 256), s2(4, 1.0 / 512);
            const auto f1 = random_field(*m, s1, 256, r1);
            const auto f2 = random_field(*m, s2, 512, r2);
            const double e1 = std::abs(
                conservativity_residual(*m, s1, f1.data(), 256, 1.0 / 256));
            const double e2 = std::abs(
                conservativity_residual(*m, s2, f2.data(), 512, 1.0 / 512));
            worst = std::max(worst, e1);
            worst_order =
                std::min(worst_order, std::log2(e1 / std::max(e2, 1e-300)));
        }
        if (worst > 1e-5 || worst_order < 3.5) pass = false;
        detail += fmt("%s%s %.1e/o%.2f", detail.empty() ? "" : ", ", name,
                      worst, worst_order);
    }
    report("criterion 5 (conservativity)", pass,
           detail + "; need <=1e-5 at Nx=256 and order>=3.5");
}

// ============================================================
// 6. Framework property suite
// ============================================================

void criterion_6() {
    bool pass = true;
    double worst_rt = 0.0, worst_lowner = 0.0, worst_li = 0.0, worst_adj = 0.0;
    for (const char* name : {"burgers", "barotropic", "qhd", "korteweg"}) {
        const auto m = make_model(name);
        const ModelValidation val = validate_model(*m, 32, 1000, 20260819u);
        worst_rt = std::max(worst_rt, val.roundtrip);
        worst_lowner = std::min(worst_lowner, val.lowner_margin);
        worst_li = std::max(worst_li, val.l_of_identity);
        worst_adj =
            std::max({worst_adj, val.adjoint_L, val.adjoint_constraint});
        if (val.roundtrip > 1e-10 || val.lowner_margin < -1e-10 ||
            val.l_of_identity != 0.0 || val.adjoint_L > 1e-12 ||
            val.adjoint_constraint > 1e-12)
            pass = false;
    }

    // entropy conservation of one manufactured strong solution per model
    double worst_drift = 0.0;
    {
        const auto m = make_model("burgers");
        const StrongSolutionRecord rec =
            manufacture_burgers_characteristics(*m, unit_sine(), 128, 128, 0.1);
        worst_drift = std::max(worst_drift, rec.entropy_drift());
    }
    {
        const auto m = make_model("barotropic");
        const Stencils st(4, 1.0 / 128);
        const StateField ic = solver_initial_data(*m, st, 128, "acoustic");
        worst_drift = std::max(
            worst_drift,
            integrate_conservative(*m, st, ic, 8, 0.1, "acoustic")
                .entropy_drift());
    }
    for (const char* name : {"qhd", "korteweg"}) {
        const auto m = make_model(name);
        const Stencils st(4, 1.0 / 64);
        const StateField ic = solver_initial_data(*m, st, 64, "acoustic");
        worst_drift = std::max(
            worst_drift,
            integrate_conservative(*m, st, ic, 8, 0.05, "acoustic", 0.008)
                .entropy_drift());
    }
    if (worst_drift > 1e-6) pass = false;

    report("criterion 6 (framework properties)", pass,
           fmt("roundtrip<=%.1e, lowner>=%.1e, L(I)=%.1e, adjoint<=%.1e, "
               "drift<=%.1e over 4 models x 1000 trials; need 1e-10 / -1e-10 "
               "/ 0 / 1e-12 / 1e-6",
               worst_rt, worst_lowner, worst_li, worst_adj, worst_drift));
}

// ============================================================
// 7. Dissipation comparison harness
// ============================================================

void criterion_7() {
    // strong solution fed back as its own subsolution timeline
    const auto m = make_model("burgers");
    const int nx = 64;
    const Stencils st(2, 1.0 / nx);
    const StrongSolutionRecord rec =
        manufacture_burgers_characteristics(*m, unit_sine(), nx, nx, 0.1);
    const WeightProfile w = adapt_weight(rec, st);
    std::vector<double> K_sub(static_cast<size_t>(rec.grid.nt));
    for (int j = 0; j < rec.grid.nt; ++j)
        K_sub[static_cast<size_t>(j)] =
            total_entropy(*m, rec.v_half.slice(j), nx, rec.grid.dx());
    const DafermosReport strong_rep = dafermos_compare_timeline(
        K_sub, rec.K0, rec.entropy_timeline(), rec.grid, w, 0.0);
    const bool pass_a = strong_rep.verdict == "no-violation";

    // synthetic early dissipation with closed-form escalation integrals
    const SpaceTimeGrid gsyn(4, 16, 0.4);
    std::vector<double> K_strong(17, 1.0), K_dip(16, 1.0);
    for (int j = 0; j < 8; ++j) K_dip[static_cast<size_t>(j)] = 1.0 - 2e-3;
    const DafermosReport dip_rep = dafermos_compare_timeline(
        K_dip, 1.0, K_strong, gsyn, WeightProfile(0.5, 1.0, 0.4), 0.0);
    // at gamma = 1 on the dip horizon [0, 0.2]:
    //   integral = (1 - 2e-3)(1 - e^{-0.2}), reference = (1 - e^{-0.2})
    const double closed_H = 1.0 - std::exp(-0.2);
    bool pass_b = dip_rep.verdict == "inconsistent-subsolution" &&
                  dip_rep.gamma_witness == 1.0 &&
                  dip_rep.escalation.size() == 1;
    double err_b = 1e300;
    if (pass_b) {
        err_b = std::max(
            std::abs(dip_rep.escalation[0].weighted_sub -
                     (1.0 - 2e-3) * closed_H),
            std::abs(dip_rep.escalation[0].weighted_ref - closed_H));
        pass_b = err_b <= 1e-10;
    }

    // solver subsolution in the adapted-weight scalar scenario
    const StateField ic = solver_initial_data(*m, st, nx, "wave");
    SolverOptions opt;
    opt.max_iters = 50000;
    opt.check_every = 250;
    opt.tol_gap_abs = 1e-3;
    opt.tol_gap_rel = 0.0;
    const DualResult r =
        solve_dual(*m, st, SpaceTimeGrid(nx, nx, 0.1), ic, w, opt);
    const double wi = weighted_entropy_integral(r.K_tilde, r.grid, w);
    const double ref = w.H(0.0) * rec.K0;
    const bool pass_c = r.converged && wi >= ref - 1e-3 &&
                        dafermos_compare(r, rec, st).verdict !=
                            "inconsistent-subsolution";

    report("criterion 7 (dissipation harness)", pass_a && pass_b && pass_c,
           fmt("strong: %s; dip: %s at gamma=%.0f closed-form err=%.1e; "
               "solver: weighted K=%.6f vs H(0)K0-1e-3=%.6f",
               strong_rep.verdict.c_str(), dip_rep.verdict.c_str(),
               dip_rep.gamma_witness, err_b, wi, ref - 1e-3));
}

// ============================================================
// 8. Recovery of the sharp variable from the dual density
// ============================================================

void criterion_8() {
    const double t0 = now_s();
    const auto m = make_model("burgers");
    double err[2] = {0.0, 0.0};
    int idx = 0;
    for (int nx : {128, 256}) {
        const StrongSolutionRecord rec =
            manufacture_burgers_characteristics(*m, unit_sine(), nx, nx, 0.1);
        const Stencils st(2, rec.grid.dx());
        const WeightProfile w = adapt_weight(rec, st);
        const CertificatePair pair = build_certificate(rec, w, st);
        RecoveryOptions opt;
        opt.component = 0;
        opt.max_k = nx / 4;  // basis grows with resolution
        opt.sample_offset = 0.5;
        const RecoveryResult recov = recover_sharp(rec.grid, w, pair.E, opt);
        err[idx++] = recovery_l2_error(recov, rec, 0);
    }
    const bool pass = err[1] <= 2e-3 && err[1] < err[0];
    report("criterion 8 (sharp recovery)", pass,
           fmt("err128=%.3e err256=%.3e; need err256<=2e-3 and improving; "
               "%.1fs",
               err[0], err[1], now_s() - t0));
}

}  // namespace

int main() {
    const double t0 = now_s();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("acceptance: %d of 8 criteria passed in %.1fs\n",
                8 - g_failures, now_s() - t0);
    return g_failures;
}
