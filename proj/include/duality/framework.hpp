#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "duality/grid.hpp"
#include "duality/model.hpp"
#include "duality/smallmat.hpp"
#include "duality/weights.hpp"

// Field-level operations shared by the certificate, solver, and comparison
// code paths: entropy quadrature, the conservativity identity, the weighted
// sharp-equation residual, and the weight adaptation that keeps
// h I + 2 H L*(v#) positive semidefinite along a resolved solution.

namespace duality {

// ============================================================
// Slice helpers
// ============================================================

inline void sharp_slice(const Model& m, const double* v, double* out, int nx) {
    const int n = m.state_dim();
    for (int i = 0; i < nx; ++i) {
        Vec cell(n);
        for (int c = 0; c < n; ++c) cell[c] = v[i * n + c];
        const Vec s = m.sharp(cell);
        for (int c = 0; c < n; ++c) out[i * n + c] = s[c];
    }
}

inline void flux_slice(const Model& m, const double* v, double* out, int nx) {
    const int n = m.state_dim(), N = m.flux_dim();
    for (int i = 0; i < nx; ++i) {
        Vec cell(n);
        for (int c = 0; c < n; ++c) cell[c] = v[i * n + c];
        const Mat f = m.flux(cell);
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) out[(i * N + r) * N + c] = f(r, c);
    }
}

inline double total_entropy(const Model& m, const double* v, int nx, double dx) {
    const int n = m.state_dim();
    double s = 0.0;
    for (int i = 0; i < nx; ++i) {
        Vec cell(n);
        for (int c = 0; c < n; ++c) cell[c] = v[i * n + c];
        s += m.entropy(cell);
    }
    return s * dx;
}

// ============================================================
// Strong solution records
// ============================================================

// A resolved solution on [0, T1]: states at the nt+1 nodes and at the nt
// slab centers, plus the constraint multiplier pi at the same samples when
// the model carries a side constraint. Slab-center samples keep every
// centered-in-time evaluation second order without one-sided closures.
struct StrongSolutionRecord {
    const Model* model = nullptr;
    SpaceTimeGrid grid;
    std::string scenario;
    StateField v_node;  // nt+1 slices, comps = n
    StateField v_half;  // nt slices at t_j + dt/2
    StateField pi_node;  // nt+1 slices, comps = zc (empty when zc = 0)
    StateField pi_half;
    double K0 = 0.0;

    std::vector<double> entropy_timeline() const {
        std::vector<double> K(static_cast<size_t>(grid.nt) + 1);
        for (int j = 0; j <= grid.nt; ++j)
            K[static_cast<size_t>(j)] =
                total_entropy(*model, v_node.slice(j), grid.nx, grid.dx());
        return K;
    }

    double entropy_drift() const {
        double worst = 0.0;
        for (double k : entropy_timeline()) worst = std::max(worst, std::abs(k - K0));
        return worst;
    }
};

// ============================================================
// Conservativity
// ============================================================

// integral of F(v) : L*(v#) dx, which vanishes for admissible fields with
// l(v) = 0; the discrete value decays at the stencil order.
inline double conservativity_residual(const Model& m, const Stencils& st,
                                      const double* v, int nx, double dx) {
    const int n = m.state_dim(), N = m.flux_dim();
    std::vector<double> vs(static_cast<size_t>(nx) * n);
    std::vector<double> ls(static_cast<size_t>(nx) * N * N);
    sharp_slice(m, v, vs.data(), nx);
    m.apply_Lstar(st, vs.data(), ls.data(), nx);
    double s = 0.0;
    for (int i = 0; i < nx; ++i) {
        Vec cell(n);
        for (int c = 0; c < n; ++c) cell[c] = v[i * n + c];
        const Mat f = m.flux(cell);
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                s += f(r, c) * ls[(static_cast<size_t>(i) * N + r) * N + c];
    }
    return s * dx;
}

// ============================================================
// Weighted sharp-equation residual
// ============================================================

// max over components, slabs, and cells of
//   | h v#_l + D_t(H v#)_l + H L*(v#) : dF_l(v) - H (l* pi)_l |
// sampled at slab centers with the centered difference
// D_t(H v#)(t_{j+1/2}) = (H_{j+1} v#_{j+1} - H_j v#_j) / dt.
inline double sharp_residual(const StrongSolutionRecord& rec,
                             const WeightProfile& w, const Stencils& st) {
    const Model& m = *rec.model;
    const SpaceTimeGrid& g = rec.grid;
    const int n = m.state_dim(), N = m.flux_dim(), zc = m.constraint_dim();
    const double dt = g.dt();

    std::vector<double> vs_half(static_cast<size_t>(g.nx) * n);
    std::vector<double> vs_lo(static_cast<size_t>(g.nx) * n);
    std::vector<double> vs_hi(static_cast<size_t>(g.nx) * n);
    std::vector<double> ls(static_cast<size_t>(g.nx) * N * N);
    std::vector<double> lpi(static_cast<size_t>(g.nx) * n, 0.0);

    double worst = 0.0;
    for (int j = 0; j < g.nt; ++j) {
        const double tm = g.t_slab(j);
        const double hm = w.h(tm), Hm = w.H(tm);
        const double Hlo = w.H(g.t_node(j)), Hhi = w.H(g.t_node(j + 1));
        sharp_slice(m, rec.v_half.slice(j), vs_half.data(), g.nx);
        sharp_slice(m, rec.v_node.slice(j), vs_lo.data(), g.nx);
        sharp_slice(m, rec.v_node.slice(j + 1), vs_hi.data(), g.nx);
        m.apply_Lstar(st, vs_half.data(), ls.data(), g.nx);
        if (zc > 0)
            m.apply_constraint_adjoint(st, rec.pi_half.slice(j), lpi.data(), g.nx);
        for (int i = 0; i < g.nx; ++i) {
            Vec cell(n);
            for (int c = 0; c < n; ++c) cell[c] = rec.v_half.at(j, i, c);
            for (int l = 0; l < n; ++l) {
                const Mat df = m.dflux(cell, l);
                double contracted = 0.0;
                for (int r = 0; r < N; ++r)
                    for (int c = 0; c < N; ++c)
                        contracted +=
                            ls[(static_cast<size_t>(i) * N + r) * N + c] * df(r, c);
                const double ddt =
                    (Hhi * vs_hi[static_cast<size_t>(i) * n + l] -
                     Hlo * vs_lo[static_cast<size_t>(i) * n + l]) /
                    dt;
                double res = hm * vs_half[static_cast<size_t>(i) * n + l] + ddt +
                             Hm * contracted;
                if (zc > 0) res -= Hm * lpi[static_cast<size_t>(i) * n + l];
                worst = std::max(worst, std::abs(res));
            }
        }
    }
    return worst;
}

// ============================================================
// Weight adaptation
// ============================================================

// Smallest eigenvalue of L*(v#) over all node and half-node slices.
inline double scan_lstar_min_eig(const StrongSolutionRecord& rec,
                                 const Stencils& st) {
    const Model& m = *rec.model;
    const SpaceTimeGrid& g = rec.grid;
    const int n = m.state_dim(), N = m.flux_dim();
    std::vector<double> vs(static_cast<size_t>(g.nx) * n);
    std::vector<double> ls(static_cast<size_t>(g.nx) * N * N);
    double lo = 0.0;
    auto scan_slice = [&](const double* v) {
        sharp_slice(m, v, vs.data(), g.nx);
        m.apply_Lstar(st, vs.data(), ls.data(), g.nx);
        for (int i = 0; i < g.nx; ++i) {
            Mat s(N);
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c)
                    s(r, c) = ls[(static_cast<size_t>(i) * N + r) * N + c];
            lo = std::min(lo, lambda_min(s));
        }
    };
    for (int j = 0; j <= g.nt; ++j) scan_slice(rec.v_node.slice(j));
    for (int j = 0; j < g.nt; ++j) scan_slice(rec.v_half.slice(j));
    return lo;
}

// gamma = max(0, -2 min eig L*(v#)) makes h I + 2 H L*(v#) >= 0 at every
// scanned sample, via gamma H <= h.
inline WeightProfile adapt_weight(const StrongSolutionRecord& rec,
                                  const Stencils& st, double amp = 1.0) {
    const double gamma = std::max(0.0, -2.0 * scan_lstar_min_eig(rec, st));
    WeightProfile w;
    w.gamma = gamma;
    w.amp = amp;
    w.T = rec.grid.T;
    w.validate();
    return w;
}

// ============================================================
// Model validation probes
// ============================================================

struct ModelValidation {
    double dflux_fd = 0.0;          // analytic vs centered FD flux derivative
    double entropy_identity = 0.0;  // K - tr F / 2
    double sharp_gradient = 0.0;    // v# vs FD gradient of K
    double roundtrip = 0.0;         // sharp_inverse(sharp(v)) - v
    double flux_min_eig = 0.0;      // most negative eigenvalue of F seen
    double lowner_margin = 0.0;     // most negative midpoint-convexity margin
    double argmin_margin = 0.0;     // most negative tangency margin (r:vv#)
    double adjoint_L = 0.0;
    double adjoint_constraint = 0.0;
    double l_of_identity = 0.0;

    double worst_defect() const {
        double d = std::max({dflux_fd, entropy_identity, sharp_gradient, roundtrip,
                             adjoint_L, adjoint_constraint, l_of_identity});
        d = std::max(d, -std::min({flux_min_eig, lowner_margin, argmin_margin}));
        return d;
    }
};

inline ModelValidation validate_model(const Model& m, int nx, int trials,
                                      uint64_t seed) {
    ModelValidation out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = m.state_dim(), N = m.flux_dim(), zc = m.constraint_dim();

    out.flux_min_eig = 1e300;
    out.lowner_margin = 1e300;
    out.argmin_margin = 1e300;

    for (int t = 0; t < trials; ++t) {
        const Vec v = m.random_point(rng);
        const Vec w = m.random_point(rng);

        // analytic flux derivative vs centered differences
        for (int l = 0; l < n; ++l) {
            const double eps = 1e-6 * std::max(1.0, std::abs(v[l]));
            Vec vp = v, vm = v;
            vp[l] += eps;
            vm[l] -= eps;
            if (!m.in_domain(vp) || !m.in_domain(vm)) continue;
            const Mat fd = (m.flux(vp) - m.flux(vm)) * (0.5 / eps);
            out.dflux_fd = std::max(out.dflux_fd, (fd - m.dflux(v, l)).max_abs());
        }

        // K = tr F / 2 and v# = grad K
        const Mat f = m.flux(v);
        out.entropy_identity = std::max(
            out.entropy_identity, std::abs(m.entropy(v) - 0.5 * f.trace()));
        const Vec vs = m.sharp(v);
        for (int l = 0; l < n; ++l) {
            const double eps = 1e-6 * std::max(1.0, std::abs(v[l]));
            Vec vp = v, vm = v;
            vp[l] += eps;
            vm[l] -= eps;
            if (!m.in_domain(vp) || !m.in_domain(vm)) continue;
            const double fd = (m.entropy(vp) - m.entropy(vm)) / (2.0 * eps);
            out.sharp_gradient = std::max(out.sharp_gradient, std::abs(fd - vs[l]));
        }
        out.roundtrip =
            std::max(out.roundtrip, (m.sharp_inverse(vs) - v).max_abs());

        // flux positivity and midpoint Loewner convexity
        out.flux_min_eig = std::min(out.flux_min_eig, lambda_min(f));
        const Vec mid = (v + w) * 0.5;
        if (m.in_domain(mid)) {
            const Mat gap = (m.flux(v) + m.flux(w)) * 0.5 - m.flux(mid);
            out.lowner_margin = std::min(out.lowner_margin, lambda_min(gap));
        }

        // tangency: y -> F(y):P - sum_l y_l (dF_l(v):P) is minimized at v,
        // for any PSD P; draw P = Q^T Q from a random square factor
        Mat P(N);
        {
            Mat Q(N);
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c) Q(r, c) = uni(rng);
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c) {
                    double s = 0.0;
                    for (int k = 0; k < N; ++k) s += Q(k, r) * Q(k, c);
                    P(r, c) = s;
                }
        }
        Vec slope(n);
        for (int l = 0; l < n; ++l) slope[l] = m.dflux(v, l).ddot(P);
        const double base = m.flux(v).ddot(P) - v.dot(slope);
        const Vec y = m.random_point(rng);
        out.argmin_margin = std::min(
            out.argmin_margin, (m.flux(y).ddot(P) - y.dot(slope)) - base);
    }

    // operator adjointness on random slices (matrix slices symmetrized)
    const Stencils st(4, 1.0 / nx);
    std::vector<double> M(static_cast<size_t>(nx) * N * N);
    std::vector<double> wst(static_cast<size_t>(nx) * n);
    std::vector<double> lm(static_cast<size_t>(nx) * n);
    std::vector<double> lsw(static_cast<size_t>(nx) * N * N);
    for (int t = 0; t < std::max(1, trials / 4); ++t) {
        for (int i = 0; i < nx; ++i)
            for (int r = 0; r < N; ++r)
                for (int c = r; c < N; ++c) {
                    const double x = uni(rng);
                    M[(static_cast<size_t>(i) * N + r) * N + c] = x;
                    M[(static_cast<size_t>(i) * N + c) * N + r] = x;
                }
        for (auto& x : wst) x = uni(rng);
        m.apply_L(st, M.data(), lm.data(), nx);
        m.apply_Lstar(st, wst.data(), lsw.data(), nx);
        double lhs = 0.0, rhs = 0.0;
        for (size_t k = 0; k < lm.size(); ++k) lhs += lm[k] * wst[k];
        for (size_t k = 0; k < lsw.size(); ++k) rhs += lsw[k] * M[k];
        out.adjoint_L =
            std::max(out.adjoint_L, std::abs(lhs - rhs) * st.dx * st.dx);

        if (zc > 0) {
            std::vector<double> vsl(static_cast<size_t>(nx) * n);
            std::vector<double> c(static_cast<size_t>(nx) * zc);
            std::vector<double> lv(static_cast<size_t>(nx) * zc);
            std::vector<double> lstc(static_cast<size_t>(nx) * n);
            for (auto& x : vsl) x = uni(rng);
            for (auto& x : c) x = uni(rng);
            m.apply_constraint(st, vsl.data(), lv.data(), nx);
            m.apply_constraint_adjoint(st, c.data(), lstc.data(), nx);
            double l1 = 0.0, r1 = 0.0;
            for (size_t k = 0; k < lv.size(); ++k) l1 += lv[k] * c[k];
            for (size_t k = 0; k < lstc.size(); ++k) r1 += lstc[k] * vsl[k];
            out.adjoint_constraint =
                std::max(out.adjoint_constraint, std::abs(l1 - r1) * st.dx);
        }
    }

    // L applied to the constant identity field must vanish exactly
    for (int i = 0; i < nx; ++i)
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                M[(static_cast<size_t>(i) * N + r) * N + c] = (r == c) ? 1.0 : 0.0;
    m.apply_L(st, M.data(), lm.data(), nx);
    for (double x : lm) out.l_of_identity = std::max(out.l_of_identity, std::abs(x));

    return out;
}

}  // namespace duality
