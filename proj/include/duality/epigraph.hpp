#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "duality/model.hpp"
#include "duality/smallmat.hpp"

// Cellwise convex solves shared by the optimizer: the projection onto the
// flux epigraph {(z, M) : F(z) <= M in the Loewner order} and the dual
// density, the cellwise infimum entering the dual objective. Both reduce to
// minimizing a smooth convex function of the state, which Loewner convexity
// of the flux guarantees; a damped Newton iteration with a density floor
// handles the fluid models and the scalar model gets closed or safeguarded
// one-dimensional solves.

namespace duality {

// ============================================================
// Matrix negative part
// ============================================================

inline Mat negative_part(const Mat& m) {
    const EigSym e = eig_sym(m);
    Mat r(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            double s = 0.0;
            for (int k = 0; k < m.n; ++k)
                s += std::min(e.values[k], 0.0) * e.vectors(i, k) * e.vectors(j, k);
            r(i, j) = s;
        }
    return r;
}

// ============================================================
// Damped Newton on a convex cell problem
// ============================================================

namespace detail {

// Minimizes a smooth convex function over {z : z_rc >= rho_min} (the whole
// space when rc < 0). The Hessian is a forward difference of the analytic
// gradient with Levenberg damping; steps backtrack on the value and the
// density component is clamped to the floor. When requested, the masked
// gradient sup-norm at the returned point is reported, which for objectives
// with Hessian >= I bounds the distance to the constrained minimizer.
template <class ValueFn, class GradFn>
inline Vec minimize_cell(int n, int rc, double rho_min, Vec z, ValueFn value,
                         GradFn gradient, double tol, int max_iter = 80,
                         double* gnorm_out = nullptr) {
    const auto clamp = [&](Vec& y) {
        if (rc >= 0 && y[rc] < rho_min) y[rc] = rho_min;
    };
    const auto masked_norm = [&](const Vec& y, const Vec& g) {
        double worst = 0.0;
        for (int l = 0; l < n; ++l) {
            // at an active floor a positive gradient component is stationary
            if (rc == l && y[rc] <= rho_min && g[l] > 0.0) continue;
            worst = std::max(worst, std::abs(g[l]));
        }
        return worst;
    };
    clamp(z);
    double fz = value(z);
    double damping = 1e-10;
    for (int it = 0; it < max_iter; ++it) {
        const Vec g = gradient(z);
        const double gnorm = masked_norm(z, g);
        if (gnorm <= tol) {
            if (gnorm_out) *gnorm_out = gnorm;
            return z;
        }

        Mat H(n);
        for (int l = 0; l < n; ++l) {
            const double eps = 1e-7 * std::max(1.0, std::abs(z[l]));
            Vec zp = z;
            zp[l] += eps;
            clamp(zp);
            const double step = zp[l] - z[l];
            const Vec gp = gradient(zp);
            for (int c = 0; c < n; ++c)
                H(l, c) = step > 0.0 ? (gp[c] - g[c]) / step : 0.0;
        }
        H = H.symmetrized();
        Vec dir(n);
        bool solved = false;
        for (int tries = 0; tries < 12 && !solved; ++tries) {
            Mat Hd = H;
            for (int l = 0; l < n; ++l) Hd(l, l) += damping;
            Vec rhs(n);
            for (int l = 0; l < n; ++l) rhs[l] = -g[l];
            solved = solve_small(Hd, rhs, dir);
            if (!solved) damping = std::max(damping * 10.0, 1e-8);
        }
        if (!solved) {  // fall back to steepest descent
            for (int l = 0; l < n; ++l) dir[l] = -g[l];
        }

        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            Vec zn = z + step * dir;
            clamp(zn);
            const double fn = value(zn);
            if (fn < fz - 1e-14 * std::abs(fz)) {
                z = zn;
                fz = fn;
                moved = true;
                // a full Newton step earns less damping, a backtracked one more
                damping = (step == 1.0) ? std::max(damping * 0.3, 1e-12)
                                        : std::min(damping * 3.0, 1e6);
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            damping = std::min(damping * 30.0, 1e8);
            if (damping >= 1e7) break;  // converged to working precision
        }
    }
    if (gnorm_out) *gnorm_out = masked_norm(z, gradient(z));
    return z;
}

}  // namespace detail

// ============================================================
// Epigraph projection
// ============================================================

struct EpigraphResult {
    Vec z;
    Mat M;
    double dist2 = 0.0;  // squared distance moved
};

// distance function pieces: phi(z) = |z - zhat|^2/2 + |(Mhat - F(z))_-|^2/2
namespace detail {

inline double epi_value(const Model& m, const Vec& zhat, const Mat& Mhat,
                        const Vec& z) {
    const Mat neg = negative_part(Mhat - m.flux(z));
    return 0.5 * (z - zhat).norm2() + 0.5 * neg.ddot(neg);
}

inline Vec epi_gradient(const Model& m, const Vec& zhat, const Mat& Mhat,
                        const Vec& z) {
    const Mat neg = negative_part(Mhat - m.flux(z));
    Vec g = z - zhat;
    for (int l = 0; l < m.state_dim(); ++l) g[l] -= neg.ddot(m.dflux(z, l));
    return g;
}

// scalar case: phi'(z) = (z - zhat) - 2 z min(mhat - z^2, 0), monotone
inline double scalar_epi_dphi(double zhat, double mhat, double z) {
    return (z - zhat) - 2.0 * z * std::min(mhat - z * z, 0.0);
}

}  // namespace detail

inline EpigraphResult project_epigraph(const Model& m, const Vec& zhat,
                                       const Mat& Mhat, double rho_min,
                                       const Vec* warm = nullptr) {
    const int n = m.state_dim();
    EpigraphResult out;

    if (n == 1) {
        const double zh = zhat[0], mh = Mhat(0, 0);
        double z;
        if (mh >= zh * zh) {
            z = zh;  // already inside
        } else {
            // safeguarded Newton and bisection on the monotone derivative
            double lo = -1.0, hi = 1.0;
            {
                const double r = std::max({std::abs(zh), std::sqrt(std::max(mh, 0.0)),
                                           1.0}) +
                                 1.0;
                lo = -r;
                hi = r;
            }
            while (detail::scalar_epi_dphi(zh, mh, lo) > 0.0) lo *= 2.0;
            while (detail::scalar_epi_dphi(zh, mh, hi) < 0.0) hi *= 2.0;
            z = 0.5 * (lo + hi);
            for (int it = 0; it < 200; ++it) {
                const double d = detail::scalar_epi_dphi(zh, mh, z);
                if (d > 0.0)
                    hi = z;
                else
                    lo = z;
                // Newton on d with FD slope, clipped into the bracket
                const double eps = 1e-7 * std::max(1.0, std::abs(z));
                const double slope =
                    (detail::scalar_epi_dphi(zh, mh, z + eps) - d) / eps;
                double zn = (slope > 0.0) ? z - d / slope : 0.5 * (lo + hi);
                if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
                if (std::abs(zn - z) <= 1e-15 * std::max(1.0, std::abs(z))) {
                    z = zn;
                    break;
                }
                z = zn;
            }
        }
        out.z = Vec(1);
        out.z[0] = z;
        out.M = Mat(1);
        out.M(0, 0) = std::max(mh, z * z);
        const double dm = out.M(0, 0) - mh, dz = z - zh;
        out.dist2 = dz * dz + dm * dm;
        return out;
    }

    const int rc = m.rho_component();

    // fast path: already inside the epigraph and above the floor
    if (rc >= 0 && zhat[rc] >= rho_min && m.in_domain(zhat) &&
        lambda_min(Mhat - m.flux(zhat)) >= 0.0) {
        out.z = zhat;
        out.M = Mhat.symmetrized();
        out.dist2 = 0.0;
        return out;
    }

    auto value = [&](const Vec& z) { return detail::epi_value(m, zhat, Mhat, z); };
    auto grad = [&](const Vec& z) { return detail::epi_gradient(m, zhat, Mhat, z); };

    const double scale = 1.0 + zhat.max_abs() + Mhat.max_abs();

    // The objective has Hessian >= I (the |z - zhat|^2/2 term), so a masked
    // gradient norm g at any point bounds its distance to the constrained
    // minimizer by g; any run ending below the acceptance norm is certified
    // globally optimal to that accuracy and taken as is.
    const double accept = 1e-7 * scale;

    // warm start from a previous projection
    if (warm && warm->n == n) {
        double gn = std::numeric_limits<double>::infinity();
        const Vec z = detail::minimize_cell(n, rc, rho_min, *warm, value, grad,
                                            1e-10 * scale, 80, &gn);
        if (gn <= accept) {
            out.z = z;
            const Mat Dw = Mhat - m.flux(z);
            out.M = Mhat - negative_part(Dw);
            out.dist2 = 2.0 * value(z);
            return out;
        }
    }

    // multistart over the density component; the problem is convex but the
    // floor and flat regions make a few extra starts cheap insurance
    Vec best;
    double fbest = std::numeric_limits<double>::infinity();
    const double rho_starts[3] = {std::max(zhat[rc], 2.0 * rho_min), 1.0,
                                  std::max(0.5, 2.0 * rho_min)};
    for (double r0 : rho_starts) {
        Vec z0 = zhat;
        z0[rc] = r0;
        double gn = std::numeric_limits<double>::infinity();
        const Vec z = detail::minimize_cell(n, rc, rho_min, z0, value, grad,
                                            1e-10 * scale, 80, &gn);
        const double f = value(z);
        if (f < fbest) {
            fbest = f;
            best = z;
        }
        if (gn <= accept) break;  // certified optimal, skip remaining starts
    }
    out.z = best;
    const Mat D = Mhat - m.flux(best);
    out.M = Mhat - negative_part(D);  // = Mhat + (F(z) - Mhat)_+
    out.dist2 = 2.0 * fbest;
    return out;
}

// ============================================================
// Dual density
// ============================================================

struct DualDensityResult {
    double value = 0.0;
    bool unbounded = false;  // the cell infimum is -infinity
    Vec argmin;
};

// inf over admissible z of  z . E + F(z) : P / 2  for symmetric P >= 0.
// A strictly negative eigenvalue of P or a detected descent ray makes the
// cell value -infinity, reported through the flag.
inline DualDensityResult dual_density(const Model& m, const Vec& E, const Mat& P,
                                      double rho_min) {
    const int n = m.state_dim();
    DualDensityResult out;
    out.argmin = Vec(n);

    if (lambda_min(P) < 0.0) {
        out.unbounded = true;
        return out;
    }

    if (n == 1) {
        const double p = P(0, 0), e = E[0];
        if (p <= 0.0) {
            if (std::abs(e) > 0.0) {
                out.unbounded = true;
            } else {
                out.value = 0.0;
                out.argmin[0] = 0.0;
            }
            return out;
        }
        out.argmin[0] = -e / p;
        out.value = -0.5 * e * e / p;
        return out;
    }

    const int rc = m.rho_component();
    auto value = [&](const Vec& z) { return z.dot(E) + 0.5 * m.flux(z).ddot(P); };
    auto grad = [&](const Vec& z) {
        Vec g = E;
        for (int l = 0; l < n; ++l) g[l] += 0.5 * m.dflux(z, l).ddot(P);
        return g;
    };

    const double scale = 1.0 + E.max_abs() + P.max_abs();
    Vec best;
    double fbest = std::numeric_limits<double>::infinity();
    Vec starts[3];
    starts[0] = m.stationary_point();
    starts[1] = m.stationary_point();
    starts[1][rc] = std::max(4.0 * rho_min, 0.1);
    starts[2] = m.stationary_point();
    starts[2][rc] = 3.0;
    for (const Vec& z0 : starts) {
        const Vec z =
            detail::minimize_cell(n, rc, rho_min, z0, value, grad, 1e-12 * scale);
        const double f = value(z);
        if (f < fbest) {
            fbest = f;
            best = z;
        }
    }

    // descent-ray guard: a minimizer running far out means the infimum is
    // effectively unbounded for this pair
    if (best.max_abs() >= 1e7) {
        out.unbounded = true;
        return out;
    }
    out.argmin = best;
    // report slightly below the found minimum so the dual bound stays on the
    // safe side of inner-solve convergence fuzz
    out.value = fbest - 1e-12 * (1.0 + std::abs(fbest));
    return out;
}

}  // namespace duality
