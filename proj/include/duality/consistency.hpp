#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "duality/epigraph.hpp"
#include "duality/errors.hpp"
#include "duality/framework.hpp"
#include "duality/grid.hpp"
#include "duality/manufacture.hpp"
#include "duality/model.hpp"
#include "duality/weights.hpp"

// Consistency layer tying resolved strong solutions to the dual side: the
// smooth certificate pair
//
//   B = H L*(v#),   E = d/dt (H v#) - H l* pi,
//
// its verification (weak constraint, cone positivity, stationarity of the
// cell infimum, and the dual objective against H(0) K0), and the moment
// reconstruction that recovers sharp variables from a dual pair alone.

namespace duality {

// ============================================================
// Certificate construction
// ============================================================

struct CertificatePair {
    StateField E;   // nt slices
    MatrixField B;  // nt slices
};

inline CertificatePair build_certificate(const StrongSolutionRecord& rec,
                                         const WeightProfile& w,
                                         const Stencils& st) {
    const Model& m = *rec.model;
    const SpaceTimeGrid& g = rec.grid;
    const int nx = g.nx, nt = g.nt, n = m.state_dim(), N = m.flux_dim();
    const int zc = m.constraint_dim();
    const double dt = g.dt();

    CertificatePair out;
    out.E = StateField(nt, nx, n);
    out.B = MatrixField(nt, nx, N);

    std::vector<double> vs_half(static_cast<size_t>(nx) * n);
    std::vector<double> vs_lo(static_cast<size_t>(nx) * n);
    std::vector<double> vs_hi(static_cast<size_t>(nx) * n);
    std::vector<double> ls(static_cast<size_t>(nx) * N * N);
    std::vector<double> lpi(static_cast<size_t>(nx) * n, 0.0);

    for (int j = 0; j < nt; ++j) {
        const double Hm = w.H(g.t_slab(j));
        const double Hlo = w.H(g.t_node(j)), Hhi = w.H(g.t_node(j + 1));
        sharp_slice(m, rec.v_half.slice(j), vs_half.data(), nx);
        sharp_slice(m, rec.v_node.slice(j), vs_lo.data(), nx);
        sharp_slice(m, rec.v_node.slice(j + 1), vs_hi.data(), nx);
        m.apply_Lstar(st, vs_half.data(), ls.data(), nx);
        if (zc > 0)
            m.apply_constraint_adjoint(st, rec.pi_half.slice(j), lpi.data(), nx);
        double* bj = out.B.slice(j);
        for (size_t k = 0; k < ls.size(); ++k) bj[k] = Hm * ls[k];
        for (int i = 0; i < nx; ++i)
            for (int c = 0; c < n; ++c) {
                const size_t k = static_cast<size_t>(i) * n + c;
                double e = (Hhi * vs_hi[k] - Hlo * vs_lo[k]) / dt;
                if (zc > 0) e -= Hm * lpi[k];
                out.E.at(j, i, c) = e;
            }
    }
    return out;
}

// ============================================================
// Certificate verification
// ============================================================

struct CertificateReport {
    double constraint_residual = 0.0;   // midpoint weak-form probe
    double positivity_margin = 0.0;     // min eig of h I + 2B over all cells
    double stationarity_residual = 0.0; // cell optimality of the strong state
    double objective_value = 0.0;       // dual objective of the pair
    double objective_reference = 0.0;   // H(0) K0
    double objective_rel_error = 0.0;
};

namespace detail {

// midpoint-in-time weak constraint functional against one test field; the
// certificate pair drives it to O(dt^2 + dx^2)
inline double midpoint_weak_form(const Model& m, const SpaceTimeGrid& g,
                                 const Stencils& st, const StateField& E,
                                 const MatrixField& B,
                                 const std::vector<double>& psi) {
    const int nx = g.nx, nt = g.nt, n = m.state_dim(), N = m.flux_dim();
    const double dx = g.dx(), dxdt = g.dx() * g.dt();
    std::vector<double> mid(static_cast<size_t>(nx) * N * N);
    std::vector<double> lp(static_cast<size_t>(nx) * n);
    double acc = 0.0, mag = 1e-300;
    for (int j = 0; j < nt; ++j) {
        const double* pj = psi.data() + static_cast<size_t>(j) * nx * N * N;
        const double* pj1 = psi.data() + static_cast<size_t>(j + 1) * nx * N * N;
        const double* bj = B.slice(j);
        for (size_t k = 0; k < mid.size(); ++k) {
            const double term = (pj1[k] - pj[k]) * bj[k] * dx;
            acc += term;
            mag += std::abs(term);
            mid[k] = 0.5 * (pj[k] + pj1[k]);
        }
        m.apply_L(st, mid.data(), lp.data(), nx);
        for (int i = 0; i < nx; ++i)
            for (int c = 0; c < n; ++c) {
                const double term =
                    lp[static_cast<size_t>(i) * n + c] * E.at(j, i, c) * dxdt;
                acc += term;
                mag += std::abs(term);
            }
    }
    return std::abs(acc) / mag;
}

}  // namespace detail

inline CertificateReport verify_certificate(const StrongSolutionRecord& rec,
                                            const WeightProfile& w,
                                            const Stencils& st,
                                            const CertificatePair& pair,
                                            double rho_min = 1e-6) {
    const Model& m = *rec.model;
    const SpaceTimeGrid& g = rec.grid;
    const int nx = g.nx, nt = g.nt, n = m.state_dim(), N = m.flux_dim();
    const double dxdt = g.dx() * g.dt();

    CertificateReport rep;

    // weak-form probes: smooth matrix test fields vanishing at t = 0
    {
        std::vector<double> psi(static_cast<size_t>(nt + 1) * nx * N * N);
        double worst = 0.0;
        for (int probe = 0; probe < 2; ++probe) {
            for (int j = 0; j <= nt; ++j) {
                const double tf = (probe == 0)
                                      ? std::sin(1.3 * g.t_node(j) / g.T)
                                      : (g.t_node(j) / g.T) * (g.t_node(j) / g.T);
                for (int i = 0; i < nx; ++i) {
                    const double xs =
                        (probe == 0)
                            ? std::sin(TrigSeries::two_pi * g.x(i))
                            : std::cos(2.0 * TrigSeries::two_pi * g.x(i));
                    for (int r = 0; r < N; ++r)
                        for (int c = 0; c < N; ++c) {
                            const double base =
                                (r == c) ? 1.0 : ((probe == 0) ? 0.3 : 0.0);
                            psi[((static_cast<size_t>(j) * nx + i) * N + r) * N +
                                c] = tf * xs * base;
                        }
                }
            }
            worst = std::max(
                worst, detail::midpoint_weak_form(m, g, st, pair.E, pair.B, psi));
        }
        rep.constraint_residual = worst;
    }

    // cone positivity at slab centers
    {
        double lo = 1e300;
        for (int j = 0; j < nt; ++j) {
            const double h = w.h(g.t_slab(j));
            for (int i = 0; i < nx; ++i) {
                Mat P = pair.B.cell(j, i) * 2.0;
                for (int r = 0; r < N; ++r) P(r, r) += h;
                lo = std::min(lo, lambda_min(P));
            }
        }
        rep.positivity_margin = lo;
    }

    // stationarity: the strong state minimizes the cell integrand, so
    // (h I + 2B) : dF_l(v)/2 + E_l vanishes to discretization order
    {
        double worst = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double h = w.h(g.t_slab(j));
            for (int i = 0; i < nx; ++i) {
                const Vec cell = rec.v_half.cell(j, i);
                Mat P = pair.B.cell(j, i) * 2.0;
                for (int r = 0; r < N; ++r) P(r, r) += h;
                for (int l = 0; l < n; ++l) {
                    const double r =
                        0.5 * P.ddot(m.dflux(cell, l)) + pair.E.at(j, i, l);
                    worst = std::max(worst, std::abs(r));
                }
            }
        }
        rep.stationarity_residual = worst;
    }

    // dual objective of the pair against the smooth reference H(0) K0
    {
        double data = 0.0;
        for (int j = 0; j < nt; ++j)
            for (int i = 0; i < nx; ++i)
                for (int c = 0; c < n; ++c)
                    data += rec.v_node.at(0, i, c) * pair.E.at(j, i, c) * dxdt;
        double value = -data;
        for (int j = 0; j < nt; ++j) {
            const double h = w.h(g.t_slab(j));
            for (int i = 0; i < nx; ++i) {
                Vec E(n);
                for (int c = 0; c < n; ++c) E[c] = pair.E.at(j, i, c);
                Mat P = pair.B.cell(j, i) * 2.0;
                for (int r = 0; r < N; ++r) P(r, r) += h;
                const DualDensityResult d = dual_density(m, E, P, rho_min);
                if (d.unbounded) {
                    value = -std::numeric_limits<double>::infinity();
                    break;
                }
                value += d.value * dxdt;
            }
            if (!std::isfinite(value)) break;
        }
        rep.objective_value = value;
        rep.objective_reference = w.H(0.0) * rec.K0;
        rep.objective_rel_error =
            std::abs(value - rep.objective_reference) /
            std::max(1e-300, std::abs(rep.objective_reference));
    }

    return rep;
}

// ============================================================
// Sharp-variable recovery from a dual pair
// ============================================================

struct RecoveryOptions {
    int component = 0;
    int max_k = 8;               // spatial modes sin/cos(2 pi k x), k <= max_k
    bool include_constant = false;  // admissible only without a mean constraint
    double sample_offset = 0.5;  // 0.5: certificate pairs, 0.0: solver pairs
    int truncate_hats = -1;      // hats dropped near T; default nt/16
};

struct RecoveryResult {
    std::vector<int> hat_nodes;  // retained node indices (hat centers)
    StateField profile;          // one slice per retained hat, comps = 1
};

namespace detail {

// cumulative integral of hat_m / H up to each node, then a partial Gauss
// panel up to the sample point inside the slab
struct HatIntegrator {
    static constexpr double gx[8] = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
        0.7966664774136267,  0.9602898564975363};
    static constexpr double gw[8] = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
        0.2223810344533745, 0.1012285362903763};

    static double hat(int mth, double dt, double t) {
        const double u = 1.0 - std::abs(t / dt - mth);
        return u > 0.0 ? u : 0.0;
    }

    static double panel(int mth, const WeightProfile& w, double dt, double a,
                        double b) {
        const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        double s = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double t = mid + rad * gx[q];
            s += gw[q] * hat(mth, dt, t) / w.H(t);
        }
        return s * rad;
    }

    // Phi_m at the per-slab sample points t_j + offset dt, for j = 0..nt-1
    static std::vector<double> samples(int mth, const WeightProfile& w,
                                       const SpaceTimeGrid& g, double offset) {
        std::vector<double> out(static_cast<size_t>(g.nt), 0.0);
        const double dt = g.dt();
        double cum = 0.0;
        for (int j = 0; j < g.nt; ++j) {
            double phi = cum;
            if (offset > 0.0 && j >= mth - 1 && j <= mth)
                phi += panel(mth, w, dt, g.t_node(j), g.t_node(j) + offset * dt);
            out[static_cast<size_t>(j)] = phi;
            if (j >= mth - 1 && j <= mth)
                cum += panel(mth, w, dt, g.t_node(j), g.t_node(j + 1));
        }
        return out;
    }
};

}  // namespace detail

// Reconstructs the component's sharp variable at the retained time nodes
// from the dual density E alone, through the moment identity
//   <psi, v#_c> = -<Phi, E_c>,  Phi(t) = integral_0^t psi / H.
// Test functions are time hats times trigonometric modes. The moment
// system is diagonal: trigonometric modes are orthogonal in x, and each
// hat moment is divided by the weight the same pairing assigns to the
// constant state, so no equation reaches across the truncation edge.
// Hats near the final time are dropped because 1/H degenerates there.
inline RecoveryResult recover_sharp(const SpaceTimeGrid& g,
                                    const WeightProfile& w, const StateField& E,
                                    const RecoveryOptions& opt) {
    const int nx = g.nx, nt = g.nt;
    const int c = opt.component;
    if (c < 0 || c >= E.comps)
        throw PreconditionError("recovery component out of range");
    const int trunc = opt.truncate_hats >= 0 ? opt.truncate_hats
                                             : std::max(1, nt / 16);
    const int m_max = nt - 1 - trunc;
    if (m_max < 1) throw PreconditionError("no hats retained for recovery");
    const int nm = m_max + 1;  // unknowns at nodes 0..m_max
    const double dt = g.dt(), dx = g.dx();

    // spatial basis: optional constant, then sin and cos pairs
    struct Mode {
        int k;
        bool is_sin;
        double norm;  // L2(0,1) norm squared
    };
    std::vector<Mode> modes;
    if (opt.include_constant) modes.push_back({0, false, 1.0});
    for (int k = 1; k <= opt.max_k; ++k) {
        if (2 * k >= nx) break;  // stay well below the grid Nyquist mode
        modes.push_back({k, true, 0.5});
        modes.push_back({k, false, 0.5});
    }

    // spatial reductions S_b(j) = sum_i phi_b(x_i) E(j,i,c) dx
    std::vector<std::vector<double>> S(modes.size(),
                                       std::vector<double>(nt, 0.0));
    for (size_t b = 0; b < modes.size(); ++b) {
        for (int j = 0; j < nt; ++j) {
            double s = 0.0;
            for (int i = 0; i < nx; ++i) {
                const double arg = TrigSeries::two_pi * modes[b].k * g.x(i);
                const double ph = modes[b].k == 0
                                      ? 1.0
                                      : (modes[b].is_sin ? std::sin(arg)
                                                         : std::cos(arg));
                s += ph * E.at(j, i, c);
            }
            S[b][static_cast<size_t>(j)] = s * dx;
        }
    }

    // hat moments, normalized per hat by the paired weight of the
    // constant state; each mode and hat decouples
    RecoveryResult out;
    out.hat_nodes.resize(static_cast<size_t>(nm));
    for (int mm = 0; mm < nm; ++mm) out.hat_nodes[static_cast<size_t>(mm)] = mm;
    out.profile = StateField(nm, nx, 1);

    std::vector<std::vector<double>> coeff(
        modes.size(), std::vector<double>(static_cast<size_t>(nm), 0.0));
    for (int mm = 0; mm < nm; ++mm) {
        const std::vector<double> phi =
            detail::HatIntegrator::samples(mm, w, g, opt.sample_offset);
        double unit = 0.0, prev = 0.0;
        for (int j = 0; j < nt; ++j) {
            unit += (phi[static_cast<size_t>(j)] - prev) * w.H(g.t_node(j));
            prev = phi[static_cast<size_t>(j)];
        }
        for (size_t b = 0; b < modes.size(); ++b) {
            double acc = 0.0;
            for (int j = 0; j < nt; ++j)
                acc += phi[static_cast<size_t>(j)] * S[b][static_cast<size_t>(j)];
            coeff[b][static_cast<size_t>(mm)] =
                -acc * dt / (modes[b].norm * unit);
        }
    }

    for (int mm = 0; mm < nm; ++mm)
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            for (size_t b = 0; b < modes.size(); ++b) {
                const double arg = TrigSeries::two_pi * modes[b].k * g.x(i);
                const double ph = modes[b].k == 0
                                      ? 1.0
                                      : (modes[b].is_sin ? std::sin(arg)
                                                         : std::cos(arg));
                s += coeff[b][static_cast<size_t>(mm)] * ph;
            }
            out.profile.at(mm, i, 0) = s;
        }
    return out;
}

// relative L2 error of a recovery against the record's sharp component over
// the retained window
inline double recovery_l2_error(const RecoveryResult& recov,
                                const StrongSolutionRecord& rec,
                                int component) {
    const Model& m = *rec.model;
    const SpaceTimeGrid& g = rec.grid;
    const int n = m.state_dim();
    std::vector<double> vs(static_cast<size_t>(g.nx) * n);
    double num = 0.0, den = 0.0;
    for (size_t s = 0; s < recov.hat_nodes.size(); ++s) {
        const int j = recov.hat_nodes[s];
        sharp_slice(m, rec.v_node.slice(j), vs.data(), g.nx);
        for (int i = 0; i < g.nx; ++i) {
            const double truth = vs[static_cast<size_t>(i) * n + component];
            const double d = recov.profile.at(static_cast<int>(s), i, 0) - truth;
            num += d * d;
            den += truth * truth;
        }
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace duality
