#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "duality/errors.hpp"
#include "duality/series.hpp"
#include "duality/smallmat.hpp"

// Exact scalar machinery on the circle: Hopf-Lax evaluation of the entropy
// solution, and the terminal-shock substitute built from the convex envelope
// of f(y) = y^2/2 + T phi(y). On the envelope's contact set the substitute
// keeps the original data; across each envelope gap (a, b) it is affine with
// slope -1/T, so every characteristic from the gap lands on one point at
// exactly t = T. The double-tangent condition a + T v0(a) = b + T v0(b)
// makes the substitute continuous and removes terminal atoms: the mass
// (b - a) + T (v0(b) - v0(a)) carried into each collapse point vanishes.

namespace duality {

// ============================================================
// Hopf-Lax slice evaluation
// ============================================================

// v(t, x) = (x - y*) / t with y* the leftmost minimizer of
// phi(y) + (x - y)^2 / (2t). Minimizers are nondecreasing in x, so a
// divide-and-conquer sweep confines each scan to the inherited bracket.
namespace detail {

inline double hopf_lax_point(const std::function<double(double)>& phi, double t,
                             double x, double ylo, double yhi, double step,
                             double* ystar) {
    auto G = [&](double y) { return phi(y) + (x - y) * (x - y) / (2.0 * t); };
    double best_y = ylo, best_g = G(ylo);
    const int nsteps = std::max(1, static_cast<int>(std::ceil((yhi - ylo) / step)));
    const double hs = (yhi - ylo) / nsteps;
    for (int k = 1; k <= nsteps; ++k) {
        const double y = ylo + k * hs;
        const double g = G(y);
        if (g < best_g) {
            best_g = g;
            best_y = y;
        }
    }
    // golden refinement inside the winning bracket, stopped well above the
    // comparison noise floor of G
    double a = std::max(ylo, best_y - hs), b = std::min(yhi, best_y + hs);
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = G(c), fd = G(d);
    while (b - a > 1e-5) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = G(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = G(d);
        }
    }
    // slope bisection pushes past the noise floor; the slope comes from a
    // central difference of the potential, so kinks are still tolerated
    auto Gp = [&](double y) {
        const double h = 1e-7;
        return (phi(y + h) - phi(y - h)) / (2.0 * h) + (y - x) / t;
    };
    if (Gp(a) < 0.0 && Gp(b) > 0.0) {
        for (int it = 0; it < 40 && b - a > 1e-12; ++it) {
            const double m = 0.5 * (a + b);
            if (Gp(m) < 0.0)
                a = m;
            else
                b = m;
        }
    }
    *ystar = 0.5 * (a + b);
    return (x - *ystar) / t;
}

inline void hopf_lax_recurse(const std::function<double(double)>& phi, double t,
                             const std::vector<double>& xs, int lo, int hi,
                             double ylo, double yhi, double step,
                             std::vector<double>& out) {
    if (lo > hi) return;
    const int mid = lo + (hi - lo) / 2;
    double ystar = ylo;
    out[static_cast<size_t>(mid)] =
        hopf_lax_point(phi, t, xs[static_cast<size_t>(mid)], ylo, yhi, step, &ystar);
    hopf_lax_recurse(phi, t, xs, lo, mid - 1, ylo, ystar, step, out);
    hopf_lax_recurse(phi, t, xs, mid + 1, hi, ystar, yhi, step, out);
}

}  // namespace detail

// xs must be sorted ascending; vmax bounds |data| so the minimizer search
// window [x - t vmax, x + t vmax] is safe
inline std::vector<double> lax_oleinik_slice(
    const std::function<double(double)>& phi, double vmax, double t,
    const std::vector<double>& xs) {
    if (!(t > 1e-13)) throw PreconditionError("Hopf-Lax slice needs t > 0");
    std::vector<double> out(xs.size());
    if (xs.empty()) return out;
    double step = 1.0 / 256.0;
    if (xs.size() > 1) step = std::min(step, xs[1] - xs[0]);
    step *= 0.5;
    const double margin = 2.0 * step + 1e-3;
    detail::hopf_lax_recurse(phi, t, xs, 0, static_cast<int>(xs.size()) - 1,
                             xs.front() - t * vmax - margin,
                             xs.back() + t * vmax + margin, step, out);
    return out;
}

// ============================================================
// Terminal-shock substitute profile
// ============================================================

struct BurgersGap {
    double a = 0.0, b = 0.0;  // contact abscissas, a < b < a + 1; b may pass 1
    double c = 0.0;           // common landing point a + T v0(a) = b + T v0(b)
};

class SubstituteProfile {
  public:
    SubstituteProfile(const TrigSeries& v0, double horizon)
        : v0_(v0), T_(horizon) {
        if (!(T_ > 0.0)) throw ConfigError("substitute needs a positive horizon");
        if (std::abs(v0_.mean()) > 1e-14)
            throw PreconditionError("substitute data must have zero mean");
        build_gaps();
        build_pieces();
    }

    const std::vector<BurgersGap>& gaps() const { return gaps_; }
    double horizon() const { return T_; }
    const TrigSeries& data() const { return v0_; }

    // |integral of the substitute data over one period|; the double tangents
    // make the gap corrections cancel, so this is a refinement diagnostic
    double closure() const { return std::abs(cum_.back()); }

    // worst terminal mass carried into a collapse point
    double max_atom_mass() const {
        double worst = 0.0;
        for (const auto& g : gaps_)
            worst = std::max(
                worst, std::abs((g.b - g.a) + T_ * (v0_.value(g.b) - v0_.value(g.a))));
        return worst;
    }

    // substitute initial data: original on the contact set, affine on gaps
    double v0T(double x) const {
        double xu = x - std::floor(x);
        const Piece& p = pieces_[piece_index(xu)];
        if (p.gap < 0) return v0_.value(xu);
        return (gaps_[static_cast<size_t>(p.gap)].c - (xu + p.shift)) / T_;
    }

    // potential of the substitute: periodic, vanishing at x = 0
    double phiT(double x) const {
        const double xu = x - std::floor(x);
        const size_t pi = piece_index(xu);
        const Piece& p = pieces_[pi];
        double val = cum_[pi];
        if (p.gap < 0) {
            val += v0_.antideriv(xu) - v0_.antideriv(p.x0);
        } else {
            const BurgersGap& g = gaps_[static_cast<size_t>(p.gap)];
            val += affine_integral(g, p.x0 + p.shift, xu + p.shift);
        }
        return val;  // cum_.back() vanishes, so the periodic extension is exact
    }

    // solution value at 0 <= t <= T by exact characteristics
    double value(double t, double x) const {
        std::vector<double> xs{x}, out(1);
        slice(t, xs, out);
        return out[0];
    }

    // evaluates a whole slice by inverting y + t v0T(y) = x piece by piece
    void slice(double t, const std::vector<double>& xs,
               std::vector<double>& out) const {
        if (t < 0.0 || t > T_ + 1e-12)
            throw PreconditionError("substitute evaluated outside [0, T]");
        out.resize(xs.size());
        if (t <= 1e-14) {
            for (size_t i = 0; i < xs.size(); ++i) out[i] = v0T(xs[i]);
            return;
        }
        const bool terminal = (T_ - t) <= 1e-13;
        const size_t G = gaps_.size();
        const double w0 = G ? gaps_.front().a : 0.0;
        const double X0 = w0 + t * (G ? va_.front() : v0_.value(0.0));
        for (size_t i = 0; i < xs.size(); ++i) {
            // shift into the image [X0, X0 + 1) of the window [w0, w0 + 1)
            const double xu = xs[i] - std::floor(xs[i] - X0);
            if (G == 0) {
                out[i] = v0_.value(invert_smooth(t, xu, w0, w0 + 1.0));
                continue;
            }
            double prev_b = gaps_.back().b - 1.0;  // previous period's gap end
            bool done = false;
            for (size_t g = 0; g < G; ++g) {
                const double A = gaps_[g].a + t * va_[g];
                if (xu < A) {  // smooth piece ending at this gap
                    out[i] = v0_.value(invert_smooth(t, xu, prev_b, gaps_[g].a));
                    done = true;
                    break;
                }
                const double B = gaps_[g].b + t * vb_[g];
                if (!terminal && xu <= B) {
                    out[i] = (gaps_[g].c - xu) / (T_ - t);
                    done = true;
                    break;
                }
                prev_b = gaps_[g].b;
            }
            if (!done)  // smooth piece wrapping back to the first gap
                out[i] =
                    v0_.value(invert_smooth(t, xu, prev_b, gaps_.front().a + 1.0));
        }
    }

  private:
    struct Piece {
        double x0 = 0.0, x1 = 1.0;  // subinterval of [0, 1)
        int gap = -1;               // owning gap, or -1 for contact
        double shift = 0.0;         // add to x to reach the gap's own frame
    };

    // integral of the gap's affine data (c - y)/T over [y0, y1]
    double affine_integral(const BurgersGap& g, double y0, double y1) const {
        return (g.c * (y1 - y0) - 0.5 * (y1 * y1 - y0 * y0)) / T_;
    }

    size_t piece_index(double xu) const {
        size_t lo = 0, hi = pieces_.size() - 1;
        while (lo < hi) {
            const size_t mid = (lo + hi + 1) / 2;
            if (pieces_[mid].x0 <= xu)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

    double invert_smooth(double t, double x, double ylo, double yhi) const {
        auto g = [&](double y) { return y + t * v0_.value(y) - x; };
        double lo = ylo - 1e-9, hi = yhi + 1e-9;
        double y = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double gy = g(y);
            if (gy > 0.0)
                hi = y;
            else
                lo = y;
            const double gp = 1.0 + t * v0_.deriv(y);
            double yn = (gp > 1e-12) ? y - gy / gp : 0.5 * (lo + hi);
            if (!(yn > lo && yn < hi)) yn = 0.5 * (lo + hi);
            if (std::abs(yn - y) <= 1e-15) return yn;
            y = yn;
        }
        return y;
    }

    // convex envelope of f(y) = y^2/2 + T phi(y): dense lower hull over seven
    // periods, gap candidates from non-adjacent hull vertices in the center
    // period, then a 2x2 Newton polish of the double-tangent equations
    void build_gaps() {
        const int per = 4096;
        const int lo_p = -3, hi_p = 4;
        const int npts = (hi_p - lo_p) * per + 1;
        std::vector<double> ys(static_cast<size_t>(npts)),
            fs(static_cast<size_t>(npts));
        for (int k = 0; k < npts; ++k) {
            const double y = lo_p + static_cast<double>(k) / per;
            ys[static_cast<size_t>(k)] = y;
            fs[static_cast<size_t>(k)] = 0.5 * y * y + T_ * v0_.antideriv(y);
        }
        std::vector<int> hull;
        for (int k = 0; k < npts; ++k) {
            while (hull.size() >= 2) {
                const int i = hull[hull.size() - 2], j = hull.back();
                const double cross =
                    (ys[static_cast<size_t>(j)] - ys[static_cast<size_t>(i)]) *
                        (fs[static_cast<size_t>(k)] - fs[static_cast<size_t>(i)]) -
                    (ys[static_cast<size_t>(k)] - ys[static_cast<size_t>(i)]) *
                        (fs[static_cast<size_t>(j)] - fs[static_cast<size_t>(i)]);
                if (cross > 0.0) break;  // strict left turn: keep the vertex
                hull.pop_back();
            }
            hull.push_back(k);
        }
        const double step = 1.0 / per;
        for (size_t h = 0; h + 1 < hull.size(); ++h) {
            const int i = hull[h], j = hull[h + 1];
            if (j - i <= 1) continue;
            double a = ys[static_cast<size_t>(i)], b = ys[static_cast<size_t>(j)];
            if (a < -0.5 * step || a >= 1.0 - 0.5 * step) continue;
            // a genuine detachment straddles a concave stretch of f; hull
            // jitter at near-flat contact does not
            double fpp_min = 1e300;
            for (int s = 0; s <= 64; ++s) {
                const double y = a + (b - a) * s / 64.0;
                fpp_min = std::min(fpp_min, 1.0 + T_ * v0_.deriv(y));
            }
            if (fpp_min >= 0.0) continue;
            refine_gap(a, b);
            if (!(b > a) || b - a >= 1.0)
                throw InternalError("envelope gap refinement failed");
            BurgersGap g;
            g.a = a;
            g.b = b;
            g.c = a + T_ * v0_.value(a);
            gaps_.push_back(g);
        }
        std::sort(gaps_.begin(), gaps_.end(),
                  [](const BurgersGap& p, const BurgersGap& q) { return p.a < q.a; });
        for (size_t g = 0; g + 1 < gaps_.size(); ++g)
            if (gaps_[g].b >= gaps_[g + 1].a)
                throw InternalError("envelope gaps overlap");
        if (!gaps_.empty() && gaps_.back().b >= gaps_.front().a + 1.0)
            throw InternalError("envelope gaps overlap across the period");
        va_.resize(gaps_.size());
        vb_.resize(gaps_.size());
        for (size_t g = 0; g < gaps_.size(); ++g) {
            va_[g] = v0_.value(gaps_[g].a);
            vb_[g] = v0_.value(gaps_[g].b);
        }
    }

    // Newton on F1 = f'(a)(b-a) - (f(b)-f(a)), F2 = f'(b)(b-a) - (f(b)-f(a));
    // the mixed partials collapse to slope differences
    void refine_gap(double& a, double& b) {
        auto f = [&](double y) { return 0.5 * y * y + T_ * v0_.antideriv(y); };
        auto fp = [&](double y) { return y + T_ * v0_.value(y); };
        auto fpp = [&](double y) { return 1.0 + T_ * v0_.deriv(y); };
        for (int it = 0; it < 60; ++it) {
            const double w = b - a, df = f(b) - f(a);
            const double F1 = fp(a) * w - df;
            const double F2 = fp(b) * w - df;
            Mat J(2);
            J(0, 0) = fpp(a) * w;
            J(0, 1) = fp(a) - fp(b);
            J(1, 0) = fp(a) - fp(b);
            J(1, 1) = fpp(b) * w;
            Vec rhs(2), stepv(2);
            rhs[0] = -F1;
            rhs[1] = -F2;
            if (!solve_small(J, rhs, stepv)) break;
            a += stepv[0];
            b += stepv[1];
            if (std::abs(stepv[0]) + std::abs(stepv[1]) < 1e-14) break;
        }
    }

    // partition [0, 1) into contact and gap pieces, a seam-crossing gap
    // contributing its tail [0, b - 1) in shifted coordinates, and tabulate
    // the cumulative substitute integral at the piece starts
    void build_pieces() {
        std::vector<Piece> ps;
        double cursor = 0.0;
        const bool wrap = !gaps_.empty() && gaps_.back().b > 1.0;
        if (wrap) {
            Piece tail;
            tail.x0 = 0.0;
            tail.x1 = gaps_.back().b - 1.0;
            tail.gap = static_cast<int>(gaps_.size()) - 1;
            tail.shift = 1.0;
            ps.push_back(tail);
            cursor = tail.x1;
        }
        for (size_t g = 0; g < gaps_.size(); ++g) {
            if (gaps_[g].a >= 1.0) break;
            const double gb = std::min(gaps_[g].b, 1.0);
            if (gaps_[g].a > cursor) {
                Piece sm;
                sm.x0 = cursor;
                sm.x1 = gaps_[g].a;
                ps.push_back(sm);
                cursor = gaps_[g].a;
            }
            Piece gp;
            gp.x0 = cursor;
            gp.x1 = gb;
            gp.gap = static_cast<int>(g);
            ps.push_back(gp);
            cursor = gb;
            if (cursor >= 1.0) break;
        }
        if (cursor < 1.0) {
            Piece sm;
            sm.x0 = cursor;
            sm.x1 = 1.0;
            ps.push_back(sm);
        }
        pieces_ = std::move(ps);
        cum_.assign(pieces_.size() + 1, 0.0);
        for (size_t p = 0; p < pieces_.size(); ++p) {
            const Piece& pc = pieces_[p];
            double seg;
            if (pc.gap < 0) {
                seg = v0_.antideriv(pc.x1) - v0_.antideriv(pc.x0);
            } else {
                const BurgersGap& g = gaps_[static_cast<size_t>(pc.gap)];
                seg = affine_integral(g, pc.x0 + pc.shift, pc.x1 + pc.shift);
            }
            cum_[p + 1] = cum_[p] + seg;
        }
    }

    TrigSeries v0_;
    double T_;
    std::vector<BurgersGap> gaps_;
    std::vector<double> va_, vb_;  // data at the gap contact points
    std::vector<Piece> pieces_;
    std::vector<double> cum_;
};

// ============================================================
// Residual verification of the substitute
// ============================================================

struct SubstituteReport {
    double continuity = 0.0;      // mass equation, weak form
    double direction = 0.0;       // the (T - t) v transport identity
    double recovery = 0.0;        // moment identity with the 1/(T - s) kernel
    double mass_error = 0.0;      // worst |integral rho - 1|
    double min_rho = 0.0;         // most negative density sample
    double oleinik_excess = 0.0;  // worst (dx v - 1/t)+
    double terminal_l1 = 0.0;     // substitute vs Hopf-Lax at t = T
    double max_atom_mass = 0.0;
    double closure = 0.0;
    int gap_count = 0;
};

namespace detail {

// integral from 0 to t of hat_m(s) / (T - s) ds, from the elementary
// antiderivative of (s - alpha)/(T - s): -s - (T - alpha) log(T - s)
inline double hat_over_linear(int mth, double dt, double T, double t) {
    auto ramp = [&](double alpha, double sgn, double s0, double s1) {
        if (s1 <= s0) return 0.0;
        const double prim1 = -s1 - (T - alpha) * std::log(T - s1);
        const double prim0 = -s0 - (T - alpha) * std::log(T - s0);
        return sgn * (prim1 - prim0) / dt;
    };
    const double tl = (mth - 1) * dt, tm = mth * dt, tr = (mth + 1) * dt;
    double s = 0.0;
    s += ramp(tl, 1.0, std::max(tl, 0.0), std::min(tm, t));
    s += ramp(tr, -1.0, std::max(tm, 0.0), std::min(tr, t));
    return s;
}

}  // namespace detail

// Streams slab-center slices of the substitute on an nx-by-nt grid and
// accumulates three weak residuals against hat-times-trig test fields, plus
// pointwise diagnostics. Each residual is normalized by the l1 mass of its
// own summands, so refinement ratios across grids are meaningful.
inline SubstituteReport verify_substitute(const SubstituteProfile& prof, int nx,
                                          int nt, int max_k = 8,
                                          int n_hats = 15) {
    const double T = prof.horizon();
    const double dx = 1.0 / nx, dt = T / nt;
    SubstituteReport rep;
    rep.gap_count = static_cast<int>(prof.gaps().size());
    rep.closure = prof.closure();
    rep.max_atom_mass = prof.max_atom_mass();

    // retained hats: interior nodes thinned to about n_hats, the stretch
    // near T dropped so the recovery kernel stays integrable
    std::vector<int> hats;
    const int m_hi = nt - 1 - std::max(1, nt / 16);
    const int hop = std::max(1, m_hi / std::max(1, n_hats));
    for (int mm = 1; mm <= m_hi; mm += hop) hats.push_back(mm);

    std::vector<double> xs(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i) xs[static_cast<size_t>(i)] = (i + 0.5) * dx;
    std::vector<std::vector<double>> tsin(static_cast<size_t>(max_k) + 1),
        tcos(static_cast<size_t>(max_k) + 1);
    for (int k = 1; k <= max_k; ++k) {
        tsin[static_cast<size_t>(k)].resize(static_cast<size_t>(nx));
        tcos[static_cast<size_t>(k)].resize(static_cast<size_t>(nx));
        for (int i = 0; i < nx; ++i) {
            const double arg = TrigSeries::two_pi * k * xs[static_cast<size_t>(i)];
            tsin[static_cast<size_t>(k)][static_cast<size_t>(i)] = std::sin(arg);
            tcos[static_cast<size_t>(k)][static_cast<size_t>(i)] = std::cos(arg);
        }
    }

    struct Acc {
        double cont = 0, cont_mag = 1e-300;
        double dir = 0, dir_mag = 1e-300;
        double rec = 0, rec_mag = 1e-300;
    };
    std::vector<Acc> acc(hats.size() * static_cast<size_t>(max_k) * 2);

    std::vector<double> v(static_cast<size_t>(nx)), rho(static_cast<size_t>(nx)),
        dv(static_cast<size_t>(nx));

    for (int j = 0; j < nt; ++j) {
        const double t = (j + 0.5) * dt;
        prof.slice(t, xs, v);
        double telescope = 0.0, rho_min = 1e300, ol = -1e300;
        for (int i = 0; i < nx; ++i) {
            const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
            const double diff =
                v[static_cast<size_t>(ip)] - v[static_cast<size_t>(im)];
            dv[static_cast<size_t>(i)] = diff / (2.0 * dx);
            telescope += diff;
            rho[static_cast<size_t>(i)] =
                1.0 + (T - t) * dv[static_cast<size_t>(i)];
            rho_min = std::min(rho_min, rho[static_cast<size_t>(i)]);
            ol = std::max(ol, dv[static_cast<size_t>(i)] - 1.0 / t);
        }
        rep.mass_error =
            std::max(rep.mass_error, std::abs((T - t) * telescope / 2.0));
        rep.min_rho = std::min(rep.min_rho, rho_min);
        rep.oleinik_excess = std::max(rep.oleinik_excess, std::max(ol, 0.0));

        for (int k = 1; k <= max_k; ++k) {
            for (int sc = 0; sc < 2; ++sc) {
                const std::vector<double>& ph =
                    sc == 0 ? tsin[static_cast<size_t>(k)]
                            : tcos[static_cast<size_t>(k)];
                const std::vector<double>& phd =
                    sc == 0 ? tcos[static_cast<size_t>(k)]
                            : tsin[static_cast<size_t>(k)];
                const double dsign = sc == 0 ? 1.0 : -1.0;
                double sv = 0, srho = 0, sq = 0, stv = 0, sq_d = 0;
                double asv = 0, asrho = 0, asq = 0, astv = 0, asq_d = 0;
                for (int i = 0; i < nx; ++i) {
                    const double p = ph[static_cast<size_t>(i)];
                    const double pd = dsign * TrigSeries::two_pi * k *
                                      phd[static_cast<size_t>(i)];
                    const double vi = v[static_cast<size_t>(i)];
                    const double ri = rho[static_cast<size_t>(i)];
                    sv += p * vi;
                    asv += std::abs(p * vi);
                    srho += p * ri;
                    asrho += std::abs(p * ri);
                    sq += p * ri * vi;
                    asq += std::abs(p * ri * vi);
                    stv += p * (T - t) * vi;
                    astv += std::abs(p * (T - t) * vi);
                    sq_d += pd * ri * vi;
                    asq_d += std::abs(pd * ri * vi);
                }
                const double w = dx * dt;
                for (size_t hh = 0; hh < hats.size(); ++hh) {
                    const int mm = hats[hh];
                    const double hat = std::max(0.0, 1.0 - std::abs(t / dt - mm));
                    double hatp = 0.0;  // hat slope, constant on each slab
                    if (j == mm - 1)
                        hatp = 1.0 / dt;
                    else if (j == mm)
                        hatp = -1.0 / dt;
                    Acc& A = acc[(hh * static_cast<size_t>(max_k) + (k - 1)) * 2 +
                                 static_cast<size_t>(sc)];
                    // continuity: <rho, dt theta> + <rho v, dx theta>
                    A.cont += (srho * hatp + sq_d * hat) * w;
                    A.cont_mag += (asrho * std::abs(hatp) + asq_d * hat) * w;
                    // direction: -<(T - t) v, dt theta> + <rho v, theta>
                    A.dir += (-stv * hatp + sq * hat) * w;
                    A.dir_mag += (astv * std::abs(hatp) + asq * hat) * w;
                    // recovery: <psi, v> - <Phi, rho v>
                    const double kern = detail::hat_over_linear(mm, dt, T, t);
                    A.rec += (sv * hat - sq * kern) * w;
                    A.rec_mag += (asv * hat + asq * kern) * w;
                }
            }
        }
    }

    for (const Acc& A : acc) {
        rep.continuity = std::max(rep.continuity, std::abs(A.cont) / A.cont_mag);
        rep.direction = std::max(rep.direction, std::abs(A.dir) / A.dir_mag);
        rep.recovery = std::max(rep.recovery, std::abs(A.rec) / A.rec_mag);
    }

    // terminal slice against a direct Hopf-Lax evaluation of the substitute
    // potential at t = T; they may only disagree near the collapse points
    {
        std::vector<double> vterm(static_cast<size_t>(nx));
        prof.slice(T, xs, vterm);
        const double vmax = prof.data().max_amplitude() + 1.0;
        std::vector<double> vlo = lax_oleinik_slice(
            [&](double y) { return prof.phiT(y); }, vmax, T, xs);
        double l1 = 0.0;
        for (int i = 0; i < nx; ++i)
            l1 += std::abs(vterm[static_cast<size_t>(i)] -
                           vlo[static_cast<size_t>(i)]) *
                  dx;
        rep.terminal_l1 = l1;
    }
    return rep;
}

}  // namespace duality
