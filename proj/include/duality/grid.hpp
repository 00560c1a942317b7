#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "duality/errors.hpp"
#include "duality/smallmat.hpp"

// Space-time discretization of [0,T) x [0,1) with periodic cells in space.
//
// Space is cell-centered: x_i = (i + 1/2) dx, dx = 1/nx. Time is split into
// nt slabs [t_j, t_{j+1}) with nodes t_j = j dt, dt = T/nt. Node fields carry
// nt+1 slices; slab fields (dual densities E, B and subsolution slabs) carry
// nt slices and have no data at t = T, which is how the terminal condition
// B(T) = 0 is imposed. Smooth slab densities are sampled at slab centers
// t_j + dt/2.

namespace duality {

struct SpaceTimeGrid {
    int nx = 0;
    int nt = 0;
    double T = 0.0;

    SpaceTimeGrid() = default;
    SpaceTimeGrid(int nx_, int nt_, double T_) : nx(nx_), nt(nt_), T(T_) {
        if (nx < 1 || nt < 1 || !(T > 0.0))
            throw ConfigError("grid: need nx >= 1, nt >= 1, T > 0");
    }

    double dx() const { return 1.0 / nx; }
    double dt() const { return T / nt; }
    double x(int i) const { return (i + 0.5) * dx(); }
    double t_node(int j) const { return j * dt(); }
    double t_slab(int j) const { return (j + 0.5) * dt(); }
    int wrap(int i) const {
        int r = i % nx;
        return r < 0 ? r + nx : r;
    }
};

// A time-indexed family of state slices, `comps` doubles per cell.
// `slices` is nt+1 for node fields and nt for slab fields.
struct StateField {
    int slices = 0, nx = 0, comps = 0;
    std::vector<double> a;

    StateField() = default;
    StateField(int slices_, int nx_, int comps_)
        : slices(slices_), nx(nx_), comps(comps_),
          a(static_cast<size_t>(slices_) * nx_ * comps_, 0.0) {}

    double& at(int j, int i, int c) {
        return a[(static_cast<size_t>(j) * nx + i) * comps + c];
    }
    double at(int j, int i, int c) const {
        return a[(static_cast<size_t>(j) * nx + i) * comps + c];
    }
    double* slice(int j) { return a.data() + static_cast<size_t>(j) * nx * comps; }
    const double* slice(int j) const {
        return a.data() + static_cast<size_t>(j) * nx * comps;
    }
    Vec cell(int j, int i) const {
        Vec v(comps);
        for (int c = 0; c < comps; ++c) v[c] = at(j, i, c);
        return v;
    }
    void set_cell(int j, int i, const Vec& v) {
        for (int c = 0; c < comps; ++c) at(j, i, c) = v[c];
    }
};

// A time-indexed family of symmetric dim x dim matrices per cell.
struct MatrixField {
    int slices = 0, nx = 0, dim = 0;
    std::vector<double> a;

    MatrixField() = default;
    MatrixField(int slices_, int nx_, int dim_)
        : slices(slices_), nx(nx_), dim(dim_),
          a(static_cast<size_t>(slices_) * nx_ * dim_ * dim_, 0.0) {}

    double& at(int j, int i, int r, int c) {
        return a[((static_cast<size_t>(j) * nx + i) * dim + r) * dim + c];
    }
    double at(int j, int i, int r, int c) const {
        return a[((static_cast<size_t>(j) * nx + i) * dim + r) * dim + c];
    }
    double* slice(int j) {
        return a.data() + static_cast<size_t>(j) * nx * dim * dim;
    }
    const double* slice(int j) const {
        return a.data() + static_cast<size_t>(j) * nx * dim * dim;
    }
    Mat cell(int j, int i) const {
        Mat m(dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) m(r, c) = at(j, i, r, c);
        return m;
    }
    void set_cell(int j, int i, const Mat& m) {
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) at(j, i, r, c) = m(r, c);
    }
    double asym_norm() const {
        double worst = 0.0;
        for (int j = 0; j < slices; ++j)
            for (int i = 0; i < nx; ++i)
                worst = std::max(worst, cell(j, i).asym_norm());
        return worst;
    }
};

// ---------------------------------------------------------------------------
// Periodic stencils
// ---------------------------------------------------------------------------

// A circulant stencil on one periodic line of nx samples, plus the dense
// "mean" kind (every output cell holds the spatial integral). Second
// derivatives are realized as two passes of the first-derivative stencil so
// that discrete identities like d/dx(d/dx f) and L applied to constant fields
// hold exactly, not just to rounding of independently composed taps.
// Antisymmetric taps are evaluated in the paired form
// sum_k t_k (f_{i+k} - f_{i-k}), which returns exact zero on constants.
struct StencilOperator {
    enum class Kind { ddx, d2dx2, identity, mean };

    Kind kind = Kind::identity;
    int order = 2;
    int radius = 0;
    int passes = 1;
    double dx = 1.0;
    std::vector<double> taps;  // taps[radius + k] multiplies f_{i+k}

    bool antisymmetric() const {
        for (int k = 1; k <= radius; ++k)
            if (taps[static_cast<size_t>(radius + k)] !=
                -taps[static_cast<size_t>(radius - k)])
                return false;
        return radius > 0 && taps[static_cast<size_t>(radius)] == 0.0;
    }

    void apply_once(const double* f, double* out, int nx) const {
        if (kind == Kind::mean) {
            double s = 0.0;
            for (int i = 0; i < nx; ++i) s += f[i];
            s *= dx;
            for (int i = 0; i < nx; ++i) out[i] = s;
            return;
        }
        if (kind == Kind::identity) {
            for (int i = 0; i < nx; ++i) out[i] = f[i];
            return;
        }
        const bool anti = antisymmetric();
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            if (anti) {
                for (int k = 1; k <= radius; ++k) {
                    int ip = i + k, im = i - k;
                    ip %= nx;
                    if (ip < 0) ip += nx;
                    im %= nx;
                    if (im < 0) im += nx;
                    s += taps[static_cast<size_t>(radius + k)] * (f[ip] - f[im]);
                }
            } else {
                for (int k = -radius; k <= radius; ++k) {
                    int idx = i + k;
                    idx %= nx;
                    if (idx < 0) idx += nx;
                    s += taps[static_cast<size_t>(radius + k)] * f[idx];
                }
            }
            out[i] = s;
        }
    }

    void apply_line(const double* f, double* out, int nx) const {
        if (passes == 1) {
            apply_once(f, out, nx);
            return;
        }
        thread_local std::vector<double> scratch;
        scratch.resize(static_cast<size_t>(nx));
        apply_once(f, scratch.data(), nx);
        apply_once(scratch.data(), out, nx);
    }

    std::vector<double> apply(const std::vector<double>& f) const {
        std::vector<double> out(f.size());
        apply_line(f.data(), out.data(), static_cast<int>(f.size()));
        return out;
    }

    // Exact transpose with respect to the plain (equivalently dx-weighted,
    // the grid being uniform) inner product: taps reversed, pass count kept.
    StencilOperator adjoint() const {
        StencilOperator t = *this;
        if (kind == Kind::mean || kind == Kind::identity) return t;
        for (int k = -radius; k <= radius; ++k)
            t.taps[static_cast<size_t>(radius + k)] =
                taps[static_cast<size_t>(radius - k)];
        return t;
    }
};

inline StencilOperator make_identity() {
    StencilOperator s;
    s.kind = StencilOperator::Kind::identity;
    s.radius = 0;
    s.taps = {1.0};
    return s;
}

inline StencilOperator make_mean(double dx) {
    StencilOperator s;
    s.kind = StencilOperator::Kind::mean;
    s.dx = dx;
    return s;
}

inline StencilOperator make_ddx(int order, double dx) {
    StencilOperator s;
    s.kind = StencilOperator::Kind::ddx;
    s.order = order;
    s.dx = dx;
    if (order == 2) {
        const double h = 0.5 / dx;
        s.radius = 1;
        s.taps = {-h, 0.0, h};
    } else if (order == 4) {
        const double b = 1.0 / (12.0 * dx);
        s.radius = 2;
        s.taps = {b, -8.0 * b, 0.0, 8.0 * b, -b};
    } else {
        throw ConfigError("stencil order must be 2 or 4");
    }
    return s;
}

inline StencilOperator make_d2dx2(int order, double dx) {
    StencilOperator s = make_ddx(order, dx);
    s.kind = StencilOperator::Kind::d2dx2;
    s.passes = 2;
    return s;
}

// The derivative stencils used throughout a run: solver paths use order 2,
// verification paths order 4.
struct Stencils {
    StencilOperator d1;
    StencilOperator d2;
    double dx = 1.0;
    int order = 2;

    Stencils() = default;
    Stencils(int order_, double dx_)
        : d1(make_ddx(order_, dx_)), d2(make_d2dx2(order_, dx_)), dx(dx_),
          order(order_) {}
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

inline double space_integral(const double* f, int nx, double dx) {
    double s = 0.0;
    for (int i = 0; i < nx; ++i) s += f[i];
    return s * dx;
}

inline double space_integral(const std::vector<double>& f, double dx) {
    return space_integral(f.data(), static_cast<int>(f.size()), dx);
}

// Space-time integral of a node field component: trapezoidal in time at the
// endpoints, plain sum in space.
inline double spacetime_integral_nodes(const SpaceTimeGrid& g, const StateField& f,
                                       int comp) {
    double s = 0.0;
    for (int j = 0; j <= g.nt; ++j) {
        double w = (j == 0 || j == g.nt) ? 0.5 : 1.0;
        double row = 0.0;
        for (int i = 0; i < g.nx; ++i) row += f.at(j, i, comp);
        s += w * row;
    }
    return s * g.dx() * g.dt();
}

// Space-time integral of a slab field component (midpoint rule in time).
inline double spacetime_integral_slabs(const SpaceTimeGrid& g, const StateField& f,
                                       int comp) {
    double s = 0.0;
    for (int j = 0; j < g.nt; ++j)
        for (int i = 0; i < g.nx; ++i) s += f.at(j, i, comp);
    return s * g.dx() * g.dt();
}

// ---------------------------------------------------------------------------
// Adjointness probe
// ---------------------------------------------------------------------------

// max over random f, g of |<S f, g> - <f, S^T g>| / scale.
inline double adjointness_check(const StencilOperator& s, int nx, int trials,
                                uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const StencilOperator st = s.adjoint();
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> f(static_cast<size_t>(nx)), g(static_cast<size_t>(nx));
        for (auto& v : f) v = uni(rng);
        for (auto& v : g) v = uni(rng);
        const std::vector<double> sf = s.apply(f);
        const std::vector<double> stg = st.apply(g);
        double lhs = 0.0, rhs = 0.0, nf = 0.0, ng = 0.0;
        for (int i = 0; i < nx; ++i) {
            lhs += sf[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
            rhs += f[static_cast<size_t>(i)] * stg[static_cast<size_t>(i)];
            nf += f[static_cast<size_t>(i)] * f[static_cast<size_t>(i)];
            ng += g[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
        }
        const double scale = std::max(1.0, std::sqrt(nf * ng) / s.dx);
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

}  // namespace duality
