#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "duality/errors.hpp"
#include "duality/grid.hpp"
#include "duality/smallmat.hpp"

// Abstract model interface for first-order systems d/dt v = L(F(v)) with a
// convex matrix flux F, optional linear side constraint l(v) = 0, and the
// entropy K(v) = tr F(v) / 2. Models supply the flux, its analytic state
// derivatives, the sharp change of variables v# = grad K and its inverse,
// and per-slice kernels for L, L*, l, l*.
//
// Slice layouts match StateField / MatrixField: a state slice stores n
// doubles per cell, a matrix slice N*N doubles per cell, a constraint slice
// zc doubles per cell (zc = 0 when there is no constraint; the zero-mean
// constraint of the scalar model is represented redundantly as a constant
// per-cell field so that one layout serves all models).

namespace duality {

// ============================================================
// Internal energy
// ============================================================

// U(y) on y >= 0 together with the induced pressure
// P(y) = U'(y) y - U(y) + U(0). Normalization adds the constant c0 that
// makes g(y) = 2 U(y) - P(y) - y nonnegative with min 0, which keeps the
// last diagonal flux entry 2U - P - y admissible.
struct EnergyFunction {
    enum class Kind { ylogy, power };

    Kind kind = Kind::ylogy;
    double coef = 1.0;   // power kind: U = coef * y^sigma + c0
    double sigma = 2.0;  // power kind exponent, sigma > 1
    double c0 = 0.0;

    static EnergyFunction make_ylogy() {
        EnergyFunction u;
        u.kind = Kind::ylogy;
        u.c0 = 1.0;  // min of 2(y log y + c0) - y - y is at y = 1
        u.validate_normalization();
        return u;
    }

    // U = coef y^sigma + c0 with c0 chosen so min g = 0 (requires sigma < 3,
    // which covers the interface exponents s in (-1, 1)).
    static EnergyFunction make_power(double coef, double sigma) {
        if (!(coef > 0.0) || !(sigma > 1.0) || !(sigma < 3.0))
            throw ConfigError("power energy needs coef > 0 and 1 < sigma < 3");
        EnergyFunction u;
        u.kind = Kind::power;
        u.coef = coef;
        u.sigma = sigma;
        // g(y) = coef (3 - sigma) y^sigma - y + 2 c0, minimized at
        // y* = (coef sigma (3 - sigma))^(-1/(sigma-1)).
        const double ystar =
            std::pow(coef * sigma * (3.0 - sigma), -1.0 / (sigma - 1.0));
        u.c0 = 0.5 * (ystar - coef * (3.0 - sigma) * std::pow(ystar, sigma));
        u.validate_normalization();
        return u;
    }

    double value(double y) const {
        if (kind == Kind::ylogy) return (y > 0.0 ? y * std::log(y) : 0.0) + c0;
        return coef * std::pow(y, sigma) + c0;
    }
    double deriv(double y) const {
        if (kind == Kind::ylogy) return std::log(y) + 1.0;
        return coef * sigma * std::pow(y, sigma - 1.0);
    }
    double at_zero() const { return c0; }
    double pressure(double y) const {
        if (kind == Kind::ylogy) return y;
        return coef * (sigma - 1.0) * std::pow(y, sigma);
    }
    double dpressure(double y) const {
        if (kind == Kind::ylogy) return 1.0;
        return coef * sigma * (sigma - 1.0) * std::pow(y, sigma - 1.0);
    }
    // Inverse of U' on y > 0.
    double deriv_inverse(double z) const {
        if (kind == Kind::ylogy) return std::exp(z - 1.0);
        if (!(z > 0.0))
            throw PreconditionError("U' inverse of a power energy needs z > 0");
        return std::pow(z / (coef * sigma), 1.0 / (sigma - 1.0));
    }
    // g(y) = 2U - P - y, the last diagonal flux entry at (0, ..., 0, y).
    double margin(double y) const { return 2.0 * value(y) - pressure(y) - y; }

    // 1D scan confirming min g ~ 0 and g >= -1e-10 everywhere sampled.
    void validate_normalization() const {
        double lo = 1e30;
        for (int k = 0; k <= 4000; ++k) {
            const double y = 1e-6 + 10.0 * k / 4000.0;
            const double g = margin(y);
            if (g < -1e-10)
                throw InternalError("energy normalization: margin " +
                                    std::to_string(g) + " at y = " +
                                    std::to_string(y));
            lo = std::min(lo, g);
        }
        if (std::abs(lo) > 1e-6)
            throw InternalError("energy normalization: scanned min margin " +
                                std::to_string(lo) + " is not ~0");
    }
};

// ============================================================
// Model base
// ============================================================

class Model {
  public:
    virtual ~Model() = default;

    virtual std::string name() const = 0;
    virtual int state_dim() const = 0;       // n
    virtual int flux_dim() const = 0;        // N
    virtual int constraint_dim() const = 0;  // zc (per-cell components)
    virtual int rho_component() const { return -1; }
    virtual double rho_floor() const { return 0.0; }

    virtual bool in_domain(const Vec& v) const = 0;
    virtual Mat flux(const Vec& v) const = 0;
    virtual Mat dflux(const Vec& v, int l) const = 0;
    virtual Vec sharp(const Vec& v) const = 0;
    virtual Vec sharp_inverse(const Vec& vs) const = 0;

    double entropy(const Vec& v) const { return 0.5 * flux(v).trace(); }

    // A representative interior point and a random admissible probe; both
    // are used by derivative checks and property tests.
    virtual Vec reference_point() const = 0;
    // spatially constant admissible state annihilated by the dynamics and
    // compatible with the side constraint
    virtual Vec stationary_point() const = 0;
    virtual Vec random_point(std::mt19937_64& rng) const = 0;

    // Slice kernels. M is a matrix slice (nx * N * N), out for apply_L is a
    // state slice (nx * n); w is a state slice carrying the multiplier in
    // sharp variables, out for apply_Lstar a matrix slice. Constraint slices
    // hold zc doubles per cell.
    virtual void apply_L(const Stencils& st, const double* M, double* out,
                         int nx) const = 0;
    virtual void apply_Lstar(const Stencils& st, const double* w, double* out,
                             int nx) const = 0;
    virtual void apply_constraint(const Stencils& st, const double* v, double* out,
                                  int nx) const {
        (void)st;
        (void)v;
        (void)out;
        (void)nx;
    }
    virtual void apply_constraint_adjoint(const Stencils& st, const double* c,
                                          double* out, int nx) const {
        (void)st;
        (void)c;
        (void)nx;
        for (int i = 0; i < nx * state_dim(); ++i) out[i] = 0.0;
    }

  protected:
    // Cross-check dflux against centered finite differences at a handful of
    // probe points; called once from each model constructor.
    void check_derivatives(std::mt19937_64& rng, int points = 5) const {
        const int n = state_dim();
        for (int p = 0; p < points; ++p) {
            const Vec v = (p == 0) ? reference_point() : random_point(rng);
            for (int l = 0; l < n; ++l) {
                const double eps = 1e-6 * std::max(1.0, std::abs(v[l]));
                Vec vp = v, vm = v;
                vp[l] += eps;
                vm[l] -= eps;
                if (!in_domain(vp) || !in_domain(vm)) continue;
                const Mat fd = (flux(vp) - flux(vm)) * (0.5 / eps);
                const Mat an = dflux(v, l);
                const double err = (fd - an).max_abs();
                const double scale = std::max(1.0, an.max_abs());
                if (err > 5e-5 * scale)
                    throw InternalError(name() + ": analytic dF mismatch " +
                                        std::to_string(err) + " in component " +
                                        std::to_string(l));
            }
        }
    }
};

// ============================================================
// Shared helpers for slice kernels
// ============================================================

namespace detail {

// Gather component c of an interleaved slice into a contiguous line.
inline void gather(const double* slice, int nx, int stride, int c, double* line) {
    for (int i = 0; i < nx; ++i) line[i] = slice[static_cast<size_t>(i) * stride + c];
}

// out[i*stride + c] (+)= line[i]
inline void scatter(double* slice, int nx, int stride, int c, const double* line,
                    bool add) {
    if (add)
        for (int i = 0; i < nx; ++i)
            slice[static_cast<size_t>(i) * stride + c] += line[i];
    else
        for (int i = 0; i < nx; ++i)
            slice[static_cast<size_t>(i) * stride + c] = line[i];
}

struct LineWork {
    std::vector<double> in, out, tmp;
    void resize(int nx) {
        in.resize(static_cast<size_t>(nx));
        out.resize(static_cast<size_t>(nx));
        tmp.resize(static_cast<size_t>(nx));
    }
};

inline LineWork& work() {
    thread_local LineWork w;
    return w;
}

}  // namespace detail

}  // namespace duality
