#pragma once

#include "duality/model.hpp"

// Scalar model: n = N = 1, F(v) = v^2, K = v^2/2, v# = v, and the transport
// operator L(M) = -(1/2) dM/dx with adjoint L*(w) = (1/2) dw/dx, so that
// d/dt v = L(F(v)) is the quadratic conservation law. The zero-mean side
// constraint l(v) = integral of v is kept as a redundant per-cell constant
// field: the mean stencil is symmetric, hence self-adjoint, and its adjoint
// maps a constant multiplier field to the constant state field required by
// l*. Row sums of derivative stencils vanish, so l(L M) = 0 automatically.

namespace duality {

class BurgersModel final : public Model {
  public:
    BurgersModel() {
        std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
        check_derivatives(rng);
    }

    std::string name() const override { return "burgers"; }
    int state_dim() const override { return 1; }
    int flux_dim() const override { return 1; }
    int constraint_dim() const override { return 1; }

    bool in_domain(const Vec&) const override { return true; }

    Mat flux(const Vec& v) const override {
        Mat f(1);
        f(0, 0) = v[0] * v[0];
        return f;
    }
    Mat dflux(const Vec& v, int l) const override {
        (void)l;
        Mat f(1);
        f(0, 0) = 2.0 * v[0];
        return f;
    }
    Vec sharp(const Vec& v) const override { return v; }
    Vec sharp_inverse(const Vec& vs) const override { return vs; }

    Vec reference_point() const override {
        Vec v(1);
        v[0] = 0.7;
        return v;
    }
    Vec stationary_point() const override {
        Vec v(1);
        v[0] = 0.0;  // the only constant with zero mean
        return v;
    }
    Vec random_point(std::mt19937_64& rng) const override {
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        Vec v(1);
        v[0] = uni(rng);
        return v;
    }

    void apply_L(const Stencils& st, const double* M, double* out,
                 int nx) const override {
        st.d1.apply_line(M, out, nx);
        for (int i = 0; i < nx; ++i) out[i] *= -0.5;
    }
    void apply_Lstar(const Stencils& st, const double* w, double* out,
                     int nx) const override {
        st.d1.apply_line(w, out, nx);
        for (int i = 0; i < nx; ++i) out[i] *= 0.5;
    }
    void apply_constraint(const Stencils& st, const double* v, double* out,
                          int nx) const override {
        double s = 0.0;
        for (int i = 0; i < nx; ++i) s += v[i];
        s *= st.dx;
        for (int i = 0; i < nx; ++i) out[i] = s;
    }
    void apply_constraint_adjoint(const Stencils& st, const double* c, double* out,
                                  int nx) const override {
        apply_constraint(st, c, out, nx);
    }
};

}  // namespace duality
