#pragma once

#include "duality/model.hpp"

// Barotropic flow in one space dimension: v = (q, rho), n = N = 2,
//
//   F(v) = [ q^2/rho + P(rho)   q            ]
//          [ q                  2U(rho) - P(rho) ]
//
// so tr F = q^2/rho + 2U(rho) = 2K. The evolution d/dt v = L(F(v)) with
// L(M) = (-dM11/dx, -dM12/dx) reproduces mass and momentum conservation,
// and the adjoint acts on sharp multipliers w = (xi, theta) by
// L*(w) = 1/2 [ 2 dxi/dx   dtheta/dx ; dtheta/dx   0 ].
// There is no side constraint.

namespace duality {

class BarotropicModel final : public Model {
  public:
    explicit BarotropicModel(EnergyFunction energy = EnergyFunction::make_ylogy())
        : u_(energy) {
        std::mt19937_64 rng(0xc2b2ae3d27d4eb4full);
        check_derivatives(rng);
    }

    std::string name() const override { return "barotropic"; }
    int state_dim() const override { return 2; }
    int flux_dim() const override { return 2; }
    int constraint_dim() const override { return 0; }
    int rho_component() const override { return 1; }

    const EnergyFunction& energy() const { return u_; }

    bool in_domain(const Vec& v) const override { return v[1] > 0.0; }

    Mat flux(const Vec& v) const override {
        require_domain(v);
        const double q = v[0], rho = v[1];
        Mat f(2);
        f(0, 0) = q * q / rho + u_.pressure(rho);
        f(0, 1) = f(1, 0) = q;
        f(1, 1) = 2.0 * u_.value(rho) - u_.pressure(rho);
        return f;
    }

    Mat dflux(const Vec& v, int l) const override {
        require_domain(v);
        const double q = v[0], rho = v[1];
        const double uu = q / rho;
        Mat f(2);
        if (l == 0) {
            f(0, 0) = 2.0 * uu;
            f(0, 1) = f(1, 0) = 1.0;
        } else {
            f(0, 0) = -uu * uu + u_.dpressure(rho);
            f(1, 1) = 2.0 * u_.deriv(rho) - u_.dpressure(rho);
        }
        return f;
    }

    Vec sharp(const Vec& v) const override {
        require_domain(v);
        const double q = v[0], rho = v[1];
        Vec s(2);
        s[0] = q / rho;
        s[1] = -q * q / (2.0 * rho * rho) + u_.deriv(rho);
        return s;
    }

    Vec sharp_inverse(const Vec& vs) const override {
        const double uu = vs[0], zeta = vs[1];
        const double rho = u_.deriv_inverse(zeta + 0.5 * uu * uu);
        Vec v(2);
        v[0] = rho * uu;
        v[1] = rho;
        return v;
    }

    Vec reference_point() const override {
        Vec v(2);
        v[0] = 1.0;
        v[1] = 1.0;
        return v;
    }
    Vec stationary_point() const override {
        Vec v(2);
        v[0] = 0.0;
        v[1] = 1.0;
        return v;
    }
    Vec random_point(std::mt19937_64& rng) const override {
        std::uniform_real_distribution<double> uq(-2.0, 2.0), ur(0.2, 3.0);
        Vec v(2);
        v[0] = uq(rng);
        v[1] = ur(rng);
        return v;
    }

    void apply_L(const Stencils& st, const double* M, double* out,
                 int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        // row q: -d/dx M11
        detail::gather(M, nx, 4, 0, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[2 * i + 0] = -w.out[static_cast<size_t>(i)];
        // row rho: -d/dx M12
        detail::gather(M, nx, 4, 1, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[2 * i + 1] = -w.out[static_cast<size_t>(i)];
    }

    void apply_Lstar(const Stencils& st, const double* w, double* out,
                     int nx) const override {
        auto& ws = detail::work();
        ws.resize(nx);
        for (int i = 0; i < 4 * nx; ++i) out[i] = 0.0;
        // d xi / dx into (0,0)
        detail::gather(w, nx, 2, 0, ws.in.data());
        st.d1.apply_line(ws.in.data(), ws.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[4 * i + 0] = ws.out[static_cast<size_t>(i)];
        // (1/2) d theta / dx into (0,1) and (1,0)
        detail::gather(w, nx, 2, 1, ws.in.data());
        st.d1.apply_line(ws.in.data(), ws.out.data(), nx);
        for (int i = 0; i < nx; ++i) {
            const double half = 0.5 * ws.out[static_cast<size_t>(i)];
            out[4 * i + 1] = half;
            out[4 * i + 2] = half;
        }
    }

  private:
    void require_domain(const Vec& v) const {
        if (!(v[1] > 0.0))
            throw PreconditionError("barotropic: flux needs rho > 0, got rho = " +
                                    std::to_string(v[1]));
    }

    EnergyFunction u_;
};

}  // namespace duality
