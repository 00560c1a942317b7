#pragma once

#include "duality/model.hpp"

// Quantum hydrodynamics in one space dimension with the gradient component
// carried as an independent state: v = (q, G, rho), n = N = 3, where G is
// tied to d rho / dx through the side constraint l(v) = d rho/dx - G = 0.
//
//   F(v) = v (x) v / rho + P(rho) e1 (x) e1 + (2U - P - rho) e3 (x) e3,
//
// and with M = [ Xi Gam g ; Gam Ups r ; g r kap ] the operator reads
//
//   L(M) = ( -d/dx Xi - d/dx Ups + d2/dx2 r,  -d2/dx2 g,  -d/dx g ),
//
// whose adjoint on sharp multipliers w = (eta, ups, theta) is
//
//   L*(w) = 1/2 [ 2 eta'      0          -ups'' + theta' ]
//               [ 0           2 eta'      eta''          ]
//               [ -ups''+theta'  eta''    0              ].
//
// The constraint adjoint is l*(c) = (0, -c, -dc/dx).

namespace duality {

class QhdModel final : public Model {
  public:
    explicit QhdModel(EnergyFunction energy = EnergyFunction::make_ylogy())
        : u_(energy) {
        std::mt19937_64 rng(0x165667b19e3779f9ull);
        check_derivatives(rng);
    }

    std::string name() const override { return "qhd"; }
    int state_dim() const override { return 3; }
    int flux_dim() const override { return 3; }
    int constraint_dim() const override { return 1; }
    int rho_component() const override { return 2; }

    const EnergyFunction& energy() const { return u_; }

    bool in_domain(const Vec& v) const override { return v[2] > 0.0; }

    Mat flux(const Vec& v) const override {
        require_domain(v);
        const double q = v[0], G = v[1], rho = v[2];
        Mat f(3);
        f(0, 0) = q * q / rho + u_.pressure(rho);
        f(0, 1) = f(1, 0) = q * G / rho;
        f(0, 2) = f(2, 0) = q;
        f(1, 1) = G * G / rho;
        f(1, 2) = f(2, 1) = G;
        f(2, 2) = 2.0 * u_.value(rho) - u_.pressure(rho);
        return f;
    }

    Mat dflux(const Vec& v, int l) const override {
        require_domain(v);
        const double q = v[0], G = v[1], rho = v[2];
        const double uu = q / rho, lam = G / rho;
        Mat f(3);
        if (l == 0) {
            f(0, 0) = 2.0 * uu;
            f(0, 1) = f(1, 0) = lam;
            f(0, 2) = f(2, 0) = 1.0;
        } else if (l == 1) {
            f(0, 1) = f(1, 0) = uu;
            f(1, 1) = 2.0 * lam;
            f(1, 2) = f(2, 1) = 1.0;
        } else {
            f(0, 0) = -uu * uu + u_.dpressure(rho);
            f(0, 1) = f(1, 0) = -uu * lam;
            f(1, 1) = -lam * lam;
            f(2, 2) = 2.0 * u_.deriv(rho) - u_.dpressure(rho);
        }
        return f;
    }

    Vec sharp(const Vec& v) const override {
        require_domain(v);
        const double q = v[0], G = v[1], rho = v[2];
        Vec s(3);
        s[0] = q / rho;
        s[1] = G / rho;
        s[2] = -(q * q + G * G) / (2.0 * rho * rho) + u_.deriv(rho);
        return s;
    }

    Vec sharp_inverse(const Vec& vs) const override {
        const double uu = vs[0], lam = vs[1], zeta = vs[2];
        const double rho = u_.deriv_inverse(zeta + 0.5 * (uu * uu + lam * lam));
        Vec v(3);
        v[0] = rho * uu;
        v[1] = rho * lam;
        v[2] = rho;
        return v;
    }

    Vec reference_point() const override {
        Vec v(3);
        v[0] = 0.5;
        v[1] = -0.3;
        v[2] = 1.0;
        return v;
    }
    Vec stationary_point() const override {
        Vec v(3);
        v[0] = 0.0;
        v[1] = 0.0;  // G = d/dx rho = 0 for constant density
        v[2] = 1.0;
        return v;
    }
    Vec random_point(std::mt19937_64& rng) const override {
        std::uniform_real_distribution<double> uq(-2.0, 2.0), ur(0.2, 3.0);
        Vec v(3);
        v[0] = uq(rng);
        v[1] = uq(rng);
        v[2] = ur(rng);
        return v;
    }

    void apply_L(const Stencils& st, const double* M, double* out,
                 int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        // row q: -Xi' - Ups' + r''   (Xi = M00, Ups = M11, r = M12)
        detail::gather(M, nx, 9, 0, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[3 * i + 0] = -w.out[static_cast<size_t>(i)];
        detail::gather(M, nx, 9, 4, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[3 * i + 0] -= w.out[static_cast<size_t>(i)];
        detail::gather(M, nx, 9, 5, w.in.data());
        st.d2.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[3 * i + 0] += w.out[static_cast<size_t>(i)];
        // rows G and rho share g = M02: G row -g'', rho row -g'
        detail::gather(M, nx, 9, 2, w.in.data());
        st.d2.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[3 * i + 1] = -w.out[static_cast<size_t>(i)];
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[3 * i + 2] = -w.out[static_cast<size_t>(i)];
    }

    void apply_Lstar(const Stencils& st, const double* w, double* out,
                     int nx) const override {
        auto& ws = detail::work();
        ws.resize(nx);
        std::vector<double>& eta1 = ws.in;    // eta'
        std::vector<double>& scratch = ws.out;
        for (int i = 0; i < 9 * nx; ++i) out[i] = 0.0;
        // eta' on (0,0), (1,1); eta'' on (1,2)+(2,1)
        detail::gather(w, nx, 3, 0, scratch.data());
        st.d1.apply_line(scratch.data(), eta1.data(), nx);
        for (int i = 0; i < nx; ++i) {
            out[9 * i + 0] = eta1[static_cast<size_t>(i)];
            out[9 * i + 4] = eta1[static_cast<size_t>(i)];
        }
        st.d1.apply_line(eta1.data(), ws.tmp.data(), nx);  // eta''
        for (int i = 0; i < nx; ++i) {
            const double half = 0.5 * ws.tmp[static_cast<size_t>(i)];
            out[9 * i + 5] = half;
            out[9 * i + 7] = half;
        }
        // (-ups'' + theta')/2 on (0,2)+(2,0)
        detail::gather(w, nx, 3, 1, scratch.data());
        st.d2.apply_line(scratch.data(), ws.tmp.data(), nx);  // ups''
        detail::gather(w, nx, 3, 2, scratch.data());
        st.d1.apply_line(scratch.data(), eta1.data(), nx);  // theta'
        for (int i = 0; i < nx; ++i) {
            const double half =
                0.5 * (eta1[static_cast<size_t>(i)] - ws.tmp[static_cast<size_t>(i)]);
            out[9 * i + 2] = half;
            out[9 * i + 6] = half;
        }
    }

    void apply_constraint(const Stencils& st, const double* v, double* out,
                          int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        detail::gather(v, nx, 3, 2, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i)
            out[i] = w.out[static_cast<size_t>(i)] - v[3 * i + 1];
    }

    void apply_constraint_adjoint(const Stencils& st, const double* c, double* out,
                                  int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        st.d1.apply_line(c, w.out.data(), nx);
        for (int i = 0; i < nx; ++i) {
            out[3 * i + 0] = 0.0;
            out[3 * i + 1] = -c[i];
            out[3 * i + 2] = -w.out[static_cast<size_t>(i)];
        }
    }

  private:
    void require_domain(const Vec& v) const {
        if (!(v[2] > 0.0))
            throw PreconditionError("qhd: flux needs rho > 0, got rho = " +
                                    std::to_string(v[2]));
    }

    EnergyFunction u_;
};

}  // namespace duality
