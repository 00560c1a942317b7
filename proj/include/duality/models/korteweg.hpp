#pragma once

#include "duality/model.hpp"

// Euler-Korteweg system with a power-law capillarity exponent s > -1, in the
// augmented variables v = (q, G, xi, rho): xi carries rho^nu with
// nu = (s+3)/2 and G carries d xi / dx via the side constraint
// l(v) = d xi / dx - G = 0. The energy is U(y) = y^{s+2} / (2(s+1)) + c0,
// whose induced pressure is P(y) = y^{s+2} / 2.
//
//   F(v) = v (x) v / rho + P(rho) e1 (x) e1 + (2U - P - rho) e4 (x) e4.
//
// With M = [ Xi Gam a g ; Gam Ups b r ; a b alf bet ; g r bet kap ]:
//
//   L(M) = ( -Xi' - nu Ups' - (nu-1) alf' + nu b'',
//            -nu a'' + (nu-1) Gam',
//            -nu a' + (nu-1) Gam,
//            -g' ),
//
// and the adjoint on w = (eta, ups, pi, theta) has the symmetric entries
//   (1,1) = eta', (2,2) = nu eta', (3,3) = (nu-1) eta',
//   (1,2) = (1-nu)(ups' - pi)/2, (1,3) = nu (pi' - ups'')/2,
//   (1,4) = theta'/2, (2,3) = nu eta''/2, rest zero.
// The zero-order couplings act on entries that vanish on the identity, so
// L(I) = 0 holds exactly at the stencil level.

namespace duality {

class KortewegModel final : public Model {
  public:
    explicit KortewegModel(double s = -0.5)
        : s_(s), nu_(0.5 * (s + 3.0)),
          u_(EnergyFunction::make_power(0.5 / (s + 1.0), s + 2.0)) {
        if (!(s > -1.0) || !(s < 1.0))
            throw ConfigError("korteweg: exponent s must lie in (-1, 1)");
        std::mt19937_64 rng(0x27d4eb2f165667c5ull);
        check_derivatives(rng);
    }

    std::string name() const override { return "korteweg"; }
    int state_dim() const override { return 4; }
    int flux_dim() const override { return 4; }
    int constraint_dim() const override { return 1; }
    int rho_component() const override { return 3; }

    double exponent_s() const { return s_; }
    double nu() const { return nu_; }
    const EnergyFunction& energy() const { return u_; }

    bool in_domain(const Vec& v) const override { return v[3] > 0.0; }

    Mat flux(const Vec& v) const override {
        require_domain(v);
        const double rho = v[3];
        Mat f(4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) f(r, c) = v[r] * v[c] / rho;
        f(0, 0) += u_.pressure(rho);
        f(3, 3) = 2.0 * u_.value(rho) - u_.pressure(rho);
        return f;
    }

    Mat dflux(const Vec& v, int l) const override {
        require_domain(v);
        const double rho = v[3];
        Mat f(4);
        if (l < 3) {
            // d/dv_l of v (x) v / rho: e_l (x) v/rho + v/rho (x) e_l.
            // The (l,3) pair picks up v_3/rho = 1 exactly; the (4,4) slot is
            // 2U - P and does not depend on q, G, xi.
            for (int c = 0; c < 4; ++c) {
                f(l, c) += v[c] / rho;
                f(c, l) += v[c] / rho;
            }
        } else {
            const double s0 = v[0] / rho, s1 = v[1] / rho, s2 = v[2] / rho;
            const double sh[3] = {s0, s1, s2};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) f(r, c) = -sh[r] * sh[c];
            f(0, 0) += u_.dpressure(rho);
            f(3, 3) = 2.0 * u_.deriv(rho) - u_.dpressure(rho);
        }
        return f;
    }

    Vec sharp(const Vec& v) const override {
        require_domain(v);
        const double rho = v[3];
        Vec s(4);
        s[0] = v[0] / rho;
        s[1] = v[1] / rho;
        s[2] = v[2] / rho;
        s[3] = -(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / (2.0 * rho * rho) +
               u_.deriv(rho);
        return s;
    }

    Vec sharp_inverse(const Vec& vs) const override {
        const double norm2 = vs[0] * vs[0] + vs[1] * vs[1] + vs[2] * vs[2];
        const double rho = u_.deriv_inverse(vs[3] + 0.5 * norm2);
        Vec v(4);
        v[0] = rho * vs[0];
        v[1] = rho * vs[1];
        v[2] = rho * vs[2];
        v[3] = rho;
        return v;
    }

    Vec reference_point() const override {
        Vec v(4);
        v[0] = 0.4;
        v[1] = -0.2;
        v[2] = 1.1;
        v[3] = 1.0;
        return v;
    }
    Vec stationary_point() const override {
        Vec v(4);
        v[0] = 0.0;
        v[1] = 0.0;  // G = d/dx xi = 0 for constant density
        v[2] = 1.0;  // xi = rho^nu = 1
        v[3] = 1.0;
        return v;
    }
    Vec random_point(std::mt19937_64& rng) const override {
        std::uniform_real_distribution<double> uq(-2.0, 2.0), ur(0.2, 3.0);
        Vec v(4);
        v[0] = uq(rng);
        v[1] = uq(rng);
        v[2] = uq(rng);
        v[3] = ur(rng);
        return v;
    }

    void apply_L(const Stencils& st, const double* M, double* out,
                 int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        const double nu1 = nu_ - 1.0;
        // row q: -Xi' - nu Ups' - (nu-1) alf' + nu b''
        for (int i = 0; i < nx; ++i)
            w.in[static_cast<size_t>(i)] = M[16 * i + 0] + nu_ * M[16 * i + 5] +
                                           nu1 * M[16 * i + 10];
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[4 * i + 0] = -w.out[static_cast<size_t>(i)];
        detail::gather(M, nx, 16, 6, w.in.data());  // b = M(1,2)
        st.d2.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i)
            out[4 * i + 0] += nu_ * w.out[static_cast<size_t>(i)];
        // rows G and xi share a = M(0,2) and Gam = M(0,1)
        detail::gather(M, nx, 16, 2, w.in.data());  // a
        st.d2.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i)
            out[4 * i + 1] = -nu_ * w.out[static_cast<size_t>(i)];
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i)
            out[4 * i + 2] = -nu_ * w.out[static_cast<size_t>(i)];
        detail::gather(M, nx, 16, 1, w.in.data());  // Gam
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) {
            out[4 * i + 1] += nu1 * w.out[static_cast<size_t>(i)];
            out[4 * i + 2] += nu1 * w.in[static_cast<size_t>(i)];
        }
        // row rho: -g'
        detail::gather(M, nx, 16, 3, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i) out[4 * i + 3] = -w.out[static_cast<size_t>(i)];
    }

    void apply_Lstar(const Stencils& st, const double* w, double* out,
                     int nx) const override {
        auto& ws = detail::work();
        ws.resize(nx);
        const double nu1 = nu_ - 1.0;
        for (int i = 0; i < 16 * nx; ++i) out[i] = 0.0;
        // eta' on the diagonal, eta'' on (1,2)
        detail::gather(w, nx, 4, 0, ws.in.data());
        st.d1.apply_line(ws.in.data(), ws.out.data(), nx);
        for (int i = 0; i < nx; ++i) {
            const double e1 = ws.out[static_cast<size_t>(i)];
            out[16 * i + 0] = e1;
            out[16 * i + 5] = nu_ * e1;
            out[16 * i + 10] = nu1 * e1;
        }
        st.d1.apply_line(ws.out.data(), ws.tmp.data(), nx);  // eta''
        for (int i = 0; i < nx; ++i) {
            const double half = 0.5 * nu_ * ws.tmp[static_cast<size_t>(i)];
            out[16 * i + 6] = half;
            out[16 * i + 9] = half;
        }
        // (1-nu)(ups' - pi)/2 on (0,1); nu (pi' - ups'')/2 on (0,2)
        detail::gather(w, nx, 4, 1, ws.in.data());  // ups
        st.d1.apply_line(ws.in.data(), ws.out.data(), nx);    // ups'
        st.d1.apply_line(ws.out.data(), ws.tmp.data(), nx);   // ups''
        for (int i = 0; i < nx; ++i) {
            const double up1 = ws.out[static_cast<size_t>(i)];
            const double pi = w[4 * i + 2];
            const double half = 0.5 * (1.0 - nu_) * (up1 - pi);
            out[16 * i + 1] = half;
            out[16 * i + 4] = half;
        }
        detail::gather(w, nx, 4, 2, ws.in.data());  // pi
        st.d1.apply_line(ws.in.data(), ws.out.data(), nx);  // pi'
        for (int i = 0; i < nx; ++i) {
            const double half = 0.5 * nu_ * (ws.out[static_cast<size_t>(i)] -
                                             ws.tmp[static_cast<size_t>(i)]);
            out[16 * i + 2] = half;
            out[16 * i + 8] = half;
        }
        // theta'/2 on (0,3)
        detail::gather(w, nx, 4, 3, ws.in.data());
        st.d1.apply_line(ws.in.data(), ws.out.data(), nx);
        for (int i = 0; i < nx; ++i) {
            const double half = 0.5 * ws.out[static_cast<size_t>(i)];
            out[16 * i + 3] = half;
            out[16 * i + 12] = half;
        }
    }

    void apply_constraint(const Stencils& st, const double* v, double* out,
                          int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        detail::gather(v, nx, 4, 2, w.in.data());
        st.d1.apply_line(w.in.data(), w.out.data(), nx);
        for (int i = 0; i < nx; ++i)
            out[i] = w.out[static_cast<size_t>(i)] - v[4 * i + 1];
    }

    void apply_constraint_adjoint(const Stencils& st, const double* c, double* out,
                                  int nx) const override {
        auto& w = detail::work();
        w.resize(nx);
        st.d1.apply_line(c, w.out.data(), nx);
        for (int i = 0; i < nx; ++i) {
            out[4 * i + 0] = 0.0;
            out[4 * i + 1] = -c[i];
            out[4 * i + 2] = -w.out[static_cast<size_t>(i)];
            out[4 * i + 3] = 0.0;
        }
    }

  private:
    void require_domain(const Vec& v) const {
        if (!(v[3] > 0.0))
            throw PreconditionError("korteweg: flux needs rho > 0, got rho = " +
                                    std::to_string(v[3]));
    }

    double s_;
    double nu_;
    EnergyFunction u_;
};

}  // namespace duality
