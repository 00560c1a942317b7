#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

// Small dense vectors and symmetric matrices for the per-cell state algebra.
// Dimensions are tiny (n <= 6), so everything lives on the stack and the
// eigensolver is a cyclic Jacobi sweep rather than anything clever.

namespace duality {

inline constexpr int kMaxDim = 6;

struct Vec {
    int n = 0;
    std::array<double, kMaxDim> a{};

    Vec() = default;
    explicit Vec(int dim) : n(dim) {}

    double& operator[](int i) { return a[static_cast<size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[i] -= o.a[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) a[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec x, const Vec& y) { return x += y; }
    friend Vec operator-(Vec x, const Vec& y) { return x -= y; }
    friend Vec operator*(double s, Vec x) { return x *= s; }
    friend Vec operator*(Vec x, double s) { return x *= s; }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[i] * o.a[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
        return m;
    }
};

struct Mat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    Mat() = default;
    explicit Mat(int dim) : n(dim) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat outer(const Vec& v) {
        Mat m(v.n);
        for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j) m(i, j) = v[i] * v[j];
        return m;
    }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < n * n; ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < n * n; ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < n * n; ++i) a[i] *= s;
        return *this;
    }
    friend Mat operator+(Mat x, const Mat& y) { return x += y; }
    friend Mat operator-(Mat x, const Mat& y) { return x -= y; }
    friend Mat operator*(double s, Mat x) { return x *= s; }
    friend Mat operator*(Mat x, double s) { return x *= s; }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (*this)(i, i);
        return s;
    }
    // Frobenius inner product A:B.
    double ddot(const Mat& o) const {
        double s = 0.0;
        for (int i = 0; i < n * n; ++i) s += a[i] * o.a[i];
        return s;
    }
    double fnorm() const { return std::sqrt(ddot(*this)); }
    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n * n; ++i) m = std::max(m, std::abs(a[i]));
        return m;
    }
    double asym_norm() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }
    Mat symmetrized() const {
        Mat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
        return m;
    }
};

struct EigSym {
    Vec values;   // ascending
    Mat vectors;  // columns are eigenvectors
};

// Cyclic Jacobi for symmetric matrices. Off-diagonal norm is driven below
// 1e-12 * scale; at these dimensions a handful of sweeps suffices.
inline EigSym eig_sym(const Mat& m_in) {
    const int n = m_in.n;
    Mat m = m_in.symmetrized();
    Mat v = Mat::identity(n);
    if (n == 1) {
        EigSym r;
        r.values = Vec(1);
        r.values[0] = m(0, 0);
        r.vectors = v;
        return r;
    }
    const double scale = std::max(m.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(m(p, q)));
        if (off <= 1e-13 * scale) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // sort ascending
    std::array<int, kMaxDim> idx{};
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.begin() + n,
              [&](int i, int j) { return m(i, i) < m(j, j); });
    EigSym r;
    r.values = Vec(n);
    r.vectors = Mat(n);
    for (int c = 0; c < n; ++c) {
        r.values[c] = m(idx[c], idx[c]);
        for (int k = 0; k < n; ++k) r.vectors(k, c) = v(k, idx[c]);
    }
    return r;
}

inline double lambda_min(const Mat& m) {
    if (m.n == 1) return m(0, 0);
    if (m.n == 2) {
        const double a = m(0, 0), d = m(1, 1), b = 0.5 * (m(0, 1) + m(1, 0));
        const double mean = 0.5 * (a + d);
        const double r = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
        return mean - r;
    }
    return eig_sym(m).values[0];
}

inline double lambda_max(const Mat& m) {
    Mat neg = m;
    neg *= -1.0;
    return -lambda_min(neg);
}

// Positive part in the Loewner order: eigenvalues clipped from below at `floor`.
inline Mat psd_clip(const Mat& m, double floor = 0.0) {
    const EigSym e = eig_sym(m);
    bool clean = true;
    for (int i = 0; i < m.n; ++i) clean = clean && e.values[i] >= floor;
    if (clean) return m.symmetrized();
    Mat r(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) {
            double s = 0.0;
            for (int k = 0; k < m.n; ++k)
                s += std::max(e.values[k], floor) * e.vectors(i, k) * e.vectors(j, k);
            r(i, j) = s;
        }
    return r;
}

// Solve the (regularized) linear system H x = b for tiny n via Gaussian
// elimination with partial pivoting. Returns false on (near-)singularity.
inline bool solve_small(Mat h, Vec b, Vec& x) {
    const int n = h.n;
    std::array<int, kMaxDim> piv{};
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(h(r, c)) > std::abs(h(best, c))) best = r;
        if (std::abs(h(best, c)) < 1e-300) return false;
        if (best != c) {
            for (int k = 0; k < n; ++k) std::swap(h.a[c * n + k], h.a[best * n + k]);
            std::swap(b.a[c], b.a[best]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = h(r, c) / h(c, c);
            for (int k = c; k < n; ++k) h(r, k) -= f * h(c, k);
            b.a[r] -= f * b.a[c];
        }
    }
    x = Vec(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b.a[r];
        for (int k = r + 1; k < n; ++k) s -= h(r, k) * x[k];
        x[r] = s / h(r, r);
    }
    return true;
}

}  // namespace duality
