#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "resonance/types.hpp"

namespace resonance {

struct HermitianEigen {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns
};

// Cyclic Jacobi for complex Hermitian matrices.
inline HermitianEigen hermitian_eigen(const CMatrix& input)
{
    const std::size_t n = input.rows();
    if (n != input.cols()) throw Error(ErrorKind::validation, "hermitian_eigen needs a square matrix");
    CMatrix a = input;
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(a.max_abs(), 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-17 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double abs_pq = std::abs(a(p, q));
                if (abs_pq <= 1e-300) continue;
                const cplx ph = a(p, q) / abs_pq;
                const double tau = (std::real(a(q, q)) - std::real(a(p, p))) / (2.0 * abs_pq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx u_qp = -s * std::conj(ph);
                const cplx u_qq = c * std::conj(ph);
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * c + akq * u_qp;
                    a(k, q) = akp * s + akq * u_qq;
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * c + vkq * u_qp;
                    v(k, q) = vkp * s + vkq * u_qq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * ph * aqk;
                    a(q, k) = s * apk + c * ph * aqk;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return std::real(a(i, i)) < std::real(a(j, j)); });
    HermitianEigen out{std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = std::real(a(order[k], order[k]));
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

// LU with partial pivoting; throws non_semisimple when the matrix is numerically singular.
inline CMatrix inverse(const CMatrix& m)
{
    const std::size_t n = m.rows();
    CMatrix a = m;
    CMatrix inv = CMatrix::identity(n);
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) <= 1e-14 * scale)
            throw Error(ErrorKind::non_semisimple, "singular eigenvector matrix");
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        const cplx d = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) /= d;
            inv(k, j) /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const cplx f = a(i, k);
            if (f == cplx(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

namespace detail {

// Scale rows/columns by powers of two so row and column norms are comparable.
inline std::vector<double> balance(CMatrix& a)
{
    const std::size_t n = a.rows();
    std::vector<double> d(n, 1.0);
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double f = 1.0;
            const double s = c + r;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c >= r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if ((c + r) < 0.95 * s) {
                done = false;
                d[i] *= f;
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) /= f;
                    a(j, i) *= f;
                }
            }
        }
    }
    return d;
}

// Householder reduction to upper Hessenberg form, accumulating Q.
inline void hessenberg(CMatrix& a, CMatrix& q)
{
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(a(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = a(k + 1, k);
        const cplx phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : cplx(1.0);
        const cplx alpha = -phase * xnorm;
        CVector v(n, 0.0);
        for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
        v[k + 1] -= alpha;
        double vn = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vn += std::norm(v[i]);
        vn = std::sqrt(vn);
        if (vn == 0.0) continue;
        for (auto& x : v) x /= vn;
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= 2.0 * v[i] * s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = 0.0, sq = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                s += a(i, j) * v[j];
                sq += q(i, j) * v[j];
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) -= 2.0 * s * std::conj(v[j]);
                q(i, j) -= 2.0 * sq * std::conj(v[j]);
            }
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

// Single-shift QR on a Hessenberg matrix; leaves upper triangular T with A = Z T Z^dagger.
inline void schur_qr(CMatrix& h, CMatrix& z)
{
    const int n = static_cast<int>(h.rows());
    const double eps = std::numeric_limits<double>::epsilon();
    const double hnorm = std::max(h.max_abs(), 1e-300);
    int hi = n - 1;
    int iter = 0;
    while (hi > 0) {
        int l = hi;
        while (l > 0) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = hnorm;
            if (std::abs(h(l, l - 1)) < eps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == hi) {
            --hi;
            iter = 0;
            continue;
        }
        if (++iter > 60 * n) throw Error(ErrorKind::non_semisimple, "QR iteration did not converge");

        cplx mu;
        if (iter % 11 == 0) {
            mu = h(hi, hi) + std::abs(std::real(h(hi, hi - 1))) + std::abs(std::imag(h(hi, hi - 1)));
        } else {
            const cplx a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
            const cplx half_tr = 0.5 * (a + d);
            const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
            const cplx m1 = half_tr + disc, m2 = half_tr - disc;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }

        for (int k = l; k < hi; ++k) {
            cplx x, y;
            if (k == l) {
                x = h(l, l) - mu;
                y = h(l + 1, l);
            } else {
                x = h(k, k - 1);
                y = h(k + 1, k - 1);
            }
            const double r = std::hypot(std::abs(x), std::abs(y));
            if (r == 0.0) continue;
            double c;
            cplx s;
            if (std::abs(x) == 0.0) {
                c = 0.0;
                s = std::conj(y) / r;
            } else {
                c = std::abs(x) / r;
                s = (x / std::abs(x)) * std::conj(y) / r;
            }
            const int jstart = (k == l) ? l : k - 1;
            for (int j = jstart; j < n; ++j) {
                const cplx h1 = h(k, j), h2 = h(k + 1, j);
                h(k, j) = c * h1 + s * h2;
                h(k + 1, j) = -std::conj(s) * h1 + c * h2;
            }
            const int iend = std::min(k + 2, hi);
            for (int i = 0; i <= iend; ++i) {
                const cplx h1 = h(i, k), h2 = h(i, k + 1);
                h(i, k) = c * h1 + std::conj(s) * h2;
                h(i, k + 1) = -s * h1 + c * h2;
            }
            for (int i = 0; i < n; ++i) {
                const cplx z1 = z(i, k), z2 = z(i, k + 1);
                z(i, k) = c * z1 + std::conj(s) * z2;
                z(i, k + 1) = -s * z1 + c * z2;
            }
            if (k > l) h(k + 1, k - 1) = 0.0;
        }
    }
}

}  // namespace detail

namespace detail {

// Back-substitution is unreliable inside clusters of equal eigenvalues; replace
// those vectors by a null-space basis of (M - lambda) from the Hermitian solver.
inline void fix_clusters(const CMatrix& m, std::vector<cplx>& values, CMatrix& vectors)
{
    const std::size_t n = m.rows();
    const double scale = std::max(m.max_abs(), 1e-300);
    const double tol = 1e-9 * scale;
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        std::vector<std::size_t> cluster{i};
        for (std::size_t j = i + 1; j < n; ++j)
            if (!done[j] && std::abs(values[j] - values[i]) <= tol) cluster.push_back(j);
        for (std::size_t j : cluster) done[j] = true;
        if (cluster.size() < 2) continue;
        cplx mean = 0.0;
        for (std::size_t j : cluster) mean += values[j];
        mean /= static_cast<double>(cluster.size());
        CMatrix a = m;
        for (std::size_t k = 0; k < n; ++k) a(k, k) -= mean;
        const auto h = hermitian_eigen(a.adjoint() * a);
        for (std::size_t c = 0; c < cluster.size(); ++c) {
            if (h.values[c] > 1e-14 * scale * scale)
                throw Error(ErrorKind::non_semisimple, "repeated eigenvalue without a full eigenspace");
            values[cluster[c]] = mean;
            for (std::size_t k = 0; k < n; ++k) vectors(k, cluster[c]) = h.vectors(k, c);
        }
    }
}

}  // namespace detail

struct EigenPair {
    cplx value;
    CVector right;  // unit norm
    CVector left;   // <left, right> = 1
};

struct Eigensystem {
    std::vector<EigenPair> pairs;
    double min_pairing = 1.0;  // min over s of 1/(|right||left|)
};

inline double pairing_floor() { return 1e-6; }

// Right eigenvectors and eigenvalues of a general complex matrix.
inline void eigen_right(const CMatrix& m, std::vector<cplx>& values, CMatrix& vectors)
{
    const std::size_t n = m.rows();
    values.assign(n, 0.0);
    vectors = CMatrix(n, n);
    if (n == 0) return;
    if (n == 1) {
        values[0] = m(0, 0);
        vectors(0, 0) = 1.0;
        return;
    }
    if (n == 2) {
        const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
        const double scale = std::max(m.max_abs(), 1e-300);
        if (std::abs(b) <= 1e-15 * scale && std::abs(c) <= 1e-15 * scale) {
            values = {a, d};
            vectors(0, 0) = 1.0;
            vectors(1, 1) = 1.0;
            return;
        }
        const cplx half_tr = 0.5 * (a + d);
        const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
        // larger-magnitude root first, the other from the determinant for accuracy
        cplx l1 = half_tr + disc;
        cplx l2 = half_tr - disc;
        if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
        if (std::abs(l1) > 0.0) l2 = (a * d - b * c) / l1;
        values = {l1, l2};
        for (int k = 0; k < 2; ++k) {
            const cplx lam = values[k];
            cplx v0, v1;
            if (std::abs(b) >= std::abs(c)) {
                v0 = b;
                v1 = lam - a;
            } else {
                v0 = lam - d;
                v1 = c;
            }
            const double nv = std::hypot(std::abs(v0), std::abs(v1));
            vectors(0, k) = v0 / nv;
            vectors(1, k) = v1 / nv;
        }
        return;
    }

    bool is_diagonal = true;
    for (std::size_t i = 0; i < n && is_diagonal; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && m(i, j) != cplx(0.0)) {
                is_diagonal = false;
                break;
            }
    if (is_diagonal) {
        for (std::size_t k = 0; k < n; ++k) {
            values[k] = m(k, k);
            vectors(k, k) = 1.0;
        }
        return;
    }

    CMatrix a = m;
    const std::vector<double> d = detail::balance(a);
    CMatrix z = CMatrix::identity(n);
    detail::hessenberg(a, z);
    detail::schur_qr(a, z);

    const double tnorm = std::max(a.max_abs(), 1e-300);
    const double smin = std::numeric_limits<double>::epsilon() * tnorm;
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = a(k, k);
        CVector x(n, 0.0);
        x[k] = 1.0;
        for (std::size_t ii = k; ii-- > 0;) {
            cplx s = 0.0;
            for (std::size_t j = ii + 1; j <= k; ++j) s += a(ii, j) * x[j];
            cplx den = a(ii, ii) - a(k, k);
            if (std::abs(den) < smin) den = smin;
            x[ii] = -s / den;
        }
        CVector v(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= k; ++j) v[i] += z(i, j) * x[j];
            v[i] *= d[i];
        }
        const double nv = norm(v);
        for (std::size_t i = 0; i < n; ++i) vectors(i, k) = v[i] / nv;
    }
    detail::fix_clusters(m, values, vectors);
}

// Complete biorthogonal eigensystem sorted by descending imaginary part, then ascending real part.
inline Eigensystem eigensystem(const CMatrix& m)
{
    const std::size_t n = m.rows();
    if (n != m.cols()) throw Error(ErrorKind::validation, "eigensystem needs a square matrix");
    std::vector<cplx> values;
    CMatrix v;
    eigen_right(m, values, v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (std::imag(values[i]) != std::imag(values[j])) return std::imag(values[i]) > std::imag(values[j]);
        return std::real(values[i]) < std::real(values[j]);
    });
    CMatrix vs(n, n);
    std::vector<cplx> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
        vals[k] = values[order[k]];
        for (std::size_t i = 0; i < n; ++i) vs(i, k) = v(i, order[k]);
    }

    Eigensystem out;
    if (n == 0) return out;
    CMatrix w;
    try {
        w = inverse(vs);
    } catch (const Error&) {
        throw Error(ErrorKind::non_semisimple, "level shift operator is not diagonalizable");
    }
    out.pairs.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        EigenPair& p = out.pairs[k];
        p.value = vals[k];
        p.right.resize(n);
        p.left.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            p.right[i] = vs(i, k);
            p.left[i] = std::conj(w(k, i));
        }
        const double pairing = 1.0 / (norm(p.right) * norm(p.left));
        out.min_pairing = std::min(out.min_pairing, pairing);
    }
    if (out.min_pairing < pairing_floor())
        throw Error(ErrorKind::non_semisimple, "eigenvector pairing below 1e-6: defective level shift operator");
    return out;
}

}  // namespace resonance
