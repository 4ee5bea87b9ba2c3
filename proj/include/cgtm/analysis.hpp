#pragma once

/**
 * @file analysis.hpp
 * @brief Sectional and scalar curvature of (TM, g_{p,q}), the norm identity,
 *        and the constant-curvature condition checker.
 */

#include <cmath>
#include <string>
#include <vector>

#include "cgtm/cgbundle.hpp"
#include "cgtm/curvature_pq.hpp"
#include "cgtm/oracle.hpp"
#include "cgtm/sampling.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

inline constexpr double kDegeneratePlane = 1e-12;

inline double q_pq(const BaseGeometry& geo, const BundlePoint& pt, const LiftedVector& A, const LiftedVector& B) {
    const double ab = g_pq(geo, pt, A, B);
    return g_pq(geo, pt, A, A) * g_pq(geo, pt, B, B) - ab * ab;
}

/// g_pq(R(A,B)B, A) / Q(A,B) with R given as an adapted-frame table T(d,c,a,b).
inline double sectional_from_table(const BaseGeometry& geo, const BundlePoint& pt, const Tensor<double>& T,
                                   const LiftedVector& A, const LiftedVector& B) {
    const double Q = q_pq(geo, pt, A, B);
    if (!(Q > kDegeneratePlane)) throw DegeneratePlane("Q_pq = " + std::to_string(Q));
    const int m = T.dim();
    const Vec a = A.stacked(), b = B.stacked();
    Vec r = Vec::Zero(m);
    for (int d = 0; d < m; ++d)
        for (int c = 0; c < m; ++c) {
            if (b[c] == 0.0) continue;
            for (int i = 0; i < m; ++i) {
                if (a[i] == 0.0) continue;
                for (int j = 0; j < m; ++j) r[d] += T(d, c, i, j) * a[i] * b[j] * b[c];
            }
        }
    return g_pq(geo, pt, LiftedVector::from_stacked(r), A) / Q;
}

/// Sectional curvature from the oracle curvature (any nondegenerate plane).
inline double sectional_oracle(const BaseGeometry& geo, const BundlePoint& pt, const LiftedVector& A,
                               const LiftedVector& B, const OracleResult* cached = nullptr) {
    if (cached) return sectional_from_table(geo, pt, cached->curv, A, B);
    const auto o = oracle_evaluate(geo, pt);
    return sectional_from_table(geo, pt, o.curv, A, B);
}

/// Base sectional quantity g(R(X,Y)Y, X) for g-orthonormal X, Y.
inline double base_sectional(const BaseGeometry& geo, const Vec& X, const Vec& Y) {
    return geo.gv(geo.Rv(X, Y, Y), X);
}

namespace detail {

/// Unit X, Y; also g(X,Y) = 0 unless `mixed` (X^H and Y^V are orthogonal anyway).
inline void require_orthonormal(const BaseGeometry& geo, const Vec& X, const Vec& Y, bool mixed = false) {
    const double e = std::max({std::abs(geo.norm2(X) - 1.0), std::abs(geo.norm2(Y) - 1.0),
                               mixed ? 0.0 : std::abs(geo.gv(X, Y))});
    if (e > 1e-9) throw NotOrthonormal("closed-form sectional curvature needs g-orthonormal X, Y (defect " +
                                       std::to_string(e) + ")");
}

}  // namespace detail

/// Horizontal plane closed form.
inline double sectional_hh(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    detail::require_orthonormal(geo, X, Y);
    const Vec& u = pt.u;
    const double q = pt.q(), ap = pt.alpha_p();
    const Vec RXYu = geo.Rv(X, Y, u);
    const Vec KXY = geo.Kv(X, Y);
    return base_sectional(geo, X, Y) + geo.gv(geo.dK(Y, X, Y), X) - geo.gv(geo.dK(X, Y, Y), X) +
           geo.gv(geo.Kv(X, X), geo.Kv(Y, Y)) - geo.norm2(KXY) - 3.0 / (4.0 * ap) * geo.norm2(RXYu) -
           3.0 * q / (4.0 * ap) * std::pow(geo.gv(RXYu, u), 2);
}

/// Mixed plane closed form, X horizontal, Y vertical.
inline double sectional_hv(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    detail::require_orthonormal(geo, X, Y, true);
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p(), oqt = pt.one_q_tau();
    const double gyu = geo.gv(Y, u);
    const double yv2 = gpq_vv(geo, pt, Y, Y);
    const Vec Kxu = geo.Kv(X, u);
    const double gKxuu = geo.gv(Kxu, u);
    const double four_a2p = (2.0 * ap) * (2.0 * ap);
    auto RR = [&](const Vec& A, const Vec& B) { return geo.gv(geo.Rtv(u, A, geo.Rtv(u, B, X)), X); };
    double s = -(1.0 / four_a2p) * (RR(Y, Y) + q * gyu * RR(u, Y));
    s -= (q / four_a2p) * gyu * (RR(Y, u) + q * gyu * RR(u, u));
    s += gKxuu * gKxuu * (-(p * (p + 2.0) / (a * a)) * yv2 - (q * q * q / (oqt * ap)) * gyu * gyu);
    s += (2.0 * p / (ap * a)) * gKxuu * geo.gv(geo.Kv(Y, Y), X);
    s += (1.0 / ap) * geo.gv(geo.dK(X, Y, Y), X);
    s -= (p / a) * yv2 * geo.gv(geo.dK(X, u, u), X);
    s += (2.0 * q / ap) * gyu * geo.gv(geo.dK(X, Y, u), X);
    s -= (3.0 * q / ap) * std::pow(geo.gv(geo.Kv(X, Y), u), 2);
    s += (4.0 * p * q / (ap * a)) * gyu * gKxuu * geo.gv(geo.Kv(X, Y), u);
    s += (1.0 / ap) * geo.gv(geo.Kv(Y, geo.Kv(X, Y)) - geo.Kv(X, geo.Kv(Y, Y)), X);
    s += (2.0 * q / ap) * gyu * geo.gv(geo.Kv(Y, Kxu) - geo.Kv(X, geo.Kv(Y, u)), X);
    s += (q * q / ap) * gyu * gyu * geo.norm2(Kxu);
    s += (p / a) * yv2 * geo.gv(geo.Kv(u, u), geo.Kv(X, X));
    return ap / (1.0 + q * gyu * gyu) * s;
}

/// Vertical plane closed form.
inline double sectional_vv(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    detail::require_orthonormal(geo, X, Y);
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p(), tau = pt.tau;
    const auto sf = scale_factors(pt);
    const double a2p = ap * ap;
    const double gxu = geo.gv(X, u), gyu = geo.gv(Y, u);
    const double xv2 = gpq_vv(geo, pt, X, X), yv2 = gpq_vv(geo, pt, Y, Y);
    const Vec Kuu = geo.Kv(u, u), KXX = geo.Kv(X, X), KYY = geo.Kv(Y, Y), KXY = geo.Kv(X, Y);
    const Vec KuX = geo.Kv(u, X), KuY = geo.Kv(u, Y);
    const double Kuu2 = geo.norm2(Kuu);
    double s = -(p * p / (a * a)) * Kuu2 * xv2 * yv2;
    s += (p / (ap * a)) * (xv2 * geo.gv(KYY, Kuu) + yv2 * geo.gv(KXX, Kuu));
    s += (2.0 * p * q / (a2p * a)) * (gxu * geo.gv(Kuu, KuX) + gyu * geo.gv(Kuu, KuY));
    s += (1.0 / a2p) * (geo.norm2(KXY) - geo.gv(KYY, KXX));
    s += (2.0 * q / a2p) * (gxu * geo.gv(KXY, KuY) + gyu * geo.gv(KXY, KuX));
    s -= (2.0 * q / a2p) * (gxu * geo.gv(KYY, KuX) + gyu * geo.gv(KXX, KuY));
    s += (q * q / a2p) * (gxu * gxu * geo.norm2(KuY) + gyu * gyu * geo.norm2(KuX));
    s += ((p * p * q * q / (std::pow(a, 2.0) * a2p)) * gxu * gyu * Kuu2 - (2.0 * p * q / (a * a2p)) * geo.gv(Kuu, KXY) -
          (2.0 * q * q / a2p) * geo.gv(KuX, KuY)) *
         gxu * gyu;
    s -= (((tau * sf.N * a + 2.0 - p) * p - sf.N * a * a) / (ap * a * a)) * (gxu * gxu + gyu * gyu);
    s -= (p * (sf.M * tau - 1.0) - sf.M * a) / (ap * a);
    return a2p / (1.0 + q * gxu * gxu + q * gyu * gyu) * s;
}

/// Closed-form sectional curvature on a pure-lift plane (X^A, Y^B), X, Y g-orthonormal.
inline double sectional_closed(const BaseGeometry& geo, const BundlePoint& pt, Lift la, const Vec& X, Lift lb,
                               const Vec& Y) {
    if (la == Lift::H && lb == Lift::H) return sectional_hh(geo, pt, X, Y);
    if (la == Lift::V && lb == Lift::V) return sectional_vv(geo, pt, X, Y);
    return la == Lift::H ? sectional_hv(geo, pt, X, Y) : sectional_hv(geo, pt, Y, X);
}

inline LiftedVector make_lift(Lift l, const Vec& X) {
    return l == Lift::H ? LiftedVector::horizontal(X) : LiftedVector::vertical(X);
}

// ---------------------------------------------------------------------------
// Orthonormal lifted frame
// ---------------------------------------------------------------------------

struct LiftedFrame {
    Mat e;                        // base frame, columns e_1..e_m, e_1 = u/|u|
    std::vector<LiftedVector> E;  // E_1..E_2m
};

/**
 * Base frame by Gram-Schmidt in g, starting from u/|u| and continuing with the
 * columns of `completion` (identity when empty).
 */
inline LiftedFrame lifted_orthonormal_frame(const BaseGeometry& geo, const BundlePoint& pt,
                                            const Mat& completion = Mat()) {
    if (geo.signature == Signature::Pseudo)
        throw PseudoRiemannianUnsupported("orthonormal frames need a Riemannian metric");
    const int n = geo.n;
    if (!(pt.tau > 1e-24)) throw ZeroFiberVector("u = 0 has no unit direction");
    const Mat C = completion.size() ? completion : Mat::Identity(n, n);
    std::vector<Vec> basis;
    basis.push_back(pt.u / std::sqrt(pt.tau));
    for (int c = 0; c < C.cols() && static_cast<int>(basis.size()) < n; ++c) {
        Vec v = C.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= geo.gv(v, b) * b;
        const double nv = geo.norm2(v);
        if (nv < 1e-20) continue;
        basis.push_back(v / std::sqrt(nv));
    }
    if (static_cast<int>(basis.size()) != n) throw DegeneratePlane("frame completion is rank deficient");
    LiftedFrame f;
    f.e = Mat(n, n);
    for (int i = 0; i < n; ++i) f.e.col(i) = basis[i];
    for (int i = 0; i < n; ++i) f.E.push_back(LiftedVector::horizontal(basis[i]));
    for (int j = 0; j < n; ++j) {
        const double len = std::sqrt(gpq_vv(geo, pt, basis[j], basis[j]));
        f.E.push_back(LiftedVector::vertical(basis[j] / len));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Frame formulas with constants A1..A5, B1..B4
// ---------------------------------------------------------------------------

struct SectionalConstants {
    double A1, A2, A3, A4, A5;
    double B1, B2, B3, B4;
};

inline SectionalConstants sectional_constants(double p, double q, double tau) {
    const double a = 1.0 + tau, oqt = 1.0 + q * tau;
    const double ap = std::pow(a, p);
    const auto sf = scale_factors(p, q, tau);
    const double D = 1.0 + q * tau * (1.0 + ap);
    SectionalConstants c{};
    const double fa = ap * oqt / D;
    c.A1 = fa * (-p * (p + 2.0) * tau * tau / (a * a) - std::pow(q * tau, 3) / (oqt * oqt) + 2.0 * p * tau / (a * oqt) -
                 3.0 * q * tau / oqt + 4.0 * p * q * tau * tau / (a * oqt));
    c.A2 = fa * ((1.0 + 2.0 * q * tau) / oqt - p * tau / a);
    c.A3 = ap * oqt * oqt / D;
    c.A4 = -c.A2;
    c.A5 = oqt * oqt / (4.0 * D);
    const double fb = ap * ap * oqt / D;
    c.B1 = fb * (-(p * tau) * (p * tau) / (a * a) + p * tau / (a * oqt) + 2.0 * p * q * tau * tau / (ap * a * oqt));
    c.B2 = ap * ap * oqt * oqt / D;
    c.B3 = fb * (p * tau / a - (1.0 + 2.0 * q * tau) / oqt);
    c.B4 = fb * (-((tau * sf.N * a + 2.0 - p) * p - sf.N * a * a) / (ap * a * a) * (ap * tau / oqt) -
                 (p * (sf.M * tau - 1.0) - sf.M * a) / (ap * a));
    return c;
}

/// Table K(E_a, E_b) over the frame from the lemma formulas; diagonal left 0.
inline Tensor<double> sectional_frame(const BaseGeometry& geo, const BundlePoint& pt, const LiftedFrame& f) {
    const int m = geo.n;
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p(), tau = pt.tau;
    const auto sf = scale_factors(pt);
    const auto c = sectional_constants(p, q, tau);
    auto e = [&](int i) -> Vec { return f.e.col(i); };
    const Vec Kuu = geo.Kv(u, u);
    Tensor<double> T(2 * m, 2, 0.0);
    auto set = [&](int i, int j, double v) {
        T(i, j) = v;
        T(j, i) = v;
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const Vec ei = e(i), ej = e(j);
            const Vec R = geo.Rv(ei, ej, u);
            const double v = base_sectional(geo, ei, ej) - 3.0 / (4.0 * ap) * geo.norm2(R) -
                             3.0 * q / (4.0 * ap) * std::pow(geo.gv(R, u), 2) + geo.gv(geo.dK(ej, ei, ej), ei) -
                             geo.gv(geo.dK(ei, ej, ej), ei) + geo.gv(geo.Kv(ei, ei), geo.Kv(ej, ej)) -
                             geo.norm2(geo.Kv(ei, ej));
            set(i, j, v);
        }
    const Vec e1 = e(0);
    for (int i = 0; i < m; ++i) {
        const Vec ei = e(i);
        const double v = c.A1 * std::pow(geo.gv(geo.Kv(ei, e1), e1), 2) + c.A2 * geo.gv(geo.dK(ei, e1, e1), ei) +
                         c.A3 * geo.norm2(geo.Kv(ei, e1)) + c.A4 * geo.gv(geo.Kv(e1, e1), geo.Kv(ei, ei)) +
                         c.A5 * geo.norm2(geo.Rtv(u, e1, ei));
        set(i, m, v);
        for (int j = 1; j < m; ++j) {
            const Vec ej = e(j);
            const Vec Kiu = geo.Kv(ei, u);
            const double gKiuu = geo.gv(Kiu, u);
            double w = -0.25 * geo.gv(geo.Rtv(u, ej, geo.Rtv(u, ej, ei)), ei);
            w -= p * (p + 2.0) * std::pow(a, p - 2.0) * gKiuu * gKiuu;
            w += 2.0 * p * std::pow(a, p - 1.0) * gKiuu * geo.gv(geo.Kv(ej, ej), ei);
            w += ap * geo.gv(geo.dK(ei, ej, ej), ei);
            w -= p * std::pow(a, p - 1.0) * geo.gv(geo.dK(ei, u, u), ei);
            w -= 3.0 * q * ap * std::pow(geo.gv(geo.Kv(ei, ej), u), 2);
            w += ap * geo.gv(geo.Kv(ej, geo.Kv(ei, ej)) - geo.Kv(ei, geo.Kv(ej, ej)), ei);
            w += p * std::pow(a, p - 1.0) * geo.gv(Kuu, geo.Kv(ei, ei));
            set(i, m + j, w);
        }
    }
    for (int j = 1; j < m; ++j) {
        const Vec ej = e(j);
        const double v = c.B1 * geo.norm2(geo.Kv(e1, e1)) + c.B2 * geo.norm2(geo.Kv(ej, e1)) +
                         c.B3 * geo.gv(geo.Kv(ej, ej), geo.Kv(e1, e1)) + c.B4;
        set(m, m + j, v);
    }
    for (int i = 1; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const Vec ei = e(i), ej = e(j);
            double v = -std::pow(a, 2.0 * p - 2.0) * p * p * geo.norm2(Kuu);
            v += std::pow(a, 2.0 * p - 1.0) * p * (geo.gv(geo.Kv(ej, ej), Kuu) + geo.gv(geo.Kv(ei, ei), Kuu));
            v += ap * ap * geo.norm2(geo.Kv(ei, ej)) - ap * ap * geo.gv(geo.Kv(ej, ej), geo.Kv(ei, ei));
            v -= std::pow(a, p - 1.0) * (p * (sf.M * tau - 1.0) - sf.M * a);
            set(m + i, m + j, v);
        }
    return T;
}

/// Same table through the general closed forms on the frame planes.
inline Tensor<double> sectional_frame_general(const BaseGeometry& geo, const BundlePoint& pt, const LiftedFrame& f) {
    const int m = geo.n;
    Tensor<double> T(2 * m, 2, 0.0);
    for (int a = 0; a < 2 * m; ++a)
        for (int b = a + 1; b < 2 * m; ++b) {
            const Lift la = a < m ? Lift::H : Lift::V, lb = b < m ? Lift::H : Lift::V;
            const Vec X = f.e.col(a % m), Y = f.e.col(b % m);
            // the closed forms take unit base vectors; the frame plane is the same 2-plane
            const double v = sectional_closed(geo, pt, la, X, lb, Y);
            T(a, b) = v;
            T(b, a) = v;
        }
    return T;
}

/// Same table from the oracle curvature.
inline Tensor<double> sectional_frame_oracle(const BaseGeometry& geo, const BundlePoint& pt, const LiftedFrame& f,
                                             const OracleResult& o) {
    const int m2 = 2 * geo.n;
    Tensor<double> T(m2, 2, 0.0);
    for (int a = 0; a < m2; ++a)
        for (int b = a + 1; b < m2; ++b) {
            const double v = sectional_from_table(geo, pt, o.curv, f.E[a], f.E[b]);
            T(a, b) = v;
            T(b, a) = v;
        }
    return T;
}

/// Sum over ordered pairs a != b.
inline double scalar_from_table(const Tensor<double>& T) {
    double s = 0.0;
    for (int a = 0; a < T.dim(); ++a)
        for (int b = 0; b < T.dim(); ++b)
            if (a != b) s += T(a, b);
    return s;
}

/// Base scalar curvature as the ordered-pair sum of g(R(e_i,e_j)e_j,e_i).
inline double base_scalar(const BaseGeometry& geo, const Mat& e) {
    double s = 0.0;
    for (int i = 0; i < geo.n; ++i)
        for (int j = 0; j < geo.n; ++j)
            if (i != j) s += base_sectional(geo, e.col(i), e.col(j));
    return s;
}

/// Closed-form scalar curvature, term by term.
inline double scalar_pq(const BaseGeometry& geo, const BundlePoint& pt, const LiftedFrame& f) {
    const int m = geo.n;
    const double md = m;
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p(), tau = pt.tau;
    const auto sf = scale_factors(pt);
    const auto c = sectional_constants(p, q, tau);
    auto e = [&](int i) -> Vec { return f.e.col(i); };
    const Vec e1 = e(0);
    const Vec Kuu = geo.Kv(u, u);
    double S = base_scalar(geo, f.e);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Vec ei = e(i), ej = e(j);
            const Vec R = geo.Rv(ei, ej, u);
            S += (2.0 * ap - 3.0) / (4.0 * ap) * geo.norm2(R) - 3.0 * q / (4.0 * ap) * std::pow(geo.gv(R, u), 2) +
                 geo.gv(geo.dK(ej, ei, ej), ei) - geo.gv(geo.dK(ei, ej, ej), ei) +
                 (1.0 - ap) * (geo.gv(geo.Kv(ei, ei), geo.Kv(ej, ej)) - geo.norm2(geo.Kv(ei, ej)));
        }
    double t = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec ei = e(i);
        t += c.A1 * std::pow(geo.gv(geo.Kv(ei, e1), e1), 2);
        t += (c.A2 - tau * p * std::pow(a, p - 1.0) * (md - 1.0)) * geo.gv(geo.dK(ei, e1, e1), ei);
        t += c.A3 * geo.norm2(geo.Kv(ei, e1));
        t += (c.A4 + tau * p * std::pow(a, p - 1.0) * (md - 1.0)) * geo.gv(geo.Kv(e1, e1), geo.Kv(ei, ei));
        t += c.A5 * geo.norm2(geo.Rtv(u, e1, ei));
        t -= (md - 1.0) * p * (p + 2.0) * std::pow(a, p - 2.0) * std::pow(geo.gv(geo.Kv(ei, u), u), 2);
        t += (md - 2.0) * std::pow(a, 2.0 * p - 1.0) * p * geo.gv(geo.Kv(ei, ei), Kuu);
    }
    S += 2.0 * t;
    double w = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 1; j < m; ++j) {
            const Vec ei = e(i), ej = e(j);
            w += 2.0 * p / a * geo.gv(geo.Kv(ei, u), u) * geo.gv(geo.Kv(ej, ej), ei);
            w += geo.gv(geo.dK(ei, ej, ej), ei);
            w -= 3.0 * q * std::pow(geo.gv(geo.Kv(ei, ej), u), 2);
            w += geo.gv(geo.Kv(ej, geo.Kv(ei, ej)) - geo.Kv(ei, geo.Kv(ej, ej)), ei);
        }
    S += 2.0 * ap * w;
    double b = 0.0;
    for (int j = 1; j < m; ++j) {
        const Vec ej = e(j);
        b += c.B2 * geo.norm2(geo.Kv(ej, e1)) + c.B3 * geo.gv(geo.Kv(ej, ej), geo.Kv(e1, e1));
    }
    S += 2.0 * b;
    S += 2.0 * (md - 1.0) * c.B1 * geo.norm2(geo.Kv(e1, e1)) + 2.0 * (md - 1.0) * c.B4;
    S -= (md - 1.0) * (md - 2.0) * std::pow(a, 2.0 * p - 2.0) * p * p * geo.norm2(Kuu);
    S -= (md - 1.0) * (md - 2.0) * std::pow(a, p - 1.0) * (p * (sf.M * tau - 1.0) - sf.M * a);
    return S;
}

// ---------------------------------------------------------------------------
// Norm identity
// ---------------------------------------------------------------------------

struct NormIdentity {
    double lhs = 0.0, rhs = 0.0;
    double deviation() const { return std::abs(lhs - rhs); }
};

/**
 * sum |R(e_i,e_j)u|^2 against sum |Rt(u,e_j)e_i|^2, with the orthonormal-frame
 * sums written as g^{ia} g^{jb} contractions over coordinate vectors.
 */
inline NormIdentity norm_identity_check(const BaseGeometry& geo, const Vec& u) {
    const int n = geo.n;
    NormIdentity r;
    std::vector<Vec> Ru(n * n), Rt(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Ru[i * n + j] = geo.Rv(geo.basis(i), geo.basis(j), u);
            Rt[i * n + j] = geo.Rtv(u, geo.basis(j), geo.basis(i));
        }
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            for (int j = 0; j < n; ++j)
                for (int b = 0; b < n; ++b) {
                    const double w = geo.ginv(i, a) * geo.ginv(j, b);
                    if (w == 0.0) continue;
                    r.lhs += w * geo.gv(Ru[i * n + j], Ru[a * n + b]);
                    r.rhs += w * geo.gv(Rt[i * n + j], Rt[a * n + b]);
                }
    return r;
}

/// Frame version (Riemannian only): e is any g-orthonormal base frame.
inline NormIdentity norm_identity_frame(const BaseGeometry& geo, const Vec& u, const Mat& e) {
    NormIdentity r;
    for (int i = 0; i < geo.n; ++i)
        for (int j = 0; j < geo.n; ++j) {
            r.lhs += geo.norm2(geo.Rv(e.col(i), e.col(j), u));
            r.rhs += geo.norm2(geo.Rtv(u, e.col(j), e.col(i)));
        }
    return r;
}

// ---------------------------------------------------------------------------
// Structural report
// ---------------------------------------------------------------------------

struct StructureReport {
    double max_R = 0.0, max_R_lc = 0.0, max_nablaK = 0.0, max_KK = 0.0;
    double max_codazzi = 0.0;
    double max_totally_geodesic = 0.0;
    double max_divergence = 0.0;
    double max_curvature_pq = 0.0;  // oracle spot checks, only when candidate
    bool pq_zero = false;
    bool codazzi_ok = false;
    bool fibers_totally_geodesic = false;
    bool flow_incompressible = false;
    bool constant_curvature_candidate = false;
    double threshold = 1e-8;
    int points = 0;
    int bundle_points = 0;
};

/// Largest deviation from total symmetry of C_{ijk}.
inline double codazzi_defect(const BaseGeometry& geo) {
    const int n = geo.n;
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double c = geo.C(i, j, k);
                for (double w : {geo.C(j, i, k), geo.C(i, k, j), geo.C(k, j, i), geo.C(j, k, i), geo.C(k, i, j)})
                    m = std::max(m, std::abs(c - w));
            }
    return m;
}

/**
 * Checks the four conditions for constant sectional curvature of (TM, g_{p,q})
 * over a seeded sample: R = 0 and LC-curvature = 0, nabla K = 0, [K_X, K_Y] = 0,
 * and p = q = 0. When all hold, the oracle curvature is spot-checked at the
 * bundle points.
 */
inline StructureReport constant_curvature_check(const ManifoldSpec& spec, MetricParams params, int samples,
                                                std::uint64_t seed, double threshold = 1e-8) {
    StructureReport r;
    r.threshold = threshold;
    r.pq_zero = params.p == 0.0 && params.q == 0.0;
    const auto plan = sample_plan(spec, params, samples, seed);
    const int n = spec.dim;
    std::vector<BaseGeometry> geos;
    geos.reserve(plan.size());
    for (const auto& sp : plan) {
        geos.push_back(base_geometry(spec, sp.x));
        const auto& geo = geos.back();
        r.max_R = std::max(r.max_R, max_abs(geo.R));
        r.max_R_lc = std::max(r.max_R_lc, max_abs(geo.R_lc));
        r.max_nablaK = std::max(r.max_nablaK, max_abs(geo.nablaK));
        r.max_KK = std::max(r.max_KK, max_abs(skew_commutator(geo)));
        r.max_codazzi = std::max(r.max_codazzi, codazzi_defect(geo));
        const auto pt = make_bundle_point(geo, sp.u, params);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r.max_totally_geodesic =
                    std::max(r.max_totally_geodesic, totally_geodesic_defect(geo, pt, geo.basis(i), geo.basis(j)).max_abs());
        r.max_divergence = std::max(r.max_divergence, std::abs(geodesic_flow_divergence(geo, pt)));
        ++r.points;
    }
    r.codazzi_ok = r.max_codazzi <= threshold;
    r.fibers_totally_geodesic = r.max_totally_geodesic <= threshold;
    r.flow_incompressible = r.max_divergence <= threshold;
    r.constant_curvature_candidate = r.pq_zero && r.max_R <= threshold && r.max_R_lc <= threshold &&
                                     r.max_nablaK <= threshold && r.max_KK <= threshold;
    if (r.constant_curvature_candidate) {
        for (std::size_t k = 0; k < plan.size(); ++k) {
            const auto pt = make_bundle_point(geos[k], plan[k].u, params);
            r.max_curvature_pq = std::max(r.max_curvature_pq, max_abs(oracle_evaluate(geos[k], pt).curv));
            ++r.bundle_points;
        }
    }
    return r;
}

}  // namespace cgtm
