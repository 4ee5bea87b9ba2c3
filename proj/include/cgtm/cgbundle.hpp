#pragma once

/**
 * @file cgbundle.hpp
 * @brief Tangent-bundle geometry for the two-parameter metric family g_{p,q}.
 *
 * Points of TM are (x,u). The adapted frame is E_i = delta_i (horizontal,
 * i < n) followed by E_{n+i} = d/du^i (vertical), with
 *
 *   delta_i = d/dx^i - u^r Gamma^k_{ir} d/du^k.
 *
 * The metric is g on horizontals, zero on mixed pairs, and
 * alpha^{-p} (g + q g(.,u) g(.,u)) on verticals, alpha = 1 + g(u,u).
 */

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cgtm/errors.hpp"
#include "cgtm/linalg.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

struct MetricParams {
    double p = 0.0;
    double q = 0.0;
};

/// Threshold below which 1 + q tau counts as outside BM_q.
inline constexpr double kBMqMargin = 1e-10;

struct BundlePoint {
    std::vector<double> x;
    Vec u;
    double tau = 0.0;
    double alpha = 1.0;
    MetricParams params;

    double p() const { return params.p; }
    double q() const { return params.q; }
    double one_q_tau() const { return 1.0 + params.q * tau; }
    double alpha_p() const { return std::pow(alpha, params.p); }
};

inline BundlePoint make_bundle_point(const BaseGeometry& geo, const Vec& u, MetricParams params) {
    if (u.size() != geo.n) throw UsageError("fiber vector has wrong dimension");
    BundlePoint pt;
    pt.x = geo.x;
    pt.u = u;
    pt.tau = geo.gv(u, u);
    pt.alpha = 1.0 + pt.tau;
    pt.params = params;
    if (!(pt.one_q_tau() > kBMqMargin))
        throw OutsideBMq("1 + q*tau = " + std::to_string(pt.one_q_tau()) + " is not positive");
    if (!(pt.alpha > 0.0) && params.p != 0.0)
        throw DomainError("alpha = " + std::to_string(pt.alpha) + " must be positive for non-zero p");
    return pt;
}

/// A tangent vector to TM in the adapted frame: h on delta_i, v on d/du^i.
struct LiftedVector {
    Vec h, v;

    static LiftedVector zero(int n) { return {Vec::Zero(n), Vec::Zero(n)}; }
    static LiftedVector horizontal(const Vec& X) { return {X, Vec::Zero(X.size())}; }
    static LiftedVector vertical(const Vec& X) { return {Vec::Zero(X.size()), X}; }

    Vec stacked() const {
        Vec s(h.size() + v.size());
        s << h, v;
        return s;
    }
    static LiftedVector from_stacked(const Vec& s) {
        const auto n = s.size() / 2;
        return {s.head(n), s.tail(n)};
    }

    LiftedVector& operator+=(const LiftedVector& o) {
        h += o.h;
        v += o.v;
        return *this;
    }
    friend LiftedVector operator+(LiftedVector a, const LiftedVector& b) { return a += b; }
    friend LiftedVector operator-(LiftedVector a, const LiftedVector& b) {
        a.h -= b.h;
        a.v -= b.v;
        return a;
    }
    friend LiftedVector operator*(double s, LiftedVector a) {
        a.h *= s;
        a.v *= s;
        return a;
    }
    friend LiftedVector operator-(LiftedVector a) { return -1.0 * std::move(a); }
    double max_abs() const {
        double m = 0.0;
        if (h.size()) m = std::max(m, h.cwiseAbs().maxCoeff());
        if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
        return m;
    }
};

// ---------------------------------------------------------------------------
// Scale factors
// ---------------------------------------------------------------------------

struct ScaleFactors {
    double M = 0.0, N = 0.0;    // script M and script N
    double Mp = 0.0, Np = 0.0;  // their derivatives in tau
};

inline ScaleFactors scale_factors(double p, double q, double tau) {
    const double alpha = 1.0 + tau;
    const double oqt = 1.0 + q * tau;
    const double den = alpha * oqt;
    const double dden = oqt + q * alpha;
    ScaleFactors s;
    s.M = (q * alpha + p) / den;
    s.N = p * q / den;
    s.Mp = (q * den - (q * alpha + p) * dden) / (den * den);
    s.Np = -p * q * dden / (den * den);
    return s;
}

inline ScaleFactors scale_factors(const BundlePoint& pt) { return scale_factors(pt.p(), pt.q(), pt.tau); }

/// Both sides of the rearrangement identity for the last two vertical-vertical terms (tau > 0).
inline std::pair<double, double> scale_factor_identity_sides(double p, double q, double tau) {
    const auto s = scale_factors(p, q, tau);
    const double alpha = 1.0 + tau;
    const double oqt = 1.0 + q * tau;
    const double lhs = q * tau * (p * (s.M * tau - 1.0) - s.M * alpha) / (alpha * tau * oqt);
    const double rhs = 2.0 * s.Mp + s.M * (s.M + s.N * tau) - s.N +
                       ((tau * s.N * alpha + 2.0 - p) * p - s.N * alpha * alpha) / (alpha * alpha * oqt);
    return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Frame and metric
// ---------------------------------------------------------------------------

struct AdaptedFrame {
    Mat F;     // columns: adapted frame vectors in induced coordinates
    Mat Finv;  // induced components -> adapted components
};

inline AdaptedFrame adapted_frame(const BaseGeometry& geo, const BundlePoint& pt) {
    const int n = geo.n;
    Mat N = Mat::Zero(n, n);  // N(k,i) = -u^r Gamma^k_{ir}
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < n; ++r) N(k, i) -= pt.u[r] * geo.gamma(k, i, r);
    AdaptedFrame f;
    f.F = Mat::Identity(2 * n, 2 * n);
    f.Finv = Mat::Identity(2 * n, 2 * n);
    f.F.bottomLeftCorner(n, n) = N;
    f.Finv.bottomLeftCorner(n, n) = -N;
    return f;
}

/// Vertical block alpha^{-p}(g + q (gu)(gu)^T).
inline Mat vertical_block(const BaseGeometry& geo, const BundlePoint& pt) {
    const Vec gu = geo.g * pt.u;
    return (geo.g + pt.q() * gu * gu.transpose()) / pt.alpha_p();
}

/// g_{p,q} in the adapted frame, 2n x 2n block diagonal.
inline Mat gpq_matrix(const BaseGeometry& geo, const BundlePoint& pt) {
    const int n = geo.n;
    Mat G = Mat::Zero(2 * n, 2 * n);
    G.topLeftCorner(n, n) = geo.g;
    G.bottomRightCorner(n, n) = vertical_block(geo, pt);
    return G;
}

inline double g_pq(const BaseGeometry& geo, const BundlePoint& pt, const LiftedVector& A, const LiftedVector& B) {
    if (!(pt.one_q_tau() > kBMqMargin)) throw OutsideBMq("point left BM_q");
    return geo.gv(A.h, B.h) +
           (geo.gv(A.v, B.v) + pt.q() * geo.gv(A.v, pt.u) * geo.gv(B.v, pt.u)) / pt.alpha_p();
}

/// g_{p,q}(X^V, Y^V) for base vectors.
inline double gpq_vv(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    return (geo.gv(X, Y) + pt.q() * geo.gv(X, pt.u) * geo.gv(Y, pt.u)) / pt.alpha_p();
}

// ---------------------------------------------------------------------------
// Levi-Civita connection of g_{p,q}, four lift cases
// ---------------------------------------------------------------------------

namespace detail {

inline Vec gamma_apply(const BaseGeometry& geo, const Vec& X, const Vec& Y) {
    Vec out = Vec::Zero(geo.n);
    for (int k = 0; k < geo.n; ++k)
        for (int i = 0; i < geo.n; ++i)
            for (int j = 0; j < geo.n; ++j) out[k] += geo.gamma(k, i, j) * X[i] * Y[j];
    return out;
}

}  // namespace detail

/// nabla_{X^H} Y^H for fields with constant coordinate components.
inline LiftedVector nabla_HH(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    const Vec nXY = detail::gamma_apply(geo, X, Y);
    return {nXY - geo.Kv(X, Y), -0.5 * geo.Rv(X, Y, pt.u)};
}

/// nabla_{X^H} Y^V
inline LiftedVector nabla_HV(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p();
    const Vec Kxu = geo.Kv(X, u);
    const double gKxuu = geo.gv(Kxu, u);
    const double gyu = geo.gv(Y, u);
    LiftedVector out;
    out.h = (geo.Rtv(u, Y, X) + q * gyu * geo.Rtv(u, u, X)) / (2.0 * ap);
    out.v = (p / a) * gKxuu * Y - geo.Kv(X, Y) + detail::gamma_apply(geo, X, Y) -
            q * gyu * (Kxu - q / pt.one_q_tau() * gKxuu * u);
    return out;
}

/// nabla_{X^V} Y^H
inline LiftedVector nabla_VH(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p();
    const Vec Kyu = geo.Kv(Y, u);
    const double gKyuu = geo.gv(Kyu, u);
    const double gxu = geo.gv(X, u);
    LiftedVector out;
    out.h = (geo.Rtv(u, X, Y) + q * gxu * geo.Rtv(u, u, Y)) / (2.0 * ap);
    out.v = (p / a) * gKyuu * X - geo.Kv(X, Y) - q * gxu * (Kyu - q / pt.one_q_tau() * gKyuu * u);
    return out;
}

/// nabla_{X^V} Y^V
inline LiftedVector nabla_VV(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X, const Vec& Y) {
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p();
    const auto s = scale_factors(pt);
    const double gxu = geo.gv(X, u), gyu = geo.gv(Y, u);
    LiftedVector out;
    out.h = -(p / a) * geo.Kv(u, u) * gpq_vv(geo, pt, Y, X) + geo.Kv(X, Y) / ap + (q / ap) * geo.Kv(Y, u) * gxu +
            (q / ap) * geo.Kv(X, u) * gyu;
    out.v = -(p / a) * (gxu * Y + gyu * X) + s.M * geo.gv(X, Y) * u + s.N * gxu * gyu * u;
    return out;
}

/// Connection table C(gamma, a, b): nabla_{E_a} E_b = C^gamma_{ab} E_gamma.
inline Tensor<double> nabla_pq_coeffs(const BaseGeometry& geo, const BundlePoint& pt) {
    if (!(pt.one_q_tau() > kBMqMargin)) throw OutsideBMq("point outside BM_q");
    const int n = geo.n;
    Tensor<double> C(2 * n, 3, 0.0);
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
            const Vec X = geo.basis(a % n), Y = geo.basis(b % n);
            const bool ha = a < n, hb = b < n;
            LiftedVector w = ha ? (hb ? nabla_HH(geo, pt, X, Y) : nabla_HV(geo, pt, X, Y))
                                : (hb ? nabla_VH(geo, pt, X, Y) : nabla_VV(geo, pt, X, Y));
            for (int c = 0; c < n; ++c) {
                C(c, a, b) = w.h[c];
                C(n + c, a, b) = w.v[c];
            }
        }
    return C;
}

/// Covariant derivative along lifts for arbitrary frame-constant lifted vectors.
inline LiftedVector nabla_lifted(const BaseGeometry& geo, const BundlePoint& pt, const LiftedVector& A,
                                 const LiftedVector& B) {
    return nabla_HH(geo, pt, A.h, B.h) + nabla_HV(geo, pt, A.h, B.v) + nabla_VH(geo, pt, A.v, B.h) +
           nabla_VV(geo, pt, A.v, B.v);
}

// ---------------------------------------------------------------------------
// Canonical vertical field u^V
// ---------------------------------------------------------------------------

struct CanonicalDerivatives {
    LiftedVector along_horizontal;  // nabla_{X^H} u^V
    LiftedVector along_vertical;    // nabla_{X^V} u^V
};

/// Closed forms of the canonical-field lemma.
inline CanonicalDerivatives nabla_pq_canonical(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X) {
    if (!(pt.one_q_tau() > kBMqMargin)) throw OutsideBMq("point outside BM_q");
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p(), tau = pt.tau, oqt = pt.one_q_tau();
    const auto s = scale_factors(pt);
    const Vec Kxu = geo.Kv(X, u);
    const double gKxuu = geo.gv(Kxu, u);
    const double gxu = geo.gv(X, u);
    CanonicalDerivatives d;
    d.along_horizontal.h = oqt / (2.0 * ap) * geo.Rtv(u, u, X);
    d.along_horizontal.v = (p / a) * gKxuu * u - oqt * Kxu + (q * q * tau / oqt) * gKxuu * u;
    d.along_vertical.h = (-p * oqt + q * a) / (ap * a) * gxu * geo.Kv(u, u) + oqt / ap * Kxu;
    d.along_vertical.v = (1.0 - p * tau / a) * X + (s.M + tau * s.N - p / a) * gxu * u;
    return d;
}

/// Same quantities assembled from the connection table plus the X^H(u^i) correction.
inline CanonicalDerivatives nabla_pq_canonical_assembled(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X) {
    const int n = geo.n;
    CanonicalDerivatives d{LiftedVector::zero(n), LiftedVector::zero(n)};
    for (int i = 0; i < n; ++i) {
        const Vec ei = geo.basis(i);
        d.along_horizontal += pt.u[i] * nabla_HV(geo, pt, X, ei);
        d.along_horizontal.v -= pt.u[i] * detail::gamma_apply(geo, X, ei);
        d.along_vertical += pt.u[i] * nabla_VV(geo, pt, X, ei);
    }
    d.along_vertical.v += X;  // X^V(u^i) d/du^i = X^V
    return d;
}

// ---------------------------------------------------------------------------
// Fibers and geodesic flow
// ---------------------------------------------------------------------------

/// Left side of the totally-geodesic condition (a horizontal vector).
inline LiftedVector totally_geodesic_defect(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X,
                                            const Vec& Y) {
    const Vec& u = pt.u;
    const double p = pt.p(), q = pt.q(), ap = pt.alpha_p(), a = pt.alpha;
    const double gxu = geo.gv(X, u), gyu = geo.gv(Y, u);
    LiftedVector d = LiftedVector::zero(geo.n);
    d.h = -(p / (ap * a)) * (geo.gv(X, Y) + q * gxu * gyu) * geo.Kv(u, u) +
          (q / ap) * (gxu * geo.Kv(Y, u) + gyu * geo.Kv(X, u));
    return d;
}

/// trace(X -> K_u X)
inline double trace_Ku(const BaseGeometry& geo, const Vec& u) {
    double t = 0.0;
    for (int l = 0; l < geo.n; ++l)
        for (int r = 0; r < geo.n; ++r) t += geo.K(l, r, l) * u[r];
    return t;
}

/**
 * Divergence of xi = u^i delta_i as the trace of
 *   X -> -2 K_u X + (p/alpha) g(K_u u,u) X - q g(X,u)[K_u u - q/(1+q tau) g(K_u u,u) u].
 */
inline double geodesic_flow_divergence(const BaseGeometry& geo, const BundlePoint& pt) {
    if (!(pt.one_q_tau() > kBMqMargin)) throw OutsideBMq("point outside BM_q");
    const Vec& u = pt.u;
    const double n = geo.n;
    const double c = geo.gv(geo.Kv(u, u), u);
    return -2.0 * trace_Ku(geo, u) + (n * pt.p() / pt.alpha - pt.q() / pt.one_q_tau()) * c;
}

/// The contracted form -2 trace(K_u) + ((n p - alpha q)/alpha) g(K_u u, u).
inline double geodesic_flow_divergence_contracted(const BaseGeometry& geo, const BundlePoint& pt) {
    const Vec& u = pt.u;
    const double n = geo.n;
    const double c = geo.gv(geo.Kv(u, u), u);
    return -2.0 * trace_Ku(geo, u) + ((n * pt.p() - pt.alpha * pt.q()) / pt.alpha) * c;
}

// ---------------------------------------------------------------------------
// Adapted frame as jets in the 2n induced coordinates
// ---------------------------------------------------------------------------

namespace detail {

/// Base jet in n variables re-expressed over the 2n induced variables.
template <int Order, int From>
Jet<Order> lift_to_bundle(const Jet<From>& j, int n) {
    std::vector<int> map(n);
    for (int i = 0; i < n; ++i) map[i] = i;
    return j.template truncate<Order>().embed(2 * n, map);
}

}  // namespace detail

/**
 * Frame components F(B, a) as order-`Order` jets in (x,u) around the point,
 * Order <= 2 (limited by the Christoffel jets).
 */
template <int Order>
Tensor<Jet<Order>> frame_jets(const BaseGeometry& geo, const Vec& u) {
    static_assert(Order <= 2);
    const int n = geo.n, m = 2 * n;
    std::vector<double> point(m);
    for (int i = 0; i < n; ++i) {
        point[i] = geo.x[i];
        point[n + i] = u[i];
    }
    auto vars = Jet<Order>::variables(point);
    Tensor<Jet<Order>> F(m, 2, Jet<Order>(m, 0.0));
    for (int a = 0; a < m; ++a) F(a, a) = Jet<Order>(m, 1.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            Jet<Order> s(m, 0.0);
            for (int r = 0; r < n; ++r)
                s -= vars[n + r] * detail::lift_to_bundle<Order>(geo.gamma_jet(k, i, r), n);
            F(n + k, i) = s;
        }
    return F;
}

/**
 * Anholonomy [E_a, E_b] = c^g_{ab} E_g of the adapted frame, from exact
 * derivatives of the frame components.
 */
inline Tensor<double> anholonomy(const BaseGeometry& geo, const BundlePoint& pt) {
    const int n = geo.n, m = 2 * n;
    auto F = frame_jets<1>(geo, pt.u);
    const Mat Finv = adapted_frame(geo, pt).Finv;
    Tensor<double> c(m, 3, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Vec br = Vec::Zero(m);
            for (int B = 0; B < m; ++B)
                for (int A = 0; A < m; ++A)
                    br[B] += F(A, a).value() * F(B, b).partial({A}) - F(A, b).value() * F(B, a).partial({A});
            const Vec adapted = Finv * br;
            for (int g = 0; g < m; ++g) c(g, a, b) = adapted[g];
        }
    return c;
}

/// Closed-form brackets: [delta_i,delta_j] = -(R(d_i,d_j)u)^V, [delta_i, d_jbar] = Gamma^k_{ij} d_kbar.
inline Tensor<double> anholonomy_closed_form(const BaseGeometry& geo, const BundlePoint& pt) {
    const int n = geo.n, m = 2 * n;
    Tensor<double> c(m, 3, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec r = geo.Rv(geo.basis(i), geo.basis(j), pt.u);
            for (int k = 0; k < n; ++k) {
                c(n + k, i, j) = -r[k];
                c(n + k, i, n + j) = geo.gamma(k, i, j);
                c(n + k, n + j, i) = -geo.gamma(k, i, j);
            }
        }
    return c;
}

struct BracketDeviation {
    double hh = 0.0;  // [delta_i, delta_j]
    double hv = 0.0;  // [delta_i, d_jbar]
    double vv = 0.0;  // [d_ibar, d_jbar]
    double max() const { return std::max({hh, hv, vv}); }
};

/// Exact-jet bracket check for the frame pairs involving indices i and j.
inline BracketDeviation lifted_bracket_check(const BaseGeometry& geo, const BundlePoint& pt, int i, int j) {
    const int n = geo.n;
    auto exact = anholonomy(geo, pt);
    auto closed = anholonomy_closed_form(geo, pt);
    BracketDeviation d;
    for (int g = 0; g < 2 * n; ++g) {
        d.hh = std::max(d.hh, std::abs(exact(g, i, j) - closed(g, i, j)));
        d.hv = std::max(d.hv, std::abs(exact(g, i, n + j) - closed(g, i, n + j)));
        d.vv = std::max(d.vv, std::abs(exact(g, n + i, n + j) - closed(g, n + i, n + j)));
    }
    return d;
}

/**
 * Finite-difference variant: frame derivatives by central differences of the
 * frame matrix recomputed at displaced base points (step h).
 */
inline BracketDeviation lifted_bracket_check_fd(const ManifoldSpec& spec, const BundlePoint& pt, int i, int j,
                                               double h = 1e-5) {
    const int n = spec.dim, m = 2 * n;
    const auto geo = base_geometry(spec, pt.x);
    auto frame_at = [&](const std::vector<double>& x, const Vec& u) {
        auto g = base_geometry(spec, x);
        BundlePoint p2 = pt;
        p2.x = x;
        p2.u = u;
        return adapted_frame(g, p2).F;
    };
    const Mat F0 = adapted_frame(geo, pt).F;
    std::vector<Mat> dF(m);
    for (int A = 0; A < m; ++A) {
        std::vector<double> xp = pt.x, xm = pt.x;
        Vec up = pt.u, um = pt.u;
        if (A < n) {
            xp[A] += h;
            xm[A] -= h;
        } else {
            up[A - n] += h;
            um[A - n] -= h;
        }
        dF[A] = (frame_at(xp, up) - frame_at(xm, um)) / (2.0 * h);
    }
    const Mat Finv = adapted_frame(geo, pt).Finv;
    auto bracket = [&](int a, int b) {
        Vec br = Vec::Zero(m);
        for (int A = 0; A < m; ++A) br += F0(A, a) * dF[A].col(b) - F0(A, b) * dF[A].col(a);
        return Vec(Finv * br);
    };
    auto closed = anholonomy_closed_form(geo, pt);
    BracketDeviation d;
    const Vec hh = bracket(i, j), hv = bracket(i, n + j), vv = bracket(n + i, n + j);
    for (int g = 0; g < m; ++g) {
        d.hh = std::max(d.hh, std::abs(hh[g] - closed(g, i, j)));
        d.hv = std::max(d.hv, std::abs(hv[g] - closed(g, i, n + j)));
        d.vv = std::max(d.vv, std::abs(vv[g] - closed(g, n + i, n + j)));
    }
    return d;
}

}  // namespace cgtm
