#pragma once

/**
 * @file oracle.hpp
 * @brief Independent route through the induced coordinates (x,u) of TM.
 *
 * The metric g_{p,q} is assembled as a jet in the 2n coordinates, its
 * Christoffel symbols and curvature are obtained by differentiation, and the
 * results are transported to the adapted frame. Nothing here uses the
 * closed-form connection tables.
 */

#include <cmath>
#include <vector>

#include "cgtm/cgbundle.hpp"
#include "cgtm/linalg.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

/// Induced-coordinate components G_AB of g_{p,q} as jets in (x,u), Order <= 2.
template <int Order>
Tensor<Jet<Order>> induced_metric_jets(const BaseGeometry& geo, const BundlePoint& pt) {
    static_assert(Order <= 2);
    const int n = geo.n, m = 2 * n;
    std::vector<double> point(m);
    for (int i = 0; i < n; ++i) {
        point[i] = geo.x[i];
        point[n + i] = pt.u[i];
    }
    auto vars = Jet<Order>::variables(point);
    const Jet<Order> zero(m, 0.0);

    Tensor<Jet<Order>> g(n, 2, zero);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = detail::lift_to_bundle<Order>(geo.g_jet(i, j), n);

    std::vector<Jet<Order>> gu(n, zero);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) gu[a] += g(a, b) * vars[n + b];
    Jet<Order> tau = zero;
    for (int a = 0; a < n; ++a) tau += gu[a] * vars[n + a];
    const Jet<Order> scale = pt.p() == 0.0 ? Jet<Order>(m, 1.0) : pow_real(tau + 1.0, -pt.p());

    // N(k,i) = -u^r Gamma^k_{ir}
    Tensor<Jet<Order>> N(n, 2, zero);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < n; ++r) N(k, i) -= vars[n + r] * detail::lift_to_bundle<Order>(geo.gamma_jet(k, i, r), n);

    Tensor<Jet<Order>> V(n, 2, zero);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) V(a, b) = scale * (g(a, b) + pt.q() * gu[a] * gu[b]);

    // d_i = delta_i - N^k_i d_kbar, so G = Finv^T diag(g, V) Finv
    Tensor<Jet<Order>> VN(n, 2, zero);  // VN(a,i) = V_ak N^k_i
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) VN(a, i) += V(a, k) * N(k, i);

    Tensor<Jet<Order>> G(m, 2, zero);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet<Order> s = g(i, j);
            for (int k = 0; k < n; ++k) s += N(k, i) * VN(k, j);
            G(i, j) = s;
            G(i, n + j) = -VN(j, i);
            G(n + j, i) = G(i, n + j);
            G(n + i, n + j) = V(i, j);
        }
    return G;
}

struct OracleResult {
    Mat G;                    // induced components
    Tensor<double> gamma;     // induced Christoffels Gamma^C_{AB}
    Tensor<double> R;         // induced curvature R^D_{CAB}
    Tensor<double> conn;      // adapted connection table C(c,a,b)
    Tensor<double> curv;      // adapted curvature (d,c,a,b)
    double divergence = 0.0;  // of xi = u^i delta_i
    double scalar = 0.0;
};

namespace detail {

/// Connection coefficients in a moving frame from jet frame components.
inline Tensor<double> frame_connection(const Tensor<Jet<1>>& F, const Mat& Finv, const Tensor<double>& gamma) {
    const int m = F.dim();
    Tensor<double> c(m, 3, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Vec w = Vec::Zero(m);
            for (int B = 0; B < m; ++B) {
                double s = 0.0;
                for (int A = 0; A < m; ++A) {
                    const double ea = F(A, a).value();
                    if (ea == 0.0) continue;
                    s += ea * F(B, b).partial({A});
                    for (int C = 0; C < m; ++C) s += gamma(B, A, C) * ea * F(C, b).value();
                }
                w[B] = s;
            }
            const Vec adapted = Finv * w;
            for (int g = 0; g < m; ++g) c(g, a, b) = adapted[g];
        }
    return c;
}

/// R'(d,c,a,b) = Finv^d_D R^D_{CAB} F^C_c F^A_a F^B_b
inline Tensor<double> to_frame(const Tensor<double>& R, const Mat& F, const Mat& Finv) {
    const int m = R.dim();
    Tensor<double> t1(m, 4, 0.0), t2(m, 4, 0.0);
    // contract lower slots one at a time
    for (int D = 0; D < m; ++D)
        for (int c = 0; c < m; ++c)
            for (int A = 0; A < m; ++A)
                for (int B = 0; B < m; ++B) {
                    double s = 0.0;
                    for (int C = 0; C < m; ++C) s += R(D, C, A, B) * F(C, c);
                    t1(D, c, A, B) = s;
                }
    for (int D = 0; D < m; ++D)
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int B = 0; B < m; ++B) {
                    double s = 0.0;
                    for (int A = 0; A < m; ++A) s += t1(D, c, A, B) * F(A, a);
                    t2(D, c, a, B) = s;
                }
    for (int D = 0; D < m; ++D)
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double s = 0.0;
                    for (int B = 0; B < m; ++B) s += t2(D, c, a, B) * F(B, b);
                    t1(D, c, a, b) = s;
                }
    for (int d = 0; d < m; ++d)
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double s = 0.0;
                    for (int D = 0; D < m; ++D) s += Finv(d, D) * t1(D, c, a, b);
                    t2(d, c, a, b) = s;
                }
    return t2;
}

}  // namespace detail

/// Induced Christoffel symbols only (order-1 metric jets suffice).
inline Tensor<double> oracle_christoffels(const BaseGeometry& geo, const BundlePoint& pt) {
    auto G = induced_metric_jets<1>(geo, pt);
    const Mat Gv = to_matrix(values(G));
    const Mat Ginv = checked_inverse(Gv, "induced metric");
    auto Ginv0 = to_tensor(Ginv).map([&](double v) { return Jet<0>(G.dim(), v); });
    return values(detail::levi_civita(G, Ginv0));
}

inline OracleResult oracle_evaluate(const BaseGeometry& geo, const BundlePoint& pt) {
    if (!(pt.one_q_tau() > kBMqMargin)) throw OutsideBMq("point outside BM_q");
    const int n = geo.n, m = 2 * n;
    OracleResult out;
    auto G2 = induced_metric_jets<2>(geo, pt);
    out.G = to_matrix(values(G2));
    const Mat Ginv = checked_inverse(out.G, "induced metric");
    auto Ginv1 = jet_inverse(detail::truncate_all<1>(G2), Ginv);
    auto Gamma1 = detail::levi_civita(G2, Ginv1);
    out.gamma = values(Gamma1);
    out.R = values(detail::curvature_of(Gamma1));

    const auto frame = adapted_frame(geo, pt);
    auto F1 = frame_jets<1>(geo, pt.u);
    out.conn = detail::frame_connection(F1, frame.Finv, out.gamma);
    out.curv = detail::to_frame(out.R, frame.F, frame.Finv);

    // div xi = d_A xi^A + Gamma^B_{BA} xi^A, xi = F e_a u^a
    double div = 0.0;
    Vec xi = Vec::Zero(m);
    for (int a = 0; a < n; ++a)
        for (int A = 0; A < m; ++A) xi[A] += F1(A, a).value() * pt.u[a];
    for (int A = 0; A < m; ++A) {
        // d_A of sum_a F(A,a) u^a; the u^a factor only varies along the fiber
        double d = 0.0;
        for (int a = 0; a < n; ++a) {
            d += F1(A, a).partial({A}) * pt.u[a];
            if (A == n + a) d += F1(A, a).value();
        }
        div += d;
    }
    for (int A = 0; A < m; ++A)
        for (int B = 0; B < m; ++B) div += out.gamma(B, B, A) * xi[A];
    out.divergence = div;

    double s = 0.0;
    for (int A = 0; A < m; ++A)
        for (int B = 0; B < m; ++B)
            for (int C = 0; C < m; ++C) s += Ginv(B, C) * out.R(A, C, A, B);
    out.scalar = s;
    return out;
}

}  // namespace cgtm
