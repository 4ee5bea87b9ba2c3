#pragma once

/**
 * @file statman.hpp
 * @brief Statistical geometry of the base manifold at a point.
 *
 * Index conventions used throughout the library:
 *   Christoffels   G(k,i,j)         = Gamma^k_{ij}
 *   skewness       K(k,i,j)         = K^k_{ij},  K_X Y = K(X,Y)
 *   curvature      R(l,k,i,j)       = R^l_{kij},  R(d_i,d_j)d_k = R^l_{kij} d_l
 *   cubic tensor   C(i,j,k)         = C_{ijk}
 *   covariant      nablaK(l,m,i,j)  = ((nabla_m K)(d_i,d_j))^l
 *                  nablaR(l,m,k,i,j) = ((nabla_m R)(d_i,d_j)d_k)^l
 * Lowered tensors pair the upper index with the metric in the last slot.
 * Covariant derivatives use the statistical connection Gamma = LC + K.
 */

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cgtm/errors.hpp"
#include "cgtm/expr.hpp"
#include "cgtm/jet.hpp"
#include "cgtm/linalg.hpp"

namespace cgtm {

enum class Signature { Riemannian, Pseudo };
enum class SkewKind { Skewness, Christoffels };

struct ManifoldSpec {
    std::string name = "custom";
    int dim = 0;
    std::vector<std::string> coords;                // display aliases, length dim
    std::vector<std::vector<Expression>> metric;    // dim x dim
    SkewKind skew_kind = SkewKind::Skewness;
    std::vector<Expression> skew;                   // flat [k][i][j]: K^k_{ij} or Gamma^k_{ij}
    ParamValues params;
    Signature signature = Signature::Riemannian;
    std::vector<std::pair<double, double>> domain;  // sampling box per coordinate

    const Expression& skew_at(int k, int i, int j) const { return skew[(k * dim + i) * dim + j]; }
    std::vector<std::string> param_names() const {
        std::vector<std::string> names;
        for (const auto& [k, v] : params) names.push_back(k);
        return names;
    }
};

// ---------------------------------------------------------------------------
// Jet-level building blocks (templated on the jet order)
// ---------------------------------------------------------------------------

namespace detail {

template <int N>
Tensor<Jet<N - 1>> derivative_of(const Tensor<Jet<N>>& t) {
    // appends the derivative index as the last slot
    const int n = t.dim();
    const int nv = t.at_flat(0).nvars();
    Tensor<Jet<N - 1>> out(n, t.rank() + 1, Jet<N - 1>(nv, 0.0));
    for (std::size_t k = 0; k < t.size(); ++k)
        for (int m = 0; m < nv && m < n; ++m) out.at_flat(k * n + m) = t.at_flat(k).derivative(m);
    return out;
}

template <int To, int From>
Tensor<Jet<To>> truncate_all(const Tensor<Jet<From>>& t) {
    return t.map([](const Jet<From>& j) { return j.template truncate<To>(); });
}

/// Levi-Civita Christoffels (order N-1) from metric jets of order N.
template <int N>
Tensor<Jet<N - 1>> levi_civita(const Tensor<Jet<N>>& g, const Tensor<Jet<N - 1>>& ginv) {
    const int n = g.dim();
    const int nv = g(0, 0).nvars();
    auto dg = derivative_of(g);  // dg(i,j,k) = d_k g_ij
    Tensor<Jet<N - 1>> lc(n, 3, Jet<N - 1>(nv, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            std::vector<Jet<N - 1>> lowered;
            lowered.reserve(n);
            for (int l = 0; l < n; ++l) lowered.push_back((dg(j, l, i) + dg(i, l, j) - dg(i, j, l)) * 0.5);
            for (int k = 0; k < n; ++k) {
                Jet<N - 1> s(nv, 0.0);
                for (int l = 0; l < n; ++l) s += ginv(k, l) * lowered[l];
                lc(k, i, j) = s;
                lc(k, j, i) = s;
            }
        }
    return lc;
}

/// R^l_{kij} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}.
template <int N>
Tensor<Jet<N - 1>> curvature_of(const Tensor<Jet<N>>& gamma) {
    const int n = gamma.dim();
    const int nv = gamma.at_flat(0).nvars();
    auto dG = derivative_of(gamma);  // dG(k,i,j,m) = d_m G^k_ij
    auto G = truncate_all<N - 1>(gamma);
    Tensor<Jet<N - 1>> R(n, 4, Jet<N - 1>(nv, 0.0));
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    Jet<N - 1> s = dG(l, j, k, i) - dG(l, i, k, j);
                    for (int m = 0; m < n; ++m) s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
                    R(l, k, i, j) = s;
                    R(l, k, j, i) = -s;
                }
    return R;
}

/// Rt^l_{kij} = g^{lm} R^s_{ikm} g_{sj}, so that g(Rt(X,Y)Z,W) = g(R(Z,W)X,Y).
template <class S>
Tensor<S> r_tilde_of(const Tensor<S>& R, const Tensor<S>& g, const Tensor<S>& ginv, const S& zero) {
    const int n = R.dim();
    // lowered(m,i,k,j) = R^s_{ikm} g_{sj}
    Tensor<S> low(n, 4, zero);
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) {
                    S s = zero;
                    for (int t = 0; t < n; ++t) s += R(t, i, k, m) * g(t, j);
                    low(m, i, k, j) = s;
                }
    Tensor<S> Rt(n, 4, zero);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    S s = zero;
                    for (int m = 0; m < n; ++m) s += ginv(l, m) * low(m, i, k, j);
                    Rt(l, k, i, j) = s;
                }
    return Rt;
}

/**
 * Covariant derivative of a (1,r) tensor given as order-1 jets.
 * Result layout: (l, m, a1, ..., ar) = ((nabla_m T)(a1..ar))^l.
 */
inline Tensor<double> covariant_derivative(const Tensor<Jet<1>>& T, const Tensor<double>& gamma) {
    const int n = T.dim();
    const int r = T.rank() - 1;
    Tensor<double> out(n, r + 2, 0.0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        auto idx = out.unflatten(flat);  // l, m, a1..ar
        const int l = idx[0], m = idx[1];
        auto at = [&](int upper, const std::vector<int>& lower) -> const Jet<1>& {
            std::size_t k = upper;
            for (int a : lower) k = k * n + a;
            return T.at_flat(k);
        };
        std::vector<int> lower(idx.begin() + 2, idx.end());
        double v = m < T.at_flat(0).nvars() ? at(l, lower).derivative(m).value() : 0.0;
        for (int s = 0; s < n; ++s) v += gamma(l, m, s) * at(s, lower).value();
        for (int p = 0; p < r; ++p) {
            const int keep = lower[p];
            for (int s = 0; s < n; ++s) {
                lower[p] = s;
                v -= gamma(s, m, keep) * at(l, lower).value();
            }
            lower[p] = keep;
        }
        out.at_flat(flat) = v;
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Base geometry snapshot
// ---------------------------------------------------------------------------

/// Every base tensor needed by the bundle formulas, evaluated at one point.
struct BaseGeometry {
    int n = 0;
    Signature signature = Signature::Riemannian;
    std::vector<double> x;

    Mat g, ginv;
    Tensor<Jet<3>> g_jet;      // g_ij through third order
    Tensor<Jet<2>> gamma_jet;  // statistical Christoffels through second order

    Tensor<double> dg;  // dg(i,j,k) = d_k g_ij
    Tensor<double> lc, K, gamma, gamma_star;
    Tensor<double> C;
    Tensor<double> R, R_lc, R_star, Rt, Rt_star;
    Tensor<double> nablaK, nabla_lc_K, nablaR, nablaRt;

    // --- vector-level helpers --------------------------------------------
    double gv(const Vec& X, const Vec& Y) const { return X.dot(g * Y); }
    double norm2(const Vec& X) const { return gv(X, X); }

    /// K_X Y
    Vec Kv(const Vec& X, const Vec& Y) const {
        Vec out = Vec::Zero(n);
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out[l] += K(l, i, j) * X[i] * Y[j];
        return out;
    }

    /// T(X,Y)Z for a (1,3) curvature-like tensor in (l,k,i,j) layout.
    static Vec apply3(const Tensor<double>& T, const Vec& X, const Vec& Y, const Vec& Z) {
        const int n = T.dim();
        Vec out = Vec::Zero(n);
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k) {
                if (Z[k] == 0.0) continue;
                for (int i = 0; i < n; ++i) {
                    if (X[i] == 0.0) continue;
                    for (int j = 0; j < n; ++j) out[l] += T(l, k, i, j) * Z[k] * X[i] * Y[j];
                }
            }
        return out;
    }

    Vec Rv(const Vec& X, const Vec& Y, const Vec& Z) const { return apply3(R, X, Y, Z); }
    Vec Rtv(const Vec& X, const Vec& Y, const Vec& Z) const { return apply3(Rt, X, Y, Z); }

    /// (nabla_W K)(X,Y)
    Vec dK(const Vec& W, const Vec& X, const Vec& Y) const {
        Vec out = Vec::Zero(n);
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) out[l] += nablaK(l, m, i, j) * W[m] * X[i] * Y[j];
        return out;
    }

    static Vec apply4(const Tensor<double>& T, const Vec& W, const Vec& X, const Vec& Y, const Vec& Z) {
        const int n = T.dim();
        Vec out = Vec::Zero(n);
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) {
                if (W[m] == 0.0) continue;
                for (int k = 0; k < n; ++k) {
                    if (Z[k] == 0.0) continue;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) out[l] += T(l, m, k, i, j) * W[m] * Z[k] * X[i] * Y[j];
                }
            }
        return out;
    }

    /// (nabla_W R)(X,Y)Z
    Vec dR(const Vec& W, const Vec& X, const Vec& Y, const Vec& Z) const { return apply4(nablaR, W, X, Y, Z); }
    /// (nabla_W Rt)(X,Y)Z
    Vec dRt(const Vec& W, const Vec& X, const Vec& Y, const Vec& Z) const { return apply4(nablaRt, W, X, Y, Z); }

    Vec basis(int i) const { return Vec::Unit(n, i); }
};

/// Metric jets at x. Throws SingularMetric / DomainError.
inline Tensor<Jet<3>> metric_jets(const ManifoldSpec& spec, std::span<const double> x) {
    if (static_cast<int>(x.size()) != spec.dim)
        throw UsageError("point has " + std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(spec.dim));
    const int n = spec.dim;
    Tensor<Jet<3>> g(n, 2, Jet<3>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            g(i, j) = eval_jet(spec.metric[i][j], x, spec.params);
            g(j, i) = g(i, j);
        }
    return g;
}

/// (g, g^-1, jets) at x.
struct MetricAt {
    Mat g, ginv;
    Tensor<Jet<3>> jets;
};

inline MetricAt metric_at(const ManifoldSpec& spec, std::span<const double> x) {
    MetricAt m;
    m.jets = metric_jets(spec, x);
    m.g = to_matrix(values(m.jets));
    m.ginv = checked_inverse(m.g);
    return m;
}

namespace detail {

inline void check_statistical(const Tensor<double>& K, const Mat& g) {
    const int n = K.dim();
    // K_{ijk} = g_{kl} K^l_{ij}
    Tensor<double> low(n, 3, 0.0);
    double scale = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += g(k, l) * K(l, i, j);
                low(i, j, k) = s;
                scale = std::max(scale, std::abs(s));
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double v = low(i, j, k);
                for (double w : {low(j, i, k), low(i, k, j), low(k, j, i)})
                    if (std::abs(v - w) > 1e-9 * scale)
                        throw NotStatistical("lowered skewness is not totally symmetric at (" + std::to_string(i + 1) +
                                             "," + std::to_string(j + 1) + "," + std::to_string(k + 1) +
                                             "): " + std::to_string(v) + " vs " + std::to_string(w));
            }
}

}  // namespace detail

/// Full statistical geometry at x.
inline BaseGeometry base_geometry(const ManifoldSpec& spec, std::span<const double> x) {
    BaseGeometry geo;
    const int n = spec.dim;
    geo.n = n;
    geo.signature = spec.signature;
    geo.x.assign(x.begin(), x.end());

    auto metric = metric_at(spec, x);
    geo.g = metric.g;
    geo.ginv = metric.ginv;
    geo.g_jet = metric.jets;

    auto g2 = detail::truncate_all<2>(metric.jets);
    auto ginv2 = jet_inverse(g2, geo.ginv);
    auto lc2 = detail::levi_civita(metric.jets, ginv2);

    Tensor<Jet<2>> K2(n, 3, Jet<2>(n, 0.0));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                auto e = eval_jet(spec.skew_at(k, i, j), x, spec.params).truncate<2>();
                K2(k, i, j) = spec.skew_kind == SkewKind::Skewness ? e : e - lc2(k, i, j);
            }

    geo.K = values(K2);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(geo.K(k, i, j) - geo.K(k, j, i)) > 1e-9 * std::max(1.0, std::abs(geo.K(k, i, j))))
                    throw NotStatistical("connection is not torsion-free at slot (" + std::to_string(k + 1) + "," +
                                         std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    detail::check_statistical(geo.K, geo.g);

    Tensor<Jet<2>> G2(n, 3, Jet<2>(n, 0.0)), Gs2(n, 3, Jet<2>(n, 0.0));
    for (std::size_t k = 0; k < G2.size(); ++k) {
        G2.at_flat(k) = lc2.at_flat(k) + K2.at_flat(k);
        Gs2.at_flat(k) = lc2.at_flat(k) - K2.at_flat(k);
    }
    geo.gamma_jet = G2;
    geo.lc = values(lc2);
    geo.gamma = values(G2);
    geo.gamma_star = values(Gs2);

    geo.dg = Tensor<double>(n, 3, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) geo.dg(i, j, k) = metric.jets(i, j).partial({k});

    geo.C = Tensor<double>(n, 3, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double c = geo.dg(i, j, k);
                for (int h = 0; h < n; ++h) c -= geo.gamma(h, i, k) * geo.g(j, h) + geo.gamma(h, j, k) * geo.g(i, h);
                geo.C(i, j, k) = c;
            }

    auto R1 = detail::curvature_of(G2);
    geo.R = values(R1);
    geo.R_lc = values(detail::curvature_of(lc2));
    auto Rs1 = detail::curvature_of(Gs2);
    geo.R_star = values(Rs1);

    auto g1 = detail::truncate_all<1>(metric.jets);
    auto ginv1 = detail::truncate_all<1>(ginv2);
    auto Rt1 = detail::r_tilde_of(R1, g1, ginv1, Jet<1>(n, 0.0));
    geo.Rt = values(Rt1);
    geo.Rt_star = detail::r_tilde_of(geo.R_star, to_tensor(geo.g), to_tensor(geo.ginv), 0.0);

    geo.nablaK = detail::covariant_derivative(detail::truncate_all<1>(K2), geo.gamma);
    geo.nabla_lc_K = detail::covariant_derivative(detail::truncate_all<1>(K2), geo.lc);
    geo.nablaR = detail::covariant_derivative(R1, geo.gamma);
    geo.nablaRt = detail::covariant_derivative(Rt1, geo.gamma);
    return geo;
}

// ---------------------------------------------------------------------------
// Named accessors matching the operation list
// ---------------------------------------------------------------------------

inline const Tensor<double>& lc_christoffels(const BaseGeometry& g) { return g.lc; }
inline const Tensor<double>& skewness(const BaseGeometry& g) { return g.K; }
inline const Tensor<double>& cubic_tensor(const BaseGeometry& g) { return g.C; }
inline const Tensor<double>& dual_connection(const BaseGeometry& g) { return g.gamma_star; }

/// Lowered skewness K_{ijk} = g_{kl} K^l_{ij}.
inline Tensor<double> lowered_skewness(const BaseGeometry& geo) {
    const int n = geo.n;
    Tensor<double> low(n, 3, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) low(i, j, k) += geo.g(k, l) * geo.K(l, i, j);
    return low;
}

/// [K_X, K_Y]Z components: KK(l,k,i,j) = ([K_i, K_j] d_k)^l.
inline Tensor<double> skew_commutator(const BaseGeometry& geo) {
    const int n = geo.n;
    Tensor<double> out(n, 4, 0.0);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m) s += geo.K(l, i, m) * geo.K(m, j, k) - geo.K(l, j, m) * geo.K(m, i, k);
                    out(l, k, i, j) = s;
                }
    return out;
}

/**
 * Max deviation of R = LC-curvature + (nablaLC_X K)(Y,Z) - (nablaLC_Y K)(X,Z) + [K_X,K_Y]Z,
 * together with the second form using the statistical covariant derivative
 * (nabla_X K)(Y,Z) - (nabla_Y K)(X,Z) - [K_X,K_Y]Z.
 */
inline double curvature_decomposition_check(const BaseGeometry& geo) {
    const int n = geo.n;
    auto KK = skew_commutator(geo);
    double dev = 0.0;
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double first = geo.R_lc(l, k, i, j) + geo.nabla_lc_K(l, i, j, k) -
                                         geo.nabla_lc_K(l, j, i, k) + KK(l, k, i, j);
                    const double second = geo.R_lc(l, k, i, j) + geo.nablaK(l, i, j, k) - geo.nablaK(l, j, i, k) -
                                          KK(l, k, i, j);
                    dev = std::max({dev, std::abs(first - geo.R(l, k, i, j)), std::abs(second - geo.R(l, k, i, j))});
                }
    return dev;
}

}  // namespace cgtm
