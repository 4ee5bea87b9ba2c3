#pragma once

// Shared helpers for the test binaries: seeded generators, finite differences
// on TM, and the structural identity evaluators.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cgtm/cgtm.hpp"

#ifndef CGTM_SOURCE_DIR
#define CGTM_SOURCE_DIR "."
#endif

namespace cgtm::testing {

inline std::string source_path(const std::string& rel) { return std::string(CGTM_SOURCE_DIR) + "/" + rel; }

inline ManifoldSpec curved_statistical_spec() { return load_spec(source_path("samples/curved_statistical.json")); }

inline const std::vector<MetricParams>& sweep_grid() {
    static const std::vector<MetricParams> grid = [] {
        std::vector<MetricParams> g;
        for (double p : {0.0, 0.5, 1.0, 2.0})
            for (double q : {0.0, 0.5, 1.0}) g.push_back({p, q});
        g.push_back({1.0, -0.1});
        return g;
    }();
    return grid;
}

inline Vec random_vec(Sampler& s, int n, double scale = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * (2.0 * s.uniform() - 1.0);
    return v;
}

/// Largest tracked deviation against a tolerance.
struct Worst {
    std::string name;
    double tol = 0.0;
    double value = 0.0;
    void fold(double v) {
        if (!(v <= value)) value = v;  // NaN sticks
    }
    bool pass() const { return value <= tol; }
};

// ---------------------------------------------------------------------------
// Finite differences on TM
// ---------------------------------------------------------------------------

/// f evaluated at induced coordinates y = (x, u).
using BundleFunction = std::function<double(const BaseGeometry&, const BundlePoint&)>;

inline double eval_at(const ManifoldSpec& spec, MetricParams params, const Vec& y, const BundleFunction& f) {
    const int n = spec.dim;
    std::vector<double> x(y.data(), y.data() + n);
    const auto geo = base_geometry(spec, x);
    return f(geo, make_bundle_point(geo, y.tail(n), params));
}

/// Central difference of f along `dir` (induced components), one Richardson step, O(h^4).
inline double directional_fd(const ManifoldSpec& spec, MetricParams params, const BundlePoint& pt, const Vec& dir,
                             const BundleFunction& f, double h = 1e-3) {
    const int n = spec.dim;
    Vec y(2 * n);
    for (int i = 0; i < n; ++i) y[i] = pt.x[i];
    y.tail(n) = pt.u;
    auto central = [&](double s) { return (eval_at(spec, params, y + s * dir, f) - eval_at(spec, params, y - s * dir, f)) / (2.0 * s); };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/// Induced components of X^H and X^V.
inline Vec horizontal_direction(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X) {
    return adapted_frame(geo, pt).F * LiftedVector::horizontal(X).stacked();
}
inline Vec vertical_direction(const BaseGeometry& geo, const BundlePoint& pt, const Vec& X) {
    return adapted_frame(geo, pt).F * LiftedVector::vertical(X).stacked();
}

// ---------------------------------------------------------------------------
// Structural identities; each returns a max absolute deviation
// ---------------------------------------------------------------------------

inline double cubic_permutation_defect(const BaseGeometry& geo) {
    const int n = geo.n;
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double c = geo.C(i, j, k);
                for (double o : {geo.C(i, k, j), geo.C(j, i, k), geo.C(j, k, i), geo.C(k, i, j), geo.C(k, j, i)})
                    m = std::max(m, std::abs(c - o));
            }
    return m;
}

/// C_ijk + 2 K_ijk
inline double cubic_vs_skewness(const BaseGeometry& geo) {
    const auto low = lowered_skewness(geo);
    double m = 0.0;
    for (std::size_t k = 0; k < low.size(); ++k) m = std::max(m, std::abs(geo.C.at_flat(k) + 2.0 * low.at_flat(k)));
    return m;
}

/// K_X Y = K_Y X and g(K_X Y, Z) = g(Y, K_X Z) on random vectors.
inline double skewness_symmetry_defect(const BaseGeometry& geo, Sampler& s) {
    const Vec X = random_vec(s, geo.n), Y = random_vec(s, geo.n), Z = random_vec(s, geo.n);
    const double a = (geo.Kv(X, Y) - geo.Kv(Y, X)).cwiseAbs().maxCoeff();
    const double b = std::abs(geo.gv(geo.Kv(X, Y), Z) - geo.gv(Y, geo.Kv(X, Z)));
    return std::max(a, b);
}

/// d_i g_jk - g(nabla_i d_j, d_k) - g(d_j, nabla*_i d_k); the derivative comes from the metric jets.
inline double duality_defect(const BaseGeometry& geo) {
    const int n = geo.n;
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = geo.g_jet(j, k).partial({i});
                for (int l = 0; l < n; ++l) v -= geo.gamma(l, i, j) * geo.g(l, k) + geo.gamma_star(l, i, k) * geo.g(j, l);
                m = std::max(m, std::abs(v));
            }
    return m;
}

inline double Rlow(const BaseGeometry& geo, const Tensor<double>& T, const Vec& X, const Vec& Y, const Vec& Z,
                   const Vec& W) {
    return geo.gv(BaseGeometry::apply3(T, X, Y, Z), W);
}

/// Antisymmetry in (X,Y), R(X,Y,Z,W) = -R*(X,Y,W,Z), first Bianchi; random vectors, scaled by |R|.
inline double curvature_identity_defect(const BaseGeometry& geo, Sampler& s) {
    const int n = geo.n;
    const Vec X = random_vec(s, n), Y = random_vec(s, n), Z = random_vec(s, n), W = random_vec(s, n);
    const double r = Rlow(geo, geo.R, X, Y, Z, W);
    const double anti = std::abs(r + Rlow(geo, geo.R, Y, X, Z, W));
    const double pair = std::abs(r + Rlow(geo, geo.R_star, X, Y, W, Z));
    const double bianchi = std::abs(r + Rlow(geo, geo.R, Y, Z, X, W) + Rlow(geo, geo.R, Z, X, Y, W));
    return std::max({anti, pair, bianchi});
}

/// g(Rt(X,Y)Z,W) = R(Z,W,X,Y), antisymmetry in (Z,W), and g(Rt(X,Y)Z,W) = -g(Rt*(Y,X)Z,W).
inline double rtilde_defect(const BaseGeometry& geo, Sampler& s) {
    const int n = geo.n;
    const Vec X = random_vec(s, n), Y = random_vec(s, n), Z = random_vec(s, n), W = random_vec(s, n);
    const double t = Rlow(geo, geo.Rt, X, Y, Z, W);
    const double def = std::abs(t - Rlow(geo, geo.R, Z, W, X, Y));
    const double anti = std::abs(t + Rlow(geo, geo.Rt, X, Y, W, Z));
    const double dual = std::abs(t + Rlow(geo, geo.Rt_star, Y, X, Z, W));
    return std::max({def, anti, dual});
}

/// The four differential relations along X^H and X^V, finite differences against closed forms (relative).
inline double lift_relation_defect(const ManifoldSpec& spec, const BaseGeometry& geo, const BundlePoint& pt, Sampler& s) {
    const int n = geo.n;
    const Vec X = random_vec(s, n);
    const int j = static_cast<int>(s.uniform() * n) % n;
    const Vec Y = geo.basis(j);  // coordinate field, so nabla-hat_X Y = Gamma-hat(X, d_j)
    const Vec& u = pt.u;
    BundleFunction tau = [](const BaseGeometry& g, const BundlePoint& b) { return g.gv(b.u, b.u); };
    BundleFunction gyu = [j](const BaseGeometry& g, const BundlePoint& b) { return g.gv(g.basis(j), b.u); };
    const Vec dh = horizontal_direction(geo, pt, X), dv = vertical_direction(geo, pt, X);
    Vec lcXY = Vec::Zero(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i) lcXY[l] += geo.lc(l, i, j) * X[i];
    const double r1 = rel_dev(directional_fd(spec, pt.params, pt, dh, tau), -2.0 * geo.gv(geo.Kv(X, u), u));
    const double r2 = rel_dev(directional_fd(spec, pt.params, pt, dh, gyu), geo.gv(lcXY, u) - geo.gv(Y, geo.Kv(X, u)));
    const double r3 = rel_dev(directional_fd(spec, pt.params, pt, dv, tau), 2.0 * geo.gv(X, u));
    const double r4 = rel_dev(directional_fd(spec, pt.params, pt, dv, gyu), geo.gv(X, Y));
    return std::max({r1, r2, r3, r4});
}

/// g_pq(X^V,u^V) and the two derivative formulas for g_pq(Y^V,Z^V) on coordinate fields (derivatives relative).
inline double vertical_metric_derivative_defect(const ManifoldSpec& spec, const BaseGeometry& geo, const BundlePoint& pt, Sampler& s) {
    const int n = geo.n;
    const Vec X = random_vec(s, n);
    const int j = static_cast<int>(s.uniform() * n) % n, k = static_cast<int>(s.uniform() * n) % n;
    const Vec Y = geo.basis(j), Z = geo.basis(k), &u = pt.u;
    const double p = pt.p(), q = pt.q(), a = pt.alpha, ap = pt.alpha_p();
    const double r0 = std::abs(gpq_vv(geo, pt, X, u) - pt.one_q_tau() / ap * geo.gv(X, u));
    BundleFunction f = [j, k](const BaseGeometry& g, const BundlePoint& b) {
        return gpq_vv(g, b, g.basis(j), g.basis(k));
    };
    auto nab = [&](const Vec& A, const Vec& B) { return detail::gamma_apply(geo, A, B); };
    const double hx = 2.0 * p / a * geo.gv(geo.Kv(X, u), u) * gpq_vv(geo, pt, Y, Z) -
                      2.0 * gpq_vv(geo, pt, geo.Kv(X, Y), Z) + gpq_vv(geo, pt, nab(X, Y), Z) +
                      gpq_vv(geo, pt, Y, nab(X, Z)) - 2.0 * q / ap * geo.gv(Y, u) * geo.gv(geo.Kv(X, Z), u);
    const double vx = -2.0 * p / a * geo.gv(X, u) * gpq_vv(geo, pt, Y, Z) +
                      q / ap * (geo.gv(Y, X) * geo.gv(Z, u) + geo.gv(Z, X) * geo.gv(Y, u));
    const double r1 = rel_dev(directional_fd(spec, pt.params, pt, horizontal_direction(geo, pt, X), f), hx);
    const double r2 = rel_dev(directional_fd(spec, pt.params, pt, vertical_direction(geo, pt, X), f), vx);
    return std::max({r0, r1, r2});
}

/// Lie brackets of the adapted frame, exact jets against the closed forms.
inline double bracket_defect(const BaseGeometry& geo, const BundlePoint& pt) {
    double m = 0.0;
    for (int i = 0; i < geo.n; ++i)
        for (int j = 0; j < geo.n; ++j) m = std::max(m, lifted_bracket_check(geo, pt, i, j).max());
    return m;
}

inline double scale_factor_identity_defect(const BundlePoint& pt) {
    if (pt.tau <= 0.0) return 0.0;
    const auto [l, r] = scale_factor_identity_sides(pt.p(), pt.q(), pt.tau);
    return std::abs(l - r) / std::max(1.0, std::abs(l));
}

// ---------------------------------------------------------------------------
// Discrepancy ledger
// ---------------------------------------------------------------------------

struct LedgerEntry {
    std::string id, component;
    std::string spec_file;
    std::vector<double> x, u;
    MetricParams params;
};

inline std::vector<LedgerEntry> load_ledger() {
    std::ifstream in(source_path("tests/data/discrepancies.json"));
    if (!in) throw UsageError("discrepancy ledger missing");
    const auto doc = json::parse(in);
    std::vector<LedgerEntry> out;
    for (const auto& e : doc.at("entries")) {
        LedgerEntry l;
        l.id = e.at("id").get<std::string>();
        l.component = e.value("component", std::string());
        if (e.contains("reproducer")) {
            const auto& r = e.at("reproducer");
            l.spec_file = r.value("spec", std::string());
            l.x = r.value("x", std::vector<double>{});
            l.u = r.value("u", std::vector<double>{});
            l.params = {r.value("p", 0.0), r.value("q", 0.0)};
        }
        out.push_back(std::move(l));
    }
    return out;
}

}  // namespace cgtm::testing
