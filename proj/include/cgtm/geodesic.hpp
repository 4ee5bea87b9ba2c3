#pragma once

/**
 * @file geodesic.hpp
 * @brief Fixed-step RK4 geodesics of g_{p,q} in induced coordinates (x, u).
 */

#include <cmath>
#include <vector>

#include "cgtm/cgbundle.hpp"
#include "cgtm/oracle.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

struct GeodesicSample {
    double t = 0.0;
    std::vector<double> x;
    Vec u;
    double speed2 = 0.0;  // g_{p,q}(y', y')
};

struct GeodesicOptions {
    double T = 1.0;
    double dt = 1e-3;
    int record_every = 1;
};

namespace detail {

struct GeodesicState {
    Vec y, v;  // induced position (x, u) and velocity, both length 2n
};

inline BundlePoint bundle_at(const ManifoldSpec& spec, const Vec& y, MetricParams params, BaseGeometry& geo) {
    const int n = spec.dim;
    std::vector<double> x(y.data(), y.data() + n);
    try {
        geo = base_geometry(spec, x);
    } catch (const SingularMetric& e) {
        throw StepRejected(std::string("metric singular along the path: ") + e.what());
    } catch (const DomainError& e) {
        throw StepRejected(std::string("path left the expression domain: ") + e.what());
    }
    const Vec u = y.tail(n);
    const double tau = geo.gv(u, u);
    if (!(1.0 + params.q * tau > kBMqMargin)) throw LeftBMq("trajectory reached 1 + q tau <= 0");
    return make_bundle_point(geo, u, params);
}

inline Vec geodesic_acceleration(const ManifoldSpec& spec, MetricParams params, const Vec& y, const Vec& v) {
    BaseGeometry geo;
    const auto pt = bundle_at(spec, y, params, geo);
    Tensor<double> gam;
    try {
        gam = oracle_christoffels(geo, pt);
    } catch (const SingularMetric& e) {
        throw StepRejected(std::string("induced metric singular: ") + e.what());
    }
    const int m = static_cast<int>(y.size());
    Vec acc = Vec::Zero(m);
    for (int A = 0; A < m; ++A)
        for (int B = 0; B < m; ++B)
            for (int C = 0; C < m; ++C) acc[A] -= gam(A, B, C) * v[B] * v[C];
    return acc;
}

inline Mat induced_metric_value(const BaseGeometry& geo, const BundlePoint& pt) {
    const auto f = adapted_frame(geo, pt);
    return f.Finv.transpose() * gpq_matrix(geo, pt) * f.Finv;
}

}  // namespace detail

/**
 * Integrates y'' + Gamma(y)(y', y') = 0 from `start` with initial velocity
 * `velocity` given in the adapted frame. Throws LeftBMq or StepRejected.
 */
inline std::vector<GeodesicSample> integrate_geodesic(const ManifoldSpec& spec, MetricParams params,
                                                      const std::vector<double>& x0, const Vec& u0,
                                                      const LiftedVector& velocity, GeodesicOptions opt = {}) {
    const int n = spec.dim;
    if (!(opt.dt > 0.0) || !(opt.T >= 0.0)) throw UsageError("geodesic needs dt > 0 and T >= 0");
    detail::GeodesicState s;
    s.y = Vec(2 * n);
    for (int i = 0; i < n; ++i) s.y[i] = x0[i];
    s.y.tail(n) = u0;

    BaseGeometry geo;
    auto pt = detail::bundle_at(spec, s.y, params, geo);
    s.v = adapted_frame(geo, pt).F * velocity.stacked();

    std::vector<GeodesicSample> out;
    auto record = [&](double t, const BaseGeometry& g, const BundlePoint& b) {
        GeodesicSample smp;
        smp.t = t;
        smp.x = b.x;
        smp.u = b.u;
        smp.speed2 = s.v.dot(detail::induced_metric_value(g, b) * s.v);
        out.push_back(std::move(smp));
    };
    record(0.0, geo, pt);

    const long steps = std::lround(opt.T / opt.dt);
    const double h = opt.T / static_cast<double>(steps == 0 ? 1 : steps);
    for (long k = 1; k <= steps; ++k) {
        auto acc = [&](const Vec& y, const Vec& v) { return detail::geodesic_acceleration(spec, params, y, v); };
        const Vec k1y = s.v, k1v = acc(s.y, s.v);
        const Vec k2y = s.v + 0.5 * h * k1v, k2v = acc(s.y + 0.5 * h * k1y, k2y);
        const Vec k3y = s.v + 0.5 * h * k2v, k3v = acc(s.y + 0.5 * h * k2y, k3y);
        const Vec k4y = s.v + h * k3v, k4v = acc(s.y + h * k3y, k4y);
        s.y += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        s.v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!s.y.allFinite() || !s.v.allFinite()) throw StepRejected("non-finite state");
        pt = detail::bundle_at(spec, s.y, params, geo);
        if (k % opt.record_every == 0 || k == steps) record(k * h, geo, pt);
    }
    return out;
}

/// Largest |speed2(t) - speed2(0)| / |speed2(0)| along a trajectory (absolute when speed2(0) = 0).
inline double speed_drift(const std::vector<GeodesicSample>& traj) {
    if (traj.empty()) return 0.0;
    const double s0 = traj.front().speed2;
    double m = 0.0;
    for (const auto& s : traj) m = std::max(m, std::abs(s.speed2 - s0) / (s0 == 0.0 ? 1.0 : std::abs(s0)));
    return m;
}

}  // namespace cgtm
