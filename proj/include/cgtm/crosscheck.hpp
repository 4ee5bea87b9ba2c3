#pragma once

/**
 * @file crosscheck.hpp
 * @brief Sweeps comparing the closed-form connection and curvature tables
 *        with the induced-coordinate oracle.
 */

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "cgtm/cgbundle.hpp"
#include "cgtm/curvature_pq.hpp"
#include "cgtm/oracle.hpp"
#include "cgtm/sampling.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

/// Worker count: hardware concurrency capped by GEOM_THREADS (when set and positive).
inline int sweep_threads() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("GEOM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

/// Runs fn(i) for i in [0, count) on sweep_threads() workers. Results must be written by index.
template <class F>
void parallel_for(int count, F&& fn) {
    const int workers = std::min(sweep_threads(), std::max(count, 1));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct BlockDeviation {
    std::string name;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double tolerance = 0.0;
    int worst_point = -1;
    bool pass() const { return max_rel <= tolerance; }
};

struct PointFailure {
    int index;
    std::string kind, message;
};

struct CrossCheckReport {
    std::string model;
    MetricParams params;
    std::uint64_t seed = 0;
    int samples = 0;
    std::vector<SamplePoint> points;
    std::vector<BlockDeviation> connection;  // HH, HV, VH, VV
    std::vector<BlockDeviation> curvature;   // the twelve displayed components
    BlockDeviation corrected_vvh_h;          // {VVH}^H with the antisymmetrized leading term
    std::vector<PointFailure> failures;

    bool pass() const {
        for (const auto& b : connection)
            if (!b.pass()) return false;
        for (const auto& b : curvature)
            if (!b.pass()) return false;
        return failures.empty();
    }
};

inline constexpr double kConnectionTol = 1e-8;
inline constexpr double kCurvatureTol = 1e-6;

namespace detail {

struct Range {
    int lo, hi;
};

inline Range lift_range(Lift l, int n) { return l == Lift::H ? Range{0, n} : Range{n, 2 * n}; }

inline void fold(BlockDeviation& b, double a, double o, int point) {
    const double abs = std::abs(a - o);
    const double rel = rel_dev(a, o);
    if (abs > b.max_abs) b.max_abs = abs;
    if (b.worst_point < 0) b.worst_point = point;
    if (rel > b.max_rel) {
        b.max_rel = rel;
        b.worst_point = point;
    }
}

struct PointDeviations {
    std::vector<BlockDeviation> conn, curv;
    BlockDeviation corrected;
    bool ok = false;
    PointFailure failure{};
};

inline PointDeviations evaluate_point(const ManifoldSpec& spec, MetricParams params, const SamplePoint& sp,
                                      int index) {
    PointDeviations d;
    const int n = spec.dim;
    const Lift hv[] = {Lift::H, Lift::V};
    try {
        const auto geo = base_geometry(spec, sp.x);
        const auto pt = make_bundle_point(geo, sp.u, params);
        const auto orc = oracle_evaluate(geo, pt);
        const auto conn = nabla_pq_coeffs(geo, pt);
        const auto curv = curvature_pq_table(geo, pt);
        const auto fixed = curvature_pq_table(geo, pt, FormulaVariant::Corrected);

        for (Lift a : hv)
            for (Lift b : hv) {
                BlockDeviation blk;
                blk.name = std::string(lift_name(a)) + lift_name(b);
                const auto ra = lift_range(a, n), rb = lift_range(b, n);
                for (int x = ra.lo; x < ra.hi; ++x)
                    for (int y = rb.lo; y < rb.hi; ++y)
                        for (int g = 0; g < 2 * n; ++g) fold(blk, conn(g, x, y), orc.conn(g, x, y), index);
                d.conn.push_back(blk);
            }
        for (const auto& id : curvature_components()) {
            BlockDeviation blk;
            blk.name = id.name();
            const auto ra = lift_range(id.a, n), rb = lift_range(id.b, n), rc = lift_range(id.c, n);
            const auto rd = lift_range(id.vertical_part ? Lift::V : Lift::H, n);
            const bool vvh_h = id.a == Lift::V && id.b == Lift::V && id.c == Lift::H && !id.vertical_part;
            if (vvh_h) d.corrected.name = blk.name + " antisymmetrized";
            for (int a = ra.lo; a < ra.hi; ++a)
                for (int b = rb.lo; b < rb.hi; ++b)
                    for (int c = rc.lo; c < rc.hi; ++c)
                        for (int e = rd.lo; e < rd.hi; ++e) {
                            fold(blk, curv(e, c, a, b), orc.curv(e, c, a, b), index);
                            if (vvh_h) fold(d.corrected, fixed(e, c, a, b), orc.curv(e, c, a, b), index);
                        }
            d.curv.push_back(blk);
        }
        d.ok = true;
    } catch (const Error& e) {
        d.failure = {index, e.kind(), e.what()};
    }
    return d;
}

inline void merge(BlockDeviation& into, const BlockDeviation& from) {
    if (into.name.empty()) into.name = from.name;
    into.max_abs = std::max(into.max_abs, from.max_abs);
    if (into.worst_point < 0) into.worst_point = from.worst_point;
    if (from.max_rel > into.max_rel) {
        into.max_rel = from.max_rel;
        into.worst_point = from.worst_point;
    }
}

}  // namespace detail

/// Oracle sweep over `samples` seeded points. Deterministic for a given seed at any thread count.
inline CrossCheckReport cross_validate(const ManifoldSpec& spec, MetricParams params, int samples,
                                       std::uint64_t seed) {
    if (samples < 1) throw UsageError("samples must be at least 1");
    CrossCheckReport r;
    r.model = spec.name;
    r.params = params;
    r.seed = seed;
    r.samples = samples;
    r.points = sample_plan(spec, params, samples, seed);

    std::vector<detail::PointDeviations> per(samples);
    parallel_for(samples, [&](int i) { per[i] = detail::evaluate_point(spec, params, r.points[i], i); });

    for (int i = 0; i < samples; ++i) {
        const auto& d = per[i];
        if (!d.ok) {
            r.failures.push_back(d.failure);
            continue;
        }
        if (r.connection.empty()) {
            r.connection.resize(d.conn.size());
            r.curvature.resize(d.curv.size());
        }
        for (std::size_t k = 0; k < d.conn.size(); ++k) detail::merge(r.connection[k], d.conn[k]);
        for (std::size_t k = 0; k < d.curv.size(); ++k) detail::merge(r.curvature[k], d.curv[k]);
        detail::merge(r.corrected_vvh_h, d.corrected);
    }
    for (auto& b : r.connection) b.tolerance = kConnectionTol;
    for (auto& b : r.curvature) b.tolerance = kCurvatureTol;
    r.corrected_vvh_h.tolerance = kCurvatureTol;
    return r;
}

}  // namespace cgtm
