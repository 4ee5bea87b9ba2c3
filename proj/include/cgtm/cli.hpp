#pragma once

/**
 * @file cli.hpp
 * @brief Command implementations behind the `geom` executable.
 *
 * Every command returns a JSON report (or CSV text) plus an exit code:
 * 0 when all requested checks pass, 1 when a check fails. Errors are thrown
 * as cgtm::Error and rendered by the caller.
 */

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgtm/analysis.hpp"
#include "cgtm/cgbundle.hpp"
#include "cgtm/crosscheck.hpp"
#include "cgtm/curvature_pq.hpp"
#include "cgtm/geodesic.hpp"
#include "cgtm/models.hpp"
#include "cgtm/oracle.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

inline constexpr const char* kEngineVersion = "1.0.0";

struct RunConfig {
    std::string model;
    std::string spec_path;
    double p = 0.0, q = 0.0;
    std::vector<double> point;
    std::vector<double> fiber;
    std::uint64_t seed = 42;
    int samples = 50;
    std::optional<double> tol;
    std::string format = "json";
    std::string out;
    std::vector<std::string> param_overrides;  // NAME=VALUE

    // command specific
    std::string check;
    std::vector<int> indices;                 // curvature: i,j,k (1-based)
    std::vector<double> plane_a, plane_b;     // sectional: stacked (h, v)
    std::vector<double> velocity;             // geodesic: stacked (h, v)
    double T = 1.0, dt = 1e-3;
    int record_every = 1;
    std::string ex0_A = "1/(c1-x)", ex0_B = "1/(c2-y)", ex0_C = "0", ex0_D = "0";
};

struct CommandResult {
    json report;
    std::string text;  // CSV output when format == csv
    int exit_code = 0;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline void write_json(const json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad + json(it.key()).dump() + ": ";
                write_json(it.value(), out, indent, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (scalars) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    write_json(j[i], out, indent, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write_json(j[i], out, indent, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.16e", v);
            out += buf;
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Deterministic rendering: insertion-ordered keys, floats as %.16e.
inline std::string render_json(const json& j) {
    std::string out;
    detail::write_json(j, out, 2, 0);
    return out + "\n";
}

/// Shortest round-trip decimal, used for CSV cells.
inline std::string csv_number(double v) { return detail::format_number(v); }

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string spec_hash(const ManifoldSpec& spec) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(spec_to_json(spec).dump()));
    return buf;
}

inline json tensor_json(const Tensor<double>& t) {
    std::function<json(int, std::size_t&)> rec = [&](int level, std::size_t& k) -> json {
        if (level == t.rank()) return json(t.at_flat(k++));
        json a = json::array();
        for (int i = 0; i < t.dim(); ++i) a.push_back(rec(level + 1, k));
        return a;
    };
    std::size_t k = 0;
    if (t.rank() == 0) return json(t.size() ? t.at_flat(0) : 0.0);
    return rec(0, k);
}

inline json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline json lifted_json(const LiftedVector& l) { return json{{"h", vec_json(l.h)}, {"v", vec_json(l.v)}}; }

// ---------------------------------------------------------------------------
// Config resolution
// ---------------------------------------------------------------------------

inline ManifoldSpec resolve_spec(const RunConfig& cfg, std::vector<std::string>* notes = nullptr) {
    if (cfg.model.empty() == cfg.spec_path.empty()) throw UsageError("give exactly one of --model or --spec");
    ManifoldSpec spec = cfg.model.empty() ? load_spec(cfg.spec_path, notes) : catalog_entry(cfg.model).spec;
    for (const auto& kv : cfg.param_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects NAME=VALUE, got '" + kv + "'");
        const std::string name = kv.substr(0, eq);
        if (!spec.params.count(name)) throw UsageError("spec has no parameter '" + name + "'");
        try {
            spec.params[name] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("--param value for '" + name + "' is not a number");
        }
    }
    return spec;
}

inline std::vector<double> resolve_point(const RunConfig& cfg, const ManifoldSpec& spec) {
    if (cfg.point.empty()) {
        std::vector<double> x(spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
            auto [lo, hi] = Sampler::domain_of(spec, i);
            x[i] = 0.5 * (lo + hi);
        }
        return x;
    }
    if (static_cast<int>(cfg.point.size()) != spec.dim)
        throw UsageError("--point needs " + std::to_string(spec.dim) + " coordinates");
    return cfg.point;
}

inline Vec resolve_fiber(const RunConfig& cfg, const ManifoldSpec& spec) {
    if (cfg.fiber.empty()) return Vec::Unit(spec.dim, 0);
    if (static_cast<int>(cfg.fiber.size()) != spec.dim)
        throw UsageError("--fiber needs " + std::to_string(spec.dim) + " components");
    return Eigen::Map<const Vec>(cfg.fiber.data(), spec.dim);
}

inline LiftedVector resolve_lifted(const std::vector<double>& v, int n, const char* what) {
    if (static_cast<int>(v.size()) != 2 * n)
        throw UsageError(std::string(what) + " needs " + std::to_string(2 * n) + " components (h then v)");
    return LiftedVector::from_stacked(Eigen::Map<const Vec>(v.data(), 2 * n));
}

inline json report_header(const std::string& command, const RunConfig& cfg, const ManifoldSpec& spec,
                          const json& tolerances) {
    json h;
    h["engine"] = "geom";
    h["version"] = kEngineVersion;
    h["command"] = command;
    h["model"] = spec.name;
    h["spec_hash"] = spec_hash(spec);
    h["p"] = cfg.p;
    h["q"] = cfg.q;
    h["seed"] = cfg.seed;
    h["tolerances"] = tolerances;
    return h;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline CommandResult cmd_describe(const RunConfig& cfg) {
    std::vector<std::string> notes;
    const auto spec = resolve_spec(cfg, &notes);
    const auto x = resolve_point(cfg, spec);
    const auto geo = base_geometry(spec, x);
    CommandResult r;
    r.report = report_header("describe", cfg, spec, json::object());
    r.report["point"] = vec_json(x);
    r.report["notes"] = notes;
    r.report["g"] = tensor_json(to_tensor(geo.g));
    r.report["g_inv"] = tensor_json(to_tensor(geo.ginv));
    r.report["levi_civita"] = tensor_json(geo.lc);
    r.report["skewness"] = tensor_json(geo.K);
    r.report["christoffels"] = tensor_json(geo.gamma);
    r.report["dual_christoffels"] = tensor_json(geo.gamma_star);
    r.report["cubic"] = tensor_json(geo.C);
    r.report["curvature"] = tensor_json(geo.R);
    r.report["levi_civita_curvature"] = tensor_json(geo.R_lc);
    r.report["dual_curvature"] = tensor_json(geo.R_star);
    r.report["nabla_K"] = tensor_json(geo.nablaK);
    r.report["layout"] = {{"christoffels", "G[k][i][j] = Gamma^k_ij"},
                          {"curvature", "R[l][k][i][j], R(d_i,d_j)d_k = R^l_kij d_l"},
                          {"nabla_K", "[l][m][i][j] = ((nabla_m K)(d_i,d_j))^l"}};
    return r;
}

inline CommandResult cmd_connection(const RunConfig& cfg) {
    const auto spec = resolve_spec(cfg);
    const auto x = resolve_point(cfg, spec);
    const auto geo = base_geometry(spec, x);
    const auto pt = make_bundle_point(geo, resolve_fiber(cfg, spec), {cfg.p, cfg.q});
    const auto C = nabla_pq_coeffs(geo, pt);
    const auto orc = oracle_evaluate(geo, pt);
    const double tol = cfg.tol.value_or(kConnectionTol);
    double dev = 0.0;
    for (std::size_t k = 0; k < C.size(); ++k) dev = std::max(dev, rel_dev(C.at_flat(k), orc.conn.at_flat(k)));
    CommandResult r;
    r.report = report_header("connection", cfg, spec, {{"oracle_relative", tol}});
    r.report["point"] = vec_json(x);
    r.report["fiber"] = vec_json(pt.u);
    r.report["layout"] = "table[c][a][b]: nabla_{E_a} E_b = table[c][a][b] E_c, E = (delta_1..delta_n, dbar_1..dbar_n)";
    r.report["table"] = tensor_json(C);
    r.report["oracle_max_relative_deviation"] = dev;
    r.report["pass"] = dev <= tol;
    r.exit_code = dev <= tol ? 0 : 1;
    return r;
}

inline CommandResult cmd_curvature(const RunConfig& cfg) {
    const auto spec = resolve_spec(cfg);
    const auto x = resolve_point(cfg, spec);
    const auto geo = base_geometry(spec, x);
    const auto pt = make_bundle_point(geo, resolve_fiber(cfg, spec), {cfg.p, cfg.q});
    const int n = spec.dim;
    std::vector<std::array<int, 3>> triples;
    if (cfg.indices.empty()) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) triples.push_back({i, j, k});
    } else {
        if (cfg.indices.size() != 3) throw UsageError("--indices expects i,j,k");
        for (int v : cfg.indices)
            if (v < 1 || v > n) throw UsageError("--indices entries must lie in 1.." + std::to_string(n));
        triples.push_back({cfg.indices[0] - 1, cfg.indices[1] - 1, cfg.indices[2] - 1});
    }
    const auto orc = oracle_evaluate(geo, pt);
    const double tol = cfg.tol.value_or(kCurvatureTol);
    CommandResult r;
    r.report = report_header("curvature", cfg, spec, {{"oracle_relative", tol}});
    r.report["point"] = vec_json(x);
    r.report["fiber"] = vec_json(pt.u);
    json comps = json::array();
    bool all = true;
    for (const auto& id : curvature_components()) {
        json entries = json::array();
        double dev = 0.0;
        for (const auto& t : triples) {
            const auto v = curvature_pq(geo, pt, id.a, id.b, id.c, t[0], t[1], t[2]);
            const Vec part = id.vertical_part ? v.v : v.h;
            const int ai = (id.a == Lift::H ? 0 : n) + t[0], bi = (id.b == Lift::H ? 0 : n) + t[1];
            const int ci = (id.c == Lift::H ? 0 : n) + t[2], off = id.vertical_part ? n : 0;
            for (int d = 0; d < n; ++d) dev = std::max(dev, rel_dev(part[d], orc.curv(off + d, ci, ai, bi)));
            entries.push_back({{"i", t[0] + 1}, {"j", t[1] + 1}, {"k", t[2] + 1}, {"value", vec_json(part)}});
        }
        all = all && dev <= tol;
        comps.push_back({{"component", id.name()},
                         {"entries", entries},
                         {"oracle_max_relative_deviation", dev},
                         {"pass", dev <= tol}});
    }
    r.report["components"] = comps;
    r.report["pass"] = all;
    r.exit_code = all ? 0 : 1;
    return r;
}

inline CommandResult cmd_sectional(const RunConfig& cfg) {
    const auto spec = resolve_spec(cfg);
    const auto x = resolve_point(cfg, spec);
    const auto geo = base_geometry(spec, x);
    const auto pt = make_bundle_point(geo, resolve_fiber(cfg, spec), {cfg.p, cfg.q});
    const auto orc = oracle_evaluate(geo, pt);
    const double tol = cfg.tol.value_or(1e-6);
    CommandResult r;
    r.report = report_header("sectional", cfg, spec, {{"route_agreement", tol}});
    r.report["point"] = vec_json(x);
    r.report["fiber"] = vec_json(pt.u);
    bool pass = true;
    if (cfg.plane_a.empty() && cfg.plane_b.empty()) {
        const auto f = lifted_orthonormal_frame(geo, pt);
        const auto lemma = sectional_frame(geo, pt, f);
        const auto general = sectional_frame_general(geo, pt, f);
        const auto oracle = sectional_frame_oracle(geo, pt, f, orc);
        const double d1 = max_abs_diff(lemma, oracle), d2 = max_abs_diff(general, oracle);
        r.report["frame_table_lemma"] = tensor_json(lemma);
        r.report["frame_table_general"] = tensor_json(general);
        r.report["frame_table_oracle"] = tensor_json(oracle);
        r.report["lemma_vs_oracle"] = d1;
        r.report["general_vs_oracle"] = d2;
        pass = d1 <= tol && d2 <= tol;
    } else {
        const auto A = resolve_lifted(cfg.plane_a, spec.dim, "--plane-a");
        const auto B = resolve_lifted(cfg.plane_b, spec.dim, "--plane-b");
        r.report["Q"] = q_pq(geo, pt, A, B);
        r.report["oracle"] = sectional_from_table(geo, pt, orc.curv, A, B);
        r.report["closed_form_table"] = sectional_from_table(geo, pt, curvature_pq_table(geo, pt), A, B);
    }
    r.report["pass"] = pass;
    r.exit_code = pass ? 0 : 1;
    return r;
}

inline CommandResult cmd_scalar(const RunConfig& cfg) {
    const auto spec = resolve_spec(cfg);
    const auto x = resolve_point(cfg, spec);
    const auto geo = base_geometry(spec, x);
    const auto pt = make_bundle_point(geo, resolve_fiber(cfg, spec), {cfg.p, cfg.q});
    const auto f = lifted_orthonormal_frame(geo, pt);
    const auto orc = oracle_evaluate(geo, pt);
    const double tol = cfg.tol.value_or(1e-6);
    const double closed = scalar_pq(geo, pt, f);
    const double table = scalar_from_table(sectional_frame(geo, pt, f));
    const double oracle = orc.scalar;
    CommandResult r;
    r.report = report_header("scalar", cfg, spec, {{"route_agreement", tol}});
    r.report["point"] = vec_json(x);
    r.report["fiber"] = vec_json(pt.u);
    r.report["closed_form"] = closed;
    r.report["frame_table_sum"] = table;
    r.report["oracle_trace"] = oracle;
    r.report["closed_vs_oracle"] = std::abs(closed - oracle);
    r.report["table_vs_oracle"] = std::abs(table - oracle);
    const bool pass = std::abs(closed - oracle) <= tol && std::abs(table - oracle) <= tol;
    r.report["pass"] = pass;
    r.exit_code = pass ? 0 : 1;
    return r;
}

namespace detail {

inline json block_json(const BlockDeviation& b, const std::vector<SamplePoint>& pts) {
    json j;
    j["name"] = b.name;
    j["max_abs"] = b.max_abs;
    j["max_rel"] = b.max_rel;
    j["tolerance"] = b.tolerance;
    j["pass"] = b.pass();
    if (b.worst_point >= 0) {
        j["worst_point"] = {{"index", b.worst_point},
                            {"x", vec_json(pts[b.worst_point].x)},
                            {"u", vec_json(pts[b.worst_point].u)}};
    }
    return j;
}

}  // namespace detail

inline CommandResult cmd_check(const RunConfig& cfg) {
    const auto spec = resolve_spec(cfg);
    const MetricParams params{cfg.p, cfg.q};
    const std::string& which = cfg.check;
    CommandResult r;
    bool pass = true;

    if (which == "cross-validate") {
        const auto rep = cross_validate(spec, params, cfg.samples, cfg.seed);
        const double conn_tol = cfg.tol.value_or(kConnectionTol), curv_tol = cfg.tol.value_or(kCurvatureTol);
        r.report = report_header("check cross-validate", cfg, spec, {{"connection", conn_tol}, {"curvature", curv_tol}});
        r.report["samples"] = cfg.samples;
        json conn = json::array(), curv = json::array();
        for (auto b : rep.connection) {
            b.tolerance = conn_tol;
            pass = pass && b.pass();
            conn.push_back(detail::block_json(b, rep.points));
        }
        for (auto b : rep.curvature) {
            b.tolerance = curv_tol;
            pass = pass && b.pass();
            curv.push_back(detail::block_json(b, rep.points));
        }
        auto fixed = rep.corrected_vvh_h;
        fixed.tolerance = curv_tol;
        r.report["connection"] = conn;
        r.report["curvature"] = curv;
        r.report["curvature_corrected"] = json::array({detail::block_json(fixed, rep.points)});
        json fails = json::array();
        for (const auto& f : rep.failures)
            fails.push_back({{"index", f.index}, {"kind", f.kind}, {"message", f.message}});
        r.report["point_failures"] = fails;
        pass = pass && rep.failures.empty();
    } else if (which == "flat") {
        const double tol = cfg.tol.value_or(1e-8);
        const auto s = constant_curvature_check(spec, params, cfg.samples, cfg.seed, tol);
        r.report = report_header("check flat", cfg, spec, {{"threshold", tol}});
        r.report["max_R"] = s.max_R;
        r.report["max_R_levi_civita"] = s.max_R_lc;
        r.report["max_nabla_K"] = s.max_nablaK;
        r.report["max_K_commutator"] = s.max_KK;
        r.report["pq_zero"] = s.pq_zero;
        r.report["constant_curvature_candidate"] = s.constant_curvature_candidate;
        r.report["bundle_points"] = s.bundle_points;
        r.report["max_oracle_curvature"] = s.max_curvature_pq;
        pass = s.constant_curvature_candidate && s.max_curvature_pq <= tol;
    } else if (which == "codazzi") {
        const double tol = cfg.tol.value_or(1e-10);
        r.report = report_header("check codazzi", cfg, spec, {{"codazzi", tol}});
        const auto plan = sample_plan(spec, params, cfg.samples, cfg.seed);
        double worst = 0.0, worst_cubic = 0.0;
        for (const auto& sp : plan) {
            const auto geo = base_geometry(spec, sp.x);
            worst = std::max(worst, codazzi_defect(geo));
            const auto low = lowered_skewness(geo);
            for (std::size_t k = 0; k < low.size(); ++k) {
                const auto idx = low.unflatten(k);
                worst_cubic = std::max(worst_cubic, std::abs(geo.C(idx[0], idx[1], idx[2]) + 2.0 * low.at_flat(k)));
            }
        }
        r.report["max_cubic_asymmetry"] = worst;
        r.report["max_cubic_vs_skewness"] = worst_cubic;
        pass = worst <= tol && worst_cubic <= tol;
    } else if (which == "totally-geodesic") {
        const double tol = cfg.tol.value_or(1e-10);
        const auto s = constant_curvature_check(spec, params, cfg.samples, cfg.seed);
        r.report = report_header("check totally-geodesic", cfg, spec, {{"defect", tol}});
        r.report["max_defect"] = s.max_totally_geodesic;
        pass = s.max_totally_geodesic <= tol;
    } else if (which == "incompressible") {
        const double tol = cfg.tol.value_or(1e-10);
        r.report = report_header("check incompressible", cfg, spec, {{"divergence", tol}, {"oracle", 1e-6}});
        const auto plan = sample_plan(spec, params, cfg.samples, cfg.seed);
        double worst = 0.0, vs_oracle = 0.0, contracted_vs_oracle = 0.0;
        for (const auto& sp : plan) {
            const auto geo = base_geometry(spec, sp.x);
            const auto pt = make_bundle_point(geo, sp.u, params);
            const double d = geodesic_flow_divergence(geo, pt);
            const double o = oracle_evaluate(geo, pt).divergence;
            worst = std::max(worst, std::abs(d));
            vs_oracle = std::max(vs_oracle, std::abs(d - o));
            contracted_vs_oracle = std::max(contracted_vs_oracle, std::abs(geodesic_flow_divergence_contracted(geo, pt) - o));
        }
        r.report["max_abs_divergence"] = worst;
        r.report["trace_form_vs_oracle"] = vs_oracle;
        r.report["contracted_form_vs_oracle"] = contracted_vs_oracle;
        pass = worst <= tol;
    } else if (which == "norm-identity") {
        const double tol = cfg.tol.value_or(1e-9);
        r.report = report_header("check norm-identity", cfg, spec, {{"deviation", tol}});
        const auto plan = sample_plan(spec, params, cfg.samples, cfg.seed);
        double worst = 0.0;
        for (const auto& sp : plan) {
            const auto geo = base_geometry(spec, sp.x);
            worst = std::max(worst, norm_identity_check(geo, sp.u).deviation());
        }
        r.report["max_deviation"] = worst;
        pass = worst <= tol;
    } else if (which == "ex0-pde") {
        const double tol = cfg.tol.value_or(1e-10);
        if (spec.dim != 2) throw UsageError("ex0-pde needs a two-dimensional spec for its sample box");
        r.report = report_header("check ex0-pde", cfg, spec, {{"residual", tol}});
        r.report["A"] = cfg.ex0_A;
        r.report["B"] = cfg.ex0_B;
        r.report["C"] = cfg.ex0_C;
        r.report["D"] = cfg.ex0_D;
        Sampler s(cfg.seed);
        std::vector<double> worst(ex0_residual_names().size(), 0.0);
        for (int k = 0; k < cfg.samples; ++k) {
            const auto x = s.base_point(spec);
            const auto res = ex0_pde_residual(cfg.ex0_A, cfg.ex0_B, cfg.ex0_C, cfg.ex0_D, x, spec.params);
            for (std::size_t i = 0; i < res.size(); ++i) worst[i] = std::max(worst[i], std::abs(res[i]));
        }
        json rows = json::array();
        for (std::size_t i = 0; i < worst.size(); ++i) {
            rows.push_back({{"relation", ex0_residual_names()[i]}, {"max_abs", worst[i]}});
            pass = pass && worst[i] <= tol;
        }
        r.report["residuals"] = rows;
    } else {
        throw UsageError("unknown check '" + which +
                         "' (codazzi, flat, totally-geodesic, incompressible, cross-validate, norm-identity, ex0-pde)");
    }
    r.report["pass"] = pass;
    r.exit_code = pass ? 0 : 1;
    return r;
}

inline CommandResult cmd_geodesic(const RunConfig& cfg) {
    const auto spec = resolve_spec(cfg);
    const auto x = resolve_point(cfg, spec);
    const Vec u = resolve_fiber(cfg, spec);
    const int n = spec.dim;
    LiftedVector v = cfg.velocity.empty() ? LiftedVector::horizontal(Vec::Unit(n, 0))
                                          : resolve_lifted(cfg.velocity, n, "--velocity");
    const auto traj = integrate_geodesic(spec, {cfg.p, cfg.q}, x, u, v, {cfg.T, cfg.dt, cfg.record_every});
    CommandResult r;
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "t";
        for (int i = 1; i <= n; ++i) os << ",x" << i;
        for (int i = 1; i <= n; ++i) os << ",u" << i;
        os << ",speed2\n";
        for (const auto& s : traj) {
            os << csv_number(s.t);
            for (double c : s.x) os << "," << csv_number(c);
            for (int i = 0; i < n; ++i) os << "," << csv_number(s.u[i]);
            os << "," << csv_number(s.speed2) << "\n";
        }
        r.text = os.str();
        return r;
    }
    r.report = report_header("geodesic", cfg, spec, json::object());
    r.report["T"] = cfg.T;
    r.report["dt"] = cfg.dt;
    r.report["speed_drift"] = speed_drift(traj);
    json rows = json::array();
    for (const auto& s : traj)
        rows.push_back({{"t", s.t}, {"x", vec_json(s.x)}, {"u", vec_json(s.u)}, {"speed2", s.speed2}});
    r.report["trajectory"] = rows;
    return r;
}

// ---------------------------------------------------------------------------
// verify-paper
// ---------------------------------------------------------------------------

namespace detail {

struct VerifyRow {
    std::string example, quantity, at;
    double expected, computed, tolerance;
};

inline json verify_rows_json(const std::vector<VerifyRow>& rows, bool& all) {
    json out = json::array();
    for (const auto& r : rows) {
        const double dev = std::abs(r.expected - r.computed);
        const bool ok = dev <= r.tolerance;
        all = all && ok;
        out.push_back({{"example", r.example},
                       {"quantity", r.quantity},
                       {"at", r.at},
                       {"expected", r.expected},
                       {"computed", r.computed},
                       {"deviation", dev},
                       {"status", ok ? "PASS" : "FAIL"}});
    }
    return out;
}

inline std::string at_string(const std::vector<double>& x, const Vec& u, MetricParams pq) {
    std::ostringstream os;
    os << "x=(";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ") u=(";
    for (int i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
    os << ") p=" << pq.p << " q=" << pq.q;
    return os.str();
}

}  // namespace detail

/// Closed-form values from the worked examples, set against the engine.
inline std::vector<detail::VerifyRow> verify_paper_rows() {
    using detail::VerifyRow;
    std::vector<VerifyRow> rows;
    // exponential family: base tensors and the connection tables at p=q=0, p=q=1, u=1
    {
        const auto spec = exponential_spec();
        for (double xi : {0.5, 1.0, 2.0}) {
            const std::vector<double> x{xi};
            const auto geo = base_geometry(spec, x);
            const std::string at = "xi=" + detail::format_number(xi);
            rows.push_back({"exponential", "g_11 = 1/xi^2", at, 1.0 / (xi * xi), geo.g(0, 0), 1e-12});
            rows.push_back({"exponential", "LC Gamma^1_11 = -1/xi", at, -1.0 / xi, geo.lc(0, 0, 0), 1e-12});
            rows.push_back({"exponential", "K^1_11 = 1/xi", at, 1.0 / xi, geo.K(0, 0, 0), 1e-12});
            rows.push_back({"exponential", "C_111 = -2/xi^3", at, -2.0 / (xi * xi * xi), geo.C(0, 0, 0), 1e-12});
            for (MetricParams pq : {MetricParams{0, 0}, MetricParams{1, 1}}) {
                const Vec u = Vec::Constant(1, 1.0);
                const auto pt = make_bundle_point(geo, u, pq);
                const auto C = nabla_pq_coeffs(geo, pt);
                const std::string a = detail::at_string(x, u, pq);
                rows.push_back({"exponential", "nabla_{delta_1} delta_1 = -(1/xi) delta_1", a, -1.0 / xi, C(0, 0, 0), 1e-12});
                rows.push_back({"exponential", "nabla_{delta_1} dbar_1 = -(1/xi) dbar_1", a, -1.0 / xi, C(1, 0, 1), 1e-12});
                rows.push_back({"exponential", "nabla_{dbar_1} delta_1 = -(1/xi) dbar_1", a, -1.0 / xi, C(1, 1, 0), 1e-12});
                rows.push_back({"exponential", "nabla_{dbar_1} dbar_1 = (1/xi) delta_1", a, 1.0 / xi, C(0, 1, 1), 1e-12});
            }
            // general (p,q) coefficient of nabla_{delta_1} dbar_1, reading y^1 as u^1
            for (MetricParams pq : {MetricParams{0.5, 0.5}, MetricParams{2, 1}, MetricParams{1, -0.1}}) {
                const Vec u = Vec::Constant(1, 0.7);
                const auto pt = make_bundle_point(geo, u, pq);
                const double y = u[0], p = pq.p, q = pq.q, al = pt.alpha;
                const double hv = (q * (p - 2) * std::pow(y, 4) - xi * xi * y * y * (1 + 2 * q - p) - std::pow(xi, 4)) /
                                  (std::pow(xi, 5) * al * pt.one_q_tau());
                const double vv_h = (-p * q * std::pow(y, 4) + xi * xi * y * y * (2 * q * al - p) + al * std::pow(xi, 4)) /
                                    (std::pow(xi, 5) * std::pow(al, p + 1));
                const double vv_v = -y * (xi * xi * (p - q) + q * y * y * (p - 1)) / (std::pow(xi, 4) * al * pt.one_q_tau());
                const auto C = nabla_pq_coeffs(geo, pt);
                const std::string a = detail::at_string(x, u, pq);
                rows.push_back({"exponential", "nabla_{delta_1} dbar_1 general (p,q)", a, hv, C(1, 0, 1), 1e-12});
                rows.push_back({"exponential", "nabla_{dbar_1} dbar_1 general (p,q), delta_1 part", a, vv_h, C(0, 1, 1), 1e-12});
                rows.push_back({"exponential", "nabla_{dbar_1} dbar_1 general (p,q), dbar_1 part", a, vv_v, C(1, 1, 1), 1e-12});
            }
        }
    }
    // deformed Euclidean plane: solved family with c1 = c2 = 3
    {
        const auto spec = euclid_deformed_ab();
        Sampler s(2024);
        double res = 0.0, R = 0.0, dK = 0.0, curv = 0.0;
        for (int k = 0; k < 20; ++k) {
            const auto x = s.base_point(spec);
            for (double v : ex0_pde_residual("1/(c1-x)", "1/(c2-y)", "0", "0", x, spec.params))
                res = std::max(res, std::abs(v));
            const auto geo = base_geometry(spec, x);
            R = std::max(R, max_abs(geo.R));
            dK = std::max(dK, max_abs(geo.nablaK));
            const auto pt = make_bundle_point(geo, s.fiber(2), {0, 0});
            curv = std::max(curv, max_abs(oracle_evaluate(geo, pt).curv));
        }
        rows.push_back({"euclid_deformed_ab", "parallelism and commutativity residuals", "20 points", 0.0, res, 1e-10});
        rows.push_back({"euclid_deformed_ab", "base curvature R", "20 points", 0.0, R, 1e-10});
        rows.push_back({"euclid_deformed_ab", "nabla K", "20 points", 0.0, dK, 1e-9});
        rows.push_back({"euclid_deformed_ab", "curvature of (TM, g_00)", "20 bundle points", 0.0, curv, 1e-8});
    }
    // pseudo_offdiag: constant f gives a flat Sasaki bundle; f = x1 does not
    {
        const auto flat = pseudo_offdiag("f0+f1*x1", {{"f0", 2.0}, {"f1", 0.0}});
        const auto bent = pseudo_offdiag("f0+f1*x1", {{"f0", 0.0}, {"f1", 1.0}});
        const std::vector<double> x{0.3, -0.4};
        const auto g1 = base_geometry(flat, x);
        rows.push_back({"pseudo_offdiag", "C_222 = -2 f", "f=2", -4.0, g1.C(1, 1, 1), 1e-12});
        rows.push_back({"pseudo_offdiag", "base curvature R", "f=2", 0.0, max_abs(g1.R), 1e-12});
        rows.push_back({"pseudo_offdiag", "nabla K", "f=2", 0.0, max_abs(g1.nablaK), 1e-12});
        const auto g2 = base_geometry(bent, x);
        rows.push_back({"pseudo_offdiag", "(nabla_1 K)(d2,d2) = d1 f d1", "f=x1", 1.0, g2.nablaK(0, 0, 1, 1), 1e-12});
        rows.push_back({"pseudo_offdiag", "(nabla_2 K)(d2,d2) = d2 f d1", "f=x1", 0.0, g2.nablaK(0, 1, 1, 1), 1e-12});
        const std::vector<double> x0{0.0, 0.4};
        const auto g0 = base_geometry(bent, x0);
        rows.push_back({"pseudo_offdiag", "max |nabla K| at x1=0 is at least 0.5 (1 = yes)", "f=x1", 1.0,
                        max_abs(g0.nablaK) >= 0.5 ? 1.0 : 0.0, 0.0});
        Vec u(2);
        u << 0.5, 0.8;
        const auto pt = make_bundle_point(g1, u, {0, 0});
        rows.push_back({"pseudo_offdiag", "curvature of (TM, g_00)", "f=2", 0.0, max_abs(oracle_evaluate(g1, pt).curv), 1e-9});
    }
    // normal family
    {
        const auto entry = catalog_entry("normal");
        for (double sigma : {0.5, 1.0, 2.0}) {
            const std::vector<double> x{0.0, sigma};
            for (const auto& c : check_expected(entry, x))
                rows.push_back({"normal", c.label, "sigma=" + detail::format_number(sigma), c.expected, c.computed,
                                1e-12 * std::max(1.0, std::abs(c.expected))});
        }
        for (double p : {0.0, 1.0})
            for (double q : {0.0, 1.0}) {
                const auto s = constant_curvature_check(entry.spec, {p, q}, 10, 7);
                rows.push_back({"normal", "constant curvature candidate (0 = not flat)",
                                "p=" + detail::format_number(p) + " q=" + detail::format_number(q), 0.0,
                                s.constant_curvature_candidate ? 1.0 : 0.0, 0.0});
            }
    }
    return rows;
}

inline CommandResult cmd_verify_paper(const RunConfig& cfg) {
    CommandResult r;
    r.report["engine"] = "geom";
    r.report["version"] = kEngineVersion;
    r.report["command"] = "verify-paper";
    r.report["seed"] = cfg.seed;
    bool all = true;
    r.report["rows"] = detail::verify_rows_json(verify_paper_rows(), all);
    r.report["pass"] = all;
    r.exit_code = all ? 0 : 1;
    return r;
}

/// Dispatch by subcommand name.
inline CommandResult run_command(const std::string& name, const RunConfig& cfg) {
    if (name == "describe") return cmd_describe(cfg);
    if (name == "connection") return cmd_connection(cfg);
    if (name == "curvature") return cmd_curvature(cfg);
    if (name == "sectional") return cmd_sectional(cfg);
    if (name == "scalar") return cmd_scalar(cfg);
    if (name == "check") return cmd_check(cfg);
    if (name == "geodesic") return cmd_geodesic(cfg);
    if (name == "verify-paper") return cmd_verify_paper(cfg);
    throw UsageError("unknown subcommand '" + name + "'");
}

inline json error_json(const std::string& kind, const std::string& message) {
    return json{{"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace cgtm
