#pragma once

/**
 * @file models.hpp
 * @brief Built-in statistical manifolds, their closed-form expected values,
 * the parallelism system of the deformed Euclidean plane, and JSON spec documents.
 */

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgtm/errors.hpp"
#include "cgtm/expr.hpp"
#include "cgtm/sampling.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Spec construction
// ---------------------------------------------------------------------------

/// Builds a spec from component strings. `skew` is flat [k][i][j]; empty strings mean "0".
inline ManifoldSpec make_spec(std::string name, int dim, std::vector<std::string> coords,
                              const std::vector<std::vector<std::string>>& metric,
                              const std::vector<std::string>& skew, ParamValues params = {},
                              SkewKind kind = SkewKind::Skewness, Signature sig = Signature::Riemannian,
                              std::vector<std::pair<double, double>> domain = {}) {
    ManifoldSpec s;
    s.name = std::move(name);
    s.dim = dim;
    s.coords = std::move(coords);
    s.params = std::move(params);
    s.skew_kind = kind;
    s.signature = sig;
    const auto names = s.param_names();
    s.metric.assign(dim, std::vector<Expression>(dim));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s.metric[i][j] = parse(metric[i][j], dim, names, s.coords);
    s.skew.resize(static_cast<std::size_t>(dim) * dim * dim);
    for (std::size_t f = 0; f < s.skew.size(); ++f) {
        const std::string& t = f < skew.size() && !skew[f].empty() ? skew[f] : std::string("0");
        s.skew[f] = parse(t, dim, names, s.coords);
    }
    if (domain.empty()) domain.assign(dim, {0.5, 2.0});
    s.domain = std::move(domain);
    return s;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Engine quantity names accepted in expected-value tables.
/// "g", "lc", "K", "gamma", "gamma_star", "C", "R", "R_lc", "nablaK", "KK".
struct ExpectedValue {
    std::string quantity;
    std::vector<int> index;  // empty: every component equals `value`
    Expression value;
    std::string note;
};

struct ModelCatalogEntry {
    std::string name;
    ManifoldSpec spec;
    std::vector<ExpectedValue> expected;
    std::string citation;
};

inline ManifoldSpec exponential_spec() {
    return make_spec("exponential", 1, {"xi"}, {{"1/x1^2"}}, {"1/x1"}, {}, SkewKind::Skewness,
                     Signature::Riemannian, {{0.5, 2.0}});
}

inline ManifoldSpec normal_spec() {
    std::vector<std::string> K(8);
    K[1] = K[2] = "-1/x2";  // K^1_12 = K^1_21
    K[4] = "-1/(2*x2)";     // K^2_11
    K[7] = "-2/x2";         // K^2_22
    return make_spec("normal", 2, {"mu", "sigma"}, {{"1/x2^2", "0"}, {"0", "2/x2^2"}}, K, {}, SkewKind::Skewness,
                     Signature::Riemannian, {{-1.0, 1.0}, {0.5, 2.0}});
}

/**
 * Euclidean plane with the two-dimensional totally symmetric skewness
 * A = K^1_11, B = K^2_22, C = K^2_11 = K^1_12, D = K^1_22 = K^2_12.
 */
inline ManifoldSpec euclid_deformed(const std::string& A, const std::string& B, const std::string& C,
                                    const std::string& D, ParamValues params = {},
                                    std::string name = "euclid_deformed",
                                    std::vector<std::pair<double, double>> domain = {{-1.0, 1.0}, {-1.0, 1.0}}) {
    std::vector<std::string> K(8);
    K[0] = A;
    K[7] = B;
    K[4] = K[1] = K[2] = C;
    K[3] = K[5] = K[6] = D;
    return make_spec(std::move(name), 2, {"x", "y"}, {{"1", "0"}, {"0", "1"}}, K, std::move(params),
                     SkewKind::Skewness, Signature::Riemannian, std::move(domain));
}

inline ManifoldSpec euclid_deformed_ab(double c1 = 3.0, double c2 = 3.0) {
    return euclid_deformed("1/(c1-x1)", "1/(c2-x2)", "0", "0", {{"c1", c1}, {"c2", c2}}, "euclid_deformed_ab");
}

/// g = dx1 dx2 + dx2 dx1 with the single skewness slot K^1_22 = f.
inline ManifoldSpec pseudo_offdiag(const std::string& f = "f0+f1*x1", ParamValues params = {{"f0", 3.0}, {"f1", 0.0}}) {
    std::vector<std::string> K(8);
    K[3] = f;
    return make_spec("pseudo_offdiag", 2, {"x1", "x2"}, {{"0", "1"}, {"1", "0"}}, K, std::move(params),
                     SkewKind::Skewness, Signature::Pseudo, {{-1.0, 1.0}, {-1.0, 1.0}});
}

inline ManifoldSpec sasaki_flat_spec() {
    return make_spec("sasaki_flat", 2, {"x1", "x2"}, {{"1", "0"}, {"0", "1"}}, {}, {}, SkewKind::Skewness,
                     Signature::Riemannian, {{-1.0, 1.0}, {-1.0, 1.0}});
}

namespace detail {

inline ExpectedValue ev(const ManifoldSpec& s, std::string q, std::vector<int> idx, const std::string& text,
                        std::string note = {}) {
    return {std::move(q), std::move(idx), parse(text, s.dim, s.param_names(), s.coords), std::move(note)};
}

}  // namespace detail

inline std::vector<ModelCatalogEntry> catalog() {
    using detail::ev;
    std::vector<ModelCatalogEntry> out;
    {
        ModelCatalogEntry e{"exponential", exponential_spec(), {}, "exponential distribution, Fisher metric 1/xi^2"};
        const auto& s = e.spec;
        e.expected = {ev(s, "g", {0, 0}, "1/x1^2"),          ev(s, "lc", {0, 0, 0}, "-1/x1"),
                      ev(s, "K", {0, 0, 0}, "1/x1"),          ev(s, "C", {0, 0, 0}, "-2/x1^3"),
                      ev(s, "gamma", {0, 0, 0}, "0"),         ev(s, "gamma_star", {0, 0, 0}, "-2/x1"),
                      ev(s, "R", {}, "0")};
        out.push_back(std::move(e));
    }
    {
        ModelCatalogEntry e{"normal", normal_spec(), {}, "normal distributions in (mu, sigma)"};
        const auto& s = e.spec;
        e.expected = {ev(s, "g", {0, 0}, "1/x2^2"),
                      ev(s, "g", {1, 1}, "2/x2^2"),
                      ev(s, "g", {0, 1}, "0"),
                      ev(s, "lc", {0, 0, 1}, "-1/x2"),
                      ev(s, "lc", {0, 1, 0}, "-1/x2"),
                      ev(s, "lc", {1, 0, 0}, "1/(2*x2)"),
                      ev(s, "lc", {1, 1, 1}, "-1/x2"),
                      ev(s, "lc", {0, 0, 0}, "0"),
                      ev(s, "lc", {1, 0, 1}, "0"),
                      ev(s, "K", {0, 0, 1}, "-1/x2"),
                      ev(s, "K", {1, 0, 0}, "-1/(2*x2)"),
                      ev(s, "K", {1, 1, 1}, "-2/x2"),
                      ev(s, "gamma", {0, 0, 1}, "-2/x2"),
                      ev(s, "gamma", {0, 1, 0}, "-2/x2"),
                      ev(s, "gamma", {1, 1, 1}, "-3/x2"),
                      ev(s, "gamma", {1, 0, 0}, "0"),
                      ev(s, "gamma", {0, 0, 0}, "0"),
                      ev(s, "gamma", {0, 1, 1}, "0"),
                      ev(s, "gamma_star", {0, 0, 1}, "0"),
                      ev(s, "C", {0, 0, 0}, "0"),
                      ev(s, "C", {0, 0, 1}, "2/x2^3"),
                      ev(s, "C", {0, 1, 0}, "2/x2^3"),
                      ev(s, "C", {1, 0, 0}, "2/x2^3"),
                      ev(s, "C", {0, 1, 1}, "0"),
                      ev(s, "C", {1, 1, 1}, "8/x2^3"),
                      ev(s, "R", {}, "0"),
                      ev(s, "nablaK", {0, 0, 0, 0}, "1/x2^2", "(nabla_1 K)^1_11"),
                      ev(s, "nablaK", {1, 0, 0, 1}, "-1/x2^2", "(nabla_1 K)^2_12"),
                      ev(s, "nablaK", {1, 0, 1, 0}, "-1/x2^2", "(nabla_1 K)^2_21"),
                      ev(s, "nablaK", {0, 1, 0, 1}, "-2/x2^2", "(nabla_2 K)^1_12"),
                      ev(s, "nablaK", {0, 1, 1, 0}, "-2/x2^2", "(nabla_2 K)^1_21"),
                      ev(s, "nablaK", {1, 1, 1, 1}, "-4/x2^2", "(nabla_2 K)^2_22")};
        out.push_back(std::move(e));
    }
    {
        ModelCatalogEntry e{"euclid_deformed_ab", euclid_deformed_ab(), {},
                            "Euclidean plane, A = 1/(c1-x), B = 1/(c2-y), C = D = 0"};
        const auto& s = e.spec;
        e.expected = {ev(s, "g", {0, 0}, "1"),       ev(s, "g", {0, 1}, "0"),         ev(s, "lc", {}, "0"),
                      ev(s, "K", {0, 0, 0}, "1/(c1-x1)"), ev(s, "K", {1, 1, 1}, "1/(c2-x2)"),
                      ev(s, "R", {}, "0"),          ev(s, "nablaK", {}, "0"),        ev(s, "KK", {}, "0")};
        out.push_back(std::move(e));
    }
    {
        ModelCatalogEntry e{"pseudo_offdiag", pseudo_offdiag(), {},
                            "R^2 with g = dx1 dx2 + dx2 dx1 and K^1_22 = f0 + f1 x1"};
        const auto& s = e.spec;
        e.expected = {ev(s, "lc", {}, "0"),
                      ev(s, "gamma", {0, 1, 1}, "f0+f1*x1"),
                      ev(s, "C", {1, 1, 1}, "-2*(f0+f1*x1)"),
                      ev(s, "C", {0, 0, 0}, "0"),
                      ev(s, "C", {0, 1, 1}, "0"),
                      ev(s, "R", {}, "0"),
                      ev(s, "nablaK", {0, 0, 1, 1}, "f1", "(nabla_1 K)(d2,d2) = d1 f d1"),
                      ev(s, "nablaK", {0, 1, 1, 1}, "0", "(nabla_2 K)(d2,d2) = d2 f d1"),
                      ev(s, "KK", {}, "0")};
        out.push_back(std::move(e));
    }
    {
        ModelCatalogEntry e{"sasaki_flat", sasaki_flat_spec(), {}, "Euclidean plane with K = 0"};
        const auto& s = e.spec;
        e.expected = {ev(s, "g", {0, 0}, "1"), ev(s, "lc", {}, "0"), ev(s, "K", {}, "0"), ev(s, "R", {}, "0"),
                      ev(s, "nablaK", {}, "0")};
        out.push_back(std::move(e));
    }
    return out;
}

inline ModelCatalogEntry catalog_entry(const std::string& name) {
    for (auto& e : catalog())
        if (e.name == name) return e;
    std::string known;
    for (const auto& e : catalog()) known += (known.empty() ? "" : ", ") + e.name;
    throw UsageError("unknown model '" + name + "' (known: " + known + ")");
}

/// The engine tensor a quantity name refers to.
inline Tensor<double> engine_quantity(const BaseGeometry& geo, const std::string& q) {
    if (q == "g") return to_tensor(geo.g);
    if (q == "lc") return geo.lc;
    if (q == "K") return geo.K;
    if (q == "gamma") return geo.gamma;
    if (q == "gamma_star") return geo.gamma_star;
    if (q == "C") return geo.C;
    if (q == "R") return geo.R;
    if (q == "R_lc") return geo.R_lc;
    if (q == "nablaK") return geo.nablaK;
    if (q == "KK") return skew_commutator(geo);
    throw UsageError("unknown quantity '" + q + "'");
}

struct ExpectedCheck {
    std::string label;
    double expected = 0.0, computed = 0.0;
    double deviation() const { return std::abs(expected - computed); }
};

/// Engine vs expected table at x; for whole-tensor rows the worst component is reported.
inline std::vector<ExpectedCheck> check_expected(const ModelCatalogEntry& e, const std::vector<double>& x) {
    const auto geo = base_geometry(e.spec, x);
    std::vector<ExpectedCheck> out;
    for (const auto& row : e.expected) {
        const auto t = engine_quantity(geo, row.quantity);
        const double want = evaluate(row.value, x, e.spec.params);
        ExpectedCheck c;
        std::ostringstream label;
        label << row.quantity;
        if (row.index.empty()) {
            label << "[*]";
            c.expected = want;
            c.computed = want;
            for (std::size_t f = 0; f < t.size(); ++f)
                if (std::abs(t.at_flat(f) - want) > std::abs(c.computed - want)) c.computed = t.at_flat(f);
        } else {
            label << "[";
            for (std::size_t k = 0; k < row.index.size(); ++k) label << (k ? "," : "") << row.index[k] + 1;
            label << "]";
            c.expected = want;
            c.computed = t.at(row.index);
        }
        c.label = label.str();
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parallelism system of the deformed Euclidean plane
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& ex0_residual_names() {
    static const std::vector<std::string> names = {"A_x - (A^2 + C^2)", "A_y - C(A + D)", "B_x - D(B + C)",
                                                   "B_y - (B^2 + D^2)", "C_x - C(A + D)", "C_y - (C^2 + D^2)",
                                                   "D_x - (C^2 + D^2)", "D_y - D(B + C)", "D(A - D) - C(C - B)"};
    return names;
}

/// Eight PDE residuals of the parallelism system followed by the commutativity relation.
inline std::vector<double> ex0_pde_residual(const Expression& A, const Expression& B, const Expression& C,
                                            const Expression& D, std::span<const double> x,
                                            const ParamValues& params = {}) {
    const Jet3 a = eval_jet(A, x, params), b = eval_jet(B, x, params);
    const Jet3 c = eval_jet(C, x, params), d = eval_jet(D, x, params);
    const double A0 = a.value(), B0 = b.value(), C0 = c.value(), D0 = d.value();
    return {a.partial({0}) - (A0 * A0 + C0 * C0), a.partial({1}) - C0 * (A0 + D0),
            b.partial({0}) - D0 * (B0 + C0),      b.partial({1}) - (B0 * B0 + D0 * D0),
            c.partial({0}) - C0 * (A0 + D0),      c.partial({1}) - (C0 * C0 + D0 * D0),
            d.partial({0}) - (C0 * C0 + D0 * D0), d.partial({1}) - D0 * (B0 + C0),
            D0 * (A0 - D0) - C0 * (C0 - B0)};
}

inline std::vector<double> ex0_pde_residual(const std::string& A, const std::string& B, const std::string& C,
                                            const std::string& D, std::span<const double> x,
                                            const ParamValues& params = {}) {
    std::vector<std::string> names;
    for (const auto& [k, v] : params) names.push_back(k);
    const std::vector<std::string> aliases = {"x", "y"};
    return ex0_pde_residual(parse(A, 2, names, aliases), parse(B, 2, names, aliases), parse(C, 2, names, aliases),
                            parse(D, 2, names, aliases), x, params);
}

// ---------------------------------------------------------------------------
// Spec documents
// ---------------------------------------------------------------------------

namespace detail {

inline std::string component_text(const json& v, const std::string& path) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return detail::format_number(v.get<double>());
    throw SchemaError(path, "expected an expression string or a number");
}

/// Slots (a) and (b) that must agree. Returns a note when the texts differ but values agree.
inline std::string reconcile(Expression& a, Expression& b, const std::string& la, const std::string& lb,
                             const ManifoldSpec& spec) {
    if (structurally_equal(a.root(), b.root())) return {};
    Sampler s(0x5eedULL);
    int compared = 0;
    for (int k = 0; k < 10; ++k) {
        const auto x = s.base_point(spec);
        double va, vb;
        try {
            va = evaluate(a, x, spec.params);
            vb = evaluate(b, x, spec.params);
        } catch (const DomainError&) {
            continue;
        }
        ++compared;
        if (!(std::abs(va - vb) <= 1e-12 * std::max(1.0, std::max(std::abs(va), std::abs(vb)))))
            throw SymmetryError(la + " and " + lb + " differ (" + to_string(a) + " vs " + to_string(b) + ")");
    }
    if (compared == 0) throw SymmetryError(la + " and " + lb + " could not be compared on the domain");
    b = a;
    return la + " and " + lb + " differ in text but agree at 10 sample points; using " + la;
}

inline void expect_keys(const json& doc) {
    static const std::vector<std::string> known = {"name",         "dim",    "coords",    "metric", "skewness",
                                                   "christoffels", "params", "signature", "domain"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw SchemaError("/" + it.key(), "unknown field");
}

}  // namespace detail

/// Validates a spec document. Normalization notes are appended to `notes` when given.
inline ManifoldSpec spec_from_json(const json& doc, std::vector<std::string>* notes = nullptr) {
    if (!doc.is_object()) throw SchemaError("", "spec document must be a JSON object");
    detail::expect_keys(doc);
    ManifoldSpec s;
    s.name = doc.value("name", std::string("custom"));
    if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw SchemaError("/dim", "required integer");
    s.dim = doc["dim"].get<int>();
    const int n = s.dim;
    if (n < 1 || n > 6) throw SchemaError("/dim", "dimension must be between 1 and 6");

    if (doc.contains("coords")) {
        const auto& c = doc["coords"];
        if (!c.is_array() || static_cast<int>(c.size()) != n) throw SchemaError("/coords", "expected dim names");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_string()) throw SchemaError("/coords/" + std::to_string(i), "expected a string");
            s.coords.push_back(c[i].get<std::string>());
        }
    } else {
        for (int i = 0; i < n; ++i) s.coords.push_back("x" + std::to_string(i + 1));
    }

    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw SchemaError("/params", "expected an object of numbers");
        for (auto it = doc["params"].begin(); it != doc["params"].end(); ++it) {
            if (!it.value().is_number()) throw SchemaError("/params/" + it.key(), "expected a number");
            s.params[it.key()] = it.value().get<double>();
        }
    }
    const std::string sig = doc.value("signature", std::string("riemannian"));
    if (sig == "riemannian") s.signature = Signature::Riemannian;
    else if (sig == "pseudo") s.signature = Signature::Pseudo;
    else throw SchemaError("/signature", "expected \"riemannian\" or \"pseudo\"");

    if (doc.contains("domain")) {
        const auto& d = doc["domain"];
        if (!d.is_array() || static_cast<int>(d.size()) != n) throw SchemaError("/domain", "expected dim intervals");
        for (int i = 0; i < n; ++i) {
            const std::string path = "/domain/" + std::to_string(i);
            if (!d[i].is_array() || d[i].size() != 2 || !d[i][0].is_number() || !d[i][1].is_number())
                throw SchemaError(path, "expected [lo, hi]");
            const double lo = d[i][0].get<double>(), hi = d[i][1].get<double>();
            if (!(lo < hi)) throw SchemaError(path, "empty interval");
            s.domain.emplace_back(lo, hi);
        }
    } else {
        s.domain.assign(n, {0.5, 2.0});
    }

    const auto names = s.param_names();
    auto parse_at = [&](const json& v, const std::string& path) {
        try {
            return parse(detail::component_text(v, path), n, names, s.coords);
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            throw SchemaError(path, e.what());
        }
    };
    auto push_note = [&](std::string note) {
        if (!note.empty() && notes) notes->push_back(std::move(note));
    };

    if (!doc.contains("metric")) throw SchemaError("/metric", "required");
    const auto& m = doc["metric"];
    if (!m.is_array() || static_cast<int>(m.size()) != n) throw SchemaError("/metric", "expected dim rows");
    s.metric.assign(n, std::vector<Expression>(n));
    std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
        const std::string row = "/metric/" + std::to_string(i);
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != n) throw SchemaError(row, "expected dim entries");
        for (int j = 0; j < n; ++j) {
            if (m[i][j].is_null()) continue;
            s.metric[i][j] = parse_at(m[i][j], row + "/" + std::to_string(j));
            given[i][j] = true;
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const std::string li = "metric[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            const std::string lj = "metric[" + std::to_string(j) + "][" + std::to_string(i) + "]";
            if (!given[i][j] && !given[j][i])
                throw SchemaError("/metric/" + std::to_string(i) + "/" + std::to_string(j), "missing component");
            if (!given[i][j]) s.metric[i][j] = s.metric[j][i];
            else if (!given[j][i]) s.metric[j][i] = s.metric[i][j];
            else if (i != j) push_note(detail::reconcile(s.metric[i][j], s.metric[j][i], li, lj, s));
        }

    const bool has_k = doc.contains("skewness"), has_c = doc.contains("christoffels");
    if (has_k == has_c) throw SchemaError("/skewness", "exactly one of skewness or christoffels is required");
    const std::string key = has_k ? "skewness" : "christoffels";
    s.skew_kind = has_k ? SkewKind::Skewness : SkewKind::Christoffels;
    const auto& t = doc[key];
    const std::string base = "/" + key;
    if (!t.is_array() || static_cast<int>(t.size()) != n) throw SchemaError(base, "expected dim blocks");
    s.skew.assign(static_cast<std::size_t>(n) * n * n, Expression{});
    std::vector<bool> have(s.skew.size(), false);
    auto flat = [n](int k, int i, int j) { return static_cast<std::size_t>((k * n + i) * n + j); };
    for (int k = 0; k < n; ++k) {
        const std::string pk = base + "/" + std::to_string(k);
        if (!t[k].is_array() || static_cast<int>(t[k].size()) != n) throw SchemaError(pk, "expected dim rows");
        for (int i = 0; i < n; ++i) {
            const std::string pi = pk + "/" + std::to_string(i);
            if (!t[k][i].is_array() || static_cast<int>(t[k][i].size()) != n)
                throw SchemaError(pi, "expected dim entries");
            for (int j = 0; j < n; ++j) {
                if (t[k][i][j].is_null()) continue;
                s.skew[flat(k, i, j)] = parse_at(t[k][i][j], pi + "/" + std::to_string(j));
                have[flat(k, i, j)] = true;
            }
        }
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const auto a = flat(k, i, j), b = flat(k, j, i);
                auto label = [&](int x, int y) {
                    return key + "[" + std::to_string(k) + "][" + std::to_string(x) + "][" + std::to_string(y) + "]";
                };
                if (!have[a] && !have[b]) {
                    s.skew[a] = s.skew[b] = parse("0", n);
                } else if (!have[a]) {
                    s.skew[a] = s.skew[b];
                } else if (!have[b]) {
                    s.skew[b] = s.skew[a];
                } else if (i != j) {
                    push_note(detail::reconcile(s.skew[a], s.skew[b], label(i, j), label(j, i), s));
                }
            }
    return s;
}

inline json spec_to_json(const ManifoldSpec& s) {
    json doc;
    doc["name"] = s.name;
    doc["dim"] = s.dim;
    doc["coords"] = s.coords;
    json metric = json::array();
    for (int i = 0; i < s.dim; ++i) {
        json row = json::array();
        for (int j = 0; j < s.dim; ++j) row.push_back(to_string(s.metric[i][j]));
        metric.push_back(row);
    }
    doc["metric"] = metric;
    json skew = json::array();
    for (int k = 0; k < s.dim; ++k) {
        json block = json::array();
        for (int i = 0; i < s.dim; ++i) {
            json row = json::array();
            for (int j = 0; j < s.dim; ++j) row.push_back(to_string(s.skew_at(k, i, j)));
            block.push_back(row);
        }
        skew.push_back(block);
    }
    doc[s.skew_kind == SkewKind::Skewness ? "skewness" : "christoffels"] = skew;
    json params = json::object();
    for (const auto& [k, v] : s.params) params[k] = v;
    doc["params"] = params;
    doc["signature"] = s.signature == Signature::Riemannian ? "riemannian" : "pseudo";
    json domain = json::array();
    for (const auto& [lo, hi] : s.domain) domain.push_back(json::array({lo, hi}));
    doc["domain"] = domain;
    return doc;
}

inline ManifoldSpec load_spec(const std::string& path, std::vector<std::string>* notes = nullptr) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open spec file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return spec_from_json(doc, notes);
}

inline void save_spec(const ManifoldSpec& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write spec file '" + path + "'");
    out << spec_to_json(s).dump(2) << "\n";
}

}  // namespace cgtm
