#include <gtest/gtest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "support.hpp"

using namespace cgtm;
using namespace cgtm::testing;

namespace {

std::vector<ManifoldSpec> statistical_specs() {
    std::vector<ManifoldSpec> out;
    for (const auto& e : catalog()) out.push_back(e.spec);
    out.push_back(curved_statistical_spec());
    out.push_back(pseudo_offdiag("f0+f1*x1+0.3*x2^2", {{"f0", 1.0}, {"f1", 0.5}}));
    return out;
}

}  // namespace

TEST(Catalog, ExpectedValuesAtSeededPoints) {
    Sampler s(7);
    for (const auto& e : catalog()) {
        for (int k = 0; k < 10; ++k) {
            const auto x = s.base_point(e.spec);
            for (const auto& c : check_expected(e, x))
                EXPECT_LE(c.deviation(), 1e-12 * std::max(1.0, std::abs(c.expected)))
                    << e.name << " " << c.label << " expected " << c.expected << " got " << c.computed;
        }
    }
}

TEST(Catalog, NormalAtUnitSigma) {
    const std::vector<double> x{0.0, 1.0};
    const auto geo = base_geometry(normal_spec(), x);
    EXPECT_DOUBLE_EQ(geo.g(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(geo.g(1, 1), 2.0);
    EXPECT_NEAR(geo.gamma(0, 0, 1), -2.0, 1e-15);
    EXPECT_NEAR(geo.gamma(1, 1, 1), -3.0, 1e-15);
    EXPECT_NEAR(geo.C(1, 1, 1), 8.0, 1e-14);
    EXPECT_NEAR(geo.nablaK(0, 0, 0, 0), 1.0, 1e-14);
    EXPECT_LE(max_abs(geo.R), 1e-14);
}

TEST(Catalog, UnknownModelListsKnownNames) {
    try {
        catalog_entry("gamma");
        FAIL();
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("normal"), std::string::npos);
    }
}

TEST(Catalog, ChristoffelFormMatchesSkewnessForm) {
    const auto a = normal_spec();
    const auto b = load_spec(source_path("samples/normal_christoffels.json"));
    EXPECT_EQ(b.skew_kind, SkewKind::Christoffels);
    Sampler s(9);
    for (int k = 0; k < 20; ++k) {
        const auto x = s.base_point(a);
        const auto ga = base_geometry(a, x), gb = base_geometry(b, x);
        EXPECT_LE(max_abs_diff(ga.K, gb.K), 1e-14);
        EXPECT_LE(max_abs_diff(ga.gamma, gb.gamma), 1e-14);
        EXPECT_LE(max_abs_diff(ga.nablaK, gb.nablaK), 1e-13);
        EXPECT_LE(max_abs_diff(ga.R, gb.R), 1e-13);
    }
}

TEST(Catalog, EuclidDeformedParallelismResidualVanishes) {
    Sampler s(11);
    const ParamValues params{{"c1", 3.0}, {"c2", 3.0}};
    for (int k = 0; k < 20; ++k) {
        const std::vector<double> x{s.uniform(-1.0, 2.0), s.uniform(-1.0, 2.0)};
        for (double r : ex0_pde_residual("1/(c1-x)", "1/(c2-y)", "0", "0", x, params)) EXPECT_LE(std::abs(r), 1e-14);
    }
    const auto bad = ex0_pde_residual("x", "0", "0", "0", std::vector<double>{0.5, 0.5});
    EXPECT_GT(std::abs(bad[0]), 0.1);
}

// ---------------------------------------------------------------------------
// Properties over seeded points of every statistical spec
// ---------------------------------------------------------------------------

TEST(StatmanProperty, StructuralIdentities) {
    Sampler s(13);
    for (const auto& spec : statistical_specs()) {
        for (int k = 0; k < 25; ++k) {
            const auto x = s.base_point(spec);
            const auto geo = base_geometry(spec, x);
            const double scale = std::max(1.0, max_abs(geo.C));
            EXPECT_LE(cubic_permutation_defect(geo), 1e-12 * scale) << spec.name;
            EXPECT_LE(cubic_vs_skewness(geo), 1e-12 * scale) << spec.name;
            EXPECT_LE(skewness_symmetry_defect(geo, s), 1e-12 * std::max(1.0, max_abs(geo.K))) << spec.name;
            EXPECT_LE(duality_defect(geo), 1e-12 * scale) << spec.name;
            EXPECT_LE(curvature_identity_defect(geo, s), 1e-11) << spec.name;
            EXPECT_LE(rtilde_defect(geo, s), 1e-11) << spec.name;
            EXPECT_LE(curvature_decomposition_check(geo), 1e-11 * std::max(1.0, max_abs(geo.R))) << spec.name;
        }
    }
}

TEST(StatmanProperty, ConnectionIsLeviCivitaPlusSkewness) {
    Sampler s(17);
    for (const auto& spec : statistical_specs()) {
        for (int k = 0; k < 10; ++k) {
            const auto geo = base_geometry(spec, s.base_point(spec));
            const int n = geo.n;
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        EXPECT_NEAR(geo.gamma(a, i, j), geo.lc(a, i, j) + geo.K(a, i, j), 1e-13);
                        EXPECT_NEAR(geo.gamma_star(a, i, j), geo.lc(a, i, j) - geo.K(a, i, j), 1e-13);
                        EXPECT_NEAR(geo.gamma(a, i, j), geo.gamma(a, j, i), 1e-13);
                    }
        }
    }
}

TEST(StatmanProperty, CodazziHoldsForFlatModels) {
    // R = 0 with a torsion-free connection: nabla K symmetric in its derivative and lower slot.
    Sampler s(19);
    for (const auto& e : catalog()) {
        for (int k = 0; k < 10; ++k) {
            const auto geo = base_geometry(e.spec, s.base_point(e.spec));
            const int n = geo.n;
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int m = 0; m < n; ++m)
                            EXPECT_NEAR(geo.nabla_lc_K(l, i, j, m), geo.nabla_lc_K(l, j, i, m),
                                        1e-12 * std::max(1.0, max_abs(geo.nabla_lc_K)))
                                << e.name;
        }
    }
}

TEST(Statman, CurvedSpecHasNonzeroCurvature) {
    const auto spec = curved_statistical_spec();
    const auto geo = base_geometry(spec, std::vector<double>{0.3, 1.5});
    EXPECT_GT(max_abs(geo.R), 1e-3);
    EXPECT_GT(max_abs(geo.nablaK), 1e-3);
}

TEST(Statman, NotStatisticalIsRejected) {
    auto spec = make_spec("broken", 2, {"x1", "x2"}, {{"1", "0"}, {"0", "1"}},
                          {"0", "1", "1", "0", "0", "0", "0", "0"});
    EXPECT_THROW(base_geometry(spec, std::vector<double>{1.0, 1.0}), NotStatistical);
}

TEST(Statman, SingularMetricIsRejected) {
    const auto spec = make_spec("singular", 2, {"x1", "x2"}, {{"1", "1"}, {"1", "1"}},
                                std::vector<std::string>(8, "0"));
    EXPECT_THROW(base_geometry(spec, std::vector<double>{1.0, 1.0}), SingularMetric);
}

// ---------------------------------------------------------------------------
// Spec documents
// ---------------------------------------------------------------------------

TEST(SpecJson, RoundTripPreservesGeometry) {
    Sampler s(23);
    for (const auto& spec : statistical_specs()) {
        const auto again = spec_from_json(spec_to_json(spec));
        EXPECT_EQ(spec_to_json(again).dump(), spec_to_json(spec).dump());
        for (int k = 0; k < 5; ++k) {
            const auto x = s.base_point(spec);
            const auto a = base_geometry(spec, x), b = base_geometry(again, x);
            EXPECT_EQ(max_abs_diff(a.R, b.R), 0.0);
            EXPECT_EQ(max_abs_diff(a.nablaK, b.nablaK), 0.0);
        }
    }
}

TEST(SpecJson, SaveAndLoad) {
    const std::string path = ::testing::TempDir() + "cgtm_spec_roundtrip.json";
    save_spec(normal_spec(), path);
    const auto back = load_spec(path);
    EXPECT_EQ(spec_to_json(back).dump(), spec_to_json(normal_spec()).dump());
    std::remove(path.c_str());
}

namespace {

json minimal_doc() {
    return json::parse(R"({"dim": 1, "metric": [["1/x1^2"]], "skewness": [[["1/x1"]]]})");
}

std::string schema_path(const json& doc) {
    try {
        spec_from_json(doc);
    } catch (const SchemaError& e) {
        return e.path();
    }
    return "<accepted>";
}

}  // namespace

TEST(SpecJson, MinimalDocumentDefaults) {
    const auto s = spec_from_json(minimal_doc());
    EXPECT_EQ(s.name, "custom");
    EXPECT_EQ(s.coords, std::vector<std::string>{"x1"});
    EXPECT_EQ(s.signature, Signature::Riemannian);
    ASSERT_EQ(s.domain.size(), 1u);
}

TEST(SpecJson, SchemaErrorsNameThePath) {
    auto d = minimal_doc();
    d["extra"] = 1;
    EXPECT_EQ(schema_path(d), "/extra");

    d = minimal_doc();
    d.erase("dim");
    EXPECT_EQ(schema_path(d), "/dim");

    d = minimal_doc();
    d["metric"] = json::parse(R"([["1/x1^2"], ["1"]])");
    EXPECT_EQ(schema_path(d), "/metric");

    d = minimal_doc();
    d["metric"][0][0] = "1/(x1";
    EXPECT_EQ(schema_path(d), "/metric/0/0");

    d = minimal_doc();
    d["skewness"][0][0][0] = "y";
    EXPECT_EQ(schema_path(d), "/skewness/0/0/0");

    d = minimal_doc();
    d["christoffels"] = d["skewness"];
    EXPECT_EQ(schema_path(d), "/skewness");

    d = minimal_doc();
    d["signature"] = "lorentzian";
    EXPECT_EQ(schema_path(d), "/signature");

    d = minimal_doc();
    d["domain"] = json::parse("[[2, 1]]");
    EXPECT_EQ(schema_path(d), "/domain/0");

    d = minimal_doc();
    d["params"] = json::parse(R"({"a": "one"})");
    EXPECT_EQ(schema_path(d), "/params/a");
}

TEST(SpecJson, AsymmetricEntriesAreReconciledOrRejected) {
    auto doc = json::parse(R"({"dim": 2, "metric": [["1", "x1*0"], ["0", "1"]],
                               "skewness": [[[0,0],[0,0]],[[0,0],[0,0]]]})");
    std::vector<std::string> notes;
    spec_from_json(doc, &notes);
    EXPECT_EQ(notes.size(), 1u);

    doc["metric"][1][0] = "0.5";
    EXPECT_THROW(spec_from_json(doc), SymmetryError);
}
