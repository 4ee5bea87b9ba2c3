#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "support.hpp"

using namespace cgtm;
using namespace cgtm::testing;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<int>(v.size()));
    int i = 0;
    for (double d : v) out[i++] = d;
    return out;
}

struct Case {
    ManifoldSpec spec;
    MetricParams params;
};

/// Every catalog model and the curved base, crossed with the sweep grid.
std::vector<Case> sweep_cases() {
    std::vector<ManifoldSpec> specs;
    for (const auto& e : catalog()) specs.push_back(e.spec);
    specs.push_back(curved_statistical_spec());
    std::vector<Case> out;
    for (const auto& s : specs)
        for (const auto& pq : sweep_grid()) out.push_back({s, pq});
    return out;
}

}  // namespace

TEST(BundlePoint, ScalarsAndBMq) {
    const auto geo = base_geometry(normal_spec(), std::vector<double>{0.0, 1.0});
    const auto pt = make_bundle_point(geo, vec({1.0, 1.0}), {1.0, 0.5});
    EXPECT_DOUBLE_EQ(pt.tau, 3.0);
    EXPECT_DOUBLE_EQ(pt.alpha, 4.0);
    EXPECT_DOUBLE_EQ(pt.one_q_tau(), 2.5);
    EXPECT_THROW(make_bundle_point(geo, vec({1.0, 1.0}), {1.0, -0.5}), OutsideBMq);
    EXPECT_NO_THROW(make_bundle_point(geo, vec({0.1, 0.1}), {1.0, -0.5}));
    EXPECT_THROW(make_bundle_point(geo, vec({1.0}), {0.0, 0.0}), UsageError);
}

TEST(BundlePoint, ScaleFactorsDerivativeMatchesDifference) {
    Sampler s(29);
    for (int k = 0; k < 100; ++k) {
        const double p = s.uniform(-1.0, 3.0), q = s.uniform(0.0, 2.0), tau = s.uniform(0.1, 4.0);
        const double h = 1e-5;
        const auto f = scale_factors(p, q, tau), fp = scale_factors(p, q, tau + h), fm = scale_factors(p, q, tau - h);
        EXPECT_NEAR(f.Mp, (fp.M - fm.M) / (2 * h), 1e-7);
        EXPECT_NEAR(f.Np, (fp.N - fm.N) / (2 * h), 1e-7);
    }
}

TEST(BundlePoint, RearrangementIdentity) {
    Sampler s(31);
    for (int k = 0; k < 200; ++k) {
        const double p = s.uniform(-1.0, 3.0), q = s.uniform(0.0, 2.0), tau = s.uniform(0.01, 5.0);
        const auto [l, r] = scale_factor_identity_sides(p, q, tau);
        EXPECT_LE(std::abs(l - r), 1e-12 * std::max(1.0, std::abs(l))) << p << " " << q << " " << tau;
    }
}

// ---------------------------------------------------------------------------
// Metric and frame
// ---------------------------------------------------------------------------

TEST(BundleProperty, AdaptedFrameDiagonalisesInducedMetric) {
    Sampler s(37);
    for (const auto& c : sweep_cases()) {
        for (int k = 0; k < 4; ++k) {
            const auto sp = s.base_point(c.spec);
            const auto geo = base_geometry(c.spec, sp);
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.3, c.params);
            const auto F = adapted_frame(geo, pt);
            const Mat G = detail::induced_metric_value(geo, pt);
            const Mat adapted = F.F.transpose() * G * F.F;
            EXPECT_LE((adapted - gpq_matrix(geo, pt)).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, G.cwiseAbs().maxCoeff()))
                << c.spec.name;
            EXPECT_LE((F.F * F.Finv - Mat::Identity(2 * geo.n, 2 * geo.n)).cwiseAbs().maxCoeff(), 1e-14);
            const auto A = LiftedVector{random_vec(s, geo.n), random_vec(s, geo.n)};
            const auto B = LiftedVector{random_vec(s, geo.n), random_vec(s, geo.n)};
            EXPECT_NEAR(g_pq(geo, pt, A, B), A.stacked().dot(gpq_matrix(geo, pt) * B.stacked()), 1e-12);
        }
    }
}

TEST(BundleProperty, ConnectionMatchesOracle) {
    Sampler s(41);
    for (const auto& c : sweep_cases()) {
        for (int k = 0; k < 4; ++k) {
            const auto geo = base_geometry(c.spec, s.base_point(c.spec));
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, c.params);
            const auto ref = oracle_evaluate(geo, pt);
            const auto mine = nabla_pq_coeffs(geo, pt);
            for (std::size_t f = 0; f < mine.size(); ++f)
                EXPECT_LE(rel_dev(mine.at_flat(f), ref.conn.at_flat(f)), kConnectionTol) << c.spec.name;
        }
    }
}

TEST(BundleProperty, ConnectionIsMetricAndTorsionFree) {
    Sampler s(43);
    for (const auto& c : sweep_cases()) {
        const auto geo = base_geometry(c.spec, s.base_point(c.spec));
        const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, c.params);
        const int n = geo.n, m = 2 * n;
        const auto C = nabla_pq_coeffs(geo, pt);
        const Mat G = gpq_matrix(geo, pt);
        const auto brk = anholonomy(geo, pt);
        // torsion: C(g,a,b) - C(g,b,a) = c^g_ab
        for (int g = 0; g < m; ++g)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    EXPECT_NEAR(C(g, a, b) - C(g, b, a), brk(g, a, b), 1e-10 * std::max(1.0, max_abs(C)))
                        << c.spec.name;
        // compatibility on the horizontal block: delta_a(g_bd) = d_a g_bd
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int d = 0; d < n; ++d) {
                    double lhs = 0.0;
                    for (int e = 0; e < m; ++e) lhs += C(e, a, b) * G(e, d) + C(e, a, d) * G(b, e);
                    EXPECT_NEAR(lhs, geo.g_jet(b, d).partial({a}), 1e-10 * std::max(1.0, max_abs(C))) << c.spec.name;
                }
    }
}

TEST(BundleProperty, CanonicalFieldDerivatives) {
    Sampler s(47);
    for (const auto& c : sweep_cases()) {
        const auto geo = base_geometry(c.spec, s.base_point(c.spec));
        const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, c.params);
        const Vec X = random_vec(s, geo.n);
        const auto a = nabla_pq_canonical(geo, pt, X), b = nabla_pq_canonical_assembled(geo, pt, X);
        const double scale = std::max(1.0, a.along_horizontal.max_abs() + a.along_vertical.max_abs());
        EXPECT_LE((a.along_horizontal - b.along_horizontal).max_abs(), 1e-12 * scale) << c.spec.name;
        EXPECT_LE((a.along_vertical - b.along_vertical).max_abs(), 1e-12 * scale) << c.spec.name;
    }
}

TEST(BundleProperty, FrameBrackets) {
    Sampler s(53);
    for (const auto& c : sweep_cases()) {
        const auto geo = base_geometry(c.spec, s.base_point(c.spec));
        const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, c.params);
        EXPECT_LE(bracket_defect(geo, pt), 1e-12) << c.spec.name;
        for (int i = 0; i < geo.n; ++i)
            for (int j = 0; j < geo.n; ++j) EXPECT_LE(lifted_bracket_check_fd(c.spec, pt, i, j).max(), 1e-8);
    }
}

TEST(BundleProperty, LiftDerivativeRelations) {
    Sampler s(59);
    for (const auto& c : sweep_cases()) {
        const auto geo = base_geometry(c.spec, s.base_point(c.spec));
        const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, c.params);
        EXPECT_LE(lift_relation_defect(c.spec, geo, pt, s), 1e-8) << c.spec.name;
        EXPECT_LE(vertical_metric_derivative_defect(c.spec, geo, pt, s), 1e-8) << c.spec.name;
    }
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

TEST(BundleProperty, CurvatureTableMatchesOracleOnCatalog) {
    Sampler s(61);
    for (const auto& e : catalog()) {
        for (const auto& pq : sweep_grid()) {
            const auto geo = base_geometry(e.spec, s.base_point(e.spec));
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, pq);
            const auto ref = oracle_evaluate(geo, pt);
            const auto T = curvature_pq_table(geo, pt);
            for (std::size_t f = 0; f < T.size(); ++f)
                EXPECT_LE(rel_dev(T.at_flat(f), ref.curv.at_flat(f)), kCurvatureTol) << e.name;
        }
    }
}

TEST(BundleProperty, CorrectedVariantMatchesOracleOnCurvedBase) {
    const auto spec = curved_statistical_spec();
    Sampler s(67);
    for (const auto& pq : sweep_grid()) {
        for (int k = 0; k < 3; ++k) {
            const auto geo = base_geometry(spec, s.base_point(spec));
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, pq);
            const auto ref = oracle_evaluate(geo, pt);
            const auto T = curvature_pq_table(geo, pt, FormulaVariant::Corrected);
            for (std::size_t f = 0; f < T.size(); ++f) EXPECT_LE(rel_dev(T.at_flat(f), ref.curv.at_flat(f)), kCurvatureTol);
        }
    }
}

TEST(Bundle, VerbatimVVHDeviatesOnlyThereOnCurvedBase) {
    const auto spec = curved_statistical_spec();
    const auto geo = base_geometry(spec, std::vector<double>{0.3, 1.5});
    const auto pt = make_bundle_point(geo, vec({0.4, -0.7}), {0.0, 0.0});
    const auto ref = oracle_evaluate(geo, pt);
    const auto T = curvature_pq_table(geo, pt);
    const int n = geo.n;
    double vvh_h = 0.0, rest = 0.0;
    for (int d = 0; d < 2 * n; ++d)
        for (int c = 0; c < 2 * n; ++c)
            for (int a = 0; a < 2 * n; ++a)
                for (int b = 0; b < 2 * n; ++b) {
                    const double dev = rel_dev(T(d, c, a, b), ref.curv(d, c, a, b));
                    if (a >= n && b >= n && c < n && d < n) vvh_h = std::max(vvh_h, dev);
                    else rest = std::max(rest, dev);
                }
    EXPECT_GT(vvh_h, 1e-3);
    EXPECT_LE(rest, kCurvatureTol);
}

TEST(BundleProperty, CurvatureSymmetries) {
    Sampler s(71);
    for (const auto& c : sweep_cases()) {
        const auto geo = base_geometry(c.spec, s.base_point(c.spec));
        const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5, c.params);
        const auto T = curvature_pq_table(geo, pt, FormulaVariant::Corrected);
        const Mat G = gpq_matrix(geo, pt);
        const int m = 2 * geo.n;
        const double scale = std::max(1.0, max_abs(T));
        auto low = [&](int d, int c2, int a, int b) {
            double v = 0.0;
            for (int e = 0; e < m; ++e) v += G(d, e) * T(e, c2, a, b);
            return v;
        };
        for (int d = 0; d < m; ++d)
            for (int c2 = 0; c2 < m; ++c2)
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b) {
                        EXPECT_NEAR(T(d, c2, a, b), -T(d, c2, b, a), 1e-10 * scale);
                        EXPECT_NEAR(low(d, c2, a, b), -low(c2, d, a, b), 1e-9 * scale) << c.spec.name;
                        EXPECT_NEAR(low(d, c2, a, b), low(b, a, c2, d), 1e-9 * scale) << c.spec.name;
                    }
    }
}

// ---------------------------------------------------------------------------
// Frozen oracle values
// ---------------------------------------------------------------------------

TEST(OracleFrozen, CurvedBase) {
    const auto geo = base_geometry(curved_statistical_spec(), std::vector<double>{0.3, 1.5});
    const auto pt = make_bundle_point(geo, vec({0.4, -0.7}), {1.0, 0.5});
    const auto o = oracle_evaluate(geo, pt);
    EXPECT_NEAR(o.scalar, 2.5822586154896432, 1e-10);
    EXPECT_NEAR(o.divergence, 0.42645274548419199, 1e-12);
    EXPECT_NEAR(o.curv(2, 0, 0, 2), -0.096392499779851329, 1e-12);
    EXPECT_NEAR(o.G(0, 0), 1.046987592227834, 1e-13);
    EXPECT_NEAR(geodesic_flow_divergence(geo, pt), o.divergence, 1e-12);
    EXPECT_NEAR(curvature_pq_table(geo, pt)(2, 0, 0, 2), o.curv(2, 0, 0, 2), 1e-12);
}

TEST(OracleFrozen, Normal) {
    const auto geo = base_geometry(normal_spec(), std::vector<double>{0.2, 1.25});
    const auto pt = make_bundle_point(geo, vec({1.0, 0.5}), {2.0, 1.0});
    const auto o = oracle_evaluate(geo, pt);
    EXPECT_NEAR(o.scalar, 3.8532611411911528, 1e-10);
    EXPECT_NEAR(o.divergence, 0.83265306122448812, 1e-12);
    EXPECT_NEAR(o.curv(2, 0, 0, 2), -0.44624606413994156, 1e-12);
    EXPECT_NEAR(o.G(0, 0), 0.81486047480216584, 1e-13);
    EXPECT_NEAR(geodesic_flow_divergence(geo, pt), o.divergence, 1e-12);
}

TEST(OracleFrozen, Exponential) {
    const auto geo = base_geometry(exponential_spec(), std::vector<double>{1.0});
    const auto pt = make_bundle_point(geo, vec({1.0}), {1.0, 1.0});
    const auto o = oracle_evaluate(geo, pt);
    EXPECT_NEAR(o.scalar, -2.0, 1e-12);
    EXPECT_NEAR(o.divergence, -2.0, 1e-12);
    EXPECT_NEAR(o.conn(0, 0, 0), -1.0, 1e-14);
    EXPECT_NEAR(o.curv(1, 0, 0, 1), 1.0, 1e-12);
    EXPECT_NEAR(geodesic_flow_divergence(geo, pt), -2.0, 1e-12);
    // contracted form of the same trace
    EXPECT_NEAR(geodesic_flow_divergence_contracted(geo, pt), -2.5, 1e-12);
}

TEST(Bundle, DivergenceVanishesWithoutSkewness) {
    Sampler s(73);
    const auto spec = sasaki_flat_spec();
    for (const auto& pq : sweep_grid()) {
        const auto geo = base_geometry(spec, s.base_point(spec));
        const auto pt = make_bundle_point(geo, s.fiber(2), pq);
        EXPECT_EQ(geodesic_flow_divergence(geo, pt), 0.0);
        EXPECT_LE(std::abs(oracle_evaluate(geo, pt).divergence), 1e-14);
    }
}

TEST(Bundle, TotallyGeodesicDefectVanishesAtZeroParameters) {
    Sampler s(79);
    for (const auto& e : catalog()) {
        const auto geo = base_geometry(e.spec, s.base_point(e.spec));
        const auto pt = make_bundle_point(geo, s.fiber(geo.n), {0.0, 0.0});
        EXPECT_EQ(totally_geodesic_defect(geo, pt, random_vec(s, geo.n), random_vec(s, geo.n)).max_abs(), 0.0);
    }
}
