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

std::vector<ManifoldSpec> riemannian_specs() {
    std::vector<ManifoldSpec> out;
    for (const auto& e : catalog())
        if (e.spec.signature == Signature::Riemannian) out.push_back(e.spec);
    out.push_back(curved_statistical_spec());
    return out;
}

double table_dev(const Tensor<double>& a, const Tensor<double>& b) {
    double m = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) m = std::max(m, rel_dev(a.at_flat(f), b.at_flat(f)));
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sectional curvature
// ---------------------------------------------------------------------------

TEST(SectionalProperty, GeneralClosedFormsMatchOracle) {
    Sampler s(83);
    for (const auto& spec : riemannian_specs()) {
        for (const auto& pq : sweep_grid()) {
            for (int k = 0; k < 3; ++k) {
                const auto geo = base_geometry(spec, s.base_point(spec));
                const auto pt = make_bundle_point(geo, s.fiber(geo.n) * 0.5 + vec({0.3, 0.0}).head(geo.n), pq);
                const auto o = oracle_evaluate(geo, pt);
                const auto f = lifted_orthonormal_frame(geo, pt);
                EXPECT_LE(table_dev(sectional_frame_general(geo, pt, f), sectional_frame_oracle(geo, pt, f, o)), 1e-8)
                    << spec.name << " p=" << pq.p << " q=" << pq.q;
            }
        }
    }
}

TEST(SectionalProperty, LemmaFormulasAgreeAtZeroParameters) {
    Sampler s(89);
    for (const auto& spec : riemannian_specs()) {
        for (int k = 0; k < 5; ++k) {
            const auto geo = base_geometry(spec, s.base_point(spec));
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) + vec({0.3, 0.0}).head(geo.n), {0.0, 0.0});
            const auto f = lifted_orthonormal_frame(geo, pt);
            EXPECT_LE(table_dev(sectional_frame(geo, pt, f), sectional_frame_general(geo, pt, f)), 1e-10) << spec.name;
        }
    }
}

TEST(SectionalProperty, OracleScalarIsFrameSum) {
    Sampler s(97);
    for (const auto& spec : riemannian_specs()) {
        for (const auto& pq : sweep_grid()) {
            const auto geo = base_geometry(spec, s.base_point(spec));
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) + vec({0.3, 0.0}).head(geo.n), pq);
            const auto o = oracle_evaluate(geo, pt);
            const auto f = lifted_orthonormal_frame(geo, pt);
            EXPECT_LE(rel_dev(scalar_from_table(sectional_frame_oracle(geo, pt, f, o)), o.scalar), 1e-10) << spec.name;
        }
    }
}

TEST(SectionalProperty, PlaneBasisInvariance) {
    Sampler s(101);
    const auto spec = curved_statistical_spec();
    for (const auto& pq : sweep_grid()) {
        const auto geo = base_geometry(spec, s.base_point(spec));
        const auto pt = make_bundle_point(geo, s.fiber(2), pq);
        const auto o = oracle_evaluate(geo, pt);
        const LiftedVector A{random_vec(s, 2), random_vec(s, 2)}, B{random_vec(s, 2), random_vec(s, 2)};
        const double k0 = sectional_oracle(geo, pt, A, B, &o);
        const double a = s.uniform(0.5, 2.0), b = s.uniform(-1.0, 1.0), d = s.uniform(0.5, 2.0);
        const double k1 = sectional_oracle(geo, pt, a * A + b * B, d * B, &o);
        EXPECT_LE(rel_dev(k0, k1), 1e-10);
        EXPECT_LE(rel_dev(k0, sectional_oracle(geo, pt, B, A, &o)), 1e-12);
    }
}

TEST(Sectional, DegenerateAndNonOrthonormalPlanes) {
    const auto geo = base_geometry(normal_spec(), std::vector<double>{0.0, 1.0});
    const auto pt = make_bundle_point(geo, vec({1.0, 0.0}), {1.0, 1.0});
    const auto A = LiftedVector::horizontal(vec({1.0, 0.0}));
    EXPECT_THROW(sectional_oracle(geo, pt, A, 2.0 * A), DegeneratePlane);
    EXPECT_THROW(sectional_hh(geo, pt, vec({1.0, 0.0}), vec({0.0, 1.0})), NotOrthonormal);
    EXPECT_NO_THROW(sectional_hh(geo, pt, vec({1.0, 0.0}), vec({0.0, 1.0 / std::sqrt(2.0)})));
}

TEST(Sectional, FrameRequiresFiberDirectionAndRiemannianBase) {
    const auto geo = base_geometry(normal_spec(), std::vector<double>{0.0, 1.0});
    EXPECT_THROW(lifted_orthonormal_frame(geo, make_bundle_point(geo, vec({0.0, 0.0}), {0.0, 0.0})), ZeroFiberVector);
    const auto pseudo = base_geometry(pseudo_offdiag(), std::vector<double>{1.0, 1.0});
    EXPECT_THROW(lifted_orthonormal_frame(pseudo, make_bundle_point(pseudo, vec({1.0, 0.0}), {0.0, 0.0})),
                 PseudoRiemannianUnsupported);
}

TEST(Sectional, FrameIsOrthonormalInGpq) {
    Sampler s(103);
    for (const auto& spec : riemannian_specs()) {
        for (const auto& pq : sweep_grid()) {
            const auto geo = base_geometry(spec, s.base_point(spec));
            const auto pt = make_bundle_point(geo, s.fiber(geo.n) + vec({0.3, 0.0}).head(geo.n), pq);
            const auto f = lifted_orthonormal_frame(geo, pt);
            for (std::size_t a = 0; a < f.E.size(); ++a)
                for (std::size_t b = 0; b < f.E.size(); ++b)
                    EXPECT_NEAR(g_pq(geo, pt, f.E[a], f.E[b]), a == b ? 1.0 : 0.0, 1e-12) << spec.name;
        }
    }
}

// Closed-form frame formulas that disagree with the oracle; see tests/data/discrepancies.json.
TEST(Sectional, LedgeredFrameMismatchStillReproduces) {
    const auto geo = base_geometry(normal_spec(), std::vector<double>{0.0, 1.25});
    const auto pt = make_bundle_point(geo, vec({1.0, 0.0}), {1.0, 1.0});
    const auto f = lifted_orthonormal_frame(geo, pt);
    EXPECT_GT(table_dev(sectional_frame(geo, pt, f), sectional_frame_general(geo, pt, f)), 1e-3);
}

TEST(Scalar, LedgeredClosedFormMismatchStillReproduces) {
    const auto geo = base_geometry(normal_spec(), std::vector<double>{0.0, 1.0});
    const auto pt = make_bundle_point(geo, vec({1.0, 0.0}), {0.0, 0.0});
    const auto f = lifted_orthonormal_frame(geo, pt);
    const auto o = oracle_evaluate(geo, pt);
    EXPECT_GT(std::abs(scalar_pq(geo, pt, f) - o.scalar), 1e-3);
}

TEST(Scalar, FlatSasakiIsZero) {
    Sampler s(107);
    const auto spec = sasaki_flat_spec();
    const auto geo = base_geometry(spec, s.base_point(spec));
    const auto pt = make_bundle_point(geo, s.fiber(2), {0.0, 0.0});
    const auto f = lifted_orthonormal_frame(geo, pt);
    EXPECT_EQ(scalar_pq(geo, pt, f), 0.0);
    EXPECT_LE(std::abs(oracle_evaluate(geo, pt).scalar), 1e-13);
}

// ---------------------------------------------------------------------------
// Norm identity
// ---------------------------------------------------------------------------

TEST(NormIdentityProperty, HoldsForEveryModel) {
    Sampler s(109);
    std::vector<ManifoldSpec> specs = riemannian_specs();
    specs.push_back(pseudo_offdiag());
    for (const auto& spec : specs) {
        for (int k = 0; k < 20; ++k) {
            const auto geo = base_geometry(spec, s.base_point(spec));
            const Vec u = s.fiber(geo.n);
            const auto r = norm_identity_check(geo, u);
            EXPECT_LE(r.deviation(), 1e-11 * std::max(1.0, std::abs(r.lhs))) << spec.name;
            if (spec.signature == Signature::Riemannian) {
                const auto pt = make_bundle_point(geo, u, {0.0, 0.0});
                const auto fr = norm_identity_frame(geo, u, lifted_orthonormal_frame(geo, pt).e);
                EXPECT_NEAR(fr.lhs, r.lhs, 1e-11 * std::max(1.0, std::abs(r.lhs)));
                EXPECT_NEAR(fr.rhs, r.rhs, 1e-11 * std::max(1.0, std::abs(r.rhs)));
            }
        }
    }
}

TEST(NormIdentity, CurvedBaseIsNontrivial) {
    const auto geo = base_geometry(curved_statistical_spec(), std::vector<double>{0.3, 1.5});
    EXPECT_GT(norm_identity_check(geo, vec({0.4, -0.7})).lhs, 1e-4);
}

// ---------------------------------------------------------------------------
// Structure report
// ---------------------------------------------------------------------------

TEST(Structure, FlatSkewnessModelIsCandidateOnlyAtZeroParameters) {
    const auto spec = euclid_deformed_ab();
    const auto r = constant_curvature_check(spec, {0.0, 0.0}, 20, 42);
    EXPECT_TRUE(r.constant_curvature_candidate);
    EXPECT_LE(r.max_curvature_pq, 1e-8);
    EXPECT_FALSE(constant_curvature_check(spec, {1.0, 0.0}, 20, 42).constant_curvature_candidate);
}

TEST(Structure, NormalModelIsNotCandidate) {
    const auto r = constant_curvature_check(normal_spec(), {0.0, 0.0}, 20, 42);
    EXPECT_FALSE(r.constant_curvature_candidate);
    EXPECT_GT(r.max_nablaK, 0.1);
    EXPECT_TRUE(r.codazzi_ok);
}

TEST(Structure, FibersTotallyGeodesicAtZeroParameters) {
    for (const auto& e : catalog()) {
        const auto r = constant_curvature_check(e.spec, {0.0, 0.0}, 10, 7);
        EXPECT_TRUE(r.fibers_totally_geodesic) << e.name;
    }
    EXPECT_FALSE(constant_curvature_check(normal_spec(), {1.0, 0.0}, 10, 7).fibers_totally_geodesic);
}

TEST(Structure, IncompressibleFlowWithoutSkewness) {
    EXPECT_TRUE(constant_curvature_check(sasaki_flat_spec(), {1.0, 1.0}, 10, 7).flow_incompressible);
    EXPECT_FALSE(constant_curvature_check(exponential_spec(), {1.0, 1.0}, 10, 7).flow_incompressible);
}

TEST(Structure, IsDeterministicInSeed) {
    const auto a = constant_curvature_check(curved_statistical_spec(), {1.0, 0.5}, 15, 3);
    const auto b = constant_curvature_check(curved_statistical_spec(), {1.0, 0.5}, 15, 3);
    EXPECT_EQ(a.max_R, b.max_R);
    EXPECT_EQ(a.max_divergence, b.max_divergence);
    EXPECT_EQ(a.points, 15);
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

TEST(Geodesic, SpeedIsConserved) {
    Sampler s(113);
    for (const auto& spec : riemannian_specs()) {
        for (MetricParams pq : {MetricParams{0.0, 0.0}, MetricParams{1.0, 0.5}, MetricParams{2.0, 1.0}}) {
            const auto x0 = s.base_point(spec);
            const Vec u0 = s.fiber(spec.dim) * 0.5;
            const LiftedVector v{random_vec(s, spec.dim, 0.3), random_vec(s, spec.dim, 0.3)};
            const auto traj = integrate_geodesic(spec, pq, x0, u0, v, {0.5, 1e-3, 10});
            ASSERT_EQ(traj.size(), 51u);
            EXPECT_LE(speed_drift(traj), 1e-9) << spec.name;
        }
    }
}

TEST(Geodesic, FlatBaseHorizontalLineKeepsFiber) {
    const auto spec = sasaki_flat_spec();
    const std::vector<double> x0{1.0, 1.0};
    const auto traj = integrate_geodesic(spec, {0.0, 0.0}, x0, vec({0.5, -0.5}),
                                         LiftedVector::horizontal(vec({0.2, 0.1})), {1.0, 1e-2, 100});
    const auto& last = traj.back();
    EXPECT_NEAR(last.t, 1.0, 1e-12);
    EXPECT_NEAR(last.x[0], 1.2, 1e-12);
    EXPECT_NEAR(last.x[1], 1.1, 1e-12);
    EXPECT_NEAR(last.u[0], 0.5, 1e-12);
    EXPECT_NEAR(last.u[1], -0.5, 1e-12);
}

TEST(Geodesic, RejectsBadStep) {
    EXPECT_THROW(integrate_geodesic(sasaki_flat_spec(), {0.0, 0.0}, {1.0, 1.0}, vec({0.0, 0.0}),
                                    LiftedVector::zero(2), {1.0, 0.0, 1}),
                 UsageError);
}
