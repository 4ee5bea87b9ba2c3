#pragma once

/**
 * @file curvature_pq.hpp
 * @brief Closed-form curvature components of g_{p,q} on coordinate lifts.
 *
 * Each of the twelve component formulas is transcribed term by term. The
 * notation maps as follows:
 *   (nabla_X Rt)(u,Z,Y)  ->  (nabla_X Rt)(u,Z)Y
 *   (nabla_Y R)(X,Z,u)   ->  (nabla_Y R)(X,Z)u
 *   K_X Y                ->  K(X,Y)
 * Slots with V first are obtained from antisymmetry in the first two slots.
 */

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cgtm/cgbundle.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

enum class Lift { H, V };

/// Verbatim uses the displayed component formulas as printed. Corrected replaces
/// the leading (1/alpha^p) Rt(X,Y)Z of {VVH}^H by its antisymmetric part in (X,Y),
/// which is what the induced-coordinate oracle produces when R is not Levi-Civita.
enum class FormulaVariant { Verbatim, Corrected };

namespace detail {

/// Shared per-point quantities and shorthand used by the component formulas.
struct CurvCtx {
    const BaseGeometry& geo;
    const BundlePoint& pt;
    Vec u;
    double p, q, a, ap, tau, oqt;
    ScaleFactors s;
    FormulaVariant variant;

    CurvCtx(const BaseGeometry& g, const BundlePoint& b, FormulaVariant v = FormulaVariant::Verbatim)
        : geo(g), pt(b), u(b.u), p(b.p()), q(b.q()), a(b.alpha), ap(b.alpha_p()), tau(b.tau),
          oqt(b.one_q_tau()), s(scale_factors(b)), variant(v) {}

    double G(const Vec& X, const Vec& Y) const { return geo.gv(X, Y); }
    double GV(const Vec& X, const Vec& Y) const { return gpq_vv(geo, pt, X, Y); }
    Vec K(const Vec& X, const Vec& Y) const { return geo.Kv(X, Y); }
    Vec R(const Vec& X, const Vec& Y, const Vec& Z) const { return geo.Rv(X, Y, Z); }
    Vec Rt(const Vec& X, const Vec& Y, const Vec& Z) const { return geo.Rtv(X, Y, Z); }
    Vec dK(const Vec& W, const Vec& X, const Vec& Y) const { return geo.dK(W, X, Y); }
    Vec dR(const Vec& W, const Vec& X, const Vec& Y, const Vec& Z) const { return geo.dR(W, X, Y, Z); }
    Vec dRt(const Vec& W, const Vec& X, const Vec& Y, const Vec& Z) const { return geo.dRt(W, X, Y, Z); }
    /// W - q/(1+q tau) g(W,u) u
    Vec P(const Vec& W) const { return W - q / oqt * G(W, u) * u; }
};

inline Vec hhh_h(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double q = c.q;
    const Vec RXZu = c.R(X, Z, u), RYZu = c.R(Y, Z, u), RXYu = c.R(X, Y, u);
    const Vec Ruu_Y = c.Rt(u, u, Y), Ruu_X = c.Rt(u, u, X), Ruu_Z = c.Rt(u, u, Z);
    Vec out = c.R(X, Y, Z) + c.dK(Y, X, Z) - c.dK(X, Y, Z) + c.K(X, c.K(Y, Z)) - c.K(Y, c.K(X, Z));
    out += (1.0 / (4.0 * c.ap)) *
           (c.Rt(u, RXZu, Y) + q * c.G(RXZu, u) * Ruu_Y - c.Rt(u, RYZu, X) - q * c.G(RYZu, u) * Ruu_X +
            2.0 * c.Rt(u, RXYu, Z) + 2.0 * q * c.G(RXYu, u) * Ruu_Z);
    return out;
}

inline Vec hhh_v(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a;
    const Vec Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec RXZu = c.R(X, Z, u), RYZu = c.R(Y, Z, u), RXYu = c.R(X, Y, u);
    Vec out = 0.5 * (c.dR(Y, X, Z, u) - c.dR(X, Y, Z, u));
    out += 0.5 * (c.K(X, RYZu) - c.R(Y, c.K(X, Z), u) - c.K(Y, RXZu) + c.R(X, c.K(Y, Z), u));
    out += (p / (2.0 * a)) * (c.G(Kyu, u) * RXZu - c.G(Kxu, u) * RYZu + 2.0 * c.G(Kzu, u) * RXYu);
    out += (q / 2.0) * c.G(RYZu, u) * c.P(Kxu);
    out -= (q / 2.0) * c.G(RXZu, u) * c.P(Kyu);
    out -= q * c.G(RXYu, u) * c.P(Kzu);
    out -= c.K(RXYu, Z);
    return out;
}

inline Vec hhv_h(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const Vec RXYu = c.R(X, Y, u);
    const Vec Ruu_X = c.Rt(u, u, X), Ruu_Y = c.Rt(u, u, Y);
    const double gzu = c.G(Z, u);
    Vec out = -(p / a) * Kuu * c.GV(Z, RXYu);
    out += (1.0 / ap) * (c.K(RXYu, Z) + q * Kzu * c.G(RXYu, u) + q * c.K(RXYu, u) * gzu);
    out += (1.0 / (2.0 * ap)) * (c.dRt(X, u, Z, Y) - c.dRt(Y, u, Z, X));
    out += (q / ap) * (c.G(KYZ, u) * Ruu_X - c.G(KXZ, u) * Ruu_Y);
    out += (q / (2.0 * ap)) * gzu * (c.dRt(X, u, u, Y) - c.dRt(Y, u, u, X));
    out += (p * q / (2.0 * ap * a)) * gzu * (c.G(Kxu, u) * Ruu_Y - c.G(Kyu, u) * Ruu_X);
    out += (p / (2.0 * ap * a)) * (c.G(Kxu, u) * c.Rt(u, Z, Y) - c.G(Kyu, u) * c.Rt(u, Z, X));
    out += (1.0 / (2.0 * ap)) * (c.K(Y, c.Rt(u, Z, X)) - c.K(X, c.Rt(u, Z, Y)));
    out += (q / (2.0 * ap)) * gzu * (c.K(Y, Ruu_X) - c.K(X, Ruu_Y));
    out += (1.0 / (2.0 * ap)) * (c.Rt(u, KXZ, Y) + q * c.G(KXZ, u) * Ruu_Y - c.Rt(u, KYZ, X) - q * c.G(KYZ, u) * Ruu_X);
    out += (q / (2.0 * ap)) * gzu * (c.Rt(u, Kxu, Y) - c.Rt(u, Kyu, X));
    return out;
}

inline Vec hhv_v(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap, oqt = c.oqt;
    const Vec Kxu = c.K(X, u), Kyu = c.K(Y, u);
    const Vec RXYu = c.R(X, Y, u);
    const double gzu = c.G(Z, u);
    Vec out = c.R(X, Y, Z) - (p / a) * (c.G(RXYu, u) * Z + gzu * RXYu);
    out += c.s.M * c.G(RXYu, Z) * u + c.s.N * c.G(RXYu, u) * gzu * u;
    out += (1.0 / (4.0 * ap)) * (c.R(Y, c.Rt(u, Z, X), u) + q * gzu * c.R(Y, c.Rt(u, u, X), u) -
                                 c.R(X, c.Rt(u, Z, Y), u) - q * gzu * c.R(X, c.Rt(u, u, Y), u));
    out += q * gzu * (c.dK(Y, X, u) - c.dK(X, Y, u));
    out += c.dK(Y, X, Z) - c.dK(X, Y, Z) + c.K(X, c.K(Y, Z)) - c.K(Y, c.K(X, Z));
    out += q * c.G(Kxu, Z) * c.P(Kyu) - q * c.G(Kyu, Z) * c.P(Kxu);
    const double br = 2.0 * c.G(c.K(Y, Kxu), u) - c.G(c.dK(Y, X, u), u) - 2.0 * c.G(c.K(X, Kyu), u) +
                      c.G(c.dK(X, Y, u), u);
    out += br * ((q * q / oqt) * gzu * u + (p / a) * Z);
    out += q * gzu * (c.K(X, Kyu) - c.K(Y, Kxu));
    return out;
}

inline Vec hvh_h(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kzu = c.K(Z, u);
    const Vec KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const Vec RXZu = c.R(X, Z, u);
    const Vec Ruu_Z = c.Rt(u, u, Z), Ruu_X = c.Rt(u, u, X);
    const double gyu = c.G(Y, u);
    Vec out = (1.0 / (2.0 * ap)) * c.dRt(X, u, Y, Z) + (q / (2.0 * ap)) * gyu * c.dRt(X, u, u, Z) -
              (q / ap) * c.G(c.K(X, Y), u) * Ruu_Z;
    out += (p / (ap * a)) * c.G(Kxu, u) * (c.Rt(u, Y, Z) + q * gyu * Ruu_Z);
    out -= (1.0 / (2.0 * ap)) * c.K(X, c.Rt(u, Y, Z));
    out += (p * q / (2.0 * ap * a)) * c.G(Kzu, u) * gyu * Ruu_X;
    out -= (q / (2.0 * ap)) * gyu * c.K(X, Ruu_Z);
    out += (p / (2.0 * ap * a)) * c.G(Kzu, u) * c.Rt(u, Y, X);
    out -= (1.0 / (2.0 * ap)) * (c.Rt(u, KYZ, X) + q * c.G(KYZ, u) * Ruu_X);
    out -= (q / (2.0 * ap)) * gyu * c.Rt(u, Kzu, X);
    out += (1.0 / (2.0 * ap)) * (c.Rt(u, Y, KXZ) + q * gyu * c.Rt(u, u, KXZ));
    out -= (p / (2.0 * a)) * Kuu * c.GV(Y, RXZu);
    out += (1.0 / (2.0 * ap)) * c.K(Y, RXZu) + (q / (2.0 * ap)) * gyu * c.K(u, RXZu);
    out += (q / (2.0 * ap)) * c.K(Y, u) * c.G(RXZu, u);
    return out;
}

inline Vec hvh_v(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap, oqt = c.oqt;
    const Vec Kxu = c.K(X, u), Kzu = c.K(Z, u);
    const Vec KXY = c.K(X, Y), KYZ = c.K(Y, Z), KXZ = c.K(X, Z);
    const Vec RXZu = c.R(X, Z, u);
    const double gyu = c.G(Y, u), gKxuu = c.G(Kxu, u), gKzuu = c.G(Kzu, u);
    Vec out = 2.0 * q * c.G(KXY, u) * c.P(Kzu) - c.dK(X, Y, Z);
    out += (c.G(c.dK(X, Z, u), u) - 2.0 * c.G(c.K(X, Kzu), u)) * ((q * q / oqt) * gyu * u + (p / a) * Y);
    out -= q * gyu * c.dK(X, Z, u);
    out += (2.0 * p * q * q / (a * oqt) + q * q * q / (oqt * oqt)) * gyu * gKzuu * gKxuu * u;
    out += (p * (2.0 + p) / (a * a)) * gKxuu * gKzuu * Y;
    out += q * c.G(KYZ, u) * c.P(Kxu);
    out -= (q * p / a) * gyu * gKzuu * Kxu;
    out -= (p / a) * gKxuu * KYZ;
    out -= q * gyu * ((p / a) * gKxuu * Kzu - c.K(X, Kzu));
    out -= (p / a) * gKzuu * KXY;
    out += (p / a) * c.G(c.K(u, KXZ), u) * Y;
    out += c.K(X, KYZ) - c.K(Y, KXZ);
    out -= q * gyu * c.P(c.K(u, KXZ));
    out -= (1.0 / (4.0 * ap)) * c.R(X, c.Rt(u, Y, Z), u);
    out -= (q / (4.0 * ap)) * gyu * c.R(X, c.Rt(u, u, Z), u);
    out -= (p / (2.0 * a)) * (gyu * RXZu + c.G(RXZu, u) * Y);
    out += (1.0 / (2.0 * a * oqt)) * ((q * a + p) * c.G(Y, RXZu) + p * q * gyu * c.G(RXZu, u)) * u;
    out += 0.5 * c.R(X, Z, Y);
    return out;
}

inline Vec hvv_h(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap, oqt = c.oqt;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec KXY = c.K(X, Y), KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const Vec Ruu_X = c.Rt(u, u, X);
    const double gyu = c.G(Y, u), gzu = c.G(Z, u), gKxuu = c.G(Kxu, u), gvyz = c.GV(Y, Z);
    const double two_ap_sq = (2.0 * ap) * (2.0 * ap);
    Vec out = -(p * (p + 2.0) / (a * a)) * gKxuu * Kuu * gvyz;
    out += (p / (2.0 * ap * a)) * gyu * c.Rt(u, Z, X);
    out += (1.0 / (2.0 * ap * a)) * (p * c.G(Y, Z) + p * q * gyu * gzu) * Ruu_X;
    out -= (1.0 / (2.0 * ap)) * c.Rt(Y, Z, X);
    out -= ((p + q * a) / (2.0 * ap * a)) * gzu * c.Rt(u, Y, X);
    out -= (q / (2.0 * ap)) * gzu * c.Rt(Y, u, X);
    out -= (1.0 / two_ap_sq) * (c.Rt(u, Y, c.Rt(u, Z, X)) + q * gyu * c.Rt(u, u, c.Rt(u, Z, X)));
    out -= (q / ap) * c.G(KXZ, u) * Kyu;
    out -= (q / two_ap_sq) * gzu * (c.Rt(u, Y, Ruu_X) + q * gyu * c.Rt(u, u, Ruu_X));
    out += (1.0 / ap) * c.dK(X, Y, Z) - (p / a) * gvyz * c.dK(X, u, u);
    out += (q / ap) * (gyu * c.dK(X, Z, u) + gzu * c.dK(X, Y, u));
    out -= (2.0 * q / ap) * c.G(KXY, u) * Kzu;
    out += (p * q / (ap * a)) * gyu * gKxuu * Kzu;
    out += (1.0 / ap) * (c.K(Y, KXZ) - c.K(X, KYZ));
    out += (q / ap) * gzu * (c.K(Y, Kxu) - c.K(X, Kyu));
    out -= (q * q * (q * a - p * oqt) / (oqt * ap * a)) * gyu * gzu * gKxuu * Kuu;
    out -= (p / a) * Kuu *
           (-2.0 * c.GV(KXY, Z) - (2.0 * q / ap) * gyu * c.G(KXZ, u) + c.GV(Y, KXZ) + q * gzu * c.GV(Y, Kxu));
    out += (q / ap) * gyu * (c.K(u, KXZ) + q * gzu * c.K(u, Kxu));
    out += (p / (ap * a)) * gKxuu * KYZ;
    out -= (q / ap) * gyu * c.K(X, Kzu);
    out += (p * q / (ap * a)) * gKxuu * gzu * Kyu;
    out += (p / a) * gvyz * c.K(X, Kuu);
    return out;
}

inline Vec hvv_v(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap, oqt = c.oqt, tau = c.tau;
    const double M = c.s.M, N = c.s.N, Mp = c.s.Mp, Np = c.s.Np;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec KXY = c.K(X, Y), KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const double gyu = c.G(Y, u), gzu = c.G(Z, u), gKxuu = c.G(Kxu, u);
    Vec out = -(1.0 / (2.0 * ap)) * c.R(X, KYZ, u) + (p / (2.0 * a)) * c.GV(Y, Z) * c.R(X, Kuu, u);
    out -= (q / (2.0 * ap)) * (gyu * c.R(X, Kzu, u) + gzu * c.R(X, Kyu, u));
    {
        const Vec W = c.K(u, c.Rt(u, Z, X));
        out -= (1.0 / (2.0 * ap)) * ((p / a) * c.G(W, u) * Y - c.K(Y, c.Rt(u, Z, X)) - q * gyu * c.P(W));
    }
    {
        const Vec Ruu_X = c.Rt(u, u, X);
        const Vec W = c.K(u, Ruu_X);
        out -= (q / (2.0 * ap)) * gzu * ((p / a) * c.G(W, u) * Y - c.K(Y, Ruu_X) - q * gyu * c.P(W));
    }
    out += (p / a) * c.G(KXZ, u) * Y - M * c.G(KXY, Z) * u;
    out -= N * c.G(KXZ, u) * gyu * u;
    out += (M * q - 2.0 * N - 2.0 * q * q / oqt) * c.G(KXY, u) * gzu * u;
    out += (p / a + q) * gzu * KXY;
    out += (-2.0 * Mp + (M * tau - 1.0) * q * q / oqt) * gKxuu * c.G(Y, Z) * u;
    out -= (p / a) * c.G(Y, Z) * Kxu;
    out += (2.0 * q * q * q / (oqt * oqt) - 2.0 * Np - q * q * M / oqt) * gyu * gzu * gKxuu * u;
    out -= ((2.0 * p * oqt + p * q * a + q * q * a * a) / (a * a * oqt)) * gKxuu * gzu * Y;
    return out;
}

inline Vec vvh_h(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const Vec RuY_Z = c.Rt(u, Y, Z), RuX_Z = c.Rt(u, X, Z), Ruu_Z = c.Rt(u, u, Z);
    const double gxu = c.G(X, u), gyu = c.G(Y, u);
    const double two_ap_sq = (2.0 * ap) * (2.0 * ap);
    Vec out = c.variant == FormulaVariant::Verbatim ? Vec((1.0 / ap) * c.Rt(X, Y, Z))
                                                    : Vec((0.5 / ap) * (c.Rt(X, Y, Z) - c.Rt(Y, X, Z)));
    out -= ((2.0 * p + q * a) / (2.0 * ap * a)) * (gxu * RuY_Z - gyu * RuX_Z);
    out -= (q / (2.0 * ap)) * (gxu * c.Rt(Y, u, Z) - gyu * c.Rt(X, u, Z));
    out += (1.0 / two_ap_sq) * (c.Rt(u, X, RuY_Z) + q * gxu * c.Rt(u, u, RuY_Z) - c.Rt(u, Y, RuX_Z) -
                                q * gyu * c.Rt(u, u, RuX_Z));
    out += (q / two_ap_sq) * (gyu * c.Rt(u, X, Ruu_Z) - gxu * c.Rt(u, Y, Ruu_Z));
    out += (1.0 / ap) * (c.K(Y, KXZ) - c.K(X, KYZ));
    out -= (q / ap) * (gxu * c.K(u, KYZ) - gyu * c.K(u, KXZ) + Kxu * c.G(KYZ, u) - Kyu * c.G(KXZ, u) +
                       gyu * c.K(X, Kzu) - gxu * c.K(Y, Kzu));
    out += (p / a) * Kuu *
           (c.GV(X, KYZ) + q * gyu * c.GV(X, Kzu) - c.GV(Y, KXZ) - q * gxu * c.GV(Y, Kzu));
    return out;
}

inline Vec vvh_v(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap, oqt = c.oqt;
    const Vec Kzu = c.K(Z, u);
    const Vec KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const Vec RuY_Z = c.Rt(u, Y, Z), RuX_Z = c.Rt(u, X, Z), Ruu_Z = c.Rt(u, u, Z);
    const Vec KuRuY_Z = c.K(u, RuY_Z), KuRuX_Z = c.K(u, RuX_Z);
    const double gxu = c.G(X, u), gyu = c.G(Y, u);
    Vec out = (p / (2.0 * ap * a)) * (c.G(KuRuY_Z, u) * X - c.G(KuRuX_Z, u) * Y);
    out += (1.0 / (2.0 * ap)) * (c.K(Y, RuX_Z) - c.K(X, RuY_Z));
    out += (q / (2.0 * ap)) * gxu * ((q / oqt) * c.G(KuRuY_Z, u) * u - KuRuY_Z);
    out += (q / (2.0 * ap)) * gyu * (KuRuX_Z - (q / oqt) * c.G(KuRuX_Z, u) * u);
    out += (p * q / (2.0 * ap * a)) * c.G(c.K(u, Ruu_Z), u) * (gyu * X - gxu * Y);
    out += (q / (2.0 * ap)) * (gxu * c.K(Y, Ruu_Z) - gyu * c.K(X, Ruu_Z));
    out += ((p + q * a) / a) * (gxu * KYZ - gyu * KXZ);
    out -= (p / a) * (c.G(KYZ, u) * X - c.G(KXZ, u) * Y);
    out += c.s.M * (c.G(Y, KXZ) - c.G(X, KYZ)) * u;
    out += ((p * q + q * q * a) / (a * oqt) + 2.0 * p / (a * a)) * c.G(Kzu, u) * (gyu * X - gxu * Y);
    out += (q * q / oqt) * (gyu * c.G(c.K(Z, X), u) - gxu * c.G(c.K(Z, Y), u)) * u;
    return out;
}

inline Vec vvv_h(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap;
    const double a2p = ap * ap;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const double gxu = c.G(X, u), gyu = c.G(Y, u), gzu = c.G(Z, u);
    Vec out = (1.0 / (2.0 * a2p)) *
              (c.Rt(u, X, KYZ) + q * gxu * c.Rt(u, u, KYZ) - c.Rt(u, Y, KXZ) - q * gyu * c.Rt(u, u, KXZ));
    out += (p / (2.0 * ap * a)) * ((c.Rt(u, Y, Kuu) + q * gyu * c.Rt(u, u, Kuu)) * c.GV(X, Z) -
                                   (c.Rt(u, X, Kuu) + q * gxu * c.Rt(u, u, Kuu)) * c.GV(Y, Z));
    out += (q / (2.0 * a2p)) * gzu * (c.Rt(u, X, Kyu) - c.Rt(u, Y, Kxu));
    out += (q / (2.0 * a2p)) * (gyu * c.Rt(u, X, Kzu) - gxu * c.Rt(u, Y, Kzu));
    out += (q * q / (2.0 * a2p)) * gzu * (gxu * c.Rt(u, u, Kyu) - gyu * c.Rt(u, u, Kxu));
    out += (2.0 * p / (ap * a * a) + c.s.M * q / ap) * (gxu * c.G(Y, Z) - gyu * c.G(X, Z)) * Kuu;
    out += ((p + q * a) / (ap * a)) * (gyu * KXZ - gxu * KYZ);
    out -= (p / (ap * a)) * (c.G(Y, Z) * Kxu - c.G(X, Z) * Kyu);
    return out;
}

inline Vec vvv_v(const CurvCtx& c, const Vec& X, const Vec& Y, const Vec& Z) {
    const Vec& u = c.u;
    const double p = c.p, q = c.q, a = c.a, ap = c.ap, tau = c.tau;
    const double M = c.s.M, N = c.s.N, Mp = c.s.Mp;
    const Vec Kuu = c.K(u, u), Kxu = c.K(X, u), Kyu = c.K(Y, u), Kzu = c.K(Z, u);
    const Vec KXZ = c.K(X, Z), KYZ = c.K(Y, Z);
    const Vec KuKuu = c.K(u, Kuu);
    const double gxu = c.G(X, u), gyu = c.G(Y, u), gzu = c.G(Z, u);
    const double gvxz = c.GV(X, Z), gvyz = c.GV(Y, Z);
    Vec out = -(p * p / (a * a)) * c.G(KuKuu, u) * (gvyz * X - gvxz * Y);
    out += (p / a) * gvyz * (c.K(X, Kuu) + q * gxu * c.P(KuKuu));
    out -= (p / a) * gvxz * (c.K(Y, Kuu) + q * gyu * c.P(KuKuu));
    out += (p / (ap * a)) * (c.G(c.K(u, KYZ), u) * X - c.G(c.K(u, KXZ), u) * Y);
    out += (1.0 / ap) * (c.K(Y, KXZ) - c.K(X, KYZ));
    out -= (q / ap) * gxu * c.P(c.K(u, KYZ));
    out += (q / ap) * gyu * c.P(c.K(u, KXZ));
    out += (p * q / (ap * a)) * c.G(c.K(u, Kzu), u) * (gyu * X - gxu * Y);
    out += (q / ap) * (gxu * c.K(Y, Kzu) - gyu * c.K(X, Kzu));
    out += (q / ap) * gzu *
           ((p / a) * c.G(c.K(u, Kyu), u) * X - (p / a) * c.G(c.K(u, Kxu), u) * Y + (c.K(Y, Kxu) - c.K(X, Kyu)) -
            q * gxu * c.P(c.K(u, Kyu)) + q * gyu * c.P(c.K(u, Kxu)));
    out += (((tau * N * a + 2.0 - p) * p - N * a * a) / (a * a)) * gzu * (gxu * Y - gyu * X);
    out += (2.0 * Mp + M * (M + N * tau) - N) * (c.G(Y, Z) * gxu - c.G(X, Z) * gyu) * u;
    out += ((p * (M * tau - 1.0) - M * a) / a) * (c.G(X, Z) * Y - c.G(Y, Z) * X);
    return out;
}

}  // namespace detail

inline const char* lift_name(Lift l) { return l == Lift::H ? "H" : "V"; }

/**
 * R^{p,q}(A,B)C on lifts of base vectors X, Y, Z, slots chosen by `a`, `b`, `cs`.
 * Mixed cases with a vertical first slot use R(X^V,Y^H) = -R(Y^H,X^V).
 */
inline LiftedVector curvature_pq(const BaseGeometry& geo, const BundlePoint& pt, Lift a, Lift b, Lift cs,
                                 const Vec& X, const Vec& Y, const Vec& Z,
                                 FormulaVariant variant = FormulaVariant::Verbatim) {
    if (!(pt.one_q_tau() > kBMqMargin)) throw OutsideBMq("point outside BM_q");
    const detail::CurvCtx c(geo, pt, variant);
    using namespace detail;
    if (a == Lift::V && b == Lift::H) {
        auto r = curvature_pq(geo, pt, Lift::H, Lift::V, cs, Y, X, Z, variant);
        return -r;
    }
    if (a == Lift::H && b == Lift::H)
        return cs == Lift::H ? LiftedVector{hhh_h(c, X, Y, Z), hhh_v(c, X, Y, Z)}
                             : LiftedVector{hhv_h(c, X, Y, Z), hhv_v(c, X, Y, Z)};
    if (a == Lift::H)
        return cs == Lift::H ? LiftedVector{hvh_h(c, X, Y, Z), hvh_v(c, X, Y, Z)}
                             : LiftedVector{hvv_h(c, X, Y, Z), hvv_v(c, X, Y, Z)};
    return cs == Lift::H ? LiftedVector{vvh_h(c, X, Y, Z), vvh_v(c, X, Y, Z)}
                         : LiftedVector{vvv_h(c, X, Y, Z), vvv_v(c, X, Y, Z)};
}

/// Coordinate-lift form: slots plus base indices i, j, k.
inline LiftedVector curvature_pq(const BaseGeometry& geo, const BundlePoint& pt, Lift a, Lift b, Lift cs, int i,
                                 int j, int k, FormulaVariant variant = FormulaVariant::Verbatim) {
    return curvature_pq(geo, pt, a, b, cs, geo.basis(i), geo.basis(j), geo.basis(k), variant);
}

/// Full adapted-frame table T(d, c, a, b) = (R(E_a, E_b) E_c)^d from the closed forms.
inline Tensor<double> curvature_pq_table(const BaseGeometry& geo, const BundlePoint& pt,
                                         FormulaVariant variant = FormulaVariant::Verbatim) {
    const int n = geo.n, m = 2 * n;
    Tensor<double> T(m, 4, 0.0);
    auto lift = [n](int idx) { return idx < n ? Lift::H : Lift::V; };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                const auto r = curvature_pq(geo, pt, lift(a), lift(b), lift(c), a % n, b % n, c % n, variant);
                for (int d = 0; d < n; ++d) {
                    T(d, c, a, b) = r.h[d];
                    T(n + d, c, a, b) = r.v[d];
                }
            }
    return T;
}

/// The twelve displayed components, in display order.
struct ComponentId {
    Lift a, b, c;
    bool vertical_part;
    std::string name() const {
        return std::string("{") + lift_name(a) + lift_name(b) + lift_name(c) + "}^" + (vertical_part ? "V" : "H");
    }
};

inline std::vector<ComponentId> curvature_components() {
    std::vector<ComponentId> ids;
    const std::pair<Lift, Lift> pairs[] = {{Lift::H, Lift::H}, {Lift::H, Lift::V}, {Lift::V, Lift::V}};
    for (auto [a, b] : pairs)
        for (Lift c : {Lift::H, Lift::V})
            for (bool v : {false, true}) ids.push_back({a, b, c, v});
    return ids;
}

}  // namespace cgtm
