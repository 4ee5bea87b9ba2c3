#pragma once

/**
 * @file sampling.hpp
 * @brief Seeded sample plans over the domain box of a spec.
 *
 * Draws are reproducible across platforms: uniforms come from the top 53 bits
 * of mt19937_64, never from std::uniform_real_distribution.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cgtm/cgbundle.hpp"
#include "cgtm/statman.hpp"

namespace cgtm {

inline constexpr double kFiberRadius = 2.0;
inline constexpr double kResampleMargin = 0.1;

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one value per call, the partner is dropped).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::vector<double> base_point(const ManifoldSpec& spec) {
        std::vector<double> x(spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
            auto [lo, hi] = domain_of(spec, i);
            x[i] = uniform(lo, hi);
        }
        return x;
    }

    /// Fiber vector with Euclidean component norm at most kFiberRadius.
    Vec fiber(int n) {
        Vec d(n);
        double len = 0.0;
        do {
            for (int i = 0; i < n; ++i) d[i] = normal();
            len = d.norm();
        } while (len < 1e-12);
        const double r = kFiberRadius * std::pow(uniform(), 1.0 / n);
        return d * (r / len);
    }

    Vec unit_direction(int n) {
        Vec d = fiber(n);
        while (d.norm() < 1e-6) d = fiber(n);
        return d.normalized();
    }

    std::mt19937_64& engine() { return rng_; }

    static std::pair<double, double> domain_of(const ManifoldSpec& spec, int i) {
        if (i < static_cast<int>(spec.domain.size())) return spec.domain[i];
        return {0.5, 2.0};
    }

private:
    std::mt19937_64 rng_;
};

struct SamplePoint {
    std::vector<double> x;
    Vec u;
};

/// Base/fiber draws; fibers are resampled until 1 + q tau and alpha = 1 + tau both exceed
/// kResampleMargin (alpha only binds for pseudo-Riemannian specs).
inline std::vector<SamplePoint> sample_plan(const ManifoldSpec& spec, MetricParams params, int count,
                                            std::uint64_t seed) {
    Sampler s(seed);
    std::vector<SamplePoint> plan;
    plan.reserve(count);
    for (int k = 0; k < count; ++k) {
        SamplePoint sp;
        sp.x = s.base_point(spec);
        const Mat g = metric_at(spec, sp.x).g;
        for (int attempt = 0;; ++attempt) {
            sp.u = s.fiber(spec.dim);
            const double tau = sp.u.dot(g * sp.u);
            if (1.0 + params.q * tau > kResampleMargin && 1.0 + tau > kResampleMargin) break;
            if (attempt > 1000) throw OutsideBMq("cannot draw an admissible fiber vector");
        }
        plan.push_back(std::move(sp));
    }
    return plan;
}

}  // namespace cgtm
