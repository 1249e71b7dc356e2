#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "kachanov/fem.hpp"
#include "kachanov/material.hpp"

namespace kachanov {

/// Nodal scalar damage in [0, cap]. Values never decrease across steps; any
/// node reaching the cap marks the state degenerate.
struct DamageField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;
    double cap = 0.999;

    static DamageField zero(const Mesh& m, double cap = 0.999) {
        return {&m, std::vector<double>(m.num_vertices(), 0.0), cap};
    }
};

/// Damage-process models. G1 is the stress-driven rate
/// 0.008 (2/3 (1+nu) sigma_eq^2 + 3 (1-2nu) sigma_H^2); G2 scales it by
/// 0.00625; G0 is the damage-free reference. Custom rescales a base model
/// and ConstantRate is a fixed-rate seam for integrator probes.
enum class GKind { G0, G1, G2, Custom, ConstantRate };

struct DamageProcess {
    GKind kind = GKind::G0;
    ElasticConstants elastic{};
    StressMeasure measure = StressMeasure::Literal2d;
    double scale = 1.0;       ///< Custom: multiplier applied to the base model
    GKind base = GKind::G1;   ///< Custom: the rescaled model
    double rate = 0.0;        ///< ConstantRate: the fixed nonnegative rate
};

/// The G1 expression evaluated on a given stress tensor (exposed separately
/// so tests can feed stresses directly).
inline double g1_from_stress(const Stress2& s, double nu,
                             StressMeasure mode = StressMeasure::Literal2d) {
    const StressScalars m = stress_scalars(s, nu, mode);
    return 0.008 * (2.0 / 3.0 * (1.0 + nu) * m.sigma_eq * m.sigma_eq +
                    3.0 * (1.0 - 2.0 * nu) * m.sigma_h * m.sigma_h);
}

/// Evaluates the damage process at one node: builds the strain from the
/// (projected) displacement gradient, forms the effective stress with the
/// current nodal damage, and returns the model rate. Always >= 0.
inline double eval_g(const DamageProcess& p, double t, const Grad2& grad, double d) {
    (void)t;  // the catalog models carry their time dependence through grad
    switch (p.kind) {
        case GKind::G0:
            return 0.0;
        case GKind::ConstantRate:
            return p.rate;
        case GKind::Custom: {
            DamageProcess base = p;
            base.kind = p.base;
            return p.scale * eval_g(base, t, grad, d);
        }
        default:
            break;
    }
    const Strain2 eps{grad.xx, grad.yy, 0.5 * (grad.xy + grad.yx)};
    const Stress2 s = stress(eps, d, p.elastic);
    const double g1 = g1_from_stress(s, p.elastic.nu(), p.measure);
    return p.kind == GKind::G2 ? 0.00625 * g1 : g1;
}

struct StepReport {
    double max_increment = 0.0;
    double max_damage = 0.0;
    bool degenerate = false;  ///< some node reached the cap
};

/// One explicit Euler step of d' = (1 - d)^(-alpha) g, nodewise, clamped at
/// the cap. Monotone because g >= 0.
inline StepReport euler_step(DamageField& d, const GradientField& w, const DamageProcess& p,
                             double alpha, double t, double dt) {
    StepReport report;
    const int nv = int(d.values.size());
    for (int i = 0; i < nv; ++i) {
        const double di = d.values[i];
        const double g = eval_g(p, t, w.at(i), di);
        const double next = std::min(d.cap, di + dt * std::pow(1.0 - di, -alpha) * g);
        d.values[i] = next;
        report.max_increment = std::max(report.max_increment, next - di);
        report.max_damage = std::max(report.max_damage, next);
        if (next >= d.cap) report.degenerate = true;
    }
    return report;
}

inline double linf_norm(const DamageField& d) { return linf_norm(std::span<const double>(d.values)); }

}  // namespace kachanov
