#pragma once

#include <cmath>

namespace kachanov {

/// Isotropic Lamé parameters; stress units follow the inputs.
struct ElasticConstants {
    double lambda = 121.15;
    double mu = 80.77;

    double nu() const { return lambda / (2.0 * (lambda + mu)); }
};

/// Symmetric 2x2 stress tensor.
struct Stress2 {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
};

/// Symmetric 2x2 strain tensor.
struct Strain2 {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;
};

/// Effective stress of the damaged isotropic material,
/// sigma = (1 - d) (lambda tr(eps) I + 2 mu eps).
inline Stress2 stress(const Strain2& eps, double d, const ElasticConstants& c) {
    const double f = 1.0 - d;
    const double tr = eps.xx + eps.yy;
    return {f * (c.lambda * tr + 2.0 * c.mu * eps.xx),
            f * (c.lambda * tr + 2.0 * c.mu * eps.yy),
            f * 2.0 * c.mu * eps.xy};
}

/// Hydrostatic stress (1/3) tr(sigma); the 1/3 is applied to the 2x2 trace.
inline double hydrostatic(const Stress2& s) { return (s.xx + s.yy) / 3.0; }

/// von Mises stress sqrt(3/2 dev:dev) with dev = sigma - sigma_H I on 2x2
/// tensors. Note the 1/3-trace convention leaves a deviatoric residue for
/// planar hydrostatic states.
inline double von_mises(const Stress2& s) {
    const double sh = hydrostatic(s);
    const double dxx = s.xx - sh, dyy = s.yy - sh;
    return std::sqrt(1.5 * (dxx * dxx + dyy * dyy + 2.0 * s.xy * s.xy));
}

/// How the scalar stress measures treat the out-of-plane direction.
/// PlaneStrainAugmented completes the tensor with sigma_zz = nu (sxx + syy)
/// before taking trace and deviator; it is an extension, off by default.
enum class StressMeasure { Literal2d, PlaneStrainAugmented };

struct StressScalars {
    double sigma_h;
    double sigma_eq;
};

inline StressScalars stress_scalars(const Stress2& s, double nu, StressMeasure mode) {
    if (mode == StressMeasure::Literal2d) return {hydrostatic(s), von_mises(s)};
    const double szz = nu * (s.xx + s.yy);
    const double sh = (s.xx + s.yy + szz) / 3.0;
    const double dxx = s.xx - sh, dyy = s.yy - sh, dzz = szz - sh;
    return {sh, std::sqrt(1.5 * (dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * s.xy * s.xy))};
}

}  // namespace kachanov
