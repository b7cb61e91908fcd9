#pragma once

#include <vector>

#include "varfrac/geometry.hpp"

namespace varfrac {

/// Directions on S^{N-1} with weights summing to its measure. In 1D the two
/// directions carry unit (counting) weight; in 2D a midpoint rule in angle.
struct AngularRule {
  std::vector<Vec2> dirs;
  std::vector<double> weights;
};

AngularRule angular_rule(int dim, int count);

/// Integral of r^{-1-2s} over [lo, hi); hi may be +inf.
double radial_tail(double lo, double hi, double s);

/// Integral of |x-y|^{-N-2s} over the complement of the domain, radially exact.
double complement_integral(const DomainSpec& domain, Vec2 x, double s, const AngularRule& rule);

/// Integral over sigma of d(x,sigma)^{-2s}, d(x,sigma) the first boundary hit of the ray.
/// Throws GeometryError if some ray from x never leaves the domain.
double visibility_integral(const DomainSpec& domain, Vec2 x, double s, const AngularRule& rule);

/// Integral of |x-y|^{-N-2s} over Omega(x) minus the convex set `inner` (which contains x).
double family_tail_integral(const DomainFamily& family, const DomainSpec& domain,
                            const DomainSpec& inner, Vec2 x, double s, const AngularRule& rule,
                            double t = 0.0);

}  // namespace varfrac
