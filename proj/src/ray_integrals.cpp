#include "varfrac/ray_integrals.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "varfrac/errors.hpp"

namespace varfrac {

AngularRule angular_rule(int dim, int count) {
  AngularRule rule;
  if (dim == 1) {
    rule.dirs = {{1.0, 0.0}, {-1.0, 0.0}};
    rule.weights = {1.0, 1.0};
    return rule;
  }
  const double w = 2.0 * std::numbers::pi / count;
  rule.dirs.reserve(count);
  rule.weights.assign(count, w);
  for (int k = 0; k < count; ++k) {
    const double th = w * (k + 0.5);
    rule.dirs.push_back({std::cos(th), std::sin(th)});
  }
  return rule;
}

double radial_tail(double lo, double hi, double s) {
  if (!(hi > lo)) return 0.0;
  const double a = std::pow(lo, -2.0 * s);
  const double b = std::isinf(hi) ? 0.0 : std::pow(hi, -2.0 * s);
  return (a - b) / (2.0 * s);
}

double complement_integral(const DomainSpec& domain, Vec2 x, double s, const AngularRule& rule) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
    const auto inside = domain.ray_inside(x, rule.dirs[k]);
    double acc = 0.0;
    double cursor = 0.0;
    for (const auto& piece : inside) {
      if (piece.lo > cursor) acc += radial_tail(cursor, piece.lo, s);
      cursor = piece.hi;
    }
    if (cursor > 0.0 && !std::isinf(cursor)) acc += radial_tail(cursor, inf, s);
    total += rule.weights[k] * acc;
  }
  return total;
}

double visibility_integral(const DomainSpec& domain, Vec2 x, double s, const AngularRule& rule) {
  double total = 0.0;
  for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
    const auto hit = domain.first_hit(x, rule.dirs[k]);
    if (!hit) throw GeometryError("ray casting found no boundary hit from an interior point");
    total += rule.weights[k] * std::pow(*hit, -2.0 * s);
  }
  return total;
}

double family_tail_integral(const DomainFamily& family, const DomainSpec& domain,
                            const DomainSpec& inner, Vec2 x, double s, const AngularRule& rule,
                            double t) {
  double total = 0.0;
  for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
    const auto exit = inner.first_hit(x, rule.dirs[k]);
    if (!exit) throw GeometryError("localization set must contain the node");
    double acc = 0.0;
    for (const auto& piece : family_ray_extent(family, domain, x, rule.dirs[k], t)) {
      const double lo = std::max(piece.lo, *exit);
      acc += radial_tail(lo, piece.hi, s);
    }
    total += rule.weights[k] * acc;
  }
  return total;
}

}  // namespace varfrac
