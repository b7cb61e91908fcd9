#include "varfrac/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "varfrac/errors.hpp"

namespace varfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); };
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

Vec2 unit(Vec2 v) {
  const double n = v.norm();
  return n > 0.0 ? v * (1.0 / n) : v;
}

// Area of the intersection of two discs.
double lens_area(double r1, double r2, double dist) {
  if (dist >= r1 + r2) return 0.0;
  if (dist <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return std::numbers::pi * r * r;
  }
  const double a1 = std::acos(std::clamp((dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2), -1.0, 1.0));
  const double k = 0.5 * std::sqrt(std::max(0.0, (-dist + r1 + r2) * (dist + r1 - r2) *
                                                     (dist - r1 + r2) * (dist + r1 + r2)));
  return r1 * r1 * a1 + r2 * r2 * a2 - k;
}

}  // namespace

double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

// ---------------------------------------------------------------- DomainSpec

DomainSpec DomainSpec::interval(double a, double b) {
  if (!(a < b)) throw ConfigError("interval requires a < b");
  DomainSpec d;
  d.kind_ = Kind::interval;
  d.dim_ = 1;
  d.a_ = a;
  d.b_ = b;
  return d;
}

DomainSpec DomainSpec::ball(Vec2 center, double radius, int dim) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be positive");
  if (dim == 1) return interval(center.x - radius, center.x + radius);
  if (dim != 2) throw ConfigError("only dimensions 1 and 2 are supported");
  DomainSpec d;
  d.kind_ = Kind::ball;
  d.dim_ = 2;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw ConfigError("polygon needs at least three vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += vertices[i].cross(vertices[(i + 1) % n]);
  if (std::abs(area2) <= 0.0) throw ConfigError("polygon has zero area");
  if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
  // simple: no two non-adjacent edges cross
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
        throw ConfigError("polygon is self-intersecting");
    }
  }
  DomainSpec d;
  d.kind_ = Kind::polygon;
  d.dim_ = 2;
  d.vertices_ = std::move(vertices);
  return d;
}

bool DomainSpec::contains(Vec2 p) const {
  switch (kind_) {
    case Kind::interval:
      return p.x > a_ && p.x < b_;
    case Kind::ball:
      return (p - center_).norm() < radius_;
    case Kind::polygon: {
      bool inside = false;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = vertices_[i], b = vertices_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
          const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
          if (p.x < xc) inside = !inside;
        }
      }
      if (!inside) return false;
      return boundary_distance(p) > 1e-14 * (1.0 + diameter());
    }
  }
  return false;
}

double DomainSpec::boundary_distance(Vec2 p) const {
  switch (kind_) {
    case Kind::interval:
      return std::min(std::abs(p.x - a_), std::abs(b_ - p.x));
    case Kind::ball:
      return std::abs(radius_ - (p - center_).norm());
    case Kind::polygon: {
      double best = kInf;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
      return best;
    }
  }
  return 0.0;
}

std::vector<double> DomainSpec::ray_crossings(Vec2 p, Vec2 dir) const {
  std::vector<double> ts;
  dir = unit(dir);
  switch (kind_) {
    case Kind::interval: {
      if (dir.x == 0.0) break;
      for (double e : {a_, b_}) {
        const double t = (e - p.x) / dir.x;
        if (t > 0.0) ts.push_back(t);
      }
      break;
    }
    case Kind::ball: {
      const Vec2 m = p - center_;
      const double b = m.dot(dir);
      const double c = m.norm2() - radius_ * radius_;
      const double disc = b * b - c;
      if (disc <= 0.0) break;
      const double sq = std::sqrt(disc);
      for (double t : {-b - sq, -b + sq})
        if (t > 0.0) ts.push_back(t);
      break;
    }
    case Kind::polygon: {
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices_[i], e = vertices_[(i + 1) % n] - a;
        const double denom = dir.cross(e);
        if (denom == 0.0) continue;
        const Vec2 ap = a - p;
        const double t = ap.cross(e) / denom;
        const double u = ap.cross(dir) / denom;
        if (t > 0.0 && u >= -1e-14 && u <= 1.0 + 1e-14) ts.push_back(t);
      }
      break;
    }
  }
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || t - out.back() > 1e-13 * (1.0 + t)) out.push_back(t);
  return out;
}

std::vector<RayInterval> DomainSpec::ray_inside(Vec2 p, Vec2 dir) const {
  dir = unit(dir);
  const auto cross = ray_crossings(p, dir);
  std::vector<double> bps{0.0};
  bps.insert(bps.end(), cross.begin(), cross.end());
  bps.push_back(kInf);
  std::vector<RayInterval> out;
  const double far = 2.0 * diameter() + 1.0;
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double lo = bps[k], hi = bps[k + 1];
    const double mid = std::isinf(hi) ? lo + far : 0.5 * (lo + hi);
    if (!contains(p + dir * mid)) continue;
    if (!out.empty() && out.back().hi == lo)
      out.back().hi = hi;
    else
      out.push_back({lo, hi});
  }
  return out;
}

std::optional<double> DomainSpec::first_hit(Vec2 p, Vec2 dir) const {
  const auto pieces = ray_inside(p, dir);
  if (pieces.empty() || pieces.front().lo != 0.0 || std::isinf(pieces.front().hi))
    return std::nullopt;
  return pieces.front().hi;
}

bool DomainSpec::is_convex() const {
  if (kind_ != Kind::polygon) return true;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (e1.cross(e2) < 0.0) return false;
  }
  return true;
}

double DomainSpec::diameter() const {
  switch (kind_) {
    case Kind::interval:
      return b_ - a_;
    case Kind::ball:
      return 2.0 * radius_;
    case Kind::polygon: {
      double best = 0.0;
      for (const auto& a : vertices_)
        for (const auto& b : vertices_) best = std::max(best, (a - b).norm());
      return best;
    }
  }
  return 0.0;
}

double DomainSpec::volume() const {
  switch (kind_) {
    case Kind::interval:
      return b_ - a_;
    case Kind::ball:
      return std::numbers::pi * radius_ * radius_;
    case Kind::polygon: {
      double area2 = 0.0;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) area2 += vertices_[i].cross(vertices_[(i + 1) % n]);
      return 0.5 * std::abs(area2);
    }
  }
  return 0.0;
}

std::pair<Vec2, Vec2> DomainSpec::bounding_box() const {
  switch (kind_) {
    case Kind::interval:
      return {{a_, 0.0}, {b_, 0.0}};
    case Kind::ball:
      return {center_ - Vec2{radius_, radius_}, center_ + Vec2{radius_, radius_}};
    case Kind::polygon: {
      Vec2 lo{kInf, kInf}, hi{-kInf, -kInf};
      for (const auto& v : vertices_) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
      }
      return {lo, hi};
    }
  }
  return {};
}

std::vector<Vec2> DomainSpec::boundary_samples(int count) const {
  std::vector<Vec2> pts;
  switch (kind_) {
    case Kind::interval:
      pts = {{a_, 0.0}, {b_, 0.0}};
      break;
    case Kind::ball:
      for (int k = 0; k < count; ++k) {
        const double th = 2.0 * std::numbers::pi * k / count;
        pts.push_back(center_ + Vec2{std::cos(th), std::sin(th)} * radius_);
      }
      break;
    case Kind::polygon: {
      double perim = 0.0;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) perim += (vertices_[(i + 1) % n] - vertices_[i]).norm();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
        const int m = std::max(1, static_cast<int>(std::round(count * (b - a).norm() / perim)));
        for (int k = 0; k < m; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / m));
      }
      break;
    }
  }
  return pts;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::interval:
      os << "interval(" << a_ << "," << b_ << ")";
      break;
    case Kind::ball:
      os << "ball((" << center_.x << "," << center_.y << ")," << radius_ << ")";
      break;
    case Kind::polygon:
      os << "polygon(" << vertices_.size() << " vertices)";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------- Grid

int Grid::offset(int node, int di, int dj) const {
  const int i = node % nx + di;
  const int j = node / nx + dj;
  if (i < 0 || i >= nx || j < 0 || j >= ny) return -1;
  return index(i, j);
}

int Grid::locate(Vec2 p) const {
  const int i = static_cast<int>(std::lround((p.x - origin.x) / dx));
  const int j = dim == 2 ? static_cast<int>(std::lround((p.y - origin.y) / dx)) : 0;
  if (i < 0 || i >= nx || j < 0 || j >= ny) return -1;
  return index(i, j);
}

Grid build_grid(const DomainSpec& domain, double dx) {
  if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive");
  Grid g;
  g.domain = domain;
  g.dim = domain.dim();
  g.dx = dx;
  const auto [lo, hi] = domain.bounding_box();
  if (domain.kind() == DomainSpec::Kind::ball) {
    const int k = static_cast<int>(std::ceil(domain.radius() / dx - 1e-9));
    g.origin = domain.center() - Vec2{k * dx, k * dx};
    g.nx = g.ny = 2 * k + 1;
  } else {
    g.origin = lo;
    g.nx = static_cast<int>(std::ceil((hi.x - lo.x) / dx - 1e-9)) + 1;
    g.ny = g.dim == 2 ? static_cast<int>(std::ceil((hi.y - lo.y) / dx - 1e-9)) + 1 : 1;
  }
  const int total = g.nx * g.ny;
  g.nodes.resize(total);
  g.dist.assign(total, 0.0);
  g.interior.assign(total, 0);
  g.unknown_of.assign(total, -1);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.index(i, j);
      const Vec2 p = g.origin + Vec2{i * dx, g.dim == 2 ? j * dx : 0.0};
      g.nodes[n] = p;
      if (!domain.contains(p)) continue;
      const double d = domain.boundary_distance(p);
      if (d <= 1e-12 * dx) continue;
      g.dist[n] = d;
      g.interior[n] = 1;
      g.unknown_of[n] = static_cast<int>(g.interior_nodes.size());
      g.interior_nodes.push_back(n);
    }
  }
  if (g.interior_nodes.empty())
    throw ConfigError("grid spacing " + std::to_string(dx) + " too coarse: no interior nodes in " +
                      domain.describe());
  return g;
}

// ----------------------------------------------------------------- SigmaSpec

SigmaSpec SigmaSpec::full_space(double q) {
  SigmaSpec s;
  s.q = q;
  return s;
}

SigmaSpec SigmaSpec::double_cone(double axis_angle, double half_angle, double q) {
  if (!(half_angle > 0.0 && half_angle <= std::numbers::pi / 2))
    throw ConfigError("cone half-angle must lie in (0, pi/2]");
  SigmaSpec s;
  s.kind = Kind::symmetric_double_cone;
  s.cones = {{axis_angle, half_angle}};
  s.q = q;
  return s;
}

SigmaSpec SigmaSpec::union_of_cones(std::vector<Cone> cones, double q) {
  if (cones.empty()) throw ConfigError("cone union is empty");
  for (const auto& c : cones)
    if (!(c.half_angle > 0.0 && c.half_angle <= std::numbers::pi / 2))
      throw ConfigError("cone half-angle must lie in (0, pi/2]");
  SigmaSpec s;
  s.kind = Kind::symmetric_union_of_cones;
  s.cones = std::move(cones);
  s.q = q;
  return s;
}

bool SigmaSpec::contains(Vec2 z, int dim) const {
  if (kind == Kind::full_space || dim == 1) return true;
  if (z.x == 0.0 && z.y == 0.0) return true;
  const double phi = std::atan2(z.y, z.x);
  for (const auto& c : cones) {
    const double delta = std::abs(std::remainder(phi - c.axis_angle, std::numbers::pi));
    if (delta <= c.half_angle + 1e-12) return true;
  }
  return false;
}

double SigmaSpec::angular_density(int dim) const {
  if (kind == Kind::full_space || dim == 1) return 1.0;
  // union of arcs on the projective circle [0, pi)
  constexpr double pi = std::numbers::pi;
  std::vector<std::pair<double, double>> arcs;
  for (const auto& c : cones) {
    if (c.half_angle >= pi / 2) return 1.0;
    double lo = std::fmod(c.axis_angle - c.half_angle, pi);
    if (lo < 0) lo += pi;
    const double hi = lo + 2.0 * c.half_angle;
    if (hi <= pi) {
      arcs.emplace_back(lo, hi);
    } else {
      arcs.emplace_back(lo, pi);
      arcs.emplace_back(0.0, hi - pi);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  double covered = 0.0, cur_lo = arcs[0].first, cur_hi = arcs[0].second;
  for (std::size_t k = 1; k < arcs.size(); ++k) {
    if (arcs[k].first <= cur_hi) {
      cur_hi = std::max(cur_hi, arcs[k].second);
    } else {
      covered += cur_hi - cur_lo;
      cur_lo = arcs[k].first;
      cur_hi = arcs[k].second;
    }
  }
  covered += cur_hi - cur_lo;
  return std::min(1.0, covered / pi);
}

double measured_annulus_density(const SigmaSpec& sigma, int dim, double r, int samples,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int hits = 0;
  for (int k = 0; k < samples; ++k) {
    Vec2 z;
    if (dim == 1) {
      const double rad = r + r * uni(rng);
      z = {uni(rng) < 0.5 ? -rad : rad, 0.0};
    } else {
      // uniform in the annulus: radius by inverse CDF of the area
      const double rad = std::sqrt(r * r + 3.0 * r * r * uni(rng));
      const double th = 2.0 * std::numbers::pi * uni(rng);
      z = {rad * std::cos(th), rad * std::sin(th)};
    }
    if (sigma.contains(z, dim)) ++hits;
  }
  return static_cast<double>(hits) / samples;
}

// ------------------------------------------------------------- DomainFamily

std::string DomainFamily::rule_name() const {
  switch (rule) {
    case Rule::constant:
      return "constant";
    case Rule::ball_radius:
      return "ball_radius";
    case Rule::star_shaped:
      return "star_shaped";
    case Rule::masked:
      return "masked";
  }
  return "unknown";
}

bool membership(const DomainFamily& family, const Grid& grid, Vec2 x, Vec2 y,
                std::optional<double> t) {
  const DomainSpec& dom = grid.domain;
  if (!dom.contains(y)) return false;
  switch (family.rule) {
    case DomainFamily::Rule::constant:
      return true;
    case DomainFamily::Rule::ball_radius: {
      // open ball; the relative slack keeps lattice points at distance exactly rho out on
      // both sides despite rounding in y - x
      const double rho = family.radius_at(dom.boundary_distance(x), t.value_or(0.0));
      return (y - x).norm() < rho * (1.0 - 1e-12);
    }
    case DomainFamily::Rule::star_shaped: {
      const double len = (y - x).norm();
      const int steps = static_cast<int>(std::ceil(len / (0.25 * grid.dx)));
      for (int k = 1; k < steps; ++k) {
        if (!dom.contains(x + (y - x) * (static_cast<double>(k) / steps))) return false;
      }
      return true;
    }
    case DomainFamily::Rule::masked:
      return family.sigma.contains(y - x, grid.dim);
  }
  return false;
}

std::vector<RayInterval> family_ray_extent(const DomainFamily& family, const DomainSpec& domain,
                                           Vec2 x, Vec2 dir, double t) {
  auto inside = domain.ray_inside(x, dir);
  switch (family.rule) {
    case DomainFamily::Rule::constant:
      return inside;
    case DomainFamily::Rule::ball_radius: {
      const double rho = family.radius_at(domain.boundary_distance(x), t);
      std::vector<RayInterval> out;
      for (auto piece : inside) {
        if (piece.lo >= rho) break;
        piece.hi = std::min(piece.hi, rho);
        out.push_back(piece);
      }
      return out;
    }
    case DomainFamily::Rule::star_shaped:
      if (!inside.empty() && inside.front().lo == 0.0) return {inside.front()};
      return {};
    case DomainFamily::Rule::masked:
      if (family.sigma.contains(dir, domain.dim())) return inside;
      return {};
  }
  return {};
}

// ---------------------------------------------------------------- validation

std::vector<ValidationRow> ValidationReport::violations() const {
  std::vector<ValidationRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
               [](const ValidationRow& r) { return !r.pass; });
  return out;
}

void ValidationReport::write_csv(std::ostream& out) const {
  out << "node,x,y,check,pass,value\n";
  for (const auto& r : rows) {
    out << r.node << ',' << r.point.x << ',' << r.point.y << ',' << r.check << ','
        << (r.pass ? 1 : 0) << ',' << r.value << '\n';
  }
}

ValidationReport validate_family(const DomainFamily& family, const Grid& grid,
                                 std::uint64_t seed) {
  ValidationReport rep;
  const int dim = grid.dim;

  // locality: Omega~(x) agrees with Sigma inside B_{zeta d(x)}
  for (int n : grid.interior_nodes) {
    const Vec2 x = grid.nodes[n];
    const double r = family.zeta * grid.dist[n];
    const int k = static_cast<int>(std::floor(r / grid.dx));
    int mismatches = 0;
    for (int dj = (dim == 2 ? -k : 0); dj <= (dim == 2 ? k : 0); ++dj) {
      for (int di = -k; di <= k; ++di) {
        if (di == 0 && dj == 0) continue;
        const int m = grid.offset(n, di, dj);
        if (m < 0) continue;
        const Vec2 y = grid.nodes[m];
        if ((y - x).norm() > r) continue;
        if (membership(family, grid, x, y) != family.sigma.contains(y - x, dim)) ++mismatches;
      }
    }
    double value = static_cast<double>(mismatches);
    bool pass = mismatches == 0;
    if (family.rule == DomainFamily::Rule::ball_radius) {
      value = family.radius_at(grid.dist[n], 0.0) - r;
      pass = pass && value >= 0.0;
    }
    if (family.rule != DomainFamily::Rule::masked &&
        family.sigma.kind != SigmaSpec::Kind::full_space)
      pass = false;
    rep.rows.push_back({n, x, "locality", pass, value});
    rep.locality_ok = rep.locality_ok && pass;
  }

  // point symmetry of Sigma
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int mismatches = 0;
    for (int k = 0; k < 4096; ++k) {
      const Vec2 z{uni(rng), dim == 2 ? uni(rng) : 0.0};
      if (family.sigma.contains(z, dim) != family.sigma.contains(-z, dim)) ++mismatches;
    }
    rep.symmetry_ok = mismatches == 0;
    rep.rows.push_back({-1, {}, "sigma_symmetry", rep.symmetry_ok, static_cast<double>(mismatches)});
  }

  // annulus density of Sigma
  {
    const double diam = grid.domain.diameter();
    constexpr int samples = 20000;
    int idx = 0;
    for (double frac : {0.5, 0.05, 0.005}) {
      const double r = frac * diam;
      const double p = measured_annulus_density(family.sigma, dim, r, samples, seed + 17 + idx++);
      const double slack = 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) / samples);
      const bool pass = p + slack >= family.sigma.q;
      rep.rows.push_back({-1, {r, 0.0}, "sigma_density", pass, p});
      rep.density_ok = rep.density_ok && pass;
    }
  }

  // continuity of x -> Omega(x): symmetric-difference volume shrinks with the shift
  {
    const auto [lo, hi] = grid.domain.bounding_box();
    const double box = dim == 2 ? (hi.x - lo.x) * (hi.y - lo.y) : (hi.x - lo.x);
    std::mt19937_64 rng(seed + 101);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    constexpr int samples = 4000;
    std::vector<Vec2> pts(samples);
    for (auto& p : pts) p = {ux(rng), dim == 2 ? uy(rng) : 0.0};
    std::vector<int> picks;
    for (int n : grid.interior_nodes)
      if (grid.dist[n] > 2.0 * grid.dx) picks.push_back(n);
    const std::size_t stride = std::max<std::size_t>(1, picks.size() / 12);
    for (std::size_t k = 0; k < picks.size(); k += stride) {
      const int n = picks[k];
      const Vec2 x = grid.nodes[n];
      std::vector<double> vols;
      for (double shift : {grid.dx, grid.dx / 4, grid.dx / 16}) {
        const Vec2 y = x + Vec2{shift, 0.0};
        int diff = 0;
        for (const auto& p : pts)
          if (membership(family, grid, x, p) != membership(family, grid, y, p)) ++diff;
        vols.push_back(box * diff / samples);
      }
      const bool pass = vols.back() <= vols.front();
      rep.rows.push_back({n, x, "continuity", pass, vols.back()});
      rep.continuity_ok = rep.continuity_ok && pass;
    }
  }
  return rep;
}

// --------------------------------------------------------- density condition

double exterior_ratio(const DomainSpec& domain, Vec2 p, double rho, int samples,
                      std::uint64_t seed) {
  switch (domain.kind()) {
    case DomainSpec::Kind::interval: {
      const double lo = std::max(p.x - rho, domain.lower());
      const double hi = std::min(p.x + rho, domain.upper());
      const double inside = std::max(0.0, hi - lo);
      return 1.0 - inside / (2.0 * rho);
    }
    case DomainSpec::Kind::ball: {
      const double inside = lens_area(rho, domain.radius(), (p - domain.center()).norm());
      return 1.0 - inside / (std::numbers::pi * rho * rho);
    }
    case DomainSpec::Kind::polygon: {
      // stratified jittered samples in the disc
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      const int m = std::max(4, static_cast<int>(std::sqrt(samples * 4.0 / std::numbers::pi)));
      int total = 0, outside = 0;
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
          const Vec2 z{-1.0 + 2.0 * (i + uni(rng)) / m, -1.0 + 2.0 * (j + uni(rng)) / m};
          if (z.norm2() >= 1.0) continue;
          ++total;
          if (!domain.contains(p + z * rho)) ++outside;
        }
      }
      return static_cast<double>(outside) / total;
    }
  }
  return 0.0;
}

DensityCertificate density_certificate(const DomainSpec& domain, double rho0, int samples,
                                       std::uint64_t seed) {
  if (!(rho0 > 0.0)) throw ConfigError("density certificate needs rho0 > 0");
  if (samples < 16) throw ConfigError("density certificate needs at least 16 samples");
  const auto pts = domain.boundary_samples(64);
  if (pts.empty()) throw ConfigError("degenerate boundary sampling");
  DensityCertificate cert;
  cert.rho0 = rho0;
  cert.kappa = 1.0;
  std::uint64_t stream = seed;
  for (const auto& p : pts) {
    for (double f : {1.0, 0.5, 0.25, 0.125}) {
      const double rho = rho0 * f;
      const double ratio = exterior_ratio(domain, p, rho, samples, stream++);
      cert.samples.push_back({p, rho, ratio});
      cert.kappa = std::min(cert.kappa, ratio);
    }
  }
  return cert;
}

}  // namespace varfrac
