#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace varfrac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

/// Half-open parameter interval [lo, hi) along a ray; hi may be +inf.
struct RayInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Surface measure of the unit sphere S^{N-1}: 2 for N=1, 2*pi for N=2.
double sphere_measure(int dim);

/// Open bounded base domain: an interval, a ball or a simple polygon.
class DomainSpec {
 public:
  enum class Kind { interval, ball, polygon };

  static DomainSpec interval(double a, double b);
  /// dim=1 yields the interval (c-r, c+r).
  static DomainSpec ball(Vec2 center, double radius, int dim = 2);
  /// Vertices of a simple polygon, either orientation, no repeated closing vertex.
  static DomainSpec polygon(std::vector<Vec2> vertices);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double lower() const { return a_; }
  double upper() const { return b_; }
  Vec2 center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  /// Strict (open set) membership.
  bool contains(Vec2 p) const;
  /// Distance to the boundary for any point (0 on the boundary).
  double boundary_distance(Vec2 p) const;
  /// Sorted ray parameters t > 0 where p + t*dir crosses the boundary.
  std::vector<double> ray_crossings(Vec2 p, Vec2 dir) const;
  /// Pieces of the ray p + t*dir (t > 0) lying inside the domain.
  std::vector<RayInterval> ray_inside(Vec2 p, Vec2 dir) const;
  /// First boundary hit along the ray from an interior point; nullopt if none.
  std::optional<double> first_hit(Vec2 p, Vec2 dir) const;

  bool is_convex() const;
  double diameter() const;
  double volume() const;
  /// Axis-aligned bounding box as {min, max}.
  std::pair<Vec2, Vec2> bounding_box() const;
  /// Roughly evenly spaced points on the boundary (all polygon vertices included).
  std::vector<Vec2> boundary_samples(int count) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::interval;
  int dim_ = 1;
  double a_ = 0.0, b_ = 1.0;
  Vec2 center_{};
  double radius_ = 1.0;
  std::vector<Vec2> vertices_;
};

/// Uniform lattice over the bounding box with interior mask and distance field.
struct Grid {
  DomainSpec domain;
  int dim = 1;
  double dx = 0.0;
  Vec2 origin{};
  int nx = 0;
  int ny = 1;
  std::vector<Vec2> nodes;
  std::vector<double> dist;
  std::vector<std::uint8_t> interior;
  /// Grid node index -> unknown index, -1 for non-interior nodes.
  std::vector<int> unknown_of;
  /// Unknown index -> grid node index.
  std::vector<int> interior_nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  int num_interior() const { return static_cast<int>(interior_nodes.size()); }
  int index(int i, int j) const { return j * nx + i; }
  /// Node at integer lattice offset from a node, or -1 if outside the box.
  int offset(int node, int di, int dj) const;
  /// Nearest lattice node to a point, -1 if outside the box.
  int locate(Vec2 p) const;
};

Grid build_grid(const DomainSpec& domain, double dx);

/// Point-symmetric centred set: whole space or unions of closed double cones.
struct SigmaSpec {
  enum class Kind { full_space, symmetric_double_cone, symmetric_union_of_cones };
  struct Cone {
    double axis_angle = 0.0;
    double half_angle = 0.0;
  };

  Kind kind = Kind::full_space;
  std::vector<Cone> cones;
  double q = 1.0;

  static SigmaSpec full_space(double q = 1.0);
  static SigmaSpec double_cone(double axis_angle, double half_angle, double q);
  static SigmaSpec union_of_cones(std::vector<Cone> cones, double q);

  /// Centred-frame membership; cone boundaries count as inside.
  bool contains(Vec2 z, int dim) const;
  /// Angular fraction of the sphere covered (the annulus density of a cone set).
  double angular_density(int dim) const;
};

/// Law for the interaction radius rho(x) = scale * d(x)^exponent.
struct RhoLaw {
  double scale = 1.0;
  double exponent = 0.0;
  double operator()(double d) const { return exponent == 0.0 ? scale : scale * std::pow(d, exponent); }
};

/// Multiplicative perturbation of rho decaying in time: rho(t,x) = rho(x) (1 + amplitude e^{-rate t}).
struct TimeDecay {
  double amplitude = 0.0;
  double rate = 0.0;
  double factor(double t) const { return 1.0 + amplitude * (rate == 0.0 ? 1.0 : std::exp(-rate * t)); }
  bool active() const { return amplitude != 0.0; }
};

/// The rule x -> Omega(x) together with the centred set Sigma and locality fraction zeta.
struct DomainFamily {
  enum class Rule { constant, ball_radius, star_shaped, masked };

  Rule rule = Rule::constant;
  SigmaSpec sigma;
  double zeta = 0.4;
  RhoLaw rho;
  TimeDecay time;

  bool stationary() const { return !(rule == Rule::ball_radius && time.active()); }
  double radius_at(double d, double t) const { return rho(d) * time.factor(t); }
  std::string rule_name() const;
};

/// y in Omega(x) (resp. Omega(t,x)). Star-shaped visibility samples the segment at dx/4.
bool membership(const DomainFamily& family, const Grid& grid, Vec2 x, Vec2 y,
                std::optional<double> t = std::nullopt);

/// Continuum pieces of the ray from x in direction dir that lie in Omega(x).
std::vector<RayInterval> family_ray_extent(const DomainFamily& family, const DomainSpec& domain,
                                           Vec2 x, Vec2 dir, double t = 0.0);

struct ValidationRow {
  int node = -1;
  Vec2 point{};
  std::string check;
  bool pass = true;
  double value = 0.0;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool locality_ok = true;
  bool symmetry_ok = true;
  bool density_ok = true;
  bool continuity_ok = true;

  bool ok() const { return locality_ok && symmetry_ok && density_ok && continuity_ok; }
  std::vector<ValidationRow> violations() const;
  void write_csv(std::ostream& out) const;
};

ValidationReport validate_family(const DomainFamily& family, const Grid& grid,
                                 std::uint64_t seed = 1);

/// Monte-Carlo annulus density of Sigma on B_{2r} minus B_r.
double measured_annulus_density(const SigmaSpec& sigma, int dim, double r, int samples,
                                std::uint64_t seed);

struct DensitySample {
  Vec2 boundary_point{};
  double rho = 0.0;
  double ratio = 0.0;
};

struct DensityCertificate {
  double rho0 = 0.0;
  double kappa = 0.0;
  std::vector<DensitySample> samples;
};

/// Exterior density |B_rho(p) \ Omega| / |B_rho(p)|; exact for intervals and balls,
/// stratified Monte-Carlo for polygons.
double exterior_ratio(const DomainSpec& domain, Vec2 p, double rho, int samples,
                      std::uint64_t seed);

DensityCertificate density_certificate(const DomainSpec& domain, double rho0, int samples,
                                       std::uint64_t seed = 1);

}  // namespace varfrac
