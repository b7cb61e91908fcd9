#include "varfrac/operator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "varfrac/errors.hpp"
#include "varfrac/parallel.hpp"
#include "varfrac/ray_integrals.hpp"

namespace varfrac {

namespace {

constexpr double kShellRadius = 2.0;  // in units of dx
constexpr double kDenseFill = 0.35;

struct ShellOffset {
  int di, dj;
  Vec2 z;
};

std::vector<ShellOffset> shell_offsets(const Grid& grid) {
  std::vector<ShellOffset> out;
  const int k = static_cast<int>(kShellRadius);
  for (int dj = (grid.dim == 2 ? -k : 0); dj <= (grid.dim == 2 ? k : 0); ++dj) {
    for (int di = -k; di <= k; ++di) {
      if (di == 0 && dj == 0) continue;
      if (di * di + dj * dj > k * k) continue;
      out.push_back({di, dj, Vec2{di * grid.dx, dj * grid.dx}});
    }
  }
  return out;
}

Eigen::VectorXd interior_dist(const Grid& grid) {
  Eigen::VectorXd d(grid.num_interior());
  for (int u = 0; u < grid.num_interior(); ++u) d[u] = grid.dist[grid.interior_nodes[u]];
  return d;
}

}  // namespace

FracParams::FracParams(double s_, int dim_) : s(s_), dim(dim_) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0,1)");
  if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
}

std::string CoefficientProfile::name() const {
  switch (kind) {
    case Kind::killing:
      return "killing";
    case Kind::kinetic:
      return "kinetic";
    case Kind::synthetic:
      return "synthetic";
    case Kind::custom:
      return "custom";
  }
  return "unknown";
}

// ------------------------------------------------------------------ kernel

ShellRule shell_rule(const Grid& grid, const DomainFamily& family, const FracParams& params) {
  ShellRule rule;
  const int dim = grid.dim;
  const double s = params.s;
  const double cell = std::pow(grid.dx, dim);
  const auto offsets = shell_offsets(grid);
  rule.r_sing = kShellRadius * grid.dx;
  const double shell_volume = (offsets.size() + 1) * cell;
  rule.r_eff = dim == 1 ? 0.5 * shell_volume : std::sqrt(shell_volume / std::numbers::pi);
  rule.density = family.sigma.angular_density(dim);
  rule.mass = rule.density * sphere_measure(dim) * std::pow(rule.r_eff, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
  double moment = 0.0;
  for (const auto& o : offsets) {
    if (!family.sigma.contains(o.z, dim)) continue;
    moment += cell * std::pow(o.z.norm(), 2.0 - dim - 2.0 * s);
  }
  rule.scale = moment > 0.0 ? rule.mass / moment : 1.0;
  return rule;
}

namespace {

std::vector<WeightEntry> row_weights(const Grid& grid, const DomainFamily& family,
                                     const FracParams& params, const ShellRule& shell, int node,
                                     double t) {
  std::vector<WeightEntry> row;
  const Vec2 x = grid.nodes[node];
  const double cell = std::pow(grid.dx, grid.dim);
  const double expo = params.exponent();
  const double shell_cut = shell.r_sing * (1.0 + 1e-9);

  auto consider = [&](int m) {
    if (m == node || !grid.interior[m]) return;
    const Vec2 y = grid.nodes[m];
    if (!membership(family, grid, x, y, t)) return;
    const Vec2 z = y - x;
    const double r = z.norm();
    const double plain = cell / std::pow(r, expo);
    if (r <= shell_cut) {
      const int mirror = grid.locate(x - z);
      const bool paired = mirror >= 0 && grid.interior[mirror] &&
                          membership(family, grid, x, grid.nodes[mirror], t);
      if (paired) {
        row.push_back({m, shell.scale * plain, true});
        return;
      }
    }
    row.push_back({m, plain, false});
  };

  if (family.rule == DomainFamily::Rule::ball_radius) {
    const double rho = family.radius_at(grid.dist[node], t);
    const int k = static_cast<int>(std::ceil(rho / grid.dx));
    const int kj = grid.dim == 2 ? k : 0;
    for (int dj = -kj; dj <= kj; ++dj)
      for (int di = -k; di <= k; ++di) {
        const int m = grid.offset(node, di, dj);
        if (m >= 0) consider(m);
      }
  } else {
    for (int m : grid.interior_nodes) consider(m);
  }
  return row;
}

}  // namespace

std::vector<WeightEntry> kernel_weights(const Grid& grid, const DomainFamily& family,
                                        const FracParams& params, int node, double t) {
  if (node < 0 || node >= grid.size() || !grid.interior[node])
    throw ConfigError("kernel_weights requires an interior node");
  return row_weights(grid, family, params, shell_rule(grid, family, params), node, t);
}

// --------------------------------------------------------- DiscreteOperator

DiscreteOperator::DiscreteOperator(std::shared_ptr<const Grid> grid, std::vector<int> nodes,
                                   Eigen::VectorXd dist, Eigen::VectorXd h,
                                   SparseRowMatrix weights, DomainFamily family, FracParams params,
                                   double time)
    : grid_(std::move(grid)),
      nodes_(std::move(nodes)),
      dist_(std::move(dist)),
      h_(std::move(h)),
      weights_(std::move(weights)),
      family_(std::move(family)),
      params_(params),
      time_(time) {
  const int n = size();
  if (n == 0) throw ConfigError("operator has no unknowns");
  weights_.makeCompressed();
  l_diag_ = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (SparseRowMatrix::InnerIterator it(weights_, i); it; ++it) l_diag_[i] += it.value();
  storage_ = fill() > kDenseFill ? Storage::dense : Storage::sparse;
}

double DiscreteOperator::fill() const {
  const double n = size();
  return (weights_.nonZeros() + n) / (n * n);
}

Eigen::VectorXd DiscreteOperator::apply_l(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = l_diag_.cwiseProduct(u);
  out.noalias() -= weights_ * u;
  return out;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& u) const {
  return h_.cwiseProduct(u) + apply_l(u);
}

Eigen::MatrixXd DiscreteOperator::dense() const {
  Eigen::MatrixXd a = -Eigen::MatrixXd(weights_);
  a.diagonal() += h_ + l_diag_;
  return a;
}

SparseRowMatrix DiscreteOperator::sparse() const {
  SparseRowMatrix a = -weights_;
  SparseRowMatrix d(size(), size());
  std::vector<Eigen::Triplet<double>> diag;
  for (int i = 0; i < size(); ++i) diag.emplace_back(i, i, h_[i] + l_diag_[i]);
  d.setFromTriplets(diag.begin(), diag.end());
  a += d;
  a.makeCompressed();
  return a;
}

bool DiscreteOperator::m_matrix_pattern() const {
  for (int i = 0; i < weights_.outerSize(); ++i)
    for (SparseRowMatrix::InnerIterator it(weights_, i); it; ++it)
      if (it.value() < 0.0 || it.col() == i) return false;
  return (h_.array() > 0.0).all();
}

double DiscreteOperator::alpha_measured() const {
  return (h_.array() * dist_.array().pow(2.0 * params_.s)).minCoeff();
}

double DiscreteOperator::beta_measured() const {
  return (h_.array() * dist_.array().pow(2.0 * params_.s)).maxCoeff();
}

DiscreteOperator DiscreteOperator::diagonal_only() const {
  SparseRowMatrix empty(size(), size());
  return DiscreteOperator(grid_, nodes_, dist_, h_, empty, family_, params_, time_);
}

DiscreteOperator DiscreteOperator::scaled(double factor) const {
  SparseRowMatrix w = weights_ * factor;
  return DiscreteOperator(grid_, nodes_, dist_, h_ * factor, w, family_, params_, time_);
}

DiscreteOperator DiscreteOperator::with_h(Eigen::VectorXd h) const {
  if (h.size() != size()) throw ConfigError("coefficient vector has the wrong length");
  return DiscreteOperator(grid_, nodes_, dist_, std::move(h), weights_, family_, params_, time_);
}

Eigen::VectorXd DiscreteOperator::restrict(const GridFunction& u) const {
  if (u.size() != grid_->size()) throw ConfigError("grid function length does not match the grid");
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) out[i] = u[nodes_[i]];
  return out;
}

GridFunction DiscreteOperator::extend(const Eigen::VectorXd& u) const {
  GridFunction out = GridFunction::zeros(*grid_);
  for (int i = 0; i < size(); ++i) out[nodes_[i]] = u[i];
  return out;
}

void DiscreteOperator::write_triplets(std::ostream& out) const {
  out << "# s=" << params_.s << " dx=" << grid_->dx << " family=" << family_.rule_name()
      << " n=" << size() << " storage=" << (storage_ == Storage::dense ? "dense" : "sparse") << '\n';
  out << "row,col,value\n";
  out << std::setprecision(17);
  for (int i = 0; i < size(); ++i) {
    std::vector<std::pair<int, double>> entries{{i, h_[i] + l_diag_[i]}};
    for (SparseRowMatrix::InnerIterator it(weights_, i); it; ++it)
      entries.emplace_back(static_cast<int>(it.col()), -it.value());
    std::sort(entries.begin(), entries.end());
    for (const auto& [j, v] : entries) out << i << ',' << j << ',' << v << '\n';
  }
}

double apply_pv(const DiscreteOperator& op, const GridFunction& u, int node) {
  if (node < 0 || node >= op.grid().size() || !op.grid().interior[node])
    throw ConfigError("apply_pv requires an interior node");
  const int row = static_cast<int>(std::find(op.nodes().begin(), op.nodes().end(), node) - op.nodes().begin());
  if (row >= op.size()) throw ConfigError("node is not an unknown of this operator");
  double acc = 0.0;
  const double ux = u[node];
  for (SparseRowMatrix::InnerIterator it(op.weights(), row); it; ++it)
    acc += it.value() * (ux - u[op.nodes()[it.col()]]);
  return acc;
}

// ---------------------------------------------------------- coefficients

GridFunction killing_term(const Grid& grid, const DomainSpec& domain, const FracParams& params,
                          int angular_count) {
  const AngularRule rule = angular_rule(grid.dim, angular_count);
  GridFunction k = GridFunction::zeros(grid);
  parallel_for(grid.num_interior(), [&](int u) {
    const int n = grid.interior_nodes[u];
    k[n] = complement_integral(domain, grid.nodes[n], params.s, rule);
  });
  return k;
}

GridFunction kinetic_coefficient(const Grid& grid, const DomainSpec& domain,
                                 const FracParams& params, int angular_count) {
  const AngularRule rule = angular_rule(grid.dim, angular_count);
  const double gamma = std::tgamma(2.0 * params.s);
  GridFunction a = GridFunction::zeros(grid);
  parallel_for(grid.num_interior(), [&](int u) {
    const int n = grid.interior_nodes[u];
    a[n] = gamma * visibility_integral(domain, grid.nodes[n], params.s, rule);
  });
  return a;
}

GridFunction kinetic_coefficient_by_complement(const Grid& grid, const DomainSpec& domain,
                                               const FracParams& params, int angular_count) {
  const AngularRule rule = angular_rule(grid.dim, angular_count);
  const double gamma = std::tgamma(2.0 * params.s + 1.0);
  const double step = 0.25 * grid.dx;
  const double limit = 4.0 * domain.diameter() + grid.dx;
  GridFunction a = GridFunction::zeros(grid);
  parallel_for(grid.num_interior(), [&](int u) {
    const int n = grid.interior_nodes[u];
    const Vec2 x = grid.nodes[n];
    double total = 0.0;
    for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
      const Vec2 dir = rule.dirs[k];
      double lo = 0.0, hi = step;
      while (domain.contains(x + dir * hi)) {
        lo = hi;
        hi += step;
        if (hi > limit) throw GeometryError("ray marching did not leave the domain");
      }
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (domain.contains(x + dir * mid) ? lo : hi) = mid;
      }
      // complement of the star-shaped set along this ray is [exit, inf)
      total += rule.weights[k] * std::pow(0.5 * (lo + hi), -2.0 * params.s) / (2.0 * params.s);
    }
    a[n] = gamma * total;
  });
  return a;
}

GridFunction coefficient_field(const Grid& grid, const FracParams& params,
                               const CoefficientProfile& profile) {
  switch (profile.kind) {
    case CoefficientProfile::Kind::killing:
      return killing_term(grid, grid.domain, params, profile.angular_count);
    case CoefficientProfile::Kind::kinetic:
      return kinetic_coefficient(grid, grid.domain, params, profile.angular_count);
    case CoefficientProfile::Kind::synthetic: {
      GridFunction h = GridFunction::zeros(grid);
      for (int n : grid.interior_nodes) h[n] = profile.c * std::pow(grid.dist[n], -2.0 * params.s);
      return h;
    }
    case CoefficientProfile::Kind::custom: {
      if (static_cast<int>(profile.table.size()) != grid.size())
        throw ConfigError("custom coefficient table length does not match the grid");
      GridFunction h = GridFunction::zeros(grid);
      for (int n : grid.interior_nodes) h[n] = profile.table[n];
      return h;
    }
  }
  return {};
}

// --------------------------------------------------------------- assembly

namespace {

DiscreteOperator finish(std::shared_ptr<const Grid> grid, const DomainFamily& family,
                        const FracParams& params, const GridFunction& hfield,
                        const std::vector<std::vector<WeightEntry>>& rows, double t) {
  const int n = grid->num_interior();
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  trip.reserve(nnz);
  for (int i = 0; i < n; ++i)
    for (const auto& e : rows[i]) trip.emplace_back(i, grid->unknown_of[e.node], e.weight);
  SparseRowMatrix w(n, n);
  w.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i) h[i] = hfield[grid->interior_nodes[i]];
  Eigen::VectorXd dist = interior_dist(*grid);
  std::vector<int> nodes = grid->interior_nodes;
  return DiscreteOperator(std::move(grid), std::move(nodes), dist, h, w, family, params, t);
}

}  // namespace

DiscreteOperator assemble(std::shared_ptr<const Grid> grid, const DomainFamily& family,
                          const FracParams& params, const CoefficientProfile& profile, double t) {
  if (params.dim != grid->dim) throw ConfigError("operator dimension does not match the grid");
  const GridFunction hfield = coefficient_field(*grid, params, profile);
  for (int n : grid->interior_nodes) {
    const double scaled = hfield[n] * std::pow(grid->dist[n], 2.0 * params.s);
    std::ostringstream where;
    where << "node " << n << " at (" << grid->nodes[n].x << ", " << grid->nodes[n].y << ")";
    if (!(hfield[n] > 0.0) || !std::isfinite(hfield[n]))
      throw AssemblyError("coefficient h is not positive at " + where.str(), n);
    if (profile.alpha && scaled < *profile.alpha * (1.0 - 1e-12))
      throw AssemblyError("lower bound alpha <= h d^{2s} violated at " + where.str(), n);
    if (profile.beta && scaled > *profile.beta * (1.0 + 1e-12))
      throw AssemblyError("upper bound h d^{2s} <= beta violated at " + where.str(), n);
  }
  const ShellRule shell = shell_rule(*grid, family, params);
  std::vector<std::vector<WeightEntry>> rows(grid->num_interior());
  parallel_for(grid->num_interior(), [&](int i) {
    rows[i] = row_weights(*grid, family, params, shell, grid->interior_nodes[i], t);
  });
  return finish(std::move(grid), family, params, hfield, rows, t);
}

DiscreteOperator assemble_reference(std::shared_ptr<const Grid> grid, const DomainFamily& family,
                                    const FracParams& params, const GridFunction& h) {
  // every ordered pair, no lattice shortcuts
  const ShellRule shell = shell_rule(*grid, family, params);
  const double cell = std::pow(grid->dx, grid->dim);
  std::vector<std::vector<WeightEntry>> rows(grid->num_interior());
  for (int i = 0; i < grid->num_interior(); ++i) {
    const int a = grid->interior_nodes[i];
    const Vec2 x = grid->nodes[a];
    for (int b = 0; b < grid->size(); ++b) {
      if (b == a || !grid->interior[b]) continue;
      const Vec2 y = grid->nodes[b];
      if (!membership(family, *grid, x, y, 0.0)) continue;
      const double r = (y - x).norm();
      double w = cell / std::pow(r, params.exponent());
      bool in_shell = false;
      if (r <= shell.r_sing * (1.0 + 1e-9)) {
        for (int c = 0; c < grid->size(); ++c) {
          if (!grid->interior[c]) continue;
          if ((grid->nodes[c] - (x - (y - x))).norm() > 1e-9 * grid->dx) continue;
          in_shell = membership(family, *grid, x, grid->nodes[c], 0.0);
        }
      }
      if (in_shell) w *= shell.scale;
      rows[i].push_back({b, w, in_shell});
    }
  }
  return finish(std::move(grid), family, params, h, rows, 0.0);
}

// ------------------------------------------------------------ localization

DiscreteOperator localize(const DiscreteOperator& op, const DomainSpec& subset, int angular_count) {
  const Grid& grid = op.grid();
  std::vector<int> keep;  // unknown indices of op
  // nodes within rounding distance of the boundary of the subset count as outside
  for (int i = 0; i < op.size(); ++i) {
    const Vec2 x = grid.nodes[op.nodes()[i]];
    if (subset.contains(x) && subset.boundary_distance(x) > 1e-9 * grid.dx) keep.push_back(i);
  }
  if (keep.empty()) throw ConfigError("localization set contains no unknowns");
  std::vector<int> position(op.size(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) position[keep[k]] = static_cast<int>(k);

  const int m = static_cast<int>(keep.size());
  const AngularRule rule = angular_rule(grid.dim, angular_count);
  Eigen::VectorXd j(m), dist(m);
  std::vector<int> nodes(m);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < m; ++k) {
    const int i = keep[k];
    const Vec2 x = grid.nodes[op.nodes()[i]];
    nodes[k] = op.nodes()[i];
    dist[k] = subset.boundary_distance(x);
    j[k] = op.h()[i] + family_tail_integral(op.family(), grid.domain, subset, x, op.params().s,
                                            rule, op.time());
    for (SparseRowMatrix::InnerIterator it(op.weights(), i); it; ++it) {
      const int col = position[it.col()];
      if (col >= 0) trip.emplace_back(k, col, it.value());
    }
  }
  SparseRowMatrix w(m, m);
  w.setFromTriplets(trip.begin(), trip.end());
  return DiscreteOperator(op.grid_ptr(), std::move(nodes), dist, j, w, op.family(), op.params(),
                          op.time());
}

void write_field_csv(std::ostream& out, const Grid& grid, const GridFunction& f,
                     const std::string& name) {
  out << (grid.dim == 2 ? "node,x,y,d," : "node,x,d,") << name << '\n';
  out << std::setprecision(17);
  for (int n : grid.interior_nodes) {
    out << n << ',' << grid.nodes[n].x << ',';
    if (grid.dim == 2) out << grid.nodes[n].y << ',';
    out << grid.dist[n] << ',' << f[n] << '\n';
  }
}

}  // namespace varfrac
