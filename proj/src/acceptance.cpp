#include "varfrac/acceptance.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "varfrac/config.hpp"
#include "varfrac/elliptic.hpp"
#include "varfrac/errors.hpp"
#include "varfrac/geometry.hpp"
#include "varfrac/linalg.hpp"
#include "varfrac/operator.hpp"
#include "varfrac/parabolic.hpp"
#include "varfrac/spectral.hpp"
#include "varfrac/vistools.hpp"

namespace varfrac {

// ------------------------------------------------------------ FL oracle

namespace {

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  return out;
}

double poly_eval(const std::vector<double>& p, double y) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * y + *it;
  return acc;
}

}  // namespace

double PiecewisePolynomial::operator()(double y) const {
  if (y <= a || y >= b) return 0.0;
  return std::pow((y - a) * (b - y), edge_order) * poly_eval(cofactor, y);
}

double PiecewisePolynomial::derivative(double y, int order) const {
  // expanded form; only used at interior points in the near-diagonal series
  std::vector<double> p = cofactor;
  for (int i = 0; i < edge_order; ++i) p = poly_mul(p, {-a * b, a + b, -1.0});
  double acc = 0.0;
  for (int k = static_cast<int>(p.size()) - 1; k >= order; --k) {
    double falling = 1.0;
    for (int m = 0; m < order; ++m) falling *= k - m;
    acc = acc * y + p[k] * falling;
  }
  return acc;
}

PiecewisePolynomial bump_polynomial(double c, double r, int k, double slope) {
  // (1 - ((y-c)/r)^2)^k = ((y - a)(b - y) / r^2)^k, times (1 + slope (y-c))
  const double scale = std::pow(r, -2.0 * k);
  return {c - r, c + r, k, {scale * (1.0 - slope * c), scale * slope}};
}

double full_fractional_laplacian_1d(const PiecewisePolynomial& phi, double x, double s) {
  using boost::math::quadrature::gauss_kronrod;
  const double two_s = 2.0 * s;
  auto integrate = [](auto f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-10);
  };
  if (x <= phi.a || x >= phi.b) {
    // phi(x) = 0: -integral of phi(y) |x-y|^{-1-2s}
    return -integrate([&](double y) { return phi(y) * std::pow(std::abs(x - y), -1.0 - two_s); },
                      phi.a, phi.b);
  }
  const double zin = std::min(x - phi.a, phi.b - x);
  const double zout = std::max(x - phi.a, phi.b - x);
  // |z| < zin: 2phi(x) - phi(x+z) - phi(x-z) = -2 sum_m phi^{(2m)}(x) z^{2m} / (2m)!
  double near = 0.0;
  double fact = 1.0;
  const int degree = 2 * phi.edge_order + static_cast<int>(phi.cofactor.size()) - 1;
  for (int m = 1; 2 * m <= degree; ++m) {
    fact *= (2.0 * m - 1.0) * (2.0 * m);
    near -= 2.0 * phi.derivative(x, 2 * m) / fact * std::pow(zin, 2.0 * m - two_s) /
            (2.0 * m - two_s);
  }
  const double px = phi(x);
  const double middle = integrate(
      [&](double z) { return (2.0 * px - phi(x + z) - phi(x - z)) * std::pow(z, -1.0 - two_s); },
      zin, zout);
  const double tail = 2.0 * px * std::pow(zout, -two_s) / two_s;
  return near + middle + tail;
}

// ------------------------------------------------------------ helpers

namespace {

using Clock = std::chrono::steady_clock;

struct Built {
  std::shared_ptr<const Grid> grid;
  std::unique_ptr<DiscreteOperator> op;
};

Built build(const DomainSpec& domain, double dx, const DomainFamily& family, double s,
            const CoefficientProfile& profile) {
  Built b;
  b.grid = std::make_shared<const Grid>(build_grid(domain, dx));
  b.op = std::make_unique<DiscreteOperator>(
      assemble(b.grid, family, FracParams(s, domain.dim()), profile));
  return b;
}

DomainFamily constant_family() { return DomainFamily{}; }

DomainFamily ball_family(double scale, double exponent) {
  DomainFamily f;
  f.rule = DomainFamily::Rule::ball_radius;
  f.rho = {scale, exponent};
  return f;
}

DomainSpec l_shape() {
  return DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ------------------------------------------------------------ criteria

CriterionResult operator_exactness(const AcceptanceOptions& opt) {
  CriterionResult r{1, "operator exactness", false, {}};
  std::ostringstream os;
  bool ok = true;

  // constants are annihilated exactly
  double worst_const = 0.0;
  {
    const std::vector<std::pair<DomainSpec, double>> cases{
        {DomainSpec::interval(0, 1), 1.0 / 64}, {DomainSpec::ball({0, 0}, 1.0), 0.1}, {l_shape(), 0.1}};
    for (const auto& [dom, dx] : cases) {
      Built b = build(dom, dx, constant_family(), 0.5, CoefficientProfile::synthetic(1.0));
      const GridFunction one(std::vector<double>(b.grid->size(), 1.0));
      for (int n : b.grid->interior_nodes) worst_const = std::max(worst_const, std::abs(apply_pv(*b.op, one, n)));
    }
  }
  ok = ok && worst_const == 0.0;
  os << "constants max|Lu|=" << num(worst_const);

  // odd local functions on symmetric neighbourhoods
  double worst_odd = 0.0;
  {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const std::vector<std::tuple<DomainSpec, double, double>> cases{
        {DomainSpec::interval(0, 1), 1.0 / 128, 0.1}, {DomainSpec::ball({0, 0}, 1.0), 0.05, 0.25}};
    for (const auto& [dom, dx, rho] : cases) {
      Built b = build(dom, dx, ball_family(rho, 0.0), 0.5, CoefficientProfile::synthetic(1.0));
      const Grid& g = *b.grid;
      for (int n : g.interior_nodes) {
        if (0.4 * g.dist[n] < rho + 1e-12) continue;  // Omega~(x) = B_rho inside the locality ball
        const Vec2 q{uni(rng), uni(rng)};
        GridFunction u = GridFunction::zeros(g);
        for (int m = 0; m < g.size(); ++m) u[m] = q.dot(g.nodes[m] - g.nodes[n]);
        worst_odd = std::max(worst_odd, std::abs(apply_pv(*b.op, u, n)));
      }
    }
  }
  ok = ok && worst_odd <= 1e-12;
  os << "; odd max|Lu|=" << num(worst_odd);

  // quadratic on B_r: -2 r^{2-2s}/(2-2s)
  const double radius = 0.5;
  for (double s : {0.25, 0.75}) {
    double err[2];
    for (int level = 0; level < 2; ++level) {
      const double dx = radius / (40.25 * (1 << level));
      Built b = build(DomainSpec::ball({0, 0}, 1.0, 1), dx, ball_family(radius, 0.0), s,
                      CoefficientProfile::synthetic(1.0));
      const Grid& g = *b.grid;
      const int centre = g.locate({0, 0});
      GridFunction u = GridFunction::zeros(g);
      for (int m = 0; m < g.size(); ++m) u[m] = g.nodes[m].x * g.nodes[m].x;
      const double exact = -2.0 * std::pow(radius, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
      err[level] = relative(apply_pv(*b.op, u, centre), exact);
    }
    const bool pass = err[0] <= 0.02 && err[1] <= 0.01 && err[1] < err[0];
    ok = ok && pass;
    os << "; quadratic s=" << s << " err(dx)=" << num(err[0]) << " err(dx/2)=" << num(err[1]);
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult killing_bounds(const AcceptanceOptions&) {
  CriterionResult r{2, "killing-term bounds", false, {}};
  std::ostringstream os;
  bool ok = true;
  double worst_ratio = 0.0;
  double lowest_ratio = 1e300;
  for (double s : {0.25, 0.5, 0.75}) {
    const std::vector<std::pair<DomainSpec, double>> cases{
        {DomainSpec::interval(0, 1), 1.0 / 200}, {DomainSpec::ball({0, 0}, 1.0), 0.05}, {l_shape(), 0.05}};
    for (const auto& [dom, dx] : cases) {
      const Grid g = build_grid(dom, dx);
      const FracParams p(s, dom.dim());
      const GridFunction k = killing_term(g, dom, p);
      const double bound = sphere_measure(dom.dim()) / (2.0 * s);
      for (int n : g.interior_nodes) {
        const double ratio = k[n] * std::pow(g.dist[n], 2.0 * s) / bound;
        worst_ratio = std::max(worst_ratio, ratio);
        lowest_ratio = std::min(lowest_ratio, ratio);
      }
    }
  }
  ok = ok && worst_ratio <= 1.0 + 1e-6 && lowest_ratio > 0.0;
  os << "max k d^2s/(w_N/2s)=" << num(worst_ratio) << " min=" << num(lowest_ratio);

  double worst_closed = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    const DomainSpec dom = DomainSpec::interval(0, 1);
    const Grid g = build_grid(dom, 1.0 / 200);
    const GridFunction k = killing_term(g, dom, FracParams(s, 1));
    for (int n : g.interior_nodes) {
      const double x = g.nodes[n].x;
      const double exact = (std::pow(x, -2.0 * s) + std::pow(1.0 - x, -2.0 * s)) / (2.0 * s);
      worst_closed = std::max(worst_closed, relative(k[n], exact));
    }
  }
  ok = ok && worst_closed <= 1e-8;
  os << "; 1D closed form rel err=" << num(worst_closed);
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult equivalence(const AcceptanceOptions&) {
  CriterionResult r{3, "equivalence on convex domain", false, {}};
  std::ostringstream os;
  bool ok = true;

  // a(1/2) on (0,1), s = 1/4: Gamma(1/2) * 2 * 2^{1/2}
  {
    const DomainSpec dom = DomainSpec::interval(0, 1);
    const Grid g = build_grid(dom, 0.25);
    const GridFunction a = kinetic_coefficient(g, dom, FracParams(0.25, 1));
    const double value = a[g.locate({0.5, 0.0})];
    const double expected = std::sqrt(std::numbers::pi) * 2.0 * std::sqrt(2.0);
    const bool pass = std::abs(value - expected) <= 1e-6;
    ok = ok && pass;
    os << "a(1/2)=" << num(value) << " (expected " << num(expected) << ")";
  }

  const std::vector<PiecewisePolynomial> tests{
      bump_polynomial(0.0, 1.0, 4),        bump_polynomial(0.3, 0.5, 4),
      bump_polynomial(-0.4, 0.45, 3),      bump_polynomial(0.0, 1.0, 3, 1.0),
      bump_polynomial(0.1, 0.8, 5, -0.7)};
  const DomainSpec dom = DomainSpec::interval(-1, 1);
  for (double s : {0.25, 0.75}) {
    const double gamma = std::tgamma(2.0 * s + 1.0);
    double err[2] = {0, 0};
    for (int level = 0; level < 2; ++level) {
      const double dx = 2.0 / (1000 * (1 << level));
      Built b = build(dom, dx, constant_family(), s, CoefficientProfile::kinetic());
      const Grid& g = *b.grid;
      const DiscreteOperator& A = *b.op;
      for (const auto& phi : tests) {
        Eigen::VectorXd u(A.size());
        for (int i = 0; i < A.size(); ++i) u[i] = phi(g.nodes[A.nodes()[i]].x);
        const Eigen::VectorXd rhs = A.h().cwiseProduct(u) + gamma * A.apply_l(u);
        Eigen::VectorXd lhs(A.size());
        for (int i = 0; i < A.size(); ++i)
          lhs[i] = gamma * full_fractional_laplacian_1d(phi, g.nodes[A.nodes()[i]].x, s);
        err[level] = std::max(err[level], (lhs - rhs).cwiseAbs().maxCoeff() / lhs.cwiseAbs().maxCoeff());
      }
    }
    const bool pass = err[1] <= 0.03 && err[1] < err[0];
    ok = ok && pass;
    os << "; s=" << s << " err(n=999)=" << num(err[0]) << " err(n=1999)=" << num(err[1]);
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult barrier(const AcceptanceOptions& opt) {
  CriterionResult r{4, "barrier", false, {}};
  std::ostringstream os;
  if (opt.configs.empty()) {
    r.detail = "no configs supplied";
    return r;
  }
  bool ok = true;
  for (const auto& path : opt.configs) {
    ExperimentConfig cfg = load_config(path);
    const Experiment ex = build_experiment(cfg);
    const Barrier bar = find_barrier(ex.A(), ex.A().alpha_measured(), &ex.forcing);
    cfg.dx *= 0.5;
    const Experiment fine = build_experiment(cfg);
    const double fine_margin = barrier_margin(fine.A(), fine.A().alpha_measured(), bar.eta).minCoeff();
    const bool pass = bar.eta > 0.0 && bar.margin.minCoeff() >= 0.0 && fine_margin >= 0.0;
    ok = ok && pass;
    os << path.filename().string() << ": eta=" << num(bar.eta) << " Q=" << num(bar.Q)
       << " min margin=" << num(bar.margin.minCoeff()) << " at dx/2=" << num(fine_margin) << "; ";
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult comparison(const AcceptanceOptions& opt) {
  CriterionResult r{5, "comparison and monotonicity", false, {}};
  std::ostringstream os;
  bool ok = true;

  DomainFamily masked;
  masked.rule = DomainFamily::Rule::masked;
  masked.sigma = SigmaSpec::double_cone(0.0, std::numbers::pi / 4, 0.5);
  DomainFamily star;
  star.rule = DomainFamily::Rule::star_shaped;

  struct Case {
    DomainSpec dom;
    double dx;
    DomainFamily fam;
    double s;
  };
  const std::vector<Case> cases{
      {DomainSpec::interval(0, 1), 0.01, constant_family(), 0.25},
      {DomainSpec::interval(0, 1), 0.01, constant_family(), 0.75},
      {DomainSpec::interval(0, 1), 0.01, ball_family(1.0, 1.0 / (2.0 - 2.0 * 0.25)), 0.25},
      {DomainSpec::ball({0, 0}, 1.0), 0.1, constant_family(), 0.5},
      {DomainSpec::ball({0, 0}, 1.0), 0.1, masked, 0.5},
      {l_shape(), 0.1, star, 0.5}};

  double worst_inverse = 1e300;
  int violations = 0, rejected = 0, trials = 0;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const auto& c : cases) {
    Built b = build(c.dom, c.dx, c.fam, c.s, CoefficientProfile::killing());
    const DiscreteOperator& A = *b.op;
    worst_inverse = std::min(worst_inverse, min_inverse_entry(A, 0.0));
    for (double dt : {1e-3, 1e-2, 1e-1})
      worst_inverse = std::min(worst_inverse, min_inverse_entry(A, -1.0 / dt) / dt);

    const ShiftedSolver solver(A, 0.0);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd f(A.size()), p(A.size()), q(A.size());
      for (int i = 0; i < A.size(); ++i) {
        f[i] = 2.0 * uni(rng) - 1.0;
        p[i] = uni(rng);
        q[i] = uni(rng);
      }
      const Eigen::VectorXd u = solver.solve(f - p);
      const Eigen::VectorXd v = solver.solve(f + q);
      const ComparisonReport rep = check_comparison(A, u, v, f);
      ++trials;
      if (!rep.accepted) ++rejected;
      else if (!rep.holds()) ++violations;
    }
  }
  ok = worst_inverse >= -1e-12 && violations == 0 && rejected == 0;
  os << "min inverse entry (A and step matrices, dt in {1e-3,1e-2,1e-1}) = " << num(worst_inverse)
     << "; " << trials << " ordered pairs: " << violations << " violations, " << rejected
     << " rejected";
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult spectral(const AcceptanceOptions& opt) {
  CriterionResult r{6, "principal eigenvalue", false, {}};
  std::ostringstream os;
  bool ok = true;
  struct Case {
    std::string label;
    DomainSpec dom;
    double dx;
    DomainFamily fam;
    double s;
  };
  const std::vector<Case> cases{
      {"1D s=0.75", DomainSpec::interval(0, 1), 0.01, constant_family(), 0.75},
      {"1D ball-radius s=0.25", DomainSpec::interval(0, 1), 0.01, ball_family(0.3, 0.0), 0.25},
      {"2D ball s=0.5", DomainSpec::ball({0, 0}, 1.0), 0.1, constant_family(), 0.5}};
  std::mt19937_64 rng(opt.seed + 6);
  std::uniform_real_distribution<double> uni(0.1, 1.1);
  for (const auto& c : cases) {
    Built b = build(c.dom, c.dx, c.fam, c.s, CoefficientProfile::killing());
    const DiscreteOperator& A = *b.op;
    const SpectralResult res = principal_eigen(A);
    const double rel = res.oracle_lambda ? relative(res.lambda, *res.oracle_lambda) : 1.0;
    const SimplicityVerdict simple = check_simplicity(res, A);

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(A.size());
    const Eigen::VectorXd w = ShiftedSolver(A, 0.0).solve(ones);
    const double upper = w.cwiseInverse().maxCoeff();  // Collatz-Wielandt bound on lambda_bar
    std::vector<double> grid;
    const int steps = 300;
    for (int k = 0; k <= steps; ++k) grid.push_back(1.5 * upper * k / steps);
    const double cell = 1.5 * upper / steps;
    Eigen::VectorXd g(A.size());
    for (int i = 0; i < A.size(); ++i) g[i] = uni(rng);
    const ESetProbe pf = probe_E(A, ones, grid);
    const ESetProbe pg = probe_E(A, g, grid);
    bool bracket_ok = pf.bracket && pg.bracket && pf.monotone && pg.monotone;
    if (bracket_ok) {
      bracket_ok = pf.bracket->first < res.lambda && res.lambda <= pf.bracket->second &&
                   pg.bracket->first < res.lambda && res.lambda <= pg.bracket->second &&
                   std::abs(pf.bracket->first - pg.bracket->first) <= cell + 1e-12 * upper &&
                   std::abs(pf.bracket->second - pg.bracket->second) <= cell + 1e-12 * upper;
    }
    const bool pass = rel <= 1e-8 && res.min_phi > 0.0 && simple.pass && simple.multiplicity == 1 &&
                      bracket_ok;
    ok = ok && pass;
    os << c.label << ": lambda=" << num(res.lambda) << " rel-to-oracle=" << num(rel)
       << " min phi=" << num(res.min_phi) << " multiplicity=" << simple.multiplicity;
    if (pf.bracket && pg.bracket)
      os << " E-bracket f=[" << num(pf.bracket->first) << "," << num(pf.bracket->second) << "] g=["
         << num(pg.bracket->first) << "," << num(pg.bracket->second) << "]";
    else
      os << " E-bracket missing";
    os << "; ";
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult below_lambda(const AcceptanceOptions&) {
  CriterionResult r{7, "solvability below the principal eigenvalue", false, {}};
  std::ostringstream os;
  bool ok = true;
  struct Case {
    DomainSpec dom;
    double dx;
    double s;
  };
  for (const auto& c : std::vector<Case>{{DomainSpec::interval(0, 1), 0.01, 0.75},
                                         {DomainSpec::ball({0, 0}, 1.0), 0.1, 0.5}}) {
    Built b = build(c.dom, c.dx, constant_family(), c.s, CoefficientProfile::killing());
    const DiscreteOperator& A = *b.op;
    const double lb = principal_eigen(A).lambda;
    const Eigen::VectorXd f = Eigen::VectorXd::Ones(A.size());
    for (double frac : {0.5, 0.9}) {
      const Eigen::VectorXd u = solve_below_lambda(A, frac * lb, f, lb);
      const bool pass = u.minCoeff() > 0.0 && relative_residual(A, frac * lb, u, f) <= kSolveTolerance;
      ok = ok && pass;
      os << "lambda=" << frac << "*lb min u=" << num(u.minCoeff()) << "; ";
    }
    bool rejected = false;
    try {
      solve_below_lambda(A, 1.1 * lb, f, lb);
    } catch (const SpectralShiftError&) {
      rejected = true;
    }
    ok = ok && rejected;
    os << "lambda=1.1*lb " << (rejected ? "rejected" : "NOT rejected") << "; ";
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

CriterionResult long_time(const AcceptanceOptions&) {
  CriterionResult r{8, "long-time decay", false, {}};
  std::ostringstream os;
  const auto grid = std::make_shared<const Grid>(build_grid(DomainSpec::interval(0, 1), 0.01));
  const FracParams params(0.75, 1);
  const DiscreteOperator A = assemble(grid, constant_family(), params, CoefficientProfile::killing());
  const double lb = principal_eigen(A).lambda;
  const double dt = 0.02 / lb;
  const double lb_disc = std::log1p(dt * lb) / dt;

  ParabolicProblem base;
  base.grid = grid;
  base.family = constant_family();
  base.params = params;
  base.profile = CoefficientProfile::killing();
  base.forcing = Eigen::VectorXd::Ones(A.size());
  base.u0 = Eigen::VectorXd::Zero(A.size());
  base.dt = dt;

  // time-independent data: the error decays at the spectral rate of the step matrix
  ParabolicProblem p1 = base;
  p1.horizon = 18.0 / lb;
  const ParabolicSolver s1(p1);
  const Trajectory t1 = evolve(s1);
  const DecayFit fit1 = decay_rate(t1, s1.stationary_solution(), 6.0 / lb, 18.0 / lb);
  const bool pass1 = std::abs(fit1.rate / lb_disc - 1.0) <= 0.05;
  os << "lambda_disc=" << num(lb_disc) << " fitted=" << num(fit1.rate);

  // data decaying at half the principal rate
  const double lam = 0.5 * lb_disc;
  ParabolicProblem p2 = base;
  p2.f_decay = {1.0, lam};
  p2.horizon = 20.0 / lam;
  const ParabolicSolver s2(p2);
  const Trajectory t2 = evolve(s2);
  const DecayFit fit2 = decay_rate(t2, s2.stationary_solution(), 8.0 / lam, 20.0 / lam);
  const bool pass2 = fit2.rate >= 0.95 * lam;
  os << "; data rate " << num(lam) << " fitted=" << num(fit2.rate);

  // weighted constant grows as lambda approaches lambda_disc
  const Barrier bar = find_barrier(A, A.alpha_measured());
  std::vector<double> constants;
  for (double frac : {0.5, 0.7, 0.9}) {
    ParabolicProblem p = base;
    p.f_decay = {1.0, frac * lb_disc};
    p.u0 = s1.stationary_solution();
    p.horizon = 30.0 / lb;
    const ParabolicSolver sv(p);
    const Trajectory tr = evolve(sv);
    constants.push_back(weighted_decay_check(tr, sv.stationary_solution(), A.dist(), bar.eta,
                                             frac * lb_disc).C);
  }
  const bool pass3 = constants[0] < constants[1] && constants[1] < constants[2];
  os << "; C(0.5,0.7,0.9)=" << num(constants[0]) << "," << num(constants[1]) << ","
     << num(constants[2]) << " (eta=" << num(bar.eta) << ")";
  r.pass = pass1 && pass2 && pass3;
  r.detail = os.str();
  return r;
}

CriterionResult supconvolution(const AcceptanceOptions& opt) {
  CriterionResult r{9, "sup-convolution estimates", false, {}};
  std::ostringstream os;
  SampleLattice lat{{201}, {-1.0}, {0.01}};
  const int n = lat.size();
  std::mt19937_64 rng(opt.seed + 9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<std::pair<std::string, Eigen::VectorXd>> funcs;
  Eigen::VectorXd quad(n), kink(n), noise(n);
  for (int i = 0; i < n; ++i) {
    const double x = lat.point(i)[0];
    quad[i] = -x * x;
    kink[i] = -std::abs(x);
    noise[i] = uni(rng);
  }
  funcs = {{"-x^2", quad}, {"-|x|", kink}, {"noise", noise}};
  bool control_ok = true, semi_ok = true, dual_ok = true;
  double worst_control = 0.0, worst_semi = 1e300;
  for (const auto& [name, u] : funcs) {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const ConvolutionResult sup = sup_convolve(lat, u, eps);
      const auto [dist2, bound] = control_estimate(lat, sup, u);
      control_ok = control_ok && dist2 <= bound;
      worst_control = std::max(worst_control, dist2 / bound);
      const SemiconvexityVerdict sv = semiconvexity_check(lat, sup, 1e-9);
      semi_ok = semi_ok && sv.pass;
      worst_semi = std::min(worst_semi, sv.min_second_difference - sv.bound);
      const ConvolutionResult inf = inf_convolve(lat, u, eps);
      const ConvolutionResult direct = inf_convolve_direct(lat, u, eps);
      for (int i = 0; i < n; ++i) dual_ok = dual_ok && inf.values[i] == direct.values[i];
    }
  }
  r.pass = control_ok && semi_ok && dual_ok;
  os << "max |x-x^eps|^2/(2 eps |u|)=" << num(worst_control)
     << "; min (D2 u^eps + 2/eps)=" << num(worst_semi) << "; duality " << (dual_ok ? "exact" : "BROKEN");
  r.detail = os.str();
  return r;
}

CriterionResult localization(const AcceptanceOptions&) {
  CriterionResult r{10, "localization", false, {}};
  std::ostringstream os;
  bool ok = true;
  for (double s : {0.25, 0.75}) {
    Built b = build(DomainSpec::interval(0, 1), 1.0 / 200, constant_family(), s,
                    CoefficientProfile::killing());
    const DomainSpec O = DomainSpec::interval(0.25, 0.75);
    const DiscreteOperator loc = localize(*b.op, O);
    double worst = 0.0, c1 = 1e300, c2 = 0.0;
    for (int i = 0; i < loc.size(); ++i) {
      const int n = loc.nodes()[i];
      const double x = b.grid->nodes[n].x;
      const double tail = (std::pow(x - 0.25, -2 * s) - std::pow(x, -2 * s) +
                           std::pow(0.75 - x, -2 * s) - std::pow(1 - x, -2 * s)) / (2 * s);
      const double h = b.op->h()[b.grid->unknown_of[n]];
      worst = std::max(worst, relative(loc.h()[i] - h, tail));
      const double scaled = loc.h()[i] * std::pow(loc.dist()[i], 2 * s);
      c1 = std::min(c1, scaled);
      c2 = std::max(c2, scaled);
    }
    ok = ok && worst <= 1e-8 && c1 > 0.0 && std::isfinite(c2);
    os << "1D s=" << s << ": tail rel err=" << num(worst) << " c1=" << num(c1) << " c2=" << num(c2) << "; ";
  }
  {
    Built b = build(DomainSpec::ball({0, 0}, 1.0), 0.05, constant_family(), 0.5,
                    CoefficientProfile::killing());
    const DiscreteOperator loc = localize(*b.op, DomainSpec::ball({0, 0}, 0.5));
    const Eigen::ArrayXd scaled = loc.h().array() * loc.dist().array().pow(1.0);
    const double c1 = scaled.minCoeff(), c2 = scaled.maxCoeff();
    ok = ok && c1 > 0.0 && std::isfinite(c2);
    os << "2D ball O=B_0.5: c1=" << num(c1) << " c2=" << num(c2);
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  using Fn = CriterionResult (*)(const AcceptanceOptions&);
  static const Fn table[kCriterionCount] = {operator_exactness, killing_bounds, equivalence,
                                            barrier,           comparison,     spectral,
                                            below_lambda,      long_time,      supconvolution,
                                            localization};
  static const char* names[kCriterionCount] = {
      "operator exactness", "killing-term bounds", "equivalence on convex domain",
      "barrier", "comparison and monotonicity", "principal eigenvalue",
      "solvability below the principal eigenvalue", "long-time decay",
      "sup-convolution estimates", "localization"};
  if (id < 1 || id > kCriterionCount) throw ConfigError("unknown criterion " + std::to_string(id));
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](options);
  } catch (const std::exception& e) {
    r = {id, names[id - 1], false, std::string("error: ") + e.what(), 0.0};
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    out.push_back(run_criterion(id, options));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::vector<std::filesystem::path> list_configs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".ini") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace varfrac
