#include "varfrac/vistools.hpp"

#include <limits>

#include "varfrac/errors.hpp"
#include "varfrac/parallel.hpp"

namespace varfrac {

int SampleLattice::size() const {
  int n = 1;
  for (int d : dims) n *= d;
  return n;
}

std::vector<double> SampleLattice::point(int index) const {
  std::vector<double> p(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) {
    p[a] = origin[a] + spacing[a] * (index % dims[a]);
    index /= dims[a];
  }
  return p;
}

double SampleLattice::distance2(int a, int b) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const double d = spacing[k] * ((a % dims[k]) - (b % dims[k]));
    acc += d * d;
    a /= dims[k];
    b /= dims[k];
  }
  return acc;
}

int SampleLattice::neighbour(int index, int axis, int step) const {
  int stride = 1;
  for (int a = 0; a < axis; ++a) stride *= dims[a];
  const int coord = (index / stride) % dims[axis] + step;
  if (coord < 0 || coord >= dims[axis]) return -1;
  return index + step * stride;
}

namespace {

void check_inputs(const SampleLattice& lattice, const Eigen::VectorXd& u, double eps) {
  if (!(eps > 0.0)) throw ConfigError("convolution parameter eps must be positive");
  if (lattice.dims.empty() || lattice.origin.size() != lattice.dims.size() ||
      lattice.spacing.size() != lattice.dims.size())
    throw ConfigError("malformed sample lattice");
  if (u.size() != lattice.size()) throw ConfigError("sample count does not match the lattice");
}

}  // namespace

ConvolutionResult sup_convolve(const SampleLattice& lattice, const Eigen::VectorXd& u, double eps) {
  check_inputs(lattice, u, eps);
  const int n = lattice.size();
  ConvolutionResult out;
  out.eps = eps;
  out.values.resize(n);
  out.arg.assign(n, -1);
  parallel_for(n, [&](int x) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int y = 0; y < n; ++y) {
      const double v = u[y] - lattice.distance2(x, y) / eps;
      if (v > best) {
        best = v;
        arg = y;
      }
    }
    out.values[x] = best;
    out.arg[x] = arg;
  });
  return out;
}

ConvolutionResult inf_convolve(const SampleLattice& lattice, const Eigen::VectorXd& u, double eps) {
  ConvolutionResult out = sup_convolve(lattice, -u, eps);
  out.values = -out.values;
  return out;
}

ConvolutionResult inf_convolve_direct(const SampleLattice& lattice, const Eigen::VectorXd& u,
                                      double eps) {
  check_inputs(lattice, u, eps);
  const int n = lattice.size();
  ConvolutionResult out;
  out.eps = eps;
  out.values.resize(n);
  out.arg.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (int y = 0; y < n; ++y) {
      const double v = u[y] + lattice.distance2(x, y) / eps;
      if (v < best) {
        best = v;
        out.arg[x] = y;
      }
    }
    out.values[x] = best;
  }
  return out;
}

SemiconvexityVerdict semiconvexity_check(const SampleLattice& lattice,
                                         const ConvolutionResult& result, double tol) {
  SemiconvexityVerdict v;
  v.bound = -2.0 / result.eps;
  v.min_second_difference = std::numeric_limits<double>::infinity();
  for (int x = 0; x < lattice.size(); ++x) {
    for (int a = 0; a < lattice.rank(); ++a) {
      const int lo = lattice.neighbour(x, a, -1), hi = lattice.neighbour(x, a, 1);
      if (lo < 0 || hi < 0) continue;
      const double h2 = lattice.spacing[a] * lattice.spacing[a];
      const double d2 = (result.values[lo] + result.values[hi] - 2.0 * result.values[x]) / h2;
      v.min_second_difference = std::min(v.min_second_difference, d2);
    }
  }
  v.pass = v.min_second_difference >= v.bound - tol;
  return v;
}

std::pair<double, double> control_estimate(const SampleLattice& lattice,
                                           const ConvolutionResult& result,
                                           const Eigen::VectorXd& u) {
  double worst = 0.0;
  for (int x = 0; x < lattice.size(); ++x) worst = std::max(worst, lattice.distance2(x, result.arg[x]));
  return {worst, 2.0 * result.eps * u.cwiseAbs().maxCoeff()};
}

}  // namespace varfrac
