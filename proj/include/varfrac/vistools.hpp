#pragma once

#include <Eigen/Dense>
#include <vector>

namespace varfrac {

/// Regular product lattice (up to 3 axes, e.g. x, y, t) with row-major values, first axis
/// fastest. Space-time data simply uses time as one more axis.
struct SampleLattice {
  std::vector<int> dims;
  std::vector<double> origin;
  std::vector<double> spacing;

  int size() const;
  int rank() const { return static_cast<int>(dims.size()); }
  std::vector<double> point(int index) const;
  double distance2(int a, int b) const;
  /// Index shifted by `step` along `axis`, -1 if it leaves the lattice.
  int neighbour(int index, int axis, int step) const;
};

struct ConvolutionResult {
  Eigen::VectorXd values;
  /// Lattice index of the maximiser (sup case) or minimiser (inf case) per node.
  std::vector<int> arg;
  double eps = 0.0;
};

/// u^eps(x) = max_y { u(y) - |x-y|^2 / eps } by brute force over all lattice nodes; ties
/// resolve to the lowest index.
ConvolutionResult sup_convolve(const SampleLattice& lattice, const Eigen::VectorXd& u, double eps);

/// u_eps = -(-u)^eps.
ConvolutionResult inf_convolve(const SampleLattice& lattice, const Eigen::VectorXd& u, double eps);

/// min_y { u(y) + |x-y|^2 / eps } evaluated directly, as the oracle for inf_convolve.
ConvolutionResult inf_convolve_direct(const SampleLattice& lattice, const Eigen::VectorXd& u,
                                      double eps);

struct SemiconvexityVerdict {
  bool pass = false;
  /// Smallest centred second difference divided by spacing^2 over all axes.
  double min_second_difference = 0.0;
  double bound = 0.0;
};

/// Passes iff every centred second difference of the sup-convolution is >= -2/eps - tol.
SemiconvexityVerdict semiconvexity_check(const SampleLattice& lattice,
                                         const ConvolutionResult& result, double tol = 1e-9);

/// max_x |x - x^eps|^2 and the bound 2 eps |u|_inf.
std::pair<double, double> control_estimate(const SampleLattice& lattice,
                                           const ConvolutionResult& result,
                                           const Eigen::VectorXd& u);

}  // namespace varfrac
