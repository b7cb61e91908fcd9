#include "varfrac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "varfrac/acceptance.hpp"
#include "varfrac/config.hpp"
#include "varfrac/elliptic.hpp"
#include "varfrac/errors.hpp"
#include "varfrac/linalg.hpp"
#include "varfrac/parabolic.hpp"
#include "varfrac/report.hpp"
#include "varfrac/spectral.hpp"
#include "varfrac/vistools.hpp"

namespace varfrac {

namespace {

namespace fs = std::filesystem;

/// Oracle disagreement beyond this fails `eig`.
constexpr double kOracleAgreement = 1e-8;

struct Session {
  ExperimentConfig config;
  fs::path out;
  std::unique_ptr<RunManifest> manifest;
};

Session open_session(const CommandOptions& o) {
  if (o.config.empty()) throw ConfigError("--config is required for " + o.command);
  Session s;
  s.config = load_config(o.config);
  s.out = o.out.empty() ? s.config.output_dir / (o.command + ".csv") : o.out;
  const fs::path dir = s.out.has_parent_path() ? s.out.parent_path() : fs::path(".");
  s.manifest = std::make_unique<RunManifest>(dir / s.config.manifest_name, s.config.hash(),
                                             o.command + " " + o.config.string());
  return s;
}

std::string quoted(const std::string& text) {
  std::string q = "\"";
  for (char c : text) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void write_point(std::ostream& out, const Grid& g, int node) {
  out << node << ',' << fmt(g.nodes[node].x) << ',';
  if (g.dim == 2) out << fmt(g.nodes[node].y) << ',';
}

// ---------------------------------------------------------------- commands

int validate_geometry(const CommandOptions& o, std::ostream& log) {
  Session s = open_session(o);
  s.manifest->begin_stage("validate");
  const Grid grid = build_grid(s.config.domain, s.config.dx);
  const ValidationReport rep = validate_family(s.config.family, grid, s.config.seed);
  const DensityCertificate cert =
      density_certificate(s.config.domain, s.config.density_rho0, 4096, s.config.seed);
  std::ofstream out = open_csv(*s.manifest, s.out, "",
                               {"density rho0=" + fmt(cert.rho0) + " kappa=" + fmt(cert.kappa)});
  rep.write_csv(out);
  s.manifest->end_stage(rep.ok() ? "ok" : "violations");
  log << "locality=" << rep.locality_ok << " symmetry=" << rep.symmetry_ok
      << " density=" << rep.density_ok << " continuity=" << rep.continuity_ok
      << " violations=" << rep.violations().size() << " kappa=" << cert.kappa << '\n';
  const int code = rep.ok() ? kExitOk : kExitAcceptance;
  s.manifest->finish(code);
  return code;
}

int assemble_command(const CommandOptions& o, std::ostream& log) {
  Session s = open_session(o);
  s.manifest->begin_stage("assemble");
  const Experiment ex = build_experiment(s.config);
  s.manifest->end_stage("ok");
  std::ofstream out = open_csv(*s.manifest, s.out, "");
  ex.A().write_triplets(out);
  log << "n=" << ex.A().size() << " storage="
      << (ex.A().storage() == DiscreteOperator::Storage::dense ? "dense" : "sparse")
      << " fill=" << ex.A().fill() << " m_matrix=" << ex.A().m_matrix_pattern()
      << " alpha=" << ex.A().alpha_measured() << " beta=" << ex.A().beta_measured() << '\n';
  s.manifest->finish(kExitOk);
  return kExitOk;
}

int solve_elliptic(const CommandOptions& o, std::ostream& log) {
  Session s = open_session(o);
  s.manifest->begin_stage("assemble");
  const Experiment ex = build_experiment(s.config);
  const DiscreteOperator& A = ex.A();
  s.manifest->end_stage("ok");

  s.manifest->begin_stage("solve");
  Eigen::VectorXd u;
  if (s.config.lambda == 0.0) {
    u = solve({&A, ex.forcing, 0.0, std::nullopt});
  } else {
    const double lb = principal_eigen(A).lambda;
    u = solve_below_lambda(A, s.config.lambda, ex.forcing, lb);
  }
  const Barrier bar = find_barrier(A, A.alpha_measured(), &ex.forcing);
  s.manifest->end_stage("ok");

  const Grid& g = A.grid();
  std::ofstream out = open_csv(
      *s.manifest, s.out, g.dim == 2 ? "node,x,y,d,f,u,barrier" : "node,x,d,f,u,barrier",
      {"lambda=" + fmt(s.config.lambda) + " eta=" + fmt(bar.eta) + " Q=" + fmt(bar.Q) +
       " alpha=" + fmt(bar.alpha)});
  for (int i = 0; i < A.size(); ++i) {
    write_point(out, g, A.nodes()[i]);
    out << fmt(A.dist()[i]) << ',' << fmt(ex.forcing[i]) << ',' << fmt(u[i]) << ','
        << fmt(bar.values[i]) << '\n';
  }
  const bool confined = s.config.lambda != 0.0 || (u.cwiseAbs() - bar.values).maxCoeff() <= 1e-12 * bar.values.maxCoeff();
  log << "n=" << A.size() << " max u=" << u.maxCoeff() << " min u=" << u.minCoeff()
      << " eta=" << bar.eta << " Q=" << bar.Q << " barrier_confines=" << confined << '\n';
  s.manifest->finish(kExitOk);
  return kExitOk;
}

int eig(const CommandOptions& o, std::ostream& log, std::ostream& err) {
  Session s = open_session(o);
  s.manifest->begin_stage("assemble");
  const Experiment ex = build_experiment(s.config);
  s.manifest->end_stage("ok");
  s.manifest->begin_stage("eigen");
  EigenOptions opts;
  opts.tol = s.config.eig_tol;
  const SpectralResult res = principal_eigen(ex.A(), opts);
  s.manifest->end_stage("ok");

  std::ofstream out = open_csv(*s.manifest, s.out,
                               "lambda_bar,oracle_lambda,relative_error,gap,min_phi,iterations",
                               res.warning.empty() ? std::vector<std::string>{}
                                                   : std::vector<std::string>{res.warning});
  const double rel = res.oracle_lambda
                         ? std::abs(res.lambda - *res.oracle_lambda) / std::abs(*res.oracle_lambda)
                         : std::nan("");
  out << fmt(res.lambda) << ',' << (res.oracle_lambda ? fmt(*res.oracle_lambda) : "nan") << ','
      << fmt(rel) << ',' << (res.gap ? fmt(*res.gap) : "nan") << ',' << fmt(res.min_phi) << ','
      << res.iterations << '\n';
  log << "lambda_bar=" << fmt(res.lambda) << " iterations=" << res.iterations
      << " min_phi=" << res.min_phi << '\n';
  int code = kExitOk;
  if (res.oracle_lambda && !(rel <= kOracleAgreement)) {
    err << "error code=3 kind=acceptance message=" << quoted("eigenvalue disagrees with the dense oracle: relative error " + fmt(rel)) << '\n';
    code = kExitAcceptance;
  }
  s.manifest->finish(code);
  return code;
}

int probe_e(const CommandOptions& o, std::ostream& log) {
  Session s = open_session(o);
  const Experiment ex = build_experiment(s.config);
  const DiscreteOperator& A = ex.A();
  s.manifest->begin_stage("probe");
  const double lb = principal_eigen(A).lambda;
  const double lo = o.lambda_min.value_or(0.0);
  const double hi = o.lambda_max.value_or(1.5 * lb);
  if (!(hi > lo) || o.steps < 1) throw ConfigError("probe-e needs lambda-max > lambda-min and steps >= 1");
  std::vector<double> grid;
  for (int k = 0; k <= o.steps; ++k) grid.push_back(lo + (hi - lo) * k / o.steps);
  const ESetProbe probe = probe_E(A, ex.forcing, grid);
  s.manifest->end_stage("ok");

  std::vector<std::string> comments{"lambda_bar=" + fmt(lb) + " monotone=" + (probe.monotone ? "1" : "0")};
  if (probe.bracket)
    comments.push_back("bracket=" + fmt(probe.bracket->first) + ":" + fmt(probe.bracket->second));
  std::ofstream out = open_csv(*s.manifest, s.out, "lambda,outcome,norm", comments);
  for (std::size_t k = 0; k < grid.size(); ++k)
    out << fmt(probe.lambdas[k]) << ',' << to_string(probe.outcomes[k]) << ',' << fmt(probe.norms[k]) << '\n';
  log << "lambda_bar=" << lb;
  if (probe.bracket) log << " bracket=[" << probe.bracket->first << ", " << probe.bracket->second << "]";
  log << " monotone=" << probe.monotone << '\n';
  s.manifest->finish(kExitOk);
  return kExitOk;
}

struct ParabolicRun {
  Trajectory traj;
  Eigen::VectorXd stationary;
  double lambda_bar = 0.0;
  double lambda_disc = 0.0;
  double data_rate = 0.0;
};

ParabolicRun run_parabolic(const Experiment& ex) {
  ParabolicRun run;
  const SpectralResult eig = principal_eigen(ex.A());
  run.lambda_bar = eig.lambda;
  run.lambda_disc = std::log1p(ex.config.dt * eig.lambda) / ex.config.dt;
  run.data_rate = run.lambda_disc;
  for (const double rate : {ex.config.h_decay.active() ? ex.config.h_decay.rate : -1.0,
                            ex.config.f_decay.active() ? ex.config.f_decay.rate : -1.0,
                            ex.config.family.time.active() ? ex.config.family.time.rate : -1.0})
    if (rate >= 0.0) run.data_rate = std::min(run.data_rate, rate);
  const Eigen::VectorXd steady = ShiftedSolver(ex.A(), 0.0).solve(ex.forcing);
  const ParabolicSolver solver(ex.parabolic(steady));
  run.traj = evolve(solver);
  run.stationary = solver.stationary_solution();
  return run;
}

int solve_parabolic(const CommandOptions& o, std::ostream& log) {
  Session s = open_session(o);
  const Experiment ex = build_experiment(s.config);
  const DiscreteOperator& A = ex.A();
  s.manifest->begin_stage("evolve");
  const ParabolicRun run = run_parabolic(ex);
  s.manifest->end_stage("ok");

  const double eta = find_barrier(A, A.alpha_measured()).eta;
  const double lam = std::min(run.data_rate, 0.9 * run.lambda_disc);
  const WeightedDecay wd = weighted_decay_check(run.traj, run.stationary, A.dist(), eta, lam);
  std::ofstream out = open_csv(
      *s.manifest, s.out, "stamp,t,sup_distance,weighted_constant",
      {"lambda_bar=" + fmt(run.lambda_bar) + " lambda_disc=" + fmt(run.lambda_disc) +
           " weight_lambda=" + fmt(lam) + " eta=" + fmt(eta),
       "C=" + fmt(wd.C) + " C_half=" + fmt(wd.C_half) + " stable=" + (wd.pass ? "1" : "0")});
  const Eigen::ArrayXd weight = A.dist().array().pow(eta);
  for (std::size_t k = 0; k < run.traj.times.size(); ++k) {
    const double t = run.traj.times[k];
    const double c = ((run.traj.snapshots[k] - run.stationary).array().abs() / weight).maxCoeff() *
                     std::exp(lam * t);
    out << k << ',' << fmt(t) << ',' << fmt(run.traj.distances[k]) << ',' << fmt(c) << '\n';
  }
  log << "steps=" << run.traj.steps << " stamps=" << run.traj.times.size()
      << " final distance=" << run.traj.distances.back() << " C=" << wd.C << '\n';
  s.manifest->finish(kExitOk);
  return kExitOk;
}

int decay_rate_command(const CommandOptions& o, std::ostream& log) {
  const auto colon = o.window.find(':');
  if (colon == std::string::npos) throw ConfigError("--window must look like t0:t1");
  double t0 = 0.0, t1 = 0.0;
  try {
    t0 = std::stod(o.window.substr(0, colon));
    t1 = std::stod(o.window.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--window must look like t0:t1");
  }
  if (!(t1 > t0)) throw ConfigError("--window needs t1 > t0");
  Session s = open_session(o);
  const Experiment ex = build_experiment(s.config);
  s.manifest->begin_stage("evolve");
  const ParabolicRun run = run_parabolic(ex);
  s.manifest->end_stage("ok");
  s.manifest->begin_stage("fit");
  const DecayFit fit = decay_rate(run.traj, run.stationary, t0, t1);
  s.manifest->end_stage("ok");
  std::ofstream out = open_csv(*s.manifest, s.out, "t0,t1,rate,points,lambda_bar,lambda_disc,data_rate");
  out << fmt(t0) << ',' << fmt(t1) << ',' << fmt(fit.rate) << ',' << fit.points << ','
      << fmt(run.lambda_bar) << ',' << fmt(run.lambda_disc) << ',' << fmt(run.data_rate) << '\n';
  log << "rate=" << fit.rate << " lambda_disc=" << run.lambda_disc << " data_rate=" << run.data_rate
      << " points=" << fit.points << '\n';
  s.manifest->finish(kExitOk);
  return kExitOk;
}

struct SampledField {
  std::vector<std::string> names;
  SampleLattice lattice;
  Eigen::VectorXd values;
};

SampledField read_samples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  SampledField f;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (f.names.empty()) {
      f.names = cells;
      if (cells.size() < 2 || cells.size() > 4)
        throw ConfigError(path.string() + ": expected 1 to 3 coordinate columns plus a value column");
      continue;
    }
    if (cells.size() != f.names.size()) throw ConfigError(path.string() + ": ragged row '" + line + "'");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ": non-numeric cell '" + c + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path.string() + ": no samples");
  const int axes = static_cast<int>(f.names.size()) - 1;
  std::vector<std::vector<double>> ticks(axes);
  for (int a = 0; a < axes; ++a) {
    std::set<double> uniq;
    for (const auto& r : rows) uniq.insert(r[a]);
    ticks[a].assign(uniq.begin(), uniq.end());
    const int m = static_cast<int>(ticks[a].size());
    const double h = m > 1 ? (ticks[a].back() - ticks[a].front()) / (m - 1) : 1.0;
    for (int k = 1; k < m; ++k)
      if (std::abs(ticks[a][k] - ticks[a][k - 1] - h) > 1e-6 * h)
        throw ConfigError(path.string() + ": column " + f.names[a] + " is not uniformly spaced");
    f.lattice.dims.push_back(m);
    f.lattice.origin.push_back(ticks[a].front());
    f.lattice.spacing.push_back(h);
  }
  if (static_cast<int>(rows.size()) != f.lattice.size())
    throw ConfigError(path.string() + ": samples do not form a complete product lattice");
  f.values = Eigen::VectorXd::Constant(f.lattice.size(), std::nan(""));
  for (const auto& r : rows) {
    int index = 0, stride = 1;
    for (int a = 0; a < axes; ++a) {
      const int k = static_cast<int>(std::lower_bound(ticks[a].begin(), ticks[a].end(), r[a]) - ticks[a].begin());
      index += k * stride;
      stride *= f.lattice.dims[a];
    }
    if (!std::isnan(f.values[index])) throw ConfigError(path.string() + ": duplicate sample");
    f.values[index] = r[axes];
  }
  return f;
}

int supconv(const CommandOptions& o, std::ostream& log) {
  if (o.in.empty()) throw ConfigError("--in is required for supconv");
  if (!(o.eps > 0.0)) throw ConfigError("--eps must be positive");
  const SampledField field = read_samples(o.in);
  std::ifstream raw(o.in);
  std::stringstream bytes;
  bytes << raw.rdbuf();
  const fs::path out_path = o.out.empty() ? fs::path("supconv.csv") : o.out;
  const fs::path dir = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
  RunManifest manifest(dir / "manifest.json", fnv1a_hex(bytes.str() + "eps=" + fmt(o.eps)),
                       "supconv " + o.in.string());
  manifest.begin_stage("convolve");
  const ConvolutionResult sup = sup_convolve(field.lattice, field.values, o.eps);
  const ConvolutionResult inf = inf_convolve(field.lattice, field.values, o.eps);
  const SemiconvexityVerdict semi = semiconvexity_check(field.lattice, sup);
  const auto [dist2, bound] = control_estimate(field.lattice, sup, field.values);
  manifest.end_stage("ok");

  const int axes = field.lattice.rank();
  std::string header;
  for (int a = 0; a < axes; ++a) header += field.names[a] + ',';
  header += field.names[axes] + ",sup,inf";
  for (int a = 0; a < axes; ++a) header += ",argmax_" + field.names[a];
  std::ofstream out = open_csv(manifest, out_path, header,
                               {"eps=" + fmt(o.eps) + " semiconvex=" + (semi.pass ? "1" : "0") +
                                    " min_second_difference=" + fmt(semi.min_second_difference),
                                "control max|x-x^eps|^2=" + fmt(dist2) + " bound=" + fmt(bound)});
  for (int i = 0; i < field.lattice.size(); ++i) {
    for (double c : field.lattice.point(i)) out << fmt(c) << ',';
    out << fmt(field.values[i]) << ',' << fmt(sup.values[i]) << ',' << fmt(inf.values[i]);
    for (double c : field.lattice.point(sup.arg[i])) out << ',' << fmt(c);
    out << '\n';
  }
  log << "nodes=" << field.lattice.size() << " semiconvex=" << semi.pass
      << " control=" << dist2 << "<=" << bound << '\n';
  manifest.finish(kExitOk);
  return kExitOk;
}

int verify_all(const CommandOptions& o, std::ostream& log) {
  Session s = open_session(o);
  AcceptanceOptions opts;
  opts.seed = s.config.seed;
  const fs::path dir = o.config.has_parent_path() ? o.config.parent_path() : fs::path(".");
  opts.configs = list_configs(dir);
  if (std::find(opts.configs.begin(), opts.configs.end(), o.config) == opts.configs.end())
    opts.configs.push_back(o.config);
  s.manifest->begin_stage("acceptance");
  std::ofstream out = open_csv(*s.manifest, s.out, "id,name,pass,detail");
  bool all = true;
  run_acceptance(opts, [&](const CriterionResult& r) {
    all = all && r.pass;
    out << r.id << ',' << quoted(r.name) << ',' << (r.pass ? 1 : 0) << ',' << quoted(r.detail) << '\n';
    out.flush();
    log << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << "): " << r.detail
        << '\n';
  });
  s.manifest->end_stage(all ? "ok" : "failed");
  const int code = all ? kExitOk : kExitAcceptance;
  s.manifest->finish(code);
  return code;
}

}  // namespace

int run_command(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  auto report = [&](int code, const char* kind, const std::string& message) {
    err << "error code=" << code << " kind=" << kind << " message=" << quoted(message) << '\n';
    return code;
  };
  try {
    if (o.command == "validate-geometry") return validate_geometry(o, out);
    if (o.command == "assemble") return assemble_command(o, out);
    if (o.command == "solve-elliptic") return solve_elliptic(o, out);
    if (o.command == "eig") return eig(o, out, err);
    if (o.command == "probe-e") return probe_e(o, out);
    if (o.command == "solve-parabolic") return solve_parabolic(o, out);
    if (o.command == "decay-rate") return decay_rate_command(o, out);
    if (o.command == "supconv") return supconv(o, out);
    if (o.command == "verify-all") return verify_all(o, out);
    return report(kExitConfig, "config", "unknown command '" + o.command + "'");
  } catch (const ConfigError& e) {
    return report(kExitConfig, "config", e.what());
  } catch (const GeometryError& e) {
    return report(kExitConfig, "geometry", e.what());
  } catch (const AssemblyError& e) {
    return report(kExitConfig, "assembly", e.what());
  } catch (const SpectralShiftError& e) {
    return report(kExitNumerical, "spectral_shift", e.what());
  } catch (const BarrierError& e) {
    return report(kExitNumerical, "barrier", e.what());
  } catch (const NumericalError& e) {
    return report(kExitNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return report(kExitNumerical, "internal", e.what());
  }
}

}  // namespace varfrac
