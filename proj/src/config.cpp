#include "varfrac/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "varfrac/elliptic.hpp"
#include "varfrac/errors.hpp"
#include "varfrac/report.hpp"

namespace varfrac {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  if (trim(text.substr(used)) != "") throw ConfigError(where + ": trailing text in '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Vec2 parse_point(const std::string& text, const std::string& where) {
  std::vector<std::string> parts;
  for (const auto& piece : split(text, ','))
    for (const auto& p : split(piece, ' ')) parts.push_back(p);
  if (parts.size() == 1) return {to_number(parts[0], where), 0.0};
  if (parts.size() != 2) throw ConfigError(where + ": expected 'x y', got '" + text + "'");
  return {to_number(parts[0], where), to_number(parts[1], where)};
}

constexpr double kDeg = std::numbers::pi / 180.0;

DomainSpec read_domain(const KeyValueFile& kv) {
  const std::string kind = lower(kv.get("domain", "kind"));
  if (kind == "interval") return DomainSpec::interval(kv.number("domain", "a"), kv.number("domain", "b"));
  if (kind == "ball") {
    const int dim = static_cast<int>(kv.integer("domain", "dim", 2));
    const Vec2 c = parse_point(kv.get("domain", "center", "0 0"), "domain.center");
    return DomainSpec::ball(c, kv.number("domain", "radius"), dim);
  }
  if (kind == "polygon") {
    std::vector<Vec2> verts;
    for (const auto& v : split(kv.get("domain", "vertices"), ';'))
      verts.push_back(parse_point(v, "domain.vertices"));
    return DomainSpec::polygon(std::move(verts));
  }
  throw ConfigError("domain.kind: unknown kind '" + kind + "' (interval, ball, polygon)");
}

SigmaSpec read_sigma(const KeyValueFile& kv) {
  const std::string kind = lower(kv.get("family", "sigma", "full_space"));
  const double q = kv.number("family", "q", 1.0);
  if (kind == "full_space") return SigmaSpec::full_space(q);
  if (kind == "double_cone")
    return SigmaSpec::double_cone(kv.number("family", "sigma_axis_deg", 0.0) * kDeg,
                                  kv.number("family", "sigma_half_angle_deg") * kDeg, q);
  if (kind == "union_of_cones") {
    std::vector<SigmaSpec::Cone> cones;
    for (const auto& c : split(kv.get("family", "sigma_cones"), ',')) {
      const auto parts = split(c, ':');
      if (parts.size() != 2)
        throw ConfigError("family.sigma_cones: expected 'axis:half_angle' pairs in degrees");
      cones.push_back({to_number(parts[0], "family.sigma_cones") * kDeg,
                       to_number(parts[1], "family.sigma_cones") * kDeg});
    }
    return SigmaSpec::union_of_cones(std::move(cones), q);
  }
  throw ConfigError("family.sigma: unknown kind '" + kind + "'");
}

DomainFamily read_family(const KeyValueFile& kv) {
  DomainFamily fam;
  const std::string rule = lower(kv.get("family", "rule", "constant"));
  if (rule == "constant") fam.rule = DomainFamily::Rule::constant;
  else if (rule == "ball_radius") fam.rule = DomainFamily::Rule::ball_radius;
  else if (rule == "star_shaped") fam.rule = DomainFamily::Rule::star_shaped;
  else if (rule == "masked") fam.rule = DomainFamily::Rule::masked;
  else throw ConfigError("family.rule: unknown rule '" + rule + "'");
  fam.sigma = read_sigma(kv);
  fam.zeta = kv.number("family", "zeta", 0.4);
  if (!(fam.zeta > 0.0 && fam.zeta < 0.5)) throw ConfigError("family.zeta must lie in (0, 1/2)");
  fam.rho.scale = kv.number("family", "rho_scale", 1.0);
  fam.rho.exponent = kv.number("family", "rho_exponent", 0.0);
  fam.time.amplitude = kv.number("family", "time_amplitude", 0.0);
  fam.time.rate = kv.number("family", "time_rate", 0.0);
  return fam;
}

CoefficientProfile read_profile(const KeyValueFile& kv) {
  const std::string kind = lower(kv.get("operator", "profile", "killing"));
  CoefficientProfile p;
  if (kind == "killing") p = CoefficientProfile::killing();
  else if (kind == "kinetic") p = CoefficientProfile::kinetic();
  else if (kind == "synthetic") p = CoefficientProfile::synthetic(kv.number("operator", "c"));
  else throw ConfigError("operator.profile: unknown profile '" + kind +
                         "' (killing, kinetic, synthetic)");
  if (kv.has("operator", "alpha")) p.alpha = kv.number("operator", "alpha");
  if (kv.has("operator", "beta")) p.beta = kv.number("operator", "beta");
  p.angular_count = static_cast<int>(kv.integer("operator", "angular_count", 2048));
  return p;
}

NodalLaw read_law(const KeyValueFile& kv, const std::string& key, const std::string& fallback,
                  bool allow_stationary) {
  NodalLaw law;
  const std::string kind = lower(kv.get("problem", key, fallback));
  if (kind == "zero") law.kind = NodalLaw::Kind::zero;
  else if (kind == "constant") law.kind = NodalLaw::Kind::constant;
  else if (kind == "power") law.kind = NodalLaw::Kind::power;
  else if (kind == "stationary" && allow_stationary) law.kind = NodalLaw::Kind::stationary;
  else throw ConfigError("problem." + key + ": unknown law '" + kind + "'");
  law.value = kv.number("problem", key + "_value", 1.0);
  law.exponent = law.kind == NodalLaw::Kind::power ? kv.number("problem", key + "_exponent") : 0.0;
  return law;
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  kv.text_ = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // ';' separates polygon vertices, so it only starts a comment at the line start
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty() && line.front() == ';') line.clear();
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      kv.values_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = lower(trim(line.substr(0, eq)));
    if (kv.values_[section].count(key))
      throw ConfigError(where + ": duplicate key " + section + "." + key);
    kv.values_[section][key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

std::string KeyValueFile::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing required key '" + key + "' in section [" + section + "]");
  used_[section][key] = true;
  return values_.at(section).at(key);
}

std::string KeyValueFile::get(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double KeyValueFile::number(const std::string& section, const std::string& key) const {
  return to_number(get(section, key), section + "." + key);
}

double KeyValueFile::number(const std::string& section, const std::string& key,
                            double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

long long KeyValueFile::integer(const std::string& section, const std::string& key,
                                long long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size())
    throw ConfigError(section + "." + key + ": expected an integer, got '" + v + "'");
  return out;
}

bool KeyValueFile::boolean(const std::string& section, const std::string& key,
                           bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = lower(get(section, key));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(section + "." + key + ": expected a boolean, got '" + v + "'");
}

void KeyValueFile::reject_unknown() const {
  for (const auto& [section, keys] : values_) {
    for (const auto& [key, value] : keys) {
      const auto s = used_.find(section);
      if (s == used_.end() || !s->second.count(key))
        throw ConfigError("unknown key " + section + "." + key + " in " + origin_);
    }
  }
}

Eigen::VectorXd NodalLaw::sample(const Eigen::VectorXd& dist) const {
  switch (kind) {
    case Kind::zero:
      return Eigen::VectorXd::Zero(dist.size());
    case Kind::constant:
      return Eigen::VectorXd::Constant(dist.size(), value);
    case Kind::power:
      return value * dist.array().pow(exponent).matrix();
    case Kind::stationary:
      break;
  }
  throw ConfigError("the stationary law needs the stationary solution");
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(text); }

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const KeyValueFile kv = KeyValueFile::parse(text, origin);
  ExperimentConfig c;
  c.source = origin;
  c.text = text;

  c.domain = read_domain(kv);
  c.family = read_family(kv);
  c.params = FracParams(kv.number("operator", "s"), c.domain.dim());
  c.profile = read_profile(kv);

  c.forcing = read_law(kv, "f", "constant", false);
  c.eta_f = kv.number("problem", "eta_f", c.params.s);
  c.initial = read_law(kv, "u0", "zero", true);
  c.eta_1 = kv.number("problem", "eta_1", c.params.s);
  c.lambda = kv.number("problem", "lambda", 0.0);
  c.h_decay = {kv.number("problem", "h_decay_amplitude", 0.0), kv.number("problem", "h_decay_rate", 0.0)};
  c.f_decay = {kv.number("problem", "f_decay_amplitude", 0.0), kv.number("problem", "f_decay_rate", 0.0)};
  c.horizon = kv.number("problem", "horizon", 1.0);
  c.run_to_steady = kv.boolean("problem", "run_to_steady", false);

  c.dx = kv.number("solver", "dx");
  c.dt = kv.number("solver", "dt", 1e-2);
  c.eig_tol = kv.number("solver", "eig_tol", 1e-13);
  c.t_max = kv.number("solver", "t_max", 100.0);
  c.max_stamps = static_cast<int>(kv.integer("solver", "max_stamps", 200));
  c.seed = static_cast<std::uint64_t>(kv.integer("solver", "seed", 1));
  c.density_rho0 = kv.number("solver", "density_rho0", 0.1 * c.domain.diameter());

  c.output_dir = kv.get("outputs", "dir", ".");
  c.manifest_name = kv.get("outputs", "manifest", "manifest.json");
  kv.reject_unknown();

  const double two_s = 2.0 * c.params.s;
  if (!(c.dx > 0.0)) throw ConfigError("solver.dx must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(c.eta_f > 0.0 && c.eta_f < two_s)) throw ConfigError("problem.eta_f must lie in (0, 2s)");
  if (!(c.eta_1 > 0.0 && c.eta_1 < two_s)) throw ConfigError("problem.eta_1 must lie in (0, 2s)");
  if (c.max_stamps < 2) throw ConfigError("solver.max_stamps must be at least 2");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

ParabolicProblem Experiment::parabolic(const Eigen::VectorXd& stationary) const {
  ParabolicProblem p;
  p.grid = grid;
  p.family = config.family;
  p.params = config.params;
  p.profile = config.profile;
  p.forcing = forcing;
  p.u0 = config.initial.kind == NodalLaw::Kind::stationary ? stationary
                                                           : config.initial.sample(op->dist());
  p.h_decay = config.h_decay;
  p.f_decay = config.f_decay;
  p.dt = config.dt;
  p.horizon = config.horizon;
  p.run_to_steady = config.run_to_steady;
  p.t_max = config.t_max;
  p.max_stamps = config.max_stamps;
  return p;
}

Experiment build_experiment(const ExperimentConfig& config) {
  Experiment ex;
  ex.config = config;
  const auto& c = ex.config;
  const double two_s = 2.0 * c.params.s;

  // declared annulus density of Sigma (exact angular measure)
  const double density = c.family.sigma.angular_density(c.params.dim);
  if (density + 1e-12 < c.family.sigma.q) {
    std::ostringstream os;
    os << "family.q = " << c.family.sigma.q << " exceeds the annulus density " << density
       << " of the declared Sigma";
    throw ConfigError(os.str());
  }
  // forcing and initial laws must stay within their growth certificates as dx -> 0
  if (c.forcing.kind == NodalLaw::Kind::power && c.forcing.exponent < c.eta_f - two_s)
    throw ConfigError("problem.f_exponent is below eta_f - 2s: the forcing certificate fails");
  if (c.initial.kind == NodalLaw::Kind::power && c.initial.exponent < c.eta_1)
    throw ConfigError("problem.u0_exponent is below eta_1: the initial-datum certificate fails");

  ex.grid = std::make_shared<const Grid>(build_grid(c.domain, c.dx));
  ex.op = std::make_unique<DiscreteOperator>(assemble(ex.grid, c.family, c.params, c.profile));
  ex.forcing = c.forcing.sample(ex.op->dist());
  certify_forcing(*ex.op, ex.forcing, c.eta_f);
  return ex;
}

}  // namespace varfrac
