#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "varfrac/config.hpp"
#include "varfrac/errors.hpp"
#include "varfrac/experiment.hpp"

using namespace varfrac;
namespace fs = std::filesystem;

namespace {

const char* kReference = R"([domain]
kind = interval
a = 0
b = 1

[family]
rule = constant
sigma = full_space

[operator]
s = 0.75
profile = killing

[problem]
f = constant
f_value = 1
eta_f = 0.75
horizon = 0.5

[solver]
dx = 0.02
dt = 0.005
)";

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("varfrac_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return dir / file;
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::string& command, const fs::path& config, const fs::path& out_file) {
  CommandOptions o;
  o.command = command;
  o.config = config;
  o.out = out_file;
  std::ostringstream out, err;
  const int code = run_command(o, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(kReference);
  CHECK(c.params.s == 0.75);
  CHECK(c.dx == 0.02);
  CHECK(c.domain.kind() == DomainSpec::Kind::interval);
  CHECK(c.hash() == parse_config(kReference).hash());
  CHECK(c.hash() != parse_config(std::string(kReference) + "# trailing comment\n").hash());

  CHECK_THROWS_AS(parse_config(replace(kReference, "s = 0.75\n", "")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kReference, "dx = 0.02", "dx = 0.02\ndx = 0.01")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kReference, "dx = 0.02", "dx = 0.02\ndxx = 1")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kReference, "s = 0.75", "s = 1.5")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kReference, "kind = interval", "kind = torus")), ConfigError);

  // polygon vertices use ';' separators and comments after '#'
  const std::string poly = replace(replace(kReference, "kind = interval\na = 0\nb = 1",
                                           "kind = polygon  # L\nvertices = 0 0; 2 0; 2 1; 1 1; 1 2; 0 2"),
                                   "rule = constant", "rule = star_shaped");
  const ExperimentConfig p = parse_config(poly);
  CHECK(p.domain.vertices().size() == 6);
}

TEST_CASE("missing s exits 1 and names the key") {
  Scratch tmp("missing_s");
  const auto cfg = tmp.write("bad.ini", replace(kReference, "s = 0.75\n", ""));
  const Run r = run("assemble", cfg, tmp.dir / "a.csv");
  CHECK(r.code == kExitConfig);
  CHECK(r.err.rfind("error code=1 kind=config", 0) == 0);
  CHECK(r.err.find("s") != std::string::npos);
  CHECK(r.err.find("[operator]") != std::string::npos);
}

TEST_CASE("eig with a loose tolerance disagrees with the oracle and exits 3") {
  Scratch tmp("eig");
  const auto good = tmp.write("good.ini", kReference);
  const Run ok = run("eig", good, tmp.dir / "good.csv");
  CHECK(ok.code == kExitOk);
  const auto loose = tmp.write("loose.ini", replace(kReference, "dt = 0.005", "dt = 0.005\neig_tol = 1e-2"));
  const Run bad = run("eig", loose, tmp.dir / "loose.csv");
  CHECK(bad.code == kExitAcceptance);
  CHECK(bad.err.find("kind=acceptance") != std::string::npos);
}

TEST_CASE("outputs carry the config hash and a manifest") {
  Scratch tmp("outputs");
  const auto cfg = tmp.write("ref.ini", kReference);
  const std::string hash = parse_config(kReference).hash();
  for (const std::string command : {"validate-geometry", "assemble", "solve-elliptic", "eig", "solve-parabolic"}) {
    const fs::path out = tmp.dir / (command + ".csv");
    const Run r = run(command, cfg, out);
    INFO(command << ": " << r.err);
    CHECK(r.code == kExitOk);
    const std::string text = slurp(out);
    CHECK(text.rfind("# config_hash=" + hash + " version=", 0) == 0);
    const auto manifest = nlohmann::json::parse(slurp(tmp.dir / "manifest.json"));
    CHECK(manifest["config_hash"] == hash);
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["command"].get<std::string>().rfind(command, 0) == 0);
    bool listed = false;
    for (const auto& o : manifest["outputs"]) listed = listed || o.get<std::string>() == out.string();
    CHECK(listed);
  }
}

TEST_CASE("runs are deterministic") {
  Scratch tmp("determinism");
  const auto cfg = tmp.write("ref.ini", kReference);
  for (const std::string command : {"solve-elliptic", "eig", "solve-parabolic"}) {
    run(command, cfg, tmp.dir / "a.csv");
    run(command, cfg, tmp.dir / "b.csv");
    CHECK(slurp(tmp.dir / "a.csv") == slurp(tmp.dir / "b.csv"));
  }
}

TEST_CASE("supconv reads sampled fields") {
  Scratch tmp("supconv");
  std::ostringstream csv;
  csv << "x,u\n";
  for (int i = 0; i <= 100; ++i) {
    const double x = -1.0 + 0.02 * i;
    csv << x << ',' << -std::abs(x) << '\n';
  }
  const auto in = tmp.write("field.csv", csv.str());
  CommandOptions o;
  o.command = "supconv";
  o.in = in;
  o.out = tmp.dir / "sup.csv";
  o.eps = 0.1;
  std::ostringstream out, err;
  CHECK(run_command(o, out, err) == kExitOk);
  const std::string text = slurp(o.out);
  CHECK(text.find("semiconvex=1") != std::string::npos);
  CHECK(text.find("x,u,sup,inf,argmax_x") != std::string::npos);
  o.eps = 0.0;
  CHECK(run_command(o, out, err) == kExitConfig);
}

TEST_CASE("unknown command and executable entry point") {
  CommandOptions o;
  o.command = "frobnicate";
  std::ostringstream out, err;
  CHECK(run_command(o, out, err) == kExitConfig);
  const std::string exe = VARFRAC_CLI;
  CHECK(std::system((exe + " --version > /dev/null").c_str()) == 0);
  CHECK(WEXITSTATUS(std::system((exe + " assemble > /dev/null 2>&1").c_str())) == 1);
}

TEST_CASE("verify-all on the shipped reference config") {
  Scratch tmp("verify");
  const fs::path cfg = fs::path(VARFRAC_CONFIG_DIR) / "reference_1d.ini";
  // copy so that outputs land in the scratch directory and only this config is discovered
  const std::string text = replace(slurp(cfg), "dir = out/reference_1d", "dir = " + (tmp.dir / "out").string());
  const auto local = tmp.write("reference_1d.ini", text);
  const Run r = run("verify-all", local, tmp.dir / "verify.csv");
  INFO(r.out << r.err);
  CHECK(r.code == kExitOk);
  const std::string summary = slurp(tmp.dir / "verify.csv");
  for (int id = 1; id <= 10; ++id) CHECK(summary.find("\n" + std::to_string(id) + ",") != std::string::npos);
}
