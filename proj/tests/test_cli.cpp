#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "uclab/config.hpp"
#include "uclab/error.hpp"
#include "uclab/report.hpp"

using namespace uclab;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(; small run for the command-line tests
[domain]
family = halfplane
d = 2

[coefficients]
kind = identity

[solver]
ball_radius = 1.0
h = 0.0078125
data = halfplane_harmonic:2

[tree]
depth = 2
K = 1
S = 4

[combinatorial]
delta0 = 0.25
eps = 0.05

[run]
seed = 7
)";

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::path(UCLAB_WORK_DIR) / "cli";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int run(const std::string& args) {
  const std::string cmd = std::string(UCLAB_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("config parsing errors") {
  CHECK_NOTHROW(parse_config(kSmall));
  CHECK_THROWS_AS(parse_config("[domain]\ncolour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[solver]\nh = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[tree]\ndepth = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("family = halfplane\n"), ConfigError);
  CHECK_THROWS_AS(load_config(path("missing.cfg")), ConfigError);

  RunConfig c = parse_config(kSmall);
  CHECK_NOTHROW(validate(c));
  c.h = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = parse_config(kSmall);
  c.delta0 = "1.5";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = parse_config(kSmall);
  c.eps_mode = "0.5";  // above eps0(alpha(0.25))
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = parse_config(kSmall);
  c.family = "sphere";
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("canonical json and hash") {
  const RunConfig a = parse_config(kSmall);
  // Same content, different order, spacing and comments.
  const RunConfig b = parse_config(
      "[run]\nseed=7\n[tree]\nS = 4 ; radius\nK=1\ndepth=2\n[solver]\ndata = halfplane_harmonic:2\nh=0.0078125\n"
      "[combinatorial]\neps=0.05\ndelta0=0.25\n[domain]\nd=2\nfamily=halfplane\n");
  CHECK(canonical_json(a) == canonical_json(b));
  CHECK(config_hash(a) == config_hash(b));
  RunConfig c = a;
  c.seed = 8;
  CHECK(config_hash(c) != config_hash(a));
  CHECK(hex_hash(config_hash(a)).size() == 16);

  const Json parsed = Json::parse(canonical_json(a));
  CHECK(parsed.dump() == canonical_json(a));
  CHECK(parsed.is_object());

  const Json h = report_header("whitney", a);
  CHECK(h["version"] == kVersion);
  CHECK(h["config_hash"] == hex_hash(config_hash(a)));
  CHECK(h["command"] == "whitney");
}

TEST_CASE("exit codes") {
  CHECK(run("simulate --delta0 1.5") == 2);
  CHECK(run("--bogus") == 2);
  CHECK(run("solve --config " + path("nowhere.cfg")) == 2);
  spit(work_dir() / "bad.cfg", "[tree]\nkappa = 5\n[solver]\nh = -1\n");
  CHECK(run("whitney --config " + path("bad.cfg")) == 2);
  CHECK(run("simulate --delta0 0.25 --K 4 --depth 4 --trials 50 --out " + path("s.csv")) == 0);
}

TEST_CASE("simulation output is byte identical and well formed") {
  const std::string args = "simulate --delta0 0.25 --K 4 --depth 6 --trials 300 --seed 11 --out ";
  REQUIRE(run(args + path("a.csv")) == 0);
  REQUIRE(run(args + path("b.csv")) == 0);
  const std::string a = slurp(work_dir() / "a.csv");
  CHECK(a == slurp(work_dir() / "b.csv"));
  CHECK(a.rfind("depth,survivors,exact_tail,stirling_bound\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 7);
}

TEST_CASE("command chain with reports") {
  spit(work_dir() / "small.cfg", kSmall);
  const std::string cfg = " --config " + path("small.cfg");
  const RunConfig parsed = load_config(path("small.cfg"));
  const std::string hash = hex_hash(config_hash(parsed));

  REQUIRE(run("solve" + cfg + " --out " + path("sol.bin")) == 0);
  REQUIRE(run("whitney" + cfg + " --out " + path("tree.tsv") + " --report " + path("whitney.json")) == 0);
  REQUIRE(run("nodal" + cfg + " --sol " + path("sol.bin") + " --tree " + path("tree.tsv") + " --out " +
              path("nodal.json")) == 0);
  REQUIRE(run("dimension" + cfg + " --tree " + path("tree.tsv") + " --nodal " + path("nodal.json") + " --out " +
              path("dim.json")) == 0);
  REQUIRE(run("frequency" + cfg + " --sol " + path("sol.bin") + " --center 0,0 --radii 0.05:0.2:4 --out " +
              path("freq.json")) == 0);
  for (const char* name : {"whitney.json", "nodal.json", "dim.json", "freq.json"}) {
    const Json j = Json::parse(slurp(work_dir() / name));
    CHECK(j["version"] == kVersion);
    CHECK(j["config_hash"] == hash);
  }
  const WhitneyTree tree = parse_tree(slurp(work_dir() / "tree.tsv"));
  CHECK(tree.nodes.size() == 7);
  CHECK(partition_exact(tree));

  // Re-running whitney reproduces the tree byte for byte.
  REQUIRE(run("whitney" + cfg + " --out " + path("tree2.tsv")) == 0);
  CHECK(slurp(work_dir() / "tree.tsv") == slurp(work_dir() / "tree2.tsv"));

  // A checkpoint from another domain is refused.
  spit(work_dir() / "wedge.cfg", std::string(kSmall).replace(std::string(kSmall).find("halfplane\n"), 10, "wedge\n"));
  CHECK(run("nodal --config " + path("wedge.cfg") + " --sol " + path("sol.bin") + " --tree " + path("tree.tsv")) != 0);

  // Appending adds a second line.
  REQUIRE(run("pipeline" + cfg + " --out " + path("pipe.json")) == 0);
  REQUIRE(run("pipeline" + cfg + " --append --out " + path("pipe.json")) == 0);
  const std::string lines = slurp(work_dir() / "pipe.json");
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
  const auto cut = lines.find('\n');
  CHECK(lines.substr(0, cut + 1) == lines.substr(cut + 1));
  const Json p = Json::parse(lines.substr(0, cut));
  CHECK(p["config_hash"] == hash);
  CHECK(p.contains("pass"));
}
