#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(CLI_BINARY) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("coherence --scheme fd --case sin1d --n 5") == 0);
  CHECK(run("coherence --scheme fem --dim 2 --case sinsin2d --n 4") == 0);
  CHECK(run("coherence --scheme fv --case quad1d --n 4") == 0);
  CHECK(run("coherence --scheme mfd --dim 2 --case sinsin2d --n 3 --mode rt0") == 0);
  CHECK(run("greengauss --scheme fd --case sin1d --n 5") == 0);

  // usage errors
  CHECK(run("coherence --scheme nope --case sin1d --n 4") == 2);
  CHECK(run("frobnicate") == 2);

  // runtime failure: a case that does not match the requested dimension
  CHECK(run("coherence --scheme fd --dim 1 --case sinsin2d --n 4") == 1);

  // numerical failure: the deliberately broken flux distribution
  CHECK(run("greengauss --scheme fv --case quad1d --n 4 --break") == 1);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  std::string dir = "cli_test_out";
  std::string a = dir + "/a", b = dir + "/b", c = dir + "/c";
  REQUIRE(run("coherence --scheme fv --dim 2 --case sinsin2d --n 4 --seed 7 --out " + a) == 0);
  REQUIRE(run("coherence --scheme fv --dim 2 --case sinsin2d --n 4 --seed 7 --out " + b) == 0);
  std::string ra = slurp(a + "/coherence.json");
  REQUIRE_FALSE(ra.empty());
  CHECK(ra == slurp(b + "/coherence.json"));

  // the green-gauss defect is roundoff-level but nonzero, so its 17-digit
  // report does depend on the seed; identical seeds still agree exactly
  REQUIRE(run("greengauss --scheme fd --case sin1d --n 5 --seed 7 --out " + a) == 0);
  REQUIRE(run("greengauss --scheme fd --case sin1d --n 5 --seed 7 --out " + b) == 0);
  REQUIRE(run("greengauss --scheme fd --case sin1d --n 5 --seed 8 --out " + c) == 0);
  std::string ga = slurp(a + "/greengauss.json");
  REQUIRE_FALSE(ga.empty());
  CHECK(ga == slurp(b + "/greengauss.json"));
  CHECK(ga != slurp(c + "/greengauss.json"));
}
