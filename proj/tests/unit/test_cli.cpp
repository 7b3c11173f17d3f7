#include "kmsh/tools/run.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kmsh::cli;

namespace {

std::string fixture(const std::string& name) { return std::string(KMSH_FIXTURES) + "/" + name; }

int exec(const JobSpec& s, std::string& out, std::string& err) {
  std::ostringstream o, e;
  int rc = execute(s, o, e);
  out = o.str();
  err = e.str();
  return rc;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("charnum on the two-divisor fixture") {
  JobSpec s;
  s.command = "charnum";
  s.inputs = {fixture("two_divisor.json")};
  Report r = run(s);
  CHECK(r.status == ok);
  CHECK(r.data["report"]["par_ch2"] == "1/6");
  CHECK(r.data["report"]["par_deg"] == "-5/6");
  CHECK(r.data["cross_check"]["direct"] == r.data["cross_check"]["via_graded"]);

  s.inputs = {fixture("localsys.json")};
  Report l = run(s);
  CHECK(l.status == ok);
  CHECK(l.data["report"]["par_ch2"] == "1/6");
}

TEST_CASE("corr round trips through the flat side") {
  JobSpec s;
  s.command = "corr";
  s.inputs = {fixture("localsys.json")};
  CHECK(run(s).status == ok);
  s.inputs = {fixture("monodromy.json")};
  Report r = run(s);
  CHECK(r.status == ok);
  CHECK_FALSE(r.text.empty());
}

TEST_CASE("exit codes") {
  std::string out, err;
  JobSpec s;
  s.command = "charnum";
  s.inputs = {"/nonexistent/table.json"};
  CHECK(exec(s, out, err) == validation_failure);
  CHECK_FALSE(err.empty());

  auto tmp = std::filesystem::temp_directory_path() / "kmsh_cli_bad.json";
  std::ofstream(tmp) << "{\"rank\": 1, \"geometry\": ";
  s.inputs = {tmp.string()};
  CHECK(exec(s, out, err) == validation_failure);

  JobSpec f;
  f.command = "flow";
  f.inputs = {fixture("flow.json")};
  f.dt = 5.0;
  CHECK(exec(f, out, err) == validation_failure);
  CHECK(err.find("stability guard") != std::string::npos);

  CHECK_THROWS(parse_grid("4x64"));
  CHECK_THROWS(parse_grid("64by64"));
  CHECK(parse_grid("16x32") == std::pair<int, int>{16, 32});
  CHECK(parse_list("0.5,0.1").size() == 2);
}

TEST_CASE("verify passes") {
  JobSpec s;
  s.command = "verify";
  std::string out, err;
  CHECK(exec(s, out, err) == ok);
}

TEST_CASE("output files are deterministic for a fixed seed") {
  auto dir = std::filesystem::temp_directory_path() / "kmsh_cli_det";
  std::filesystem::create_directories(dir);
  JobSpec s;
  s.command = "scan";
  s.kind = "inequality";
  s.samples = 2000;
  s.seed = 11;
  std::string out, err;
  s.output = (dir / "a").string();
  REQUIRE(exec(s, out, err) == ok);
  s.output = (dir / "b").string();
  REQUIRE(exec(s, out, err) == ok);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK_FALSE(slurp(dir / "a.json").empty());

  JobSpec f;
  f.command = "flow";
  f.inputs = {fixture("flow.json")};
  f.steps = 5;
  f.output = (dir / "f1.json").string();
  REQUIRE(exec(f, out, err) == ok);
  f.output = (dir / "f2").string();
  REQUIRE(exec(f, out, err) == ok);
  CHECK(slurp(dir / "f1.csv") == slurp(dir / "f2.csv"));
  CHECK(slurp(dir / "f1.csv").rfind("step,t,det_residual,M,M_direct,lambdaG_perp_l2", 0) == 0);
}
