#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "common.hpp"

using namespace odsg::testing;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ODSG_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string fx(const std::string& name) { return fixture_path(name); }

std::string networks() { return std::string(ODSG_FIXTURES) + "/networks/"; }

}  // namespace

TEST_CASE("cli check-ci") {
  const Run yes = run("check-ci " + fx("fig03_case_control") + " --a X --b B");
  CHECK(yes.status == 0);
  const json j = json::parse(yes.out);
  CHECK(j["schema"] == "odsgraph.report/v1");
  CHECK(j["holds"] == true);

  const Run no = run("check-ci " + fx("fig03_case_control") + " --a X --b B --given S --method d-separation");
  CHECK(no.status == 1);
  CHECK(json::parse(no.out)["holds"] == false);
}

TEST_CASE("cli collapse and friends") {
  const Run reduce = run("collapse " + fx("fig11_hrt_tci_selected") + " --x HRT --y TCI --keep Age,Smo,THist --over Occ");
  CHECK(reduce.status == 0);
  CHECK(json::parse(reduce.out)["verdict"]["criterion"] == "cor_reduce_ii");

  CHECK(run("collapse " + fx("fig08_matched") + " --x X --y Y").status == 1);
  CHECK(run("collapse " + fx("fig08_matched") + " --x X --y Y --keep B").status == 0);
  CHECK(run("collapse " + fx("fig08_matched") + " --x X --y Y --over X").status == 2);

  const Run bb = run("bias-breaking " + fx("fig03_case_control") + " --x X --y Y --pool B,C");
  CHECK(bb.status == 0);
  CHECK(bb.out.find("\"C\"") != std::string::npos);

  CHECK(run("null-test " + fx("fig08_matched") + " --x X --y Y --c B").status == 0);
}

TEST_CASE("cli identify") {
  const Run r = run("identify " + fx("fig27_dropout") + " --x X --y Y --s S --c C");
  CHECK(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["estimable_cor"] == true);
  CHECK(j["bias_breaking_z"]["swapped"] == true);
  CHECK(j["conclusion"] == "COR(C) estimable by OR(C, S=1), X and Y interchanged");
  CHECK(run("identify " + fx("fig27_dropout") + " --x X --y Y").status == 1);
  const Run ttp = run("identify " + fx("fig24_time_to_pregnancy") + " --x X --y Y --s S --c C --z Z");
  CHECK(ttp.status == 0);
  CHECK(json::parse(ttp.out)["conclusion"] == "COR(C) estimable by OR(Z, C, S=1)");
}

TEST_CASE("cli simulate, estimate and verify") {
  const auto dir = std::filesystem::temp_directory_path() / "odsgraph_cli_test";
  std::filesystem::create_directories(dir);
  const std::string csv = (dir / "fig08.csv").string();
  const std::string net = networks() + "fig08_matched.cpt";

  const Run sim = run("simulate " + fx("fig08_matched") + " " + net + " --n 5000 --seed 3 --select --out " + csv);
  REQUIRE(sim.status == 0);
  CHECK(json::parse(sim.out)["provenance"]["regime"] == "selected");

  const Run est = run("estimate " + csv + " --x X --y Y --given B");
  CHECK(est.status == 0);
  const json e = json::parse(est.out);
  CHECK(e["schema"] == "odsgraph.report/v1");

  const Run ver = run("verify " + fx("fig08_matched") + " " + net + " --suite collapsibility --x X --y Y --keep B");
  CHECK(ver.status == 0);
  CHECK(json::parse(ver.out)["max_log_difference"].get<double>() <= 1e-9);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cli errors exit with 2") {
  CHECK(run("check-ci /nonexistent.graph --a X --b Y").status == 2);
  CHECK(run("check-ci " + fx("fig03_case_control") + " --a X").status == 2);
  CHECK(run("check-ci " + fx("fig03_case_control") + " --a X --b Q").status == 2);
  CHECK(run("frobnicate").status == 2);
  const auto bad = std::filesystem::temp_directory_path() / "odsgraph_bad.graph";
  {
    std::ofstream out(bad);
    out << "node A states=0,1\nnode B states=0,1\nedge A => B\n";
  }
  const std::string cmd = std::string(ODSG_CLI) + " check-ci " + bad.string() + " --a A --b B 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string err;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) err += buf;
  CHECK(WEXITSTATUS(pclose(pipe)) == 2);
  CHECK(err.find(bad.string() + ":3:") != std::string::npos);
  std::filesystem::remove(bad);
  CHECK(run("moralize " + fx("fig03_case_control") + " --of X,Y --json").status == 0);
  CHECK(run("dot " + fx("fig03_case_control")).out.rfind("digraph", 0) == 0);
}
