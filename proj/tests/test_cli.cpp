#include <filesystem>
#include <fstream>
#include <sstream>

#include "ambit/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace ambit;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("verify passes on the default config") {
  Run r = run({"verify", "--pairs", "20", "--row-bits", "4096"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS bbop_xnor") != std::string::npos);
}

TEST_CASE("verify reports a failing invariant") {
  // A huge sense offset makes every TRA unresolvable.
  auto cfg = temp_file("ambit_cli_offset.json", R"({"electrical": {"offset_threshold": 0.5}})");
  Run r = run({"--config", cfg.string(), "verify", "--pairs", "2", "--row-bits", "512"});
  CHECK(r.code == kExitVerifyFailed);
  CHECK(r.out.find("FAIL tra_majority") != std::string::npos);
}

TEST_CASE("trace of and has one row per command") {
  Run r = run({"trace", "and", "--row-bits", "4096"});
  REQUIRE(r.code == kExitOk);
  CHECK(lines(r.out) == 1 + 12);
  CHECK(r.out.rfind("seq_no,command,bank,subarray,address_label,wordlines_raised,decoder,aap_boundary\n", 0) == 0);
  CHECK(r.out.find("9,ACTIVATE,0,0,B12,3,b_group,1") != std::string::npos);
}

TEST_CASE("mc at zero variation") {
  Run r = run({"mc", "--variation", "0", "--trials", "1000"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out == "variation,trials,failures,rate,reference_rate\n0.0000,1000,0,0.000000,0.0000\n");
}

TEST_CASE("bench emits the report fields") {
  Run r = run({"bench", "and"});
  REQUIRE(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["bench"] == "and");
  CHECK(j["ops"][0]["latency_ns"] == 196.0);
  for (const char* k : {"energy_nj_per_kb", "ambit_gbps", "baseline_gbps", "speedup", "energy_reduction"})
    CHECK(j["ops"][0].contains(k));

  Run b = run({"bench", "bitmap", "--users", "4096", "--weeks", "2"});
  REQUIRE(b.code == kExitOk);
  auto jb = nlohmann::json::parse(b.out);
  CHECK(jb["bitmap"]["op_tally"]["or"] == 12);
  CHECK(jb["bitmap"]["op_tally"]["and"] == 3);
  CHECK(jb["bitmap"]["op_tally"]["bitcount"] == 3);
}

TEST_CASE("bench and mc are reproducible") {
  for (std::vector<std::string> args :
       {std::vector<std::string>{"bench", "bitweaving", "--rows", "2048", "--bits", "6", "--seed", "3"},
        std::vector<std::string>{"bench", "setops", "--domain", "8192", "--elements", "100"},
        std::vector<std::string>{"mc", "--variation", "0.2", "--trials", "2000", "--seed", "5"}}) {
    Run a = run(args), b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("--out writes to a file") {
  auto p = std::filesystem::temp_directory_path() / "ambit_cli_out.csv";
  std::filesystem::remove(p);
  Run r = run({"trace", "not", "--row-bits", "512", "--out", p.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(lines(ss.str()) == 1 + 6);
}

TEST_CASE("table7 prints three tables") {
  Run r = run({"table7"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("Latency (ns)") != std::string::npos);
  CHECK(r.out.find("Energy (nJ/KB)") != std::string::npos);
  CHECK(r.out.find("Throughput (GB/s)") != std::string::npos);
}

TEST_CASE("usage and config errors exit with 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"trace", "nope"}).code == kExitUsage);
  CHECK(run({"bench", "nope"}).code == kExitUsage);
  CHECK(run({"mc", "--variation", "0.9"}).code == kExitUsage);
  CHECK(run({"--row-bits", "100", "table7"}).code == kExitUsage);
  auto bad = temp_file("ambit_cli_bad.json", R"({"timing": {"bogus": 1}})");
  Run r = run({"--config", bad.string(), "table7"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("bogus") != std::string::npos);
  CHECK(run({"--help"}).code == kExitOk);
}
