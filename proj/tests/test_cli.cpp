// Exit codes, output formats, witness files, the SSA/CNF dumps, the
// external solver backend and the corpus report, exercised through the
// installed binaries.
#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

const std::string kVerify = KIWI_BINARY_DIR "/kiwi-verify";
const std::string kSatd = KIWI_BINARY_DIR "/kiwi-satd";
const std::string kBench = KIWI_SOURCE_DIR "/benchmarks";

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_path(const char* name) {
  return std::string(::testing::TempDir()) + name;
}

}  // namespace

TEST(Cli, SafeVerdictAndExitCode) {
  RunResult r = run(kVerify + " " + kBench + "/count.c");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("SAFE k=1"), std::string::npos);
}

TEST(Cli, UnsafeVerdictAndExitCode) {
  RunResult r = run(kVerify + " --mode ibmc " + kBench + "/assert0.c");
  EXPECT_EQ(r.code, 10);
  EXPECT_NE(r.out.find("UNSAFE k=0"), std::string::npos);
  EXPECT_NE(r.out.find("violation at"), std::string::npos);
}

TEST(Cli, UnknownVerdictAndExitCode) {
  RunResult r = run(kVerify + " --max-k 2 " + kBench + "/stride_gap.c");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("UNKNOWN"), std::string::npos);
}

TEST(Cli, TimeoutGivesResourceOutExitCode) {
  RunResult r = run(kVerify + " --timeout 0.000001 " + kBench + "/appendix.c");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("RESOURCE-OUT"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(kVerify + " --no-such-flag").code, 64);
  EXPECT_EQ(run(kVerify).code, 64);  // no input file
  EXPECT_EQ(run(kVerify + " --mode what " + kBench + "/count.c").code, 64);
  EXPECT_EQ(run(kVerify + " --solver plain " + kBench + "/count.c").code, 64);
}

TEST(Cli, JsonVerdictRecord) {
  RunResult r = run(kVerify + " --json " + kBench + "/count.c");
  ASSERT_EQ(r.code, 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "safe");
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["invariant"].size(), 2u);

  r = run(kVerify + " --json --mode ibmc " + kBench + "/count3_bug.c");
  ASSERT_EQ(r.code, 10);
  j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "unsafe");
  EXPECT_EQ(j["k"], 3);
  EXPECT_FALSE(j["trace"].empty());
}

TEST(Cli, SafeWitnessFile) {
  std::string w = tmp_path("safe_witness.txt");
  RunResult r = run(kVerify + " --witness " + w + " " + kBench + "/count.c");
  ASSERT_EQ(r.code, 0);
  std::string txt = slurp(w);
  EXPECT_EQ(txt.rfind("safe k=1\n", 0), 0u);
  EXPECT_NE(txt.find("x#lb3 <= 10"), std::string::npos);
}

TEST(Cli, UnsafeWitnessFile) {
  std::string w = tmp_path("unsafe_witness.txt");
  RunResult r = run(kVerify + " --witness " + w + " " + kBench + "/nondet_eq.c");
  ASSERT_EQ(r.code, 10);
  std::string txt = slurp(w);
  EXPECT_EQ(txt.rfind("unsafe k=0\n", 0), 0u);
  EXPECT_NE(txt.find("nondet: 42"), std::string::npos);
  EXPECT_NE(txt.find("violation "), std::string::npos);
}

TEST(Cli, SsaDumpMatchesGoldenFile) {
  RunResult r = run(kVerify + " --dump-ssa " + kBench + "/count.c");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(KIWI_SOURCE_DIR "/tests/golden/fig2.ssa"));
}

TEST(Cli, CnfDumpIsDimacs) {
  std::string f = tmp_path("dump.cnf");
  RunResult r = run(kVerify + " --dump-cnf " + f + " " + kBench + "/count.c");
  ASSERT_EQ(r.code, 0);
  std::string txt = slurp(f);
  EXPECT_EQ(txt.rfind("p cnf ", 0), 0u);
}

TEST(Cli, ExternalSolverBackendAgrees) {
  RunResult r = run(kVerify + " --solver external:" + kSatd + " " + kBench + "/count.c");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("SAFE k=1"), std::string::npos);

  r = run(kVerify + " --solver external:" + kSatd + " --mode ibmc " + kBench +
          "/count3_bug.c");
  EXPECT_EQ(r.code, 10);
  EXPECT_NE(r.out.find("UNSAFE k=3"), std::string::npos);
}

TEST(Cli, EnumInferWidthGate) {
  EXPECT_EQ(run(kVerify + " --infer enum " + kBench + "/count.c").code, 64);
  EXPECT_EQ(run(kVerify + " --infer enum --force " + kBench + "/count.c").code, 0);
  EXPECT_EQ(run(kVerify + " --infer enum " + kBench + "/small_count.c").code, 0);
}

TEST(Cli, StatsGoToStderr) {
  // run() drops stderr, so fold it into stdout here
  FILE* p = popen((kVerify + " --stats " + kBench + "/count.c 2>&1").c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::string all;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) all.append(buf, n);
  pclose(p);
  EXPECT_NE(all.find("stats: solver_calls="), std::string::npos);
}

TEST(Cli, CorpusReportOnSmallDirectory) {
  std::string dir = tmp_path("mini_corpus");
  std::string rm = "rm -rf " + dir + " && mkdir -p " + dir;
  ASSERT_EQ(system(rm.c_str()), 0);
  {
    std::ofstream a(dir + "/ok.c");
    a << "void main() { unsigned x = 0; while (x < 5) { x = x + 1; } assert(x == 5); }\n";
    std::ofstream b(dir + "/bad.c");
    b << "void main() { int x = 2; assert(x == 1); }\n";
    std::ofstream m(dir + "/manifest");
    m << "ok.c,safe@1,counting loop\n";
    m << "bad.c,unsafe@0,fails immediately\n";
  }
  RunResult r = run(kVerify + " --corpus " + dir + " --max-k 6 --report json --jobs 2");
  ASSERT_EQ(r.code, 0) << r.out;
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["corpus_size"], 2);
  for (const char* m : {"ibmc", "kind", "ai", "kiki", "portfolio"}) {
    ASSERT_TRUE(j["modes"].contains(m));
    const auto& c = j["modes"][m];
    int total = 0;
    for (const char* f : {"counterexamples", "proofs", "false_proofs", "false_alarms",
                          "inconclusive", "timeout"})
      total += c[f].get<int>();
    EXPECT_EQ(total, 2) << m;
    EXPECT_EQ(c["false_proofs"], 0) << m;
    EXPECT_EQ(c["false_alarms"], 0) << m;
  }
  EXPECT_EQ(j["modes"]["kiki"]["proofs"], 1);
  EXPECT_EQ(j["modes"]["kiki"]["counterexamples"], 1);

  RunResult t = run(kVerify + " --corpus " + dir + " --max-k 6 --report text");
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("counterexamples"), std::string::npos);
  EXPECT_NE(t.out.find("kiki"), std::string::npos);
}

TEST(Cli, CorpusMissingManifestFails) {
  std::string dir = tmp_path("no_manifest");
  std::string rm = "rm -rf " + dir + " && mkdir -p " + dir;
  ASSERT_EQ(system(rm.c_str()), 0);
  RunResult r = run(kVerify + " --corpus " + dir);
  EXPECT_EQ(r.code, 2);
}
