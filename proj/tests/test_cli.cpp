#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + QTSP_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, GenWritesInstanceJson) {
  const auto r = run("gen --cities 4");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n_cities"], 4);
  EXPECT_EQ(j["dist"][0][3], 3.0);
}

TEST(Cli, ExactPrintsOptimum) {
  const auto r = run("exact --cities 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "tour (1,2,3,4) length 6\n");
}

TEST(Cli, ExactFromInstanceFile) {
  const auto path = tmp("qtsp_cli_inst.json");
  ASSERT_EQ(run("gen --cities 6 --out " + path.string()).code, 0);
  const auto r = run("exact --instance " + path.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("length 10"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, DiagGroundEnergy) {
  const auto r = run("diag --cities 2 --variant eq2 --p 100 --p-prime 100");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("dimension 4"), std::string::npos);
  EXPECT_NE(r.out.find("ground_energy -98"), std::string::npos);
}

TEST(Cli, DiagWritesCsv) {
  const auto path = tmp("qtsp_cli_h.csv");
  ASSERT_EQ(run("diag --cities 3 --variant eq4 --csv " + path.string()).code, 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("basis,1-1-1,1-1-2", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 27);
  std::filesystem::remove(path);
}

TEST(Cli, SolveWritesLogAndCheckpoint) {
  const auto log = tmp("qtsp_cli_run.jsonl"), params = tmp("qtsp_cli_params.json");
  const auto r = run("solve --cities 7 --rep qudit --seed 3 --out " + log.string() + " --params-out " + params.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("converged true"), std::string::npos);
  std::ifstream in(log);
  std::string first, last, line;
  std::getline(in, first);
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(nlohmann::json::parse(first)["type"], "header");
  EXPECT_EQ(nlohmann::json::parse(last)["reason"], "target-reached");
  std::ifstream pin(params);
  EXPECT_EQ(nlohmann::json::parse(pin)["kind"], "cnn");
  std::filesystem::remove(log);
  std::filesystem::remove(params);
}

TEST(Cli, SeedFromEnvironment) {
  const auto a = run("solve --cities 6 --rep qubit --steps 3 --target none", "QTSP_SEED=17");
  const auto b = run("solve --cities 6 --rep qubit --steps 3 --target none --seed 17");
  ASSERT_EQ(a.code, 0);
  auto strip_time = [](std::string s) { return s.substr(0, s.find("total_time_s")); };
  EXPECT_EQ(strip_time(a.out), strip_time(b.out));
  EXPECT_EQ(run("solve --cities 6 --steps 1", "QTSP_SEED=abc").code, 1);
}

TEST(Cli, SweepAndReport) {
  const auto sum = tmp("qtsp_cli_sweep.json"), csv = tmp("qtsp_cli_report.csv");
  ASSERT_EQ(run("sweep --cities 5 --rep qudit --trials 3 --jobs 2 --seed 1 --steps 50 --out " + sum.string()).code, 0);
  const auto r = run("report " + sum.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("n_cities,representation,n_trials,percent_converged,median_time_s\n5,qudit,3,", 0), 0u);
  ASSERT_EQ(run("report " + sum.string() + " --out " + csv.string()).code, 0);
  EXPECT_TRUE(std::filesystem::exists(csv));
  std::filesystem::remove(sum);
  std::filesystem::remove(csv);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("solve --bogus").code, 1);
  EXPECT_EQ(run("exact").code, 1);
  EXPECT_EQ(run("solve --cities 4 --rep qubit --net cnn").code, 1);
  EXPECT_EQ(run("diag --cities 2 --variant eq3").code, 1);
  EXPECT_EQ(run("exact --cities 13").code, 2);
  EXPECT_EQ(run("exact --instance /nonexistent/qtsp.json").code, 2);
  EXPECT_EQ(run("diag --cities 3 --p 1").code, 2);
}
