#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string command = std::string("KERNELCAT_NO_COLOR=1 ") + KERNELCAT_CLI + " " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kernelcat_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

class Golden : public ::testing::TestWithParam<const char*> {};

TEST_P(Golden, ExampleMatchesCheckedInReport) {
  const std::string name = GetParam();
  const auto result = cli("example " + name);
  ASSERT_EQ(result.status, 0);
  const std::string ext = name == "gp-demo" ? ".csv" : ".json";
  const fs::path golden = fs::path(KERNELCAT_GOLDEN_DIR) / (name + ext);
  if (std::getenv("KERNELCAT_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden, std::ios::binary) << result.out;
  }
  EXPECT_EQ(result.out, slurp(golden)) << "golden file " << golden;
}

TEST_P(Golden, RunOnBundledFileMatchesExample) {
  const std::string name = GetParam();
  const std::string format = name == "gp-demo" ? "csv" : "json";
  const auto from_file = cli("run " + std::string(KERNELCAT_MODELS_DIR) + "/" + name + ".model --format " + format);
  ASSERT_EQ(from_file.status, 0);
  EXPECT_EQ(from_file.out, cli("example " + name).out);
}

TEST_P(Golden, VerifyPasses) {
  const auto result = cli(std::string("verify ") + GetParam());
  EXPECT_EQ(result.status, 0) << result.out;
  EXPECT_EQ(result.out.find("FAIL"), std::string::npos) << result.out;
}

INSTANTIATE_TEST_SUITE_P(Bundled, Golden,
                         ::testing::Values("urn", "cards", "monty", "gp-demo", "kalman-demo"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (auto& c : s) {
                             if (c == '-') c = '_';
                           }
                           return s;
                         });

TEST(Cli, ReportsContainTheExpectedFractions) {
  const auto urn = cli("run " + std::string(KERNELCAT_MODELS_DIR) + "/urn.model");
  EXPECT_NE(urn.out.find("\"u1\": \"8/23\""), std::string::npos);
  EXPECT_NE(urn.out.find("switching identical: 11/40"), std::string::npos);
  const auto cards = cli("run " + std::string(KERNELCAT_MODELS_DIR) + "/cards.model");
  EXPECT_NE(cards.out.find("\"value\": \"2/3\""), std::string::npos);
  const auto monty = cli("example monty");
  EXPECT_NE(monty.out.find("\"recommendation\": \"switch\""), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("example nope").status, 2);
  EXPECT_EQ(cli("run /nonexistent/model.json").status, 2);
  EXPECT_EQ(cli("").status, 2);
  EXPECT_EQ(cli("example urn --format xml").status, 2);

  const auto bad = scratch("bad.model");
  std::ofstream(bad) << R"({"version": 1, "kind": "discrete-bayes", "body": {
    "spaces": {"U": ["u1"], "B": ["b"]},
    "prior": {"space": "U", "weights": {"u1": "1/0"}},
    "sampling": {"from": "U", "to": "B", "rows": {"u1": {"b": "1/1"}}}}, "queries": []})";
  EXPECT_EQ(cli("run " + bad.string()).status, 2);

  const auto corrupted = scratch("corrupted.model");
  std::ofstream(corrupted) << R"({"version": 1, "kind": "discrete-bayes", "body": {
    "spaces": {"U": ["u1", "u2"], "B": ["b", "r"]},
    "prior": {"space": "U", "weights": {"u1": "1/2", "u2": "1/2"}},
    "sampling": {"from": "U", "to": "B", "rows": {"u1": {"b": "2/5", "r": "3/5"}, "u2": {"b": "3/4", "r": "1/4"}}},
    "inference": {"from": "B", "to": "U", "rows": {"b": {"u1": "8/23", "u2": "15/23"}, "r": {"u1": "1/2", "u2": "1/2"}}}},
    "queries": []})";
  const auto verify = cli("verify " + corrupted.string());
  EXPECT_EQ(verify.status, 1);
  EXPECT_NE(verify.out.find("FAIL product_rule"), std::string::npos) << verify.out;
}

TEST(Cli, OutputFlagAndSeed) {
  const auto path = scratch("urn.json");
  fs::remove(path);
  ASSERT_EQ(cli("example urn --output " + path.string()).status, 0);
  EXPECT_EQ(slurp(path), cli("example urn").out);
  EXPECT_NE(cli("example urn --seed 7").out.find("\"seed\": 7"), std::string::npos);
  const auto checks = cli("verify gp-demo --format json --seed 7");
  EXPECT_EQ(checks.status, 0);
  EXPECT_NE(checks.out.find("\"seed\": 7"), std::string::npos);
  EXPECT_NE(checks.out.find("recursion_vs_batch"), std::string::npos);
}

TEST(Cli, CsvForDiscreteReports) {
  const auto csv = cli("example urn --format csv");
  EXPECT_EQ(csv.out.rfind("query,path,value\n", 0), 0u);
  EXPECT_NE(csv.out.find("inference,rows/b/u1,8/23"), std::string::npos) << csv.out;
}

}  // namespace
