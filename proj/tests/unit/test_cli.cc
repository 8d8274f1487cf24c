#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = LDPSURVEY_CLI_PATH;

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("ldpsurvey_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(run("--bogus"), 1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("fit --input /nonexistent.csv"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST(CliTest, VerifyExitCodes) {
  const fs::path dir = scratch("verify");
  const std::string d = dir.string() + "/";
  ASSERT_EQ(run("--seed 7 gen --kind synthetic1 --d 10 --m 10000 --mu 0 --out " + d + "near"), 0);
  ASSERT_EQ(run("--seed 7 gen --kind synthetic1 --d 10 --m 10000 --mu 2 --out " + d + "far"), 0);
  EXPECT_EQ(run("--seed 7 -o " + d + "near.json --config " + d + "near_verify.json verify --tol 0.2"), 0);
  EXPECT_EQ(run("--seed 7 -o " + d + "far.json --config " + d + "far_verify.json verify --tol 0.2"), 3);
  const auto near = read_json(dir / "near.json");
  EXPECT_EQ(near.at("decision"), "ACCEPT");
  EXPECT_TRUE(near.contains("manifest"));
  EXPECT_EQ(read_json(dir / "far.json").at("decision"), "REJECT");
}

TEST(CliTest, FitSucceeds) {
  const fs::path dir = scratch("fit");
  const std::string d = dir.string() + "/";
  ASSERT_EQ(run("--seed 1 gen --kind synthetic2 --d 5 --m 2000 --noise gaussian --out " + d + "s2"), 0);
  EXPECT_EQ(run("-o " + d + "fit.json fit --input " + d + "s2_noisy.csv --radius 50"), 0);
  const auto fit = read_json(dir / "fit.json");
  EXPECT_EQ(fit.at("theta_hat").size(), 5u);
  EXPECT_DOUBLE_EQ(fit.at("sigma_w_diagonal").get<double>(), 1.0);
  EXPECT_TRUE(fit.at("manifest").contains("config"));
}

TEST(CliTest, FlagsOverrideConfig) {
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"bounds": {"name": "one-sided-bernstein", "n": 100, "t": 0.1}})";
  }
  const std::string d = dir.string() + "/";
  ASSERT_EQ(run("-o " + d + "a.json --config " + d + "cfg.json bounds"), 0);
  ASSERT_EQ(run("-o " + d + "b.json --config " + d + "cfg.json bounds --t 0"), 0);
  EXPECT_NEAR(read_json(dir / "a.json").at("value").get<double>(), 0.36787944117144233, 1e-15);
  EXPECT_DOUBLE_EQ(read_json(dir / "b.json").at("value").get<double>(), 1.0);
}
