#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ramified_zero/io.hpp"
#include "ramified_zero/oracle.hpp"

namespace fs = std::filesystem;
namespace io = ramified_zero::io;

namespace {

const std::string kCli = RZ_CLI_PATH;
const std::string kData = RZ_DATA_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rz_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the CLI inside the scratch directory; stdout goes to out.txt.
  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" + kCli + "' " + args + " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveThenVerify) {
  ASSERT_EQ(run("solve --input " + kData + "/q2_d6_allones.json"), 0);
  ASSERT_TRUE(fs::exists(path("q2_d6_allones.cert.json")));
  EXPECT_EQ(run("verify --input " + kData + "/q2_d6_allones.json --certificate q2_d6_allones.cert.json"), 0);
}

TEST_F(CliTest, CorruptedCertificateFails) {
  ASSERT_EQ(run("solve --input " + kData + "/q2_d6_allones.json --certificate c.json"), 0);
  auto cert = io::read_json_file(path("c.json"));
  const std::size_t pivot = cert["pivot"].get<std::size_t>();
  cert["assignment"][pivot][0] = 2;  // pivot no longer a unit
  io::write_json_file(path("bad.json"), cert);
  EXPECT_EQ(run("verify --input " + kData + "/q2_d6_allones.json --certificate bad.json"), 2);
}

TEST_F(CliTest, BinsCheck) {
  ASSERT_EQ(run("bins-check --m 2 --n 5 --exhaustive"), 0);
  EXPECT_NE(read("out.txt").find("{checked: 1024, failures: 0}"), std::string::npos);
  ASSERT_EQ(run("bins-check --m 4 --n 7 --samples 200 --seed 5"), 0);
  EXPECT_NE(read("out.txt").find("{checked: 200, failures: 0}"), std::string::npos);
}

TEST_F(CliTest, BadInputsExitOne) {
  EXPECT_EQ(run("solve --input missing.json"), 1);
  {
    std::ofstream(path("broken.json")) << "{ not json";
  }
  EXPECT_EQ(run("solve --input broken.json"), 1);
  EXPECT_NE(read("err.txt").find("error: BadInput"), std::string::npos);
  {
    std::ofstream(path("odd.json")) << R"({"field":{"e":1,"eisenstein":[-2]},"d":5,"coefficients":[[1]]})";
  }
  EXPECT_EQ(run("solve --input odd.json"), 1);
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, ReportsAreDeterministic) {
  ASSERT_EQ(run("random --e 2 --eisenstein=-2,0 --d 6 --s 28 --seed 9 --out f.json"), 0);
  ASSERT_EQ(run("solve --input f.json --report r1.json --certificate c1.json"), 0);
  ASSERT_EQ(run("solve --input f.json --report r2.json --certificate c2.json"), 0);
  EXPECT_EQ(read("r1.json"), read("r2.json"));
  EXPECT_EQ(read("c1.json"), read("c2.json"));
  auto report = io::read_json_file(path("r1.json"));
  EXPECT_EQ(report["status"], "Solved");
  EXPECT_EQ(report["variables_bound"], 28);
}

TEST_F(CliTest, RandomHonoursProfile) {
  ASSERT_EQ(run("random --e 1 --eisenstein=-2 --d 6 --s 28 --profile 9,1,9,1,7,1 --seed 1 --out p.json"), 0);
  auto form = io::form_from_json(io::read_json_file(path("p.json")));
  EXPECT_EQ(ramified_zero::profile(form), (ramified_zero::LevelProfile{{9, 1, 9, 1, 7, 1}, 28}));
  EXPECT_EQ(run("solve --input p.json"), 0);
}

TEST_F(CliTest, Normalize) {
  ASSERT_EQ(run("random --e 2 --eisenstein=-2,0 --d 6 --s 10 --seed 2 --out f.json"), 0);
  ASSERT_EQ(run("normalize --input f.json --out n.json"), 0);
  auto n = io::form_from_json(io::read_json_file(path("n.json")));
  EXPECT_TRUE(ramified_zero::profile(n).satisfies_prefix_bounds());
}

TEST_F(CliTest, Brute) {
  {
    std::ofstream(path("eight.json")) << R"({"field":{"e":1,"eisenstein":[-2],"precision":16},"d":6,"coefficients":[[1],[1],[1],[1],[1],[1],[1],[1]]})";
  }
  ASSERT_EQ(run("brute --input eight.json --n-small 3 --support 8"), 0);
  EXPECT_FALSE(read("out.txt").empty());
  EXPECT_EQ(run("brute --input " + kData + "/q2_d6_allones.json --n-small 3 --support 8"), 1);
  EXPECT_NE(read("err.txt").find("SearchSpaceTooLarge"), std::string::npos);
  {
    std::ofstream(path("one.json")) << R"({"field":{"e":1,"eisenstein":[-2]},"d":6,"coefficients":[[1]]})";
  }
  EXPECT_EQ(run("brute --input one.json --n-small 4 --support 1"), 2);
}

TEST_F(CliTest, DispatchReport) {
  ASSERT_EQ(run("dispatch-report --d 6 --s 28 --m 3 --e 2 --forms 2 --out dr.json"), 0);
  auto j = io::read_json_file(path("dr.json"));
  bool found = false;
  for (const auto& p : j["fallback_profiles"]) {
    if (p["profile"] == io::json::array({9, 1, 9, 1, 7, 1})) found = true;
    EXPECT_EQ(p["solved"], p["forms"]);
  }
  EXPECT_TRUE(found);
}
