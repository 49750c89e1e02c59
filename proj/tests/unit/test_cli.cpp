#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"
#include "rtdenoise/channel.hpp"
#include "rtdenoise/image_io.hpp"

namespace fs = std::filesystem;
using namespace rtdenoise;
using namespace rtdenoise::testing;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rtdenoise_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    VideoSequence clean = panning_video(Scene::kLandscape, 64, 48, 8, 1.0);
    write_y4m_file(clean, path("clean.y4m"));
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args, std::string* out = nullptr) const {
    const std::string capture = path("stdout.txt");
    const std::string cmd = std::string(RTDENOISE_CLI) + " " + args + " > " + capture + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    if (out) {
      std::ifstream in(capture);
      std::stringstream ss;
      ss << in.rdbuf();
      *out = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::vector<nlohmann::json> jsonl(const std::string& name) const {
    std::ifstream in(path(name));
    std::vector<nlohmann::json> rows;
    for (std::string line; std::getline(in, line);) rows.push_back(nlohmann::json::parse(line));
    return rows;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, InjectIsSeededPerFrame) {
  ASSERT_EQ(run("inject --in " + path("clean.y4m") + " --noise gaussian:25 --seed 3 --out " + path("a.y4m")), 0);
  ASSERT_EQ(run("inject --in " + path("clean.y4m") + " --noise gaussian:25 --seed 3 --out " + path("b.y4m")), 0);
  const VideoSequence a = read_y4m_file(path("a.y4m"));
  EXPECT_EQ(a, read_y4m_file(path("b.y4m")));
  const VideoSequence clean = read_y4m_file(path("clean.y4m"));
  EXPECT_EQ(a.frames[2], add_gaussian_noise(clean.frames[2], 25, 5));
  EXPECT_EQ(run("inject --in " + path("clean.y4m") + " --noise saltpepper:0.02 --out " + path("c.y4m")), 0);
  EXPECT_EQ(run("inject --in " + path("clean.y4m") + " --noise speckle:0.1 --out " + path("d.y4m")), 0);
}

TEST_F(Cli, DetectReportsEveryFrame) {
  ASSERT_EQ(run("inject --in " + path("clean.y4m") + " --noise gaussian:30 --out " + path("n.y4m")), 0);
  std::string out;
  ASSERT_EQ(run("detect --in " + path("n.y4m") + " --histogram " + path("hist"), &out), 0);
  std::istringstream lines(out);
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) {
    EXPECT_EQ(line.rfind("frame=" + std::to_string(n) + " sigma=", 0), 0u) << line;
    EXPECT_NE(line.find(" category=GAUSSIAN impulse="), std::string::npos) << line;
    EXPECT_NE(line.find(" blockiness="), std::string::npos);
    EXPECT_NE(line.find(" corr="), std::string::npos);
  }
  EXPECT_EQ(n, 8);
  std::ifstream hist(path("hist/frame_00000.txt"));
  long total = 0, lines_read = 0;
  for (long v; hist >> v; ++lines_read) total += v;
  EXPECT_EQ(lines_read, 256);
  EXPECT_EQ(total, 64 * 48);
}

TEST_F(Cli, DenoiseWritesOutputsAndDumpsConfig) {
  ASSERT_EQ(run("inject --in " + path("clean.y4m") + " --noise gaussian:30 --out " + path("n.y4m")), 0);
  {
    std::ofstream cfg(path("cfg.ini"));
    cfg << "[video_denoiser]\ncadence = 5\n";
  }
  std::string dumped;
  ASSERT_EQ(run("denoise --in " + path("n.y4m") + " --config " + path("cfg.ini") + " --out " + path("d.y4m") +
                    " --report " + path("r.jsonl") + " --stats " + path("s.json") + " --dump-config",
                &dumped),
            0);
  EXPECT_NE(dumped.find("cadence = 5"), std::string::npos);
  EXPECT_EQ(read_y4m_file(path("d.y4m")).size(), 8u);
  const auto reports = jsonl("r.jsonl");
  ASSERT_EQ(reports.size(), 8u);
  EXPECT_EQ(reports[0]["route"], "DENOISE");
  EXPECT_TRUE(reports[0]["psnr_noisy"].is_null());
  std::ifstream stats(path("s.json"));
  const nlohmann::json s = nlohmann::json::parse(stats);
  EXPECT_EQ(s["total_frames"], 8);

  {
    std::ofstream cfg(path("dump.ini"));
    cfg << dumped;
  }
  std::string again;
  ASSERT_EQ(run("denoise --in " + path("n.y4m") + " --config " + path("dump.ini") + " --dump-config", &again), 0);
  EXPECT_EQ(again, dumped);
}

TEST_F(Cli, SimulateWritesAllArtifacts) {
  ASSERT_EQ(run("simulate --in " + path("clean.y4m") + " --out-received " + path("r.y4m") + " --out-denoised " +
                path("d.y4m") + " --report " + path("rep.jsonl") + " --feedback " + path("fb.jsonl") + " --stats " +
                path("s.json") + " --trace " + path("t.jsonl") + " --seed 4"),
            0);
  EXPECT_EQ(read_y4m_file(path("r.y4m")).size(), 8u);
  EXPECT_EQ(read_y4m_file(path("d.y4m")).size(), 8u);
  const auto reports = jsonl("rep.jsonl");
  ASSERT_EQ(reports.size(), 8u);
  EXPECT_EQ(reports[0]["reference_mode"], "sender");
  EXPECT_TRUE(reports[0]["psnr_noisy"].is_number());
  EXPECT_EQ(jsonl("t.jsonl").size(), 1u);
}

TEST_F(Cli, MetricsTableAndJson) {
  std::string out;
  ASSERT_EQ(run("metrics --ref " + path("clean.y4m") + " --test " + path("clean.y4m") + " --json " + path("m.jsonl"), &out), 0);
  EXPECT_NE(out.find("inf"), std::string::npos);
  const auto rows = jsonl("m.jsonl");
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0]["psnr"], "inf");
  EXPECT_EQ(rows[0]["ssim"], 1.0);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("inject --in " + path("clean.y4m") + " --noise purple:3 --out " + path("x.y4m")), 1);
  {
    std::ofstream cfg(path("bad.ini"));
    cfg << "threshold = -5\n";
  }
  EXPECT_EQ(run("denoise --in " + path("clean.y4m") + " --config " + path("bad.ini")), 1);
  {
    std::ofstream junk(path("junk.y4m"));
    junk << "not a video";
  }
  EXPECT_EQ(run("detect --in " + path("junk.y4m")), 2);
  EXPECT_EQ(run("detect --in " + path("missing.y4m")), 2);
  EXPECT_EQ(run("metrics --ref " + path("clean.y4m") + " --test " + path("junk.y4m")), 2);
  EXPECT_EQ(run("--help"), 0);
}
