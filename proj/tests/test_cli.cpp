#include "egoloc/embed_align.hpp"
#include "egoloc/measure.hpp"
#include "egoloc/scene.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace egoloc;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("egoloc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + EGOLOC_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  fs::path dir_;
};

// Rows of numbers after a "# <tag>" line.
Matrix section(const std::string& text, const std::string& tag, int rows) {
  const auto at = text.find("# " + tag);
  EXPECT_NE(at, std::string::npos) << text;
  std::istringstream in(text.substr(text.find('\n', at) + 1));
  std::string body, line;
  for (int i = 0; i < rows && std::getline(in, line); ++i) body += line + "\n";
  std::istringstream rows_in(body);
  return read_csv_matrix(rows_in);
}

}  // namespace

TEST_F(CliTest, RequiresSubcommand) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, SimulateWritesOutputs) {
  const fs::path cfg = write("cfg.json", R"({"sigma_grid": [0.05, 0.2], "trials": 5, "threads": 2})");
  const RunResult r = run("simulate --config " + cfg.string() + " --out-dir " + (dir_ / "out").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir_ / "out" / "rmse.csv");
  EXPECT_EQ(csv, r.out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sigma,rmse_egoistic,rmse_genie,failures_egoistic,failures_genie,n_trials");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "rmse.svg"));
  EXPECT_NE(csv.find("\n0.05,"), std::string::npos);
}

TEST_F(CliTest, SimulateOverridesSeedAndTrials) {
  const fs::path cfg = write("cfg.json", R"({"sigma_grid": [0.1], "trials": 50})");
  const std::string out = (dir_ / "o").string();
  const RunResult a = run("simulate --config " + cfg.string() + " --out-dir " + out + " --trials 4 --seed 3");
  const RunResult b = run("simulate --config " + cfg.string() + " --out-dir " + out + " --trials 4 --seed 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find(",4\n"), std::string::npos);
  EXPECT_NE(a.out, b.out);
}

TEST_F(CliTest, SimulateRejectsUnknownKey) {
  const fs::path cfg = write("cfg.json", R"({"trails": 5})");
  const RunResult r = run("simulate --config " + cfg.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error [config]"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("trails"), std::string::npos);
}

TEST_F(CliTest, SimulateRunsBundledConfig) {
  const RunResult r = run(std::string("simulate --config ") + EGOLOC_DATA_DIR + "/table1.json --trials 2 --out-dir " +
                          (dir_ / "b").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
}

TEST_F(CliTest, EstimateFromMeasurementDumps) {
  const Scene s = table1_scene();
  const EdmBlocks b = edm_blocks(s);
  const fs::path c1 = write("c1.csv", to_csv(s.c1));
  const fs::path d12 = write("d12.csv", to_csv(b.d12));
  const fs::path d1 = write("d1.csv", to_csv(b.d1));
  const RunResult r = run("estimate --c1 " + c1.string() + " --d12 " + d12.string() + " --d1 " + d1.string() +
                          " --axis-moments 10,20,1.4");
  ASSERT_EQ(r.code, 0) << r.err;
  const Matrix t = section(r.out, "t_hat", 1);
  const Vector3 centroid = s.s2.rowwise().mean();
  EXPECT_LE((t.transpose() - Matrix(centroid)).norm(), 1e-6);
  const Matrix q = section(r.out, "q_hat", 3);
  ASSERT_EQ(q.rows(), 3);
  double best = 1e9;
  for (const Vector3& f : {Vector3(1, 1, 1), Vector3(1, -1, -1), Vector3(-1, 1, -1), Vector3(-1, -1, 1)}) {
    best = std::min(best, (q * f.asDiagonal() - Matrix(s.pose.rotation)).norm());
  }
  EXPECT_LE(best, 1e-6);

  // D1 defaults to the distances of c1.
  const RunResult implicit = run("estimate --c1 " + c1.string() + " --d12 " + d12.string() +
                                 " --axis-moments 10,20,1.4");
  EXPECT_EQ(implicit.out, r.out);
}

TEST_F(CliTest, EstimateErrors) {
  Matrix planar = table1_c1();
  planar.row(2).setZero();
  const fs::path c1 = write("c1.csv", to_csv(planar));
  const fs::path d12 = write("d12.csv", to_csv(Matrix::Ones(12, 10)));
  const RunResult r = run("estimate --c1 " + c1.string() + " --d12 " + d12.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error [input]"), std::string::npos) << r.err;

  const fs::path bad = write("bad.csv", "1,2\n3\n");
  EXPECT_EQ(run("estimate --c1 " + bad.string() + " --d12 " + d12.string()).code, 1);
  EXPECT_EQ(run("estimate --c1 " + (dir_ / "missing.csv").string() + " --d12 " + d12.string()).code, 1);
  const fs::path good = write("good.csv", to_csv(table1_c1()));
  EXPECT_EQ(run("estimate --c1 " + good.string() + " --d12 " + d12.string() + " --axis-moments 1,2").code, 1);
  EXPECT_EQ(run("estimate --c1 " + good.string() + " --d12 " + d12.string() + " --completion cubic").code, 1);
}

TEST_F(CliTest, CompleteMatchesLibrary) {
  const EdmBlocks b = edm_blocks(table1_scene());
  const fs::path d1 = write("d1.csv", to_csv(b.d1));
  const fs::path d12 = write("d12.csv", to_csv(b.d12));
  const RunResult sq = run("complete --d1 " + d1.string() + " --d12 " + d12.string());
  ASSERT_EQ(sq.code, 0) << sq.err;
  EXPECT_EQ(sq.out, to_csv(nystrom_complete_squared(b.d1, b.d12).d2_hat));
  const RunResult plain = run("complete --d1 " + d1.string() + " --d12 " + d12.string() + " --completion distance");
  ASSERT_EQ(plain.code, 0) << plain.err;
  EXPECT_EQ(plain.out, to_csv(nystrom_complete(b.d1, b.d12).d2_hat));
}

TEST_F(CliTest, CompleteSingularBlockIsNumericalFailure) {
  const fs::path d1 = write("d1.csv", to_csv(Matrix::Zero(4, 4)));
  const fs::path d12 = write("d12.csv", to_csv(Matrix::Ones(4, 3)));
  const RunResult r = run("complete --d1 " + d1.string() + " --d12 " + d12.string() + " --completion distance");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error [completion]"), std::string::npos) << r.err;
}

TEST_F(CliTest, MdsEmbedding) {
  const Scene s = table1_scene();
  const fs::path edm = write("edm.csv", to_csv(full_edm(s)));
  const RunResult r = run("mds --edm " + edm.string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const Matrix pts = read_csv_matrix(in);
  EXPECT_EQ(pts.rows(), 3);
  EXPECT_LE((exact_edm(pts, pts) - full_edm(s)).cwiseAbs().maxCoeff(), 1e-9);

  const fs::path rect = write("rect.csv", "0,1,2\n1,0,3\n");
  const RunResult bad = run("mds --edm " + rect.string());
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("error [mds]"), std::string::npos);
}
