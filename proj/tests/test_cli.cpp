// Drives the vinfo binary end to end.

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vinfo/io/report.hpp"

namespace vinfo {
namespace {

namespace fs = std::filesystem;
using testing::run_command;
using testing::slurp;

const std::string kCli = VINFO_CLI_PATH;
const fs::path kFixtures = VINFO_FIXTURE_DIR;

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path synth_planted(const std::string& name) {
  const fs::path dir = testing::temp_dir(name);
  const auto r = run_command(kCli + " synth --scenario planted_ambiguity --vocab 16 --n-train 4096 --n-dev 1024 "
                                    "--n-test 1024 --out-dir " + q(dir / "data"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  return dir;
}

TEST(Cli, PlantedScenarioEndToEnd) {
  const fs::path dir = synth_planted("cli_planted");
  const auto r = run_command(kCli + " estimate --config " + q(dir / "data/experiment.cfg") + " --out-dir " +
                             q(dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("Baselined"), std::string::npos);
  const ProbingReport rep = io::read_report_json(dir / "out/report.json");
  ASSERT_EQ(rep.layers.size(), 2u);
  EXPECT_EQ(rep.layers[1].layer, 2u);
  EXPECT_LT(rep.layers[1].baselined_bits, 0.0);
  EXPECT_GT(rep.layers[1].conditional_bits, 0.0);
  EXPECT_EQ(rep.task, "planted_ambiguity");
  EXPECT_TRUE(fs::exists(dir / "out/report.csv"));
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const fs::path dir = testing::temp_dir("cli_determinism");
  ASSERT_EQ(run_command(kCli + " synth --scenario self_condition --n-train 512 --n-dev 256 --out-dir " +
                        q(dir / "data")).exit_code, 0);
  for (const char* out : {"a", "b"}) {
    const auto r = run_command("VINFO_THREADS=2 " + kCli + " estimate --config " + q(dir / "data/experiment.cfg") +
                               " --out-dir " + q(dir / out));
    ASSERT_EQ(r.exit_code, 0) << r.output;
  }
  EXPECT_EQ(slurp(dir / "a/report.json"), slurp(dir / "b/report.json"));
  EXPECT_EQ(slurp(dir / "a/report.csv"), slurp(dir / "b/report.csv"));
}

TEST(Cli, MissingRepresentationFileIsADataError) {
  const fs::path dir = testing::temp_dir("cli_missing");
  io::write_file(dir / "exp.cfg", "repr = nowhere.vrep\nlabels = labels.tsv\n");
  const auto r = run_command(kCli + " estimate --config " + q(dir / "exp.cfg"));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("nowhere.vrep"), std::string::npos) << r.output;
}

TEST(Cli, ConfigProblemsExitWithTwo) {
  const fs::path dir = testing::temp_dir("cli_config");
  io::write_file(dir / "exp.cfg", "repr = a.vrep\nlabels = b.tsv\nwarmup = 3\n");
  const auto bad_key = run_command(kCli + " estimate --config " + q(dir / "exp.cfg"));
  EXPECT_EQ(bad_key.exit_code, 2);
  EXPECT_NE(bad_key.output.find("warmup"), std::string::npos);
  EXPECT_EQ(run_command(kCli + " estimate --config " + q(dir / "none.cfg")).exit_code, 2);
  EXPECT_EQ(run_command(kCli + " estimate --config x --frobnicate").exit_code, 2);
  EXPECT_EQ(run_command(kCli).exit_code, 2);
}

TEST(Cli, CorruptRepresentationIsADataError) {
  const fs::path dir = synth_planted("cli_corrupt");
  io::write_file(dir / "data/repr.vrep", "XREP garbage");
  const auto r = run_command(kCli + " estimate --config " + q(dir / "data/experiment.cfg"));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.output.find("magic"), std::string::npos) << r.output;
}

TEST(Cli, ReportCurvesOnFixtureTables) {
  const fs::path dir = testing::temp_dir("cli_curves");
  const auto r = run_command(kCli + " report-curves --from " + q(kFixtures / "roberta_single_layer_ventropy.csv") +
                             " " + q(kFixtures / "roberta_two_layer_ventropy.csv") + " --task upos --out " +
                             q(dir / "curves.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string csv = slurp(dir / "curves.csv");
  EXPECT_NE(csv.find(",upos,1,baselined,0.191\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",upos,1,conditional,0.194\n"), std::string::npos) << csv;
}

TEST(Cli, SelfcheckPasses) {
  const auto r = run_command(kCli + " selfcheck");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output.find("FAIL "), std::string::npos) << r.output;
}

}  // namespace
}  // namespace vinfo
