#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "support.hpp"

namespace glnn::cli {
namespace {

const char* kQuickConfig = R"(dataset:
  name: tiny
  sbm:
    n_per_block: 50
    p_in: 0.1
    p_out: 0.01
    feat_dim: 6
teacher:
  arch: sage
  hidden: 16
  max_epochs: 20
  patience: 10
student:
  max_epochs: 20
  patience: 10
labels_per_class: 5
seeds: [0, 1]
)";

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "bad.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const ExperimentConfig cfg = parse_config("");
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0}));
  EXPECT_EQ(cfg.spec.teacher.arch, Arch::sage);
  EXPECT_EQ(cfg.spec.setting, Setting::transductive);
}

TEST(Config, ReadsTheSchema) {
  const ExperimentConfig cfg = parse_config(kQuickConfig);
  EXPECT_EQ(cfg.dataset.name, "tiny");
  EXPECT_EQ(cfg.dataset.sbm.n_per_block, 50u);
  EXPECT_EQ(cfg.spec.teacher.hidden_dim, 16u);
  EXPECT_EQ(cfg.spec.student.student.max_epochs, 20u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{0, 1}));
}

TEST(Config, ErrorsNameLineAndField) {
  const std::string bad_value = message_of("teacher:\n  arch: sage\n  lr: fast\n");
  EXPECT_NE(bad_value.find("bad.yaml:3"), std::string::npos) << bad_value;
  EXPECT_NE(bad_value.find("teacher.lr"), std::string::npos) << bad_value;

  const std::string unknown = message_of("seeds: [1]\nstudent:\n  depth: 3\n");
  EXPECT_NE(unknown.find("bad.yaml:3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("student.depth"), std::string::npos) << unknown;

  EXPECT_NE(message_of("setting: sideways\n").find("setting"), std::string::npos);
  EXPECT_NE(message_of("noise: 1.5\n").find("noise"), std::string::npos);
  EXPECT_NE(message_of("bench:\n  repetitions: 2\n").find("bench.repetitions"), std::string::npos);
  EXPECT_FALSE(message_of("seeds: [0\n").empty());
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"sbm.yaml", "smoke.yaml"}) {
    const ExperimentConfig cfg = load_config(std::filesystem::path(GLNN_CONFIG_DIR) / name);
    EXPECT_NO_THROW(cfg.validate()) << name;
  }
  const ExperimentConfig sbm = load_config(std::filesystem::path(GLNN_CONFIG_DIR) / "sbm.yaml");
  EXPECT_EQ(sbm.dataset.sbm.feat_separation, 1.4);
  EXPECT_EQ(sbm.seeds.size(), 5u);
  ASSERT_TRUE(sbm.bench.graph.has_value());
  EXPECT_EQ(sbm.bench.graph->sbm.n_per_block, 50000u);
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_config("/nonexistent/glnn.yaml"), ConfigError);
}

TEST(Overrides, TakePrecedence) {
  ExperimentConfig cfg = parse_config(kQuickConfig);
  Overrides o;
  o.seed = 7;
  o.setting = "ind";
  o.ind_rate = 0.3;
  o.lambda = 0.25;
  o.width_mult = 2;
  o.output_dir = "elsewhere";
  apply_overrides(cfg, o);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(cfg.spec.setting, Setting::inductive);
  EXPECT_EQ(cfg.spec.ind_rate, 0.3);
  EXPECT_EQ(cfg.spec.student.lambda, 0.25);
  EXPECT_EQ(cfg.spec.student.width_mult, 2u);
  EXPECT_EQ(cfg.output_dir, "elsewhere");

  Overrides bad;
  bad.setting = "sideways";
  EXPECT_THROW(apply_overrides(cfg, bad), ConfigError);
  bad = {};
  bad.lambda = 2.0;
  EXPECT_THROW(apply_overrides(cfg, bad), ConfigError);
}

struct Cli {
  std::ostringstream out, err;
  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "glnn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliRun : public ::testing::Test {
 protected:
  glnn::testing::TempDir dir{"cli"};
  std::string config;

  void SetUp() override {
    config = (dir / "quick.yaml").string();
    std::ofstream(config) << kQuickConfig;
  }

  int run(std::vector<std::string> args) {
    Cli cli;
    const int code = cli.run(std::move(args));
    last_err = cli.err.str();
    return code;
  }
  std::string last_err;
};

TEST_F(CliRun, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), kUsage);
  EXPECT_EQ(run({"frobnicate"}), kUsage);
  EXPECT_EQ(run({"train-teacher"}), kUsage);  // no config
  EXPECT_EQ(run({"train-teacher", "-c", (dir / "missing.yaml").string()}), kUsage);
  EXPECT_EQ(run({"ablate", "-c", config, "--axis", "depth"}), kUsage);
  EXPECT_EQ(run({"distill", "-c", config, "--setting", "sideways"}), kUsage);
  EXPECT_EQ(run({"--help"}), kSuccess);

  std::ofstream(dir / "bad.yaml") << "teacher:\n  hidden: wide\n";
  EXPECT_EQ(run({"train-teacher", "-c", (dir / "bad.yaml").string()}), kUsage);
  EXPECT_NE(last_err.find("teacher.hidden"), std::string::npos) << last_err;
}

TEST_F(CliRun, DistillRefusesAMismatchedTeacher) {
  const std::string out = (dir / "mismatch").string();
  ASSERT_EQ(run({"train-teacher", "-c", config, "--seed", "0", "-o", out}), kSuccess) << last_err;
  EXPECT_EQ(run({"distill", "-c", config, "--seed", "0", "-o", out, "--setting", "ind"}), kRuntime);
  EXPECT_FALSE(last_err.empty());
}

TEST_F(CliRun, EvalWithoutCheckpointsIsARuntimeError) {
  EXPECT_EQ(run({"eval", "-c", config, "-o", (dir / "empty").string()}), kRuntime);
}

TEST_F(CliRun, RepeatedRunsAreByteIdentical) {
  for (const char* name : {"a", "b"}) {
    const std::string out = (dir / name).string();
    ASSERT_EQ(run({"train-teacher", "-c", config, "-o", out}), kSuccess) << last_err;
    ASSERT_EQ(run({"distill", "-c", config, "-o", out}), kSuccess) << last_err;
    ASSERT_EQ(run({"eval", "-c", config, "-o", out}), kSuccess) << last_err;
  }
  for (const char* seed : {"seed0", "seed1"})
    for (const char* file : {"eval.json", "split.json", "soft_targets.csv", "teacher.ckpt.json", "glnn.ckpt.json",
                             "mlp.ckpt.json"}) {
      const std::string a = read_file(dir / "a" / seed / file);
      ASSERT_FALSE(a.empty()) << seed << '/' << file;
      EXPECT_EQ(a, read_file(dir / "b" / seed / file)) << seed << '/' << file;
    }
  EXPECT_EQ(read_file(dir / "a" / "eval_metrics.csv"), read_file(dir / "b" / "eval_metrics.csv"));
}

TEST_F(CliRun, OutputRootEnvironmentVariable) {
  std::ofstream(dir / "rel.yaml") << kQuickConfig << "output_dir: relative_runs\n";
  ::setenv("GLNN_OUTPUT_ROOT", dir.path().c_str(), 1);
  const int code = run({"train-teacher", "-c", (dir / "rel.yaml").string(), "--seed", "3"});
  ::unsetenv("GLNN_OUTPUT_ROOT");
  ASSERT_EQ(code, kSuccess) << last_err;
  EXPECT_TRUE(std::filesystem::exists(dir / "relative_runs" / "seed3" / "teacher.ckpt.json"));
}

}  // namespace
}  // namespace glnn::cli
