#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nsv/cli.hpp"
#include "nsv/random_fields.hpp"

namespace nsv::app {
namespace {

namespace fs = std::filesystem;

class Workdir {
 public:
  Workdir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("nsv_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }
  fs::path write(const std::string& name, const std::string& body) const {
    std::ofstream(path(name)) << body;
    return path(name);
  }

 private:
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NSV_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test.ini");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kZeroScenario = R"(
[scenario]
name = zero
[domain]
modes = 3
[time]
horizon = 1
steps = 8
[forcing]
kind = zero
)";

TEST(Parse, DefaultsAndTypedValues) {
  const Scenario s = parse(R"(
; comment
[scenario]
name = demo
seed = 42
verify = apriori_2_21, fixed_point
[domain]
modes = 6
[time]
horizon = 2
steps = 32
[solver]
rho = 0.5
sign = paper
mu = 0.75
[forcing]
kind = manufactured
family = cyclic_ramp
epsilon = 0.05
[converge]
levels = 16, 32
)");
  EXPECT_EQ(s.name, "demo");
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.verify, (std::vector<std::string>{"apriori_2_21", "fixed_point"}));
  EXPECT_EQ(s.solve.domain.modes[0], 6);
  EXPECT_EQ(s.solve.time.steps, 32);
  EXPECT_DOUBLE_EQ(s.solve.rho, 0.5);
  EXPECT_EQ(s.solve.sign, SignConvention::paper);
  EXPECT_DOUBLE_EQ(s.harness.mu, 0.75);
  EXPECT_EQ(s.forcing.manufactured.family, ManufacturedFamily::cyclic_ramp);
  EXPECT_EQ(s.levels, (std::vector<int>{16, 32}));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("[scenario]\nname = x\n[time]\nsteps = many\n").find("test.ini:4:"),
            std::string::npos);
  EXPECT_NE(error_of("[scenario]\n\nbogus = 1\n").find("test.ini:3:"), std::string::npos);
  EXPECT_NE(error_of("[nowhere]\nx = 1\n").find("test.ini:1:"), std::string::npos);
  EXPECT_NE(error_of("[scenario]\nverify = abel_roundtrip, nonsense\n").find("test.ini:2:"),
            std::string::npos);
  EXPECT_FALSE(error_of("[scenario\n").empty());
}

TEST(Parse, SemanticValidation) {
  EXPECT_FALSE(error_of("[solver]\nmu = 0.3\n").empty());
  EXPECT_FALSE(error_of("[solver]\nrelaxation = 0\n").empty());
  EXPECT_FALSE(error_of("[converge]\nlevels = 32\n").empty());
  EXPECT_FALSE(error_of("[harness]\nsamples = 0\n").empty());
  EXPECT_FALSE(error_of("[forcing]\nkind = file\npath = /nonexistent/profile.snap\n").empty());
}

TEST(Parse, OverridesApply) {
  Scenario s = parse(kZeroScenario);
  apply_overrides(s, Overrides{7, 0.75, std::string("paper"), std::string("/tmp/x")});
  EXPECT_EQ(s.seed, 7u);
  EXPECT_DOUBLE_EQ(s.solve.mu, 0.75);
  EXPECT_DOUBLE_EQ(s.harness.mu, 0.75);
  EXPECT_EQ(s.solve.sign, SignConvention::paper);
  EXPECT_EQ(s.out_dir, "/tmp/x");
  EXPECT_THROW(apply_overrides(s, Overrides{{}, 0.2, {}, {}}), ConfigError);
}

TEST(Parse, KnownVerificationIds) {
  const auto& ids = known_verifications();
  for (const char* id : {"abel_roundtrip", "composition_2_14", "f_mu_identity_3_18",
                         "projection_2_17", "apriori_2_21", "key_3_25", "hopf_4_4"})
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
}

TEST(Summary, ZeroInitialDataGivesIdenticalSummary) {
  Scenario s = parse(R"(
[domain]
modes = 4
[time]
steps = 16
[forcing]
kind = random
amplitude = 0.1
)");
  const ScenarioInputs in = build_inputs(s);
  const SolutionBundle a = picard_solve(in.f, s.solve);
  const SolutionBundle b = solve_inhomogeneous(in.f, SpectralVectorField(s.solve.domain), s.solve);
  EXPECT_EQ(summary_json(s, a, in), summary_json(s, b, in));
  EXPECT_EQ(norms_csv(a), norms_csv(b));
}

TEST(Identities, OperatorChecksPass) {
  EXPECT_TRUE(abel_roundtrip_check().pass);
  EXPECT_TRUE(composition_check().pass);
  EXPECT_TRUE(f_mu_identity_check(1).pass);
  EXPECT_TRUE(projection_check(1, 4).pass);
}

TEST(Guarded, MapsExceptionsToExitCodes) {
  std::ostringstream err;
  EXPECT_EQ(guarded([] { return 0; }, err), 0);
  EXPECT_EQ(guarded([]() -> int { throw ConfigError("x"); }, err), 2);
  EXPECT_EQ(guarded([]() -> int { throw std::invalid_argument("x"); }, err), 2);
  EXPECT_EQ(guarded([]() -> int { throw IoError("x"); }, err), 4);
  EXPECT_EQ(guarded([]() -> int { throw std::runtime_error("x"); }, err), 4);
}

TEST(Binary, SolveZeroForcing) {
  Workdir w;
  const fs::path cfg = w.write("zero.ini", kZeroScenario);
  const fs::path out = w.path("out");
  ASSERT_EQ(run_cli("solve --quiet --config " + cfg.string() + " --out " + out.string()), 0);
  std::ifstream csv(out / "norms.csv");
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,w,f,p,residual,budget");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string t, wv;
    std::getline(row, t, ',');
    std::getline(row, wv, ',');
    EXPECT_EQ(std::stod(wv), 0.0);
    ++rows;
  }
  EXPECT_EQ(rows, 9);
  const auto j = nlohmann::json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(j["status"], "converged");
  EXPECT_EQ(j["seed"], 12345);
  EXPECT_TRUE(fs::exists(out / "fields" / "w_final.snap"));
}

TEST(Binary, DeterministicReruns) {
  Workdir w;
  const fs::path cfg = w.write("r.ini", R"(
[scenario]
name = rerun
[domain]
modes = 4
[time]
steps = 16
[forcing]
kind = random
amplitude = 0.1
)");
  ASSERT_EQ(run_cli("solve --quiet --config " + cfg.string() + " --out " + w.path("a").string()), 0);
  ASSERT_EQ(run_cli("solve --quiet --config " + cfg.string() + " --out " + w.path("b").string()), 0);
  EXPECT_EQ(slurp(w.path("a") / "summary.json"), slurp(w.path("b") / "summary.json"));
  EXPECT_EQ(slurp(w.path("a") / "norms.csv"), slurp(w.path("b") / "norms.csv"));
  ASSERT_EQ(run_cli("solve --quiet --seed 99 --config " + cfg.string() + " --out " +
                    w.path("c").string()),
            0);
  EXPECT_NE(slurp(w.path("a") / "summary.json"), slurp(w.path("c") / "summary.json"));
}

TEST(Binary, ExitCodes) {
  Workdir w;
  const fs::path good = w.write("good.ini", kZeroScenario);
  const fs::path bad = w.write("bad.ini", "[time]\nsteps = x\n");
  EXPECT_EQ(run_cli("solve --config " + bad.string()), 2);
  EXPECT_EQ(run_cli("solve --config " + w.path("missing.ini").string()), 4);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("solve --config " + good.string() + " --sign sideways"), 2);
  EXPECT_EQ(run_cli("solve --config " + good.string() + " --mu 0.2"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
  const fs::path blocker = w.write("blocker", "file, not a directory");
  EXPECT_EQ(run_cli("solve --quiet --config " + good.string() + " --out " + (blocker / "sub").string()), 4);

  const fs::path needs = w.write("needs.ini", "[scenario]\nverify = apriori_2_21\n[domain]\nmodes = 3\n");
  EXPECT_EQ(run_cli("verify --quiet --config " + needs.string() + " --out " + w.path("none").string()), 4);

  const fs::path big = w.write("big.ini", R"(
[domain]
modes = 4
[time]
steps = 16
[solver]
max_iterations = 2
[forcing]
kind = random
amplitude = 200
)");
  EXPECT_EQ(run_cli("solve --quiet --config " + big.string() + " --out " + w.path("big").string()), 3);
}

TEST(Binary, VerifyEmptySetAndAfterSolve) {
  Workdir w;
  const fs::path empty = w.write("e.ini", kZeroScenario);
  ASSERT_EQ(run_cli("verify --quiet --config " + empty.string() + " --out " + w.path("e").string()), 0);
  const auto ej = nlohmann::json::parse(slurp(w.path("e") / "verify.json"));
  EXPECT_TRUE(ej["reports"].empty());
  EXPECT_TRUE(ej["all_pass"].get<bool>());

  const fs::path cfg = w.write("s.ini", R"(
[scenario]
name = small
verify = apriori_2_21, fixed_point, abel_roundtrip
[domain]
modes = 4
[time]
horizon = 2
steps = 16
[forcing]
kind = random
amplitude = 0.1
)");
  const std::string out = " --out " + w.path("s").string();
  ASSERT_EQ(run_cli("solve --quiet --config " + cfg.string() + out), 0);
  ASSERT_EQ(run_cli("verify --quiet --config " + cfg.string() + out), 0);
  const auto j = nlohmann::json::parse(slurp(w.path("s") / "verify.json"));
  ASSERT_EQ(j["reports"].size(), 3u);
  EXPECT_TRUE(fs::exists(w.path("s") / "reports" / "apriori_2_21.csv"));
  // a different seed no longer matches the stored solve
  EXPECT_EQ(run_cli("verify --quiet --seed 5 --config " + cfg.string() + out), 2);
}

TEST(Binary, ConvergeWritesTable) {
  Workdir w;
  const fs::path cfg = w.write("m.ini", R"(
[domain]
modes = 4
[forcing]
kind = manufactured
[converge]
levels = 8, 16
)");
  ASSERT_EQ(run_cli("converge --quiet --config " + cfg.string() + " --out " + w.path("c").string()), 0);
  std::ifstream csv(w.path("c") / "convergence.csv");
  std::string header, first, second;
  std::getline(csv, header);
  std::getline(csv, first);
  std::getline(csv, second);
  EXPECT_EQ(header, "Nt,N,error,order");
  EXPECT_EQ(first.substr(0, 2), "8,");
  EXPECT_EQ(second.substr(0, 3), "16,");
  const auto j = nlohmann::json::parse(slurp(w.path("c") / "convergence.json"));
  EXPECT_TRUE(j["monotone"].get<bool>());

  const fs::path zero = w.write("z.ini", kZeroScenario);
  EXPECT_EQ(run_cli("converge --quiet --config " + zero.string() + " --out " + w.path("z").string()), 2);
}

TEST(Binary, SelftestPrintsJson) {
  Workdir w;
  const std::string cmd = std::string(NSV_CLI) + " selftest --quiet > " + w.path("s.json").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  const auto j = nlohmann::json::parse(slurp(w.path("s.json")));
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_GE(j["checks"].size(), 4u);
}

TEST(Binary, ShippedConfigsParse) {
  for (const auto& e : fs::directory_iterator(NSV_CONFIGS))
    if (e.path().extension() == ".ini") {
      EXPECT_NO_THROW(load_scenario(e.path().string())) << e.path();
    }
}

}  // namespace
}  // namespace nsv::app
