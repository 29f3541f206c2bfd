#include "dislokit/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace dislokit;

namespace {

RunConfig config_from(const std::string& text) {
  return parse_config(json::parse(text));
}

const char* kEnergyConfig = R"({
  "lattice": {"kind": "SC", "a": 1.0},
  "dislocations": {"plus": [[0.5, 0.5]]},
  "region": {"rho": 2.0, "n_outer": 8.0},
  "springs": {"k_p": 1.0, "k_d": 1.0}
})";

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string(::testing::TempDir()) + name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(DISLOKIT_BIN) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(ConfigParse, RejectsUnknownKeys) {
  EXPECT_THROW(config_from(R"({"lattice": {"kind": "SC", "a": 1, "typo": 3}})"),
               ConfigError);
  EXPECT_THROW(config_from(R"({"unexpected_section": {}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"region": {"rho": 1, "n_outer": 2, "x": 0}})"),
               ConfigError);
}

TEST(ConfigParse, RequiresExplicitLatticeConstant) {
  EXPECT_THROW(config_from(R"({"lattice": {"kind": "SC"}})"), ConfigError);
}

TEST(ConfigParse, ValidatesValues) {
  EXPECT_THROW(config_from(R"({"lattice": {"kind": "XX", "a": 1}})"),
               ConfigError);
  EXPECT_THROW(config_from(R"({"lattice": {"kind": "SC", "a": -1}})"),
               ConfigError);
  EXPECT_THROW(config_from(R"({"region": {"rho": 3, "n_outer": 2}})"),
               ConfigError);
  EXPECT_THROW(
      config_from(R"({"dislocations": {"plus": [[0, 0]], "minus": [[0, 0]]}})"),
      ConfigError);
  EXPECT_THROW(config_from(R"({"springs": {"k_d": 0}})"), ConfigError);
  EXPECT_NO_THROW(config_from(kEnergyConfig));
}

TEST(CmdGenerate, CsvListsOneRowPerHeight) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {},
    "generation": {"l1_range": [0, 2], "l2_range": [0, 2],
                   "height_window": [0.0, 0.75]}
  })");
  const std::string csv = cmd_generate(cfg);
  std::istringstream in(csv);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "sheet,l1,l2,x,y,z");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(0, 2), "0,");
  }
  EXPECT_EQ(rows, 9u);  // 9 columns x 1 height in a sub-period window
}

TEST(CmdGenerate, RoundTripReproducesSectionPhases) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]], "minus": [[-1.5, 0.25]]},
    "generation": {"l1_range": [-3, 3], "l2_range": [-3, 3],
                   "height_window": [-2.0, 2.0]}
  })");
  const std::string csv = cmd_generate(cfg);
  DislocationSet dis{{{0.5, 0.5}}, {{-1.5, 0.25}}};

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    double sheet, l1, l2, x, y, z;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &sheet, &l1,
                          &l2, &x, &y, &z),
              6);
    const double phase = section_value({x, y}, dis).phase;
    const double want = phase / kTwoPi;  // height in units of a, mod 1
    EXPECT_NEAR(std::remainder(z - want, 1.0), 0.0, 1e-9);
    ++rows;
  }
  EXPECT_GT(rows, 100u);
}

TEST(CmdGenerate, JsonMirrorsCsvRecords) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {},
    "generation": {"l1_range": [0, 1], "l2_range": [0, 0],
                   "height_window": [0.0, 0.0]},
    "output": {"format": "json"}
  })");
  const auto rows = json::parse(cmd_generate(cfg));
  ASSERT_TRUE(rows.is_array());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["sheet"], 0);
  EXPECT_EQ(rows[0]["l1"], 0);
  EXPECT_EQ(rows[1]["l1"], 1);
  EXPECT_EQ(rows[0]["z"], 0.0);
}

TEST(CmdGenerate, BccEmptySetInterleavesThreeSheets) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "BCC", "a": 1.0},
    "dislocations": {},
    "generation": {"l1_range": [0, 0], "l2_range": [0, 0],
                   "height_window": [0.0, 0.8]},
    "output": {"format": "json"}
  })");
  const auto rows = json::parse(cmd_generate(cfg));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["z"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(rows[1]["z"].get<double>(), std::sqrt(3.0) / 6.0);
  EXPECT_DOUBLE_EQ(rows[2]["z"].get<double>(), std::sqrt(3.0) / 3.0);
}

TEST(CmdEnergy, EmptySetReportsZeroWithoutZeta) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {},
    "region": {"rho": 2.0, "n_outer": 8.0, "center": [0.0, 0.0]}
  })");
  const auto report = json::parse(cmd_energy(cfg));
  EXPECT_EQ(report["exact"].get<double>(), 0.0);
  EXPECT_FALSE(report.contains("zeta_approx"));
  EXPECT_EQ(report["region_size"].get<std::size_t>(), 0u);
}

TEST(CmdEnergy, SingleCenterReportMatchesModules) {
  auto cfg = config_from(kEnergyConfig);
  const auto report = json::parse(cmd_energy(cfg));
  const double zeta = zeta_energy_approx({0.5, 0.5}, 1.0, 1.0, 2.0, 8.0);
  EXPECT_EQ(report["zeta_approx"].get<double>(), zeta);
  const auto members = annulus_members({{0.5, 0.5}, 2.0, 8.0, 1.0});
  EXPECT_EQ(report["region_size"].get<std::size_t>(), members.size());
  const double exact =
      exact_energy({{{0.5, 0.5}}, {}}, members, 1.0, {1.0, 1.0});
  EXPECT_EQ(report["exact"].get<double>(), exact);
  EXPECT_NEAR(report["relative_gap"].get<double>(),
              std::abs(exact - zeta) / exact, 1e-15);
  EXPECT_NEAR(report["continuum"].get<double>(),
              continuum_annulus_energy(1.0, 1.0, 2.0, 8.0), 1e-15);
}

TEST(CmdEnergy, ByteIdenticalAcrossThreadCounts) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "region": {"rho": 2.0, "n_outer": 60.0}
  })");
  cfg.threads = 1;
  const std::string r1 = cmd_energy(cfg);
  cfg.threads = 2;
  const std::string r2 = cmd_energy(cfg);
  cfg.threads = 8;
  const std::string r8 = cmd_energy(cfg);
  EXPECT_EQ(r1, r2);
  EXPECT_EQ(r1, r8);
}

TEST(CmdZeta, CsvColumns) {
  auto cfg = config_from(R"({
    "zeta": {"z0": [-0.5, -0.5], "rho": 1.0,
             "pairs": [[2.0, 2.0], [4.0, 2.0]]}
  })");
  const std::string csv = cmd_zeta(cfg);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "s,rho,n_outer,value,member_count");
  std::getline(in, line);
  EXPECT_EQ(line, "2,1,2,3.2,8");
  std::getline(in, line);
  EXPECT_EQ(line, "4,1,2,1.28,8");
}

TEST(CmdScan, SingleModeEmitsSlope) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "region": {"rho": 4.0, "n_outer": 256.0},
    "scan": {"mode": "single", "n_values": [32.0, 64.0, 128.0, 256.0]},
    "output": {"format": "json"}
  })");
  const auto out = json::parse(cmd_scan(cfg));
  ASSERT_TRUE(out.contains("slope"));
  const double expected = energy_prefactor(1.0, 1.0) * kTwoPi;
  EXPECT_NEAR(out["slope"].get<double>(), expected, 0.05 * expected);
  ASSERT_EQ(out["rows"].size(), 4u);
}

TEST(CmdScan, DipoleModeRatiosDecrease) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]], "minus": [[0.5, -0.5]]},
    "region": {"rho": 2.0, "n_outer": 80.0},
    "scan": {"mode": "dipole", "n_values": [10.0, 20.0, 40.0, 80.0]},
    "output": {"format": "json"}
  })");
  const auto out = json::parse(cmd_scan(cfg));
  const auto& rows = out["rows"];
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_GT(rows[1]["delta"].get<double>(), 0.0);
  EXPECT_LT(rows[2]["ratio"].get<double>(), 0.5);
  EXPECT_LT(rows[3]["ratio"].get<double>(), 0.5);
}

TEST(CmdMonodromy, RectangleAroundCenter) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "monodromy": {"rectangle": [-2, 3, -2, 3]}
  })");
  const auto report = json::parse(cmd_monodromy(cfg));
  EXPECT_EQ(report["winding"].get<int>(), 1);
  EXPECT_NEAR(report["gain"].get<double>(), 1.0, 1e-9);
  EXPECT_LT(report["distance_to_integer"].get<double>(), 1e-6);
}

TEST(CmdMonodromy, BccLoopGainsBurgersLength) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "BCC", "a": 1.0},
    "dislocations": {"plus": [[0.3, 0.4]]},
    "monodromy": {"rectangle": [-3, 2, -3, 2], "sheet": 1}
  })");
  const auto report = json::parse(cmd_monodromy(cfg));
  EXPECT_EQ(report["winding"].get<int>(), 1);
  EXPECT_NEAR(report["gain"].get<double>(), std::sqrt(3.0) / 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(report["fiber_period"].get<double>(), std::sqrt(3.0) / 2.0);
}

TEST(CmdMonodromy, ExplicitLoopList) {
  auto cfg = config_from(R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[10.5, 10.5]]},
    "monodromy": {"loop": [[0, 0, 0], [0, 1, 0], [0, 1, 1], [0, 0, 1],
                            [0, 0, 0]]}
  })");
  const auto report = json::parse(cmd_monodromy(cfg));
  EXPECT_EQ(report["winding"].get<int>(), 0);
}

// ---------------------------------------------------------------------------
// End-to-end runs of the installed binary: exit codes and file output.
// ---------------------------------------------------------------------------

TEST(CliBinary, GenerateWritesFileAndExitsZero) {
  const std::string cfg = write_temp("gen_ok.json", R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "generation": {"l1_range": [-2, 2], "l2_range": [-2, 2],
                   "height_window": [-1.0, 1.0]}
  })");
  const std::string out = std::string(::testing::TempDir()) + "gen_ok.csv";
  ASSERT_EQ(run_binary("generate --config " + cfg + " --output " + out), 0);
  std::ifstream in(out);
  ASSERT_TRUE(in.good());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "sheet,l1,l2,x,y,z");
}

TEST(CliBinary, ExitCodeIsTwoOnBadConfig) {
  const std::string cfg = write_temp("bad.json", R"({"nonsense": true})");
  EXPECT_EQ(run_binary("energy --config " + cfg), 2);
  EXPECT_EQ(run_binary("energy"), 2);
  EXPECT_EQ(run_binary("frobnicate --config " + cfg), 2);
}

TEST(CliBinary, ExitCodeIsThreeOnCenterHit) {
  const std::string cfg = write_temp("hit.json", R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[1.0, 0.0]]},
    "generation": {"l1_range": [-2, 2], "l2_range": [-2, 2],
                   "height_window": [-1.0, 1.0]}
  })");
  EXPECT_EQ(run_binary("generate --config " + cfg), 3);
}

TEST(CliBinary, ExitCodeIsFourOnBccEnergy) {
  const std::string cfg = write_temp("bcc_energy.json", R"({
    "lattice": {"kind": "BCC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "region": {"rho": 2.0, "n_outer": 8.0}
  })");
  EXPECT_EQ(run_binary("energy --config " + cfg), 4);
}

TEST(CliBinary, ExitCodeIsFiveOnHypothesisViolation) {
  const std::string cfg = write_temp("hyp.json", R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 1.5]], "minus": [[0.5, -1.5]]},
    "region": {"rho": 2.0, "n_outer": 16.0}
  })");
  EXPECT_EQ(run_binary("energy --config " + cfg), 5);
}

TEST(CliBinary, RepeatedRunsAreByteIdentical) {
  const std::string cfg = write_temp("det.json", R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "region": {"rho": 2.0, "n_outer": 20.0}
  })");
  const std::string out1 = std::string(::testing::TempDir()) + "det1.json";
  const std::string out2 = std::string(::testing::TempDir()) + "det2.json";
  ASSERT_EQ(run_binary("energy --config " + cfg + " --output " + out1 +
                       " --threads 1"),
            0);
  ASSERT_EQ(run_binary("energy --config " + cfg + " --output " + out2 +
                       " --threads 2"),
            0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(sa.str().empty());
}

TEST(CliBinary, SampleConfigsAllRun) {
  const struct {
    const char* command;
    const char* file;
  } samples[] = {
      {"generate", "generate_sc_single.json"},
      {"generate", "generate_bcc_dipole.json"},
      {"energy", "energy_single.json"},
      {"energy", "energy_dipole.json"},
      {"zeta", "zeta_table.json"},
      {"scan", "scan_single.json"},
      {"scan", "scan_dipole.json"},
      {"monodromy", "monodromy_rectangle.json"},
  };
  for (const auto& s : samples) {
    const std::string out =
        std::string(::testing::TempDir()) + "sample_" + s.file + ".out";
    EXPECT_EQ(run_binary(std::string(s.command) + " --config " +
                         DISLOKIT_CONFIG_DIR "/" + s.file + " --output " + out),
              0)
        << s.file;
  }
}

TEST(CliBinary, ThreadsEnvFallbackKeepsBytes) {
  const std::string cfg = write_temp("envthreads.json", R"({
    "lattice": {"kind": "SC", "a": 1.0},
    "dislocations": {"plus": [[0.5, 0.5]]},
    "region": {"rho": 2.0, "n_outer": 20.0}
  })");
  const std::string out1 = std::string(::testing::TempDir()) + "env1.json";
  const std::string out2 = std::string(::testing::TempDir()) + "env2.json";
  ASSERT_EQ(run_binary("energy --config " + cfg + " --output " + out1), 0);
  const std::string env_cmd = "DISLOKIT_THREADS=4 " + std::string(DISLOKIT_BIN) +
                              " energy --config " + cfg + " --output " + out2 +
                              " 2>/dev/null";
  ASSERT_EQ(WEXITSTATUS(std::system(env_cmd.c_str())), 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 rng(5551212);
  std::uniform_real_distribution<double> mag(-30.0, 30.0);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = mant(rng) * std::pow(10.0, mag(rng));
    const std::string s = format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
    EXPECT_EQ(s.find(','), std::string::npos);
  }
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(3.2), "3.2");
}

TEST(ExitCodes, StableMapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
  EXPECT_EQ(exit_code_for(DislocationCenterHit("x", {0, 0})), 3);
  EXPECT_EQ(exit_code_for(UnsupportedLattice("x")), 4);
  EXPECT_EQ(exit_code_for(HypothesisViolated("x")), 5);
  EXPECT_EQ(exit_code_for(StepTooCoarse("x")), 6);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}
