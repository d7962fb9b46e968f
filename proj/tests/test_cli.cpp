#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "cvxpoly/problem_file.hpp"
#include "cvxpoly/serialize.hpp"

namespace {

using cvxpoly::cli::ExitCode;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "cvxpoly");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cvxpoly::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(CVXPOLY_DATA_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cvxpoly_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(CliSolve, DiskSingleShot) {
  const CliRun r = run({"solve", data("disk.json")});
  EXPECT_EQ(r.code, ExitCode::kOk) << r.err;
  EXPECT_NE(r.out.find("sos_convex_single_shot"), std::string::npos);
  EXPECT_NE(r.out.find("0.17157287"), std::string::npos) << r.out;
}

TEST(CliSolve, JsonReportReparses) {
  const CliRun r = run({"solve", data("disk.json"), "--json"});
  ASSERT_EQ(r.code, ExitCode::kOk);
  const cvxpoly::Json j = cvxpoly::parse_json(r.out);
  const cvxpoly::HierarchyReport rep = cvxpoly::hierarchy_report_from_json(j);
  EXPECT_EQ(cvxpoly::to_json(rep), j);
}

TEST(CliSolve, InputErrors) {
  const auto bad = scratch("malformed.json");
  std::ofstream(bad) << "{\"n\": 2, \"objective\": [";
  EXPECT_EQ(run({"solve", bad.string()}).code, ExitCode::kBadInput);
  EXPECT_EQ(run({"solve", data("quartic_r0.json")}).code, ExitCode::kBadInput);
  EXPECT_EQ(run({"solve", data("nope.json")}).code, ExitCode::kBadInput);
  EXPECT_EQ(run({"solve"}).code, ExitCode::kBadInput);
  EXPECT_EQ(run({"frobnicate", data("disk.json")}).code, ExitCode::kBadInput);
  EXPECT_EQ(run({"--help"}).code, ExitCode::kOk);
}

TEST(CliSolve, DumpSdpa) {
  const auto path = scratch("disk.sdpa");
  const CliRun r = run({"solve", data("disk.json"), "--dump-sdpa", path.string()});
  ASSERT_EQ(r.code, ExitCode::kOk);
  EXPECT_FALSE(slurp(path).empty());
}

TEST(CliCertify, HyperbolaDisk) {
  const CliRun r = run({"certify", data("hyperbola_disk.json")});
  EXPECT_EQ(r.code, ExitCode::kOk) << r.err;
  EXPECT_NE(r.out.find("rho_sdp"), std::string::npos);
  EXPECT_NE(r.out.find("quadratic_concave_shortcut"), std::string::npos);
  EXPECT_NE(r.out.find("certified_numerically"), std::string::npos);
  EXPECT_EQ(r.out.find("DEGENERATE"), std::string::npos);
}

TEST(CliCertify, CubedHyperbolaShowsDegenerateFlag) {
  const CliRun r = run({"certify", data("cubed_hyperbola.json")});
  EXPECT_NE(r.out.find("*** DEGENERATE: g1"), std::string::npos) << r.out;
}

TEST(CliCertify, MissingFile) {
  const CliRun r = run({"certify", data("missing.json")});
  EXPECT_EQ(r.code, ExitCode::kBadInput);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliCertify, Deterministic) {
  const CliRun a = run({"certify", data("hyperbola_disk.json"), "--json", "--dmax", "3"});
  const CliRun b = run({"certify", data("hyperbola_disk.json"), "--json", "--dmax", "3"});
  EXPECT_EQ(a.out, b.out);
  const cvxpoly::Json j = cvxpoly::parse_json(a.out);
  EXPECT_EQ(cvxpoly::to_json(cvxpoly::convexity_certificate_from_json(j, 2), 2), j);
}

TEST(CliSdr, CertifiedLiftWrittenToFile) {
  const auto path = scratch("omega.json");
  const CliRun r = run({"sdr", data("hyperbola_disk.json"), "--out", path.string()});
  ASSERT_EQ(r.code, ExitCode::kOk) << r.err;
  EXPECT_NE(r.out.find("s(6) = 28"), std::string::npos) << r.out;
  const cvxpoly::Json j = cvxpoly::parse_json(slurp(path));
  const cvxpoly::SdrRepresentation sdr = cvxpoly::sdr_from_json(j);
  EXPECT_EQ(sdr.lift_dimension, 28);
  EXPECT_EQ(cvxpoly::to_json(sdr), j);
}

TEST(CliSdr, RefusesWithoutCertificate) {
  const CliRun r = run({"sdr", data("cubed_hyperbola.json")});
  EXPECT_EQ(r.code, ExitCode::kRefused);
  EXPECT_NE(r.err.find("refusing"), std::string::npos);
  const CliRun forced = run({"sdr", data("cubed_hyperbola.json"), "--force", "--order", "3"});
  EXPECT_EQ(forced.code, ExitCode::kOk);
  EXPECT_NE(forced.err.find("warning"), std::string::npos);
}

TEST(CliJensen, FixtureHolds) {
  const CliRun r = run({"jensen", data("jensen.json")});
  EXPECT_EQ(r.code, ExitCode::kOk);
  EXPECT_NE(r.out.find("1 ≥ 0 : HOLDS"), std::string::npos) << r.out;
}

TEST(CliSosCheck, Motzkin) {
  const CliRun r = run({"sos-check", data("motzkin.json")});
  EXPECT_EQ(r.code, ExitCode::kOk);
  EXPECT_NE(r.out.find("SOS: no (infeasible)"), std::string::npos) << r.out;
}

TEST(CliProbe, CubedHyperbola) {
  const CliRun r = run({"probe", data("cubed_hyperbola.json"), "--seed", "7"});
  EXPECT_EQ(r.code, ExitCode::kOk);
  EXPECT_NE(r.out.find("g1: DEGENERATE"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("g2: nondegenerate"), std::string::npos);
}

}  // namespace
