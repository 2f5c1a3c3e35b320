#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "canonical_json.hpp"
#include "commands.hpp"

using namespace hardy;
using namespace hardy::cli;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(std::string const& args) {
  std::string const cmd = std::string(HARDY_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int const status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(std::string const& name) {
  return std::filesystem::temp_directory_path() / ("hardy_test_" + name);
}

ParamFlags flags(int N, std::optional<double> p, bool critical, double lambda) {
  ParamFlags f;
  f.N = N;
  f.p = p;
  f.critical = critical;
  f.lambda = lambda;
  return f;
}

}  // namespace

TEST(CanonicalJson, FormatAndRoundTrip) {
  EXPECT_EQ(io::format_double(1.0), "1.000000000000e+00");
  EXPECT_EQ(io::format_double(-0.5), "-5.000000000000e-01");
  EXPECT_EQ(io::format_double(std::nan("")), "null");
  io::json j;
  j["zeta"] = 3;
  j["alpha"] = {1.5, 2, "x"};
  j["mid"] = {{"b", true}, {"a", nullptr}};
  std::string const s = io::to_canonical(j);
  EXPECT_LT(s.find("\"alpha\""), s.find("\"mid\""));
  EXPECT_LT(s.find("\"mid\""), s.find("\"zeta\""));
  EXPECT_NE(s.find("\"zeta\": 3\n"), std::string::npos);
  EXPECT_NE(s.find("    1.500000000000e+00"), std::string::npos);
  EXPECT_EQ(io::to_canonical(io::json::parse(s)), s);
}

TEST(ParamFlagsTest, ExponentSelection) {
  EXPECT_DOUBLE_EQ(flags(4, std::nullopt, true, -1).exponent(), 3.0);
  EXPECT_DOUBLE_EQ(flags(4, 2.0, false, -1).exponent(), 2.0);
  EXPECT_DOUBLE_EQ(flags(4, 3.0, true, -1).exponent(), 3.0);
  EXPECT_THROW(flags(4, 2.0, true, -1).exponent(), ParameterError);
  EXPECT_THROW(flags(4, std::nullopt, false, -1).exponent(), ParameterError);
  EXPECT_THROW(flags(2, 2.0, false, -1).exponent(), ParameterError);
}

TEST(Commands, Params) {
  std::ostringstream os;
  EXPECT_EQ(cmd_params(flags(4, 2.0, false, -1.0), os), Exit::ok);
  io::json const j = io::json::parse(os.str());
  EXPECT_NEAR(j["b"].get<double>(), 0.8284271247462, 1e-12);
  EXPECT_NEAR(j["M"].get<double>(), 4.3431457505076, 1e-12);
  EXPECT_FALSE(j.contains("C_lambda"));
  std::ostringstream oc;
  cmd_params(flags(4, std::nullopt, true, 0.0), oc);
  EXPECT_NEAR(io::json::parse(oc.str())["C_lambda"].get<double>(), 8.0, 1e-12);
}

TEST(Commands, CriticalSpectrum) {
  std::ostringstream os;
  EXPECT_EQ(cmd_critical_spectrum(3, 3, os), Exit::ok);
  std::string const s = os.str();
  EXPECT_NE(s.find("j,lambda_j,mu_j,mult,morse_below,morse_above,note\n"), std::string::npos);
  EXPECT_NE(s.find("\n2,-5.000000000000e-01,6,5,4,9,\n"), std::string::npos);
  EXPECT_THROW(cmd_critical_spectrum(3, -1, os), ParameterError);
}

TEST(Commands, Radial) {
  RadialFlags f;
  f.params = flags(4, 2.0, false, -1.0);
  f.grid = 64;
  std::ostringstream csv;
  io::json const side = cmd_radial(f, csv);
  std::istringstream in(csv.str());
  std::string line;
  while (std::getline(in, line) && line.rfind('#', 0) == 0) {
  }
  EXPECT_EQ(line, "r,v,u");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 64);
  EXPECT_NEAR(side["alpha"].get<double>(), 77.4182816866433, 1e-7);
  RadialFlags c;
  c.params = flags(4, std::nullopt, true, -1.0);
  EXPECT_THROW(cmd_radial(c, csv), ParameterError);
}

TEST(Commands, VerifyExitCodes) {
  VerifyFlags f;
  f.params = flags(4, std::nullopt, true, -1.0);
  std::ostringstream os;
  EXPECT_EQ(cmd_verify(f, os), Exit::ok);
  EXPECT_TRUE(io::json::parse(os.str())["all_pass"].get<bool>());
  f.options.grid_n = 64;
  std::ostringstream bad;
  EXPECT_EQ(cmd_verify(f, bad), Exit::verification_failed);
}

TEST(Commands, LambdaRange) {
  LambdaRange const r = parse_lambda_range("-0.6:-0.1:3");
  ASSERT_EQ(r.values().size(), 3u);
  EXPECT_DOUBLE_EQ(r.values()[1], -0.35);
  EXPECT_EQ(parse_lambda_range("-1:-1:1").values().size(), 1u);
  EXPECT_THROW(parse_lambda_range("-0.1:-0.6:3"), ParameterError);
  EXPECT_THROW(parse_lambda_range("-0.6:-0.1"), ParameterError);
  EXPECT_THROW(parse_lambda_range("-0.6:-0.1:0"), ParameterError);
  EXPECT_THROW(parse_lambda_range("a:b:c"), ParameterError);
}

TEST(Commands, DiagramCritical) {
  DiagramFlags f;
  f.params = flags(3, std::nullopt, true, 0.0);
  f.lambda_range = "-0.6:-0.1:3";
  std::ostringstream os;
  EXPECT_EQ(cmd_diagram(f, os), Exit::ok);
  std::string const s = os.str();
  EXPECT_NE(s.find("lambda,nu,b,M,A,Lambda,L,morse,degenerate,error\n"), std::string::npos);
  EXPECT_NE(s.find("\n-6.000000000000e-01,"), std::string::npos);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run("params --N 4 --p 2 --lambda -1").code, 0);
  EXPECT_EQ(run("params --N 4 --p 9 --lambda -1").code, 2);
  EXPECT_EQ(run("params --N 4 --p 2 --lambda 5").code, 2);
  EXPECT_EQ(run("params --N 4 --lambda -1").code, 2);
  EXPECT_EQ(run("params --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("radial --N 4 --critical --lambda -1").code, 2);
  EXPECT_EQ(run("verify --N 4 --critical --lambda -1 --grid 64").code, 1);
  EXPECT_EQ(run("bifurcate --N 4 --p 2 --k-range x..y").code, 2);
}

TEST(Binary, FailedDegreeExitsFour) {
  // a per-degree failure is reported in the record, not thrown
  Outcome const r = run("bifurcate --N 4 --p 2 --k-range 1 --mesh 10");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("\"error\""), std::string::npos);
}

TEST(Binary, KRangeForms) {
  Outcome const a = run("bifurcate --N 4 --p 2 --k-range 1..2 --mesh 300 --scan-n 40");
  Outcome const b = run("bifurcate --N 4 --p 2 --k-range 1:2 --mesh 300 --scan-n 40");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  io::json const j = io::json::parse(a.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["k"].get<int>(), 1);
  EXPECT_EQ(j[1]["k"].get<int>(), 2);
  Outcome const single = run("bifurcate --N 4 --p 2 --k-range 2 --mesh 300 --scan-n 40");
  EXPECT_EQ(io::json::parse(single.out).size(), 1u);
}

TEST(Binary, ConfigFileAndPrecedence) {
  auto const cfg = temp_file("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"N": 4, "p": 2, "lambda": -1})";
  }
  Outcome const fromfile = run("params --config " + cfg.string());
  Outcome const direct = run("params --N 4 --p 2 --lambda -1");
  EXPECT_EQ(fromfile.code, 0);
  EXPECT_EQ(fromfile.out, direct.out);
  Outcome const override = run("params --config " + cfg.string() + " --lambda -2");
  EXPECT_EQ(override.out, run("params --N 4 --p 2 --lambda -2").out);
  {
    std::ofstream f(cfg);
    f << "[1, 2]";
  }
  EXPECT_EQ(run("params --config " + cfg.string()).code, 2);
  EXPECT_EQ(run("params --config /nonexistent/file.json").code, 2);
  std::filesystem::remove(cfg);
}

TEST(Binary, RadialWritesSidecar) {
  auto const csv = temp_file("radial.csv");
  Outcome const r = run("radial --N 4 --p 2 --lambda -1 --grid 32 --output " + csv.string());
  EXPECT_EQ(r.code, 0);
  std::ifstream side(csv.string() + ".json");
  ASSERT_TRUE(side.good());
  io::json const j = io::json::parse(side);
  EXPECT_EQ(j["grid"].get<int>(), 32);
  std::filesystem::remove(csv);
  std::filesystem::remove(csv.string() + ".json");
}

TEST(Binary, Deterministic) {
  for (std::string const args : {"params --N 5 --p 2 --lambda -3", "critical-spectrum --N 4 --j-max 5",
                                 "diagram --N 3 --critical --lambda-range -0.6:-0.1:3"}) {
    Outcome const a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_FALSE(a.out.empty());
  }
}
