#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli/cli.hpp"

using namespace finsler::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_line(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> args;
  for (std::string a; is >> a;) args.push_back(a);
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, ValidateExamples) {
  EXPECT_EQ(run_line("validate --metric linear --model flat-product").code, kPass);
  EXPECT_EQ(run_line("validate --metric cross02 --model polar-plane").code, kPass);
  const auto bad = run_line("validate --metric quartic-test");
  EXPECT_EQ(bad.code, kVerificationFailure);
  EXPECT_NE(bad.err.find("worst direction"), std::string::npos);
}

TEST(Cli, VerifyExamples) {
  EXPECT_EQ(run_line("verify example34 --model hopf-sphere").code, kPass);
  EXPECT_EQ(run_line("verify theorem41 --model polar-plane --metric cross02").code, kPass);
  EXPECT_EQ(run_line("verify lemma51 --metric cross02 --xi block-rotation:30deg").code, kPass);
  for (const char* t : {"theorem42", "example33", "lemma31", "lemma81", "prop32"}) {
    EXPECT_EQ(run_line(std::string("verify ") + t).code, kPass) << t;
  }
}

TEST(Cli, ClassifyExamples) {
  auto flags = [](const std::string& model) {
    const auto r = run_line("classify --model " + model);
    EXPECT_EQ(r.code, kPass);
    return json::parse(r.out)["result"]["flags"];
  };
  const json flat = flags("flat-product");
  EXPECT_EQ(flat, json({{"riemannian", false}, {"berwald", true}, {"landsberg", true}, {"s_vanishing", true}}));
  const json polar = flags("polar-plane");
  EXPECT_EQ(polar, json({{"riemannian", false}, {"berwald", false}, {"landsberg", false}, {"s_vanishing", false}}));
  const json hopf = flags("hopf-sphere");
  EXPECT_EQ(hopf, json({{"riemannian", false}, {"berwald", false}, {"landsberg", false}, {"s_vanishing", true}}));
}

TEST(Cli, CurvatureExamples) {
  const auto flat = json::parse(run_line("curvature --model flat-product --quantities G").out);
  EXPECT_EQ(flat["result"]["column_max_abs"]["G"], 0.0);
  const auto polar = json::parse(run_line("curvature --model polar-plane --quantities landsberg").out);
  EXPECT_GT(polar["result"]["column_max_abs"]["max_landsberg"].get<double>(), 1e-6);
  const auto hopf = json::parse(run_line("curvature --model hopf-sphere --quantities S --points 2 --directions 4").out);
  EXPECT_LT(hopf["result"]["column_max_abs"]["S"].get<double>(), hopf["result"]["S_noise_floor"].get<double>());
  EXPECT_EQ(run_line("curvature --quantities torsion").code, kConfigError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_line("verify nonsense").code, kConfigError);
  EXPECT_EQ(run_line("validate --model moebius").code, kConfigError);
  EXPECT_EQ(run_line("validate --format xml").code, kConfigError);
  EXPECT_EQ(run_line("validate --bogus-flag").code, kConfigError);
  EXPECT_EQ(run_line("verify lemma81 --metric linear").code, kConfigError);
  EXPECT_EQ(run_line("verify theorem41 --metric riemannian").code, kConfigError);
  // a point outside the polar chart (r = 0) makes evaluation fail
  const auto cfg = temp_file("finsler_origin.json", R"({"model": "polar-plane", "points": [[0.0, 0.0]]})");
  EXPECT_EQ(run_line("validate --config " + cfg).code, kConfigError);
  EXPECT_EQ(run_line("--help").code, kPass);
}

TEST(Cli, ReportsRoundTrip) {
  for (const char* line : {"validate --model polar-plane", "curvature --model hopf-sphere --points 1 --directions 2",
                           "classify --model polar-plane", "verify example33", "verify lemma81", "verify theorem42"}) {
    const auto r = run_line(line);
    const auto report = json::parse(r.out);
    EXPECT_EQ(check_report(report), "") << line;
    // the recorded config reproduces the report
    const auto cfg = temp_file("finsler_roundtrip.json", report["config"].dump());
    std::string cmd = report["command"].get<std::string>();
    if (report.contains("target")) cmd += " " + report["target"].get<std::string>();
    auto again = run_line(cmd + " --config " + cfg);
    if (report["config"]["model"] == "all built-in") {
      auto c = report["config"];
      c["model"] = nullptr;
      again = run_line(cmd + " --config " + temp_file("finsler_roundtrip.json", c.dump()));
    }
    EXPECT_EQ(again.out, r.out) << line;
  }
  EXPECT_NE(check_report(json::object()), "");
  EXPECT_NE(check_report(json({{"tool", "finsler"}})), "");
}

TEST(Cli, Deterministic) {
  const auto a = run_line("classify --model hopf-sphere --format csv");
  const auto b = run_line("classify --model hopf-sphere --format csv");
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "quantity,flag,residual,tolerance,noise_floor");
}

TEST(Cli, CsvAndOutFile) {
  const auto path = (std::filesystem::temp_directory_path() / "finsler_out.csv").string();
  const auto r = run_line("verify example34 --format csv --out " + path);
  EXPECT_EQ(r.code, kPass);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "group,check,value,expected,tolerance,passed");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 9);
}

TEST(Cli, ConfigDiagnostics) {
  const auto syntax = temp_file("finsler_bad.json", "{\n  \"model\": \"polar-plane\",\n  \"points\": [1, 2,\n}\n");
  const auto r = run_line("validate --config " + syntax);
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find(":4:"), std::string::npos) << r.err;
  const auto field = temp_file("finsler_field.json", R"({"directions": "many"})");
  const auto f = run_line("validate --config " + field);
  EXPECT_EQ(f.code, kConfigError);
  EXPECT_NE(f.err.find("'directions'"), std::string::npos);
  const auto unknown = temp_file("finsler_unknown.json", R"({"colour": 3})");
  EXPECT_NE(run_line("validate --config " + unknown).err.find("'colour'"), std::string::npos);
  const auto model = temp_file("finsler_model.json", R"({"model": {"n1": 1, "n2": 1, "alpha": [[1, 0], [0]]}})");
  const auto m = run_line("validate --config " + model);
  EXPECT_EQ(m.code, kConfigError);
}

TEST(Cli, PolynomialModelConfig) {
  // alpha = I, V2 spanned by (x2, 1): a tilted split of the plane
  const auto cfg = temp_file("finsler_poly.json", R"({
    "model": {"name": "tilted", "n1": 1, "n2": 1, "point": [0.1, 0.2],
              "alpha": [[1, 0], [0, 1]],
              "v2_frame": [[[{"c": 1, "e": [0, 1]}]], [1]]},
    "metric": {"kind": "alpha1-alpha2", "generator": "cross02"}
  })");
  EXPECT_EQ(run_line("validate --config " + cfg).code, kPass);
  const auto c = json::parse(run_line("classify --config " + cfg).out);
  EXPECT_FALSE(c["result"]["flags"]["berwald"].get<bool>());
  const auto randers = temp_file("finsler_randers.json", R"({
    "model": "flat-product", "metric": {"kind": "randers", "beta": [0.2, [{"c": 0.1, "e": [1, 0]}]]}})");
  EXPECT_EQ(run_line("validate --config " + randers).code, kPass);
}

TEST(Cli, FlagsOverrideConfig) {
  const auto cfg = temp_file("finsler_override.json", R"({"model": "polar-plane", "directions": 4})");
  const auto r = json::parse(run_line("validate --config " + cfg + " --directions 8").out);
  EXPECT_EQ(r["config"]["directions"], 8);
  EXPECT_EQ(r["config"]["model"], "polar-plane");
}

// property: formatted doubles parse back exactly
TEST(Cli, FormatDoubleRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(mant(rng), expo(rng));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-9), "1e-09");
}
